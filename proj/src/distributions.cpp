#include "polya/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include "polya/errors.hpp"
#include "polya/quadrature.hpp"
#include "polya/specfun.hpp"
#include "text_util.hpp"

namespace polya {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

using specfun::log_gamma;
using specfun::regularized_lower_gamma;
using specfun::regularized_upper_gamma;

constexpr double kSqrtPi = 1.7724538509055160273;
constexpr double kSqrt2 = std::numbers::sqrt2;

void require(bool ok, const char* what) {
    if (!ok) throw DomainError(what);
}

void validate(const DistributionLaw& law) {
    std::visit(Overloaded{
                   [](const ShiftedPoisson& p) { require(p.mu > 0.0 && std::isfinite(p.mu), "poisson: mu must be > 0"); },
                   [](const GammaDist& g) {
                       require(g.shape > 0.0 && std::isfinite(g.shape), "gamma: s must be > 0");
                       require(g.scale > 0.0 && std::isfinite(g.scale), "gamma: theta must be > 0");
                   },
                   [](const Nakagami& n) {
                       require(n.m >= 0.5 && std::isfinite(n.m), "nakagami: m must be >= 1/2");
                       require(n.omega > 0.0 && std::isfinite(n.omega), "nakagami: omega must be > 0");
                   },
                   [](const Weibull& w) {
                       require(w.shape > 0.0 && std::isfinite(w.shape), "weibull: alpha must be > 0");
                       require(w.scale > 0.0 && std::isfinite(w.scale), "weibull: theta must be > 0");
                   },
                   [](const Exponential& e) { require(e.scale > 0.0 && std::isfinite(e.scale), "exp: theta must be > 0"); },
                   [](const ChiSquare& c) { require(c.nu >= 1, "chi2: nu must be an integer >= 1"); },
                   [](const Chi& c) { require(c.nu >= 1, "chi: nu must be an integer >= 1"); },
                   [](const HalfNormal& h) { require(h.sigma > 0.0 && std::isfinite(h.sigma), "halfnormal: sigma must be > 0"); },
                   [](const Rayleigh& r) { require(r.sigma > 0.0 && std::isfinite(r.sigma), "rayleigh: sigma must be > 0"); },
               },
               law);
}

// Draw from Gamma(shape, 1): Marsaglia-Tsang, with the U^{1/s} boost below shape 1.
double standard_gamma(double shape, RandomStream& rng) {
    if (shape < 1.0) {
        const double boost = std::pow(rng.uniform_open(), 1.0 / shape);
        return standard_gamma(shape + 1.0, rng) * boost;
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    while (true) {
        double x = 0.0;
        double v = 0.0;
        do {
            x = rng.normal();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = rng.uniform_open();
        if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
        if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
}

// Poisson(mu) on {0, 1, ...}: sequential inversion for small mu, Hormann's
// transformed rejection with squeeze (PTRS) above 30.
double poisson_draw(double mu, RandomStream& rng) {
    if (mu <= 30.0) {
        const double u = rng.uniform();
        double p = std::exp(-mu);
        double acc = p;
        double k = 0.0;
        while (u > acc && k < 1000.0) {
            k += 1.0;
            p *= mu / k;
            acc += p;
        }
        return k;
    }
    const double slam = std::sqrt(mu);
    const double loglam = std::log(mu);
    const double b = 0.931 + 2.53 * slam;
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double vr = 0.9277 - 3.6224 / (b - 2.0);
    while (true) {
        const double u = rng.uniform() - 0.5;
        const double v = rng.uniform();
        const double us = 0.5 - std::abs(u);
        const double k = std::floor((2.0 * a / us + b) * u + mu + 0.43);
        if (us >= 0.07 && v <= vr) return k;
        if (k < 0.0 || (us < 0.013 && v > us)) continue;
        if (std::log(v) + std::log(inv_alpha) - std::log(a / (us * us) + b) <= -mu + k * loglam - log_gamma(k + 1.0)) {
            return k;
        }
    }
}

double bisect_cutoff(const DistributionSpec& d, double tail) {
    double hi = std::max(1.0, mean(d));
    int guard = 0;
    while (survival(d, hi) > tail && guard++ < 2000) hi *= 2.0;
    double lo = 0.0;
    for (int i = 0; i < 200 && hi - lo > 1e-12 * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        (survival(d, mid) > tail ? lo : hi) = mid;
    }
    return hi;
}

}  // namespace

DistributionSpec::DistributionSpec(DistributionLaw law) : law_(law) { validate(law_); }

std::string DistributionSpec::family_name() const {
    return std::visit(Overloaded{
                          [](const ShiftedPoisson&) { return std::string("poisson"); },
                          [](const GammaDist&) { return std::string("gamma"); },
                          [](const Nakagami&) { return std::string("nakagami"); },
                          [](const Weibull&) { return std::string("weibull"); },
                          [](const Exponential&) { return std::string("exp"); },
                          [](const ChiSquare&) { return std::string("chi2"); },
                          [](const Chi&) { return std::string("chi"); },
                          [](const HalfNormal&) { return std::string("halfnormal"); },
                          [](const Rayleigh&) { return std::string("rayleigh"); },
                      },
                      law_);
}

std::string DistributionSpec::to_string() const {
    using text::format_double;
    const std::string body = std::visit(
        Overloaded{
            [](const ShiftedPoisson& p) { return "mu=" + format_double(p.mu); },
            [](const GammaDist& g) { return "s=" + format_double(g.shape) + ",theta=" + format_double(g.scale); },
            [](const Nakagami& n) { return "m=" + format_double(n.m) + ",omega=" + format_double(n.omega); },
            [](const Weibull& w) { return "alpha=" + format_double(w.shape) + ",theta=" + format_double(w.scale); },
            [](const Exponential& e) { return "theta=" + format_double(e.scale); },
            [](const ChiSquare& c) { return "nu=" + std::to_string(c.nu); },
            [](const Chi& c) { return "nu=" + std::to_string(c.nu); },
            [](const HalfNormal& h) { return "sigma=" + format_double(h.sigma); },
            [](const Rayleigh& r) { return "sigma=" + format_double(r.sigma); },
        },
        law_);
    return family_name() + ":" + body;
}

DistributionSpec DistributionSpec::parse(std::string_view input) {
    const std::string_view spec = text::trim(input);
    const auto colon = spec.find(':');
    std::string family(text::trim(spec.substr(0, colon)));
    std::transform(family.begin(), family.end(), family.begin(), [](unsigned char c) { return std::tolower(c); });

    std::map<std::string, double> params;
    if (colon != std::string_view::npos) {
        for (std::string_view item : text::split(spec.substr(colon + 1), ',')) {
            item = text::trim(item);
            if (item.empty()) continue;
            const auto eq = item.find('=');
            if (eq == std::string_view::npos) throw ParseError("distribution parameter '" + std::string(item) + "' lacks '='");
            const std::string key(text::trim(item.substr(0, eq)));
            const auto value = text::parse_double(item.substr(eq + 1));
            if (!value) throw ParseError("distribution parameter '" + key + "' is not a number");
            params[key] = *value;
        }
    }

    auto take = [&](std::initializer_list<const char*> names, std::optional<double> fallback) -> double {
        for (const char* name : names) {
            if (auto it = params.find(name); it != params.end()) {
                const double v = it->second;
                params.erase(it);
                return v;
            }
        }
        if (!fallback) throw ParseError(family + ": missing parameter '" + *names.begin() + "'");
        return *fallback;
    };
    auto take_int = [&](const char* name) {
        const double v = take({name}, std::nullopt);
        if (v != std::floor(v)) throw ParseError(family + ": '" + name + "' must be an integer");
        return static_cast<int>(v);
    };

    DistributionLaw law;
    if (family == "poisson" || family == "shifted_poisson") {
        law = ShiftedPoisson{take({"mu"}, std::nullopt)};
    } else if (family == "gamma") {
        const double s = take({"s", "shape"}, std::nullopt);
        law = GammaDist{s, take({"theta", "scale"}, 1.0)};
    } else if (family == "nakagami") {
        const double m = take({"m"}, std::nullopt);
        law = Nakagami{m, take({"omega"}, 1.0)};
    } else if (family == "weibull") {
        const double alpha = take({"alpha", "shape"}, std::nullopt);
        law = Weibull{alpha, take({"theta", "scale"}, 1.0)};
    } else if (family == "exp" || family == "exponential") {
        law = Exponential{take({"theta", "scale"}, 1.0)};
    } else if (family == "chi2" || family == "chisquare") {
        law = ChiSquare{take_int("nu")};
    } else if (family == "chi") {
        law = Chi{take_int("nu")};
    } else if (family == "halfnormal" || family == "half_normal" || family == "hn") {
        law = HalfNormal{take({"sigma"}, 1.0)};
    } else if (family == "rayleigh") {
        law = Rayleigh{take({"sigma"}, 1.0)};
    } else {
        throw ParseError("unknown distribution family '" + family + "'");
    }
    if (!params.empty()) throw ParseError(family + ": unknown parameter '" + params.begin()->first + "'");
    return DistributionSpec(law);
}

double density(const DistributionSpec& d, double x) {
    if (!(x > 0.0)) throw DomainError("density: x must be > 0");
    return std::visit(
        Overloaded{
            [x](const ShiftedPoisson& p) {
                if (x != std::floor(x)) return 0.0;
                return std::exp((x - 1.0) * std::log(p.mu) - p.mu - log_gamma(x));
            },
            [x](const GammaDist& g) {
                return std::exp((g.shape - 1.0) * std::log(x) - x / g.scale - log_gamma(g.shape) -
                                g.shape * std::log(g.scale));
            },
            [x](const Nakagami& n) {
                return std::exp(std::log(2.0) + n.m * std::log(n.m) + (2.0 * n.m - 1.0) * std::log(x) -
                                n.m * x * x / n.omega - log_gamma(n.m) - n.m * std::log(n.omega));
            },
            [x](const Weibull& w) {
                const double z = x / w.scale;
                return w.shape / w.scale * std::pow(z, w.shape - 1.0) * std::exp(-std::pow(z, w.shape));
            },
            [x](const Exponential& e) { return std::exp(-x / e.scale) / e.scale; },
            [x](const ChiSquare& c) {
                const double k = 0.5 * c.nu;
                return std::exp((k - 1.0) * std::log(x) - 0.5 * x - log_gamma(k) - k * std::log(2.0));
            },
            [x](const Chi& c) {
                const double k = 0.5 * c.nu;
                return std::exp((1.0 - k) * std::log(2.0) - log_gamma(k) + (c.nu - 1.0) * std::log(x) - 0.5 * x * x);
            },
            [x](const HalfNormal& h) {
                return kSqrt2 / (h.sigma * kSqrtPi) * std::exp(-x * x / (2.0 * h.sigma * h.sigma));
            },
            [x](const Rayleigh& r) {
                const double s2 = r.sigma * r.sigma;
                return x / s2 * std::exp(-x * x / (2.0 * s2));
            },
        },
        d.law());
}

double cdf(const DistributionSpec& d, double x) {
    if (!(x > 0.0)) return 0.0;
    if (std::isinf(x)) return 1.0;
    return std::visit(Overloaded{
                          [x](const ShiftedPoisson& p) {
                              const double n = std::floor(x);
                              return n < 1.0 ? 0.0 : regularized_upper_gamma(n, p.mu);
                          },
                          [x](const GammaDist& g) { return regularized_lower_gamma(g.shape, x / g.scale); },
                          [x](const Nakagami& n) { return regularized_lower_gamma(n.m, n.m * x * x / n.omega); },
                          [x](const Weibull& w) { return -std::expm1(-std::pow(x / w.scale, w.shape)); },
                          [x](const Exponential& e) { return -std::expm1(-x / e.scale); },
                          [x](const ChiSquare& c) { return regularized_lower_gamma(0.5 * c.nu, 0.5 * x); },
                          [x](const Chi& c) { return regularized_lower_gamma(0.5 * c.nu, 0.5 * x * x); },
                          [x](const HalfNormal& h) { return specfun::erf(x / (h.sigma * kSqrt2)); },
                          [x](const Rayleigh& r) { return -std::expm1(-x * x / (2.0 * r.sigma * r.sigma)); },
                      },
                      d.law());
}

double survival(const DistributionSpec& d, double x) {
    if (!(x > 0.0)) return 1.0;
    if (std::isinf(x)) return 0.0;
    return std::visit(Overloaded{
                          [x](const ShiftedPoisson& p) {
                              const double n = std::floor(x);
                              return n < 1.0 ? 1.0 : regularized_lower_gamma(n, p.mu);
                          },
                          [x](const GammaDist& g) { return regularized_upper_gamma(g.shape, x / g.scale); },
                          [x](const Nakagami& n) { return regularized_upper_gamma(n.m, n.m * x * x / n.omega); },
                          [x](const Weibull& w) { return std::exp(-std::pow(x / w.scale, w.shape)); },
                          [x](const Exponential& e) { return std::exp(-x / e.scale); },
                          [x](const ChiSquare& c) { return regularized_upper_gamma(0.5 * c.nu, 0.5 * x); },
                          [x](const Chi& c) { return regularized_upper_gamma(0.5 * c.nu, 0.5 * x * x); },
                          [x](const HalfNormal& h) { return specfun::erfc(x / (h.sigma * kSqrt2)); },
                          [x](const Rayleigh& r) { return std::exp(-x * x / (2.0 * r.sigma * r.sigma)); },
                      },
                      d.law());
}

double mean(const DistributionSpec& d) {
    return std::visit(Overloaded{
                          [](const ShiftedPoisson& p) { return p.mu + 1.0; },
                          [](const GammaDist& g) { return g.scale * g.shape; },
                          [](const Nakagami& n) {
                              return std::exp(log_gamma(n.m + 0.5) - log_gamma(n.m)) * std::sqrt(n.omega / n.m);
                          },
                          [](const Weibull& w) { return w.scale * specfun::gamma_fn(1.0 + 1.0 / w.shape); },
                          [](const Exponential& e) { return e.scale; },
                          [](const ChiSquare& c) { return static_cast<double>(c.nu); },
                          [](const Chi& c) {
                              return kSqrt2 * std::exp(log_gamma(0.5 * (c.nu + 1.0)) - log_gamma(0.5 * c.nu));
                          },
                          [](const HalfNormal& h) { return h.sigma * kSqrt2 / kSqrtPi; },
                          [](const Rayleigh& r) { return r.sigma * std::sqrt(std::numbers::pi / 2.0); },
                      },
                      d.law());
}

double sample(const DistributionSpec& d, RandomStream& rng) {
    return std::visit(Overloaded{
                          [&](const ShiftedPoisson& p) { return 1.0 + poisson_draw(p.mu, rng); },
                          [&](const GammaDist& g) { return g.scale * standard_gamma(g.shape, rng); },
                          [&](const Nakagami& n) { return std::sqrt(standard_gamma(n.m, rng) * n.omega / n.m); },
                          [&](const Weibull& w) { return w.scale * std::pow(-std::log(rng.uniform_open()), 1.0 / w.shape); },
                          [&](const Exponential& e) { return -e.scale * std::log(rng.uniform_open()); },
                          [&](const ChiSquare& c) { return 2.0 * standard_gamma(0.5 * c.nu, rng); },
                          [&](const Chi& c) { return std::sqrt(2.0 * standard_gamma(0.5 * c.nu, rng)); },
                          [&](const HalfNormal& h) { return h.sigma * std::abs(rng.normal()); },
                          [&](const Rayleigh& r) { return r.sigma * std::sqrt(-2.0 * std::log(rng.uniform_open())); },
                      },
                      d.law());
}

double upper_cutoff(const DistributionSpec& d, double tail) {
    if (const auto* p = d.get_if<ShiftedPoisson>()) {
        double n = 1.0;
        while (regularized_lower_gamma(n, p->mu) > tail) n += 1.0;
        return n;
    }
    return bisect_cutoff(d, tail);
}

std::vector<Atom> atoms(const DistributionSpec& d, double tail) {
    const auto* p = d.get_if<ShiftedPoisson>();
    if (!p) throw DomainError("atoms: distribution is not discrete");
    std::vector<Atom> out;
    double remaining = 1.0;
    for (double x = 1.0; remaining > tail; x += 1.0) {
        out.push_back({x, density(d, x)});
        remaining = regularized_lower_gamma(x, p->mu);  // Pr(X > x)
    }
    return out;
}

double aux_draw(const AuxLaw& law, RandomStream& rng) {
    if (law.kind == AuxKind::Cauchy) return law.scale * std::tan(std::numbers::pi * (rng.uniform_open() - 0.5));
    return law.scale * rng.normal();
}

std::vector<double> aux_sample(const AuxLaw& law, std::size_t dim, RandomStream& rng) {
    if (!(law.scale > 0.0)) throw DomainError("aux_sample: scale must be > 0");
    std::vector<double> out(dim);
    for (double& v : out) v = aux_draw(law, rng);
    return out;
}

NumericCdf::NumericCdf(std::function<double(double)> dens, double upper) {
    auto impl = std::make_shared<Impl>();
    impl->density = std::move(dens);
    impl->upper = upper;
    constexpr int kPanels = 64;
    impl->knots.resize(kPanels + 1);
    impl->cumulative.assign(kPanels + 1, 0.0);
    const quad::Options opts{1e-13, 1e-12, 4000};
    for (int i = 0; i <= kPanels; ++i) impl->knots[i] = upper * i / kPanels;
    for (int i = 1; i <= kPanels; ++i) {
        impl->cumulative[i] =
            impl->cumulative[i - 1] + quad::integrate(impl->density, impl->knots[i - 1], impl->knots[i], opts).value;
    }
    impl_ = std::move(impl);
}

double NumericCdf::operator()(double x) const {
    if (!(x > 0.0)) return 0.0;
    if (x >= impl_->upper) return std::min(1.0, impl_->cumulative.back());
    const auto it = std::upper_bound(impl_->knots.begin(), impl_->knots.end(), x);
    const std::size_t i = static_cast<std::size_t>(it - impl_->knots.begin()) - 1;
    const quad::Options opts{1e-13, 1e-12, 4000};
    const double partial = quad::integrate(impl_->density, impl_->knots[i], x, opts).value;
    return std::clamp(impl_->cumulative[i] + partial, 0.0, 1.0);
}

SpecialCaseDecomposition decompose(const DistributionSpec& d) {
    auto numeric = [&d](double c) {
        auto tilted_density = [d, c](double x) { return x > 0.0 ? density(d, x) / (c * x) : 0.0; };
        return SpecialCaseDecomposition{c, NumericCdf(tilted_density, upper_cutoff(d, 1e-16))};
    };
    auto infinite = [](const char* family) -> SpecialCaseDecomposition {
        throw DomainError(std::string("decompose: C = E[1/X] is infinite for ") + family);
    };
    return std::visit(
        Overloaded{
            [](const ShiftedPoisson& p) { return SpecialCaseDecomposition{1.0 / p.mu, PoissonLaw{p.mu}}; },
            [&](const GammaDist& g) {
                if (g.shape <= 1.0) return infinite("gamma with s <= 1");
                return SpecialCaseDecomposition{1.0 / ((g.shape - 1.0) * g.scale),
                                                DistributionSpec(GammaDist{g.shape - 1.0, g.scale})};
            },
            [&](const Nakagami& n) {
                if (n.m <= 0.5) return infinite("nakagami with m = 1/2");
                const double c = std::sqrt(n.m / n.omega) * std::exp(log_gamma(n.m - 0.5) - log_gamma(n.m));
                if (n.m < 1.0) return numeric(c);
                // Nakagami(m, omega) is a rescaled chi with nu = 2m; tilting lowers nu by one.
                return SpecialCaseDecomposition{
                    c, DistributionSpec(Nakagami{n.m - 0.5, n.omega * (2.0 * n.m - 1.0) / (2.0 * n.m)})};
            },
            [&](const Weibull& w) {
                if (w.shape <= 1.0) return infinite("weibull with alpha <= 1");
                return numeric(specfun::gamma_fn(1.0 - 1.0 / w.shape) / w.scale);
            },
            [&](const Exponential&) { return infinite("exp"); },
            [&](const ChiSquare& c) {
                if (c.nu <= 2) return infinite("chi2 with nu <= 2");
                return SpecialCaseDecomposition{1.0 / (c.nu - 2.0), DistributionSpec(ChiSquare{c.nu - 2})};
            },
            [&](const Chi& c) {
                if (c.nu <= 1) return infinite("chi with nu = 1");
                const double cc = std::exp(log_gamma(0.5 * (c.nu - 1.0)) - log_gamma(0.5 * c.nu)) / kSqrt2;
                return SpecialCaseDecomposition{cc, DistributionSpec(Chi{c.nu - 1})};
            },
            [&](const HalfNormal&) { return infinite("halfnormal"); },
            [](const Rayleigh& r) {
                return SpecialCaseDecomposition{std::sqrt(std::numbers::pi / 2.0) / r.sigma,
                                                DistributionSpec(HalfNormal{r.sigma})};
            },
        },
        d.law());
}

double tilted_cdf(const SpecialCaseDecomposition& dec, double x) {
    return std::visit(Overloaded{
                          [x](const DistributionSpec& s) { return cdf(s, x); },
                          [x](const PoissonLaw& p) {
                              if (x < 0.0) return 0.0;
                              return regularized_upper_gamma(std::floor(x) + 1.0, p.mu);
                          },
                          [x](const NumericCdf& f) { return f(x); },
                      },
                      dec.tilted);
}

}  // namespace polya
