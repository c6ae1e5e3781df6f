#include "polya/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "polya/errors.hpp"
#include "polya/quadrature.hpp"
#include "polya/specfun.hpp"
#include "text_util.hpp"

namespace polya {
namespace {

using specfun::log_gamma;
using specfun::regularized_lower_gamma;
using specfun::regularized_upper_gamma;

constexpr double kSqrtPi = 1.7724538509055160273;
constexpr double kSqrt2 = std::numbers::sqrt2;
constexpr double kPi = std::numbers::pi;

const quad::Options kTight{1e-14, 1e-12, 4000};

// Values of r that sit within an ulp of an integer are snapped onto it, so the
// piecewise Poisson formula picks the branch whose value is continuous there.
double snap_integer(double r) {
    const double n = std::nearbyint(r);
    const double ulp = std::nextafter(std::abs(r), INFINITY) - std::abs(r);
    return std::abs(r - n) <= ulp ? n : r;
}

// Slope of the chi(nu) kernel for real nu >= 1: -Gamma((nu-1)/2, y^2/2) / (sqrt(2) Gamma(nu/2)).
double chi_slope(double nu, double y) {
    const double u = 0.5 * y * y;
    if (nu == 1.0) return u > 0.0 ? -specfun::exp_integral_e1(u) / (kSqrt2 * kSqrtPi) : -INFINITY;
    const double a = 0.5 * (nu - 1.0);
    return -regularized_upper_gamma(a, u) * std::exp(log_gamma(a) - log_gamma(0.5 * nu)) / kSqrt2;
}

double gamma_slope(double s, double theta, double r) {
    const double x = r / theta;
    if (s == 1.0) return x > 0.0 ? -specfun::exp_integral_e1(x) / theta : -INFINITY;
    return -regularized_upper_gamma(s - 1.0, x) / ((s - 1.0) * theta);
}

// Right derivative g(r) = -int_(r,inf) dF(x)/x of the unit kernel, when it has a closed form.
std::optional<double> closed_slope(const DistributionSpec& d, double r) {
    if (const auto* p = d.get_if<ShiftedPoisson>()) {
        return -regularized_lower_gamma(std::floor(r) + 1.0, p->mu) / p->mu;
    }
    if (const auto* g = d.get_if<GammaDist>()) {
        if (g->shape < 1.0) return std::nullopt;
        return gamma_slope(g->shape, g->scale, r);
    }
    if (const auto* e = d.get_if<Exponential>()) return gamma_slope(1.0, e->scale, r);
    if (const auto* c = d.get_if<ChiSquare>()) {
        if (c->nu < 2) return std::nullopt;
        return gamma_slope(0.5 * c->nu, 2.0, r);
    }
    if (const auto* c = d.get_if<Chi>()) return chi_slope(c->nu, r);
    if (const auto* n = d.get_if<Nakagami>()) {
        const double c = std::sqrt(n->omega / (2.0 * n->m));
        return chi_slope(2.0 * n->m, r / c) / c;
    }
    if (const auto* h = d.get_if<HalfNormal>()) return chi_slope(1.0, r / h->sigma) / h->sigma;
    if (const auto* ra = d.get_if<Rayleigh>()) return chi_slope(2.0, r / ra->sigma) / ra->sigma;
    if (const auto* w = d.get_if<Weibull>()) {
        if (w->shape < 1.0) return std::nullopt;
        const double z = r / w->scale;
        if (w->shape == 1.0) return z > 0.0 ? -specfun::exp_integral_e1(z) / w->scale : -INFINITY;
        return -specfun::upper_inc_gamma(1.0 - 1.0 / w->shape, std::pow(z, w->shape)) / w->scale;
    }
    return std::nullopt;
}

// Breakpoints spreading [lo, hi] geometrically toward lo, where densities vary fastest.
std::vector<double> spread(double lo, double hi) {
    std::vector<double> pts{lo};
    for (double frac : {1.0 / 256, 1.0 / 64, 1.0 / 16, 1.0 / 4}) pts.push_back(lo + (hi - lo) * frac);
    pts.push_back(hi);
    return pts;
}

double numeric_kernel(const DistributionSpec& d, double r, double upper) {
    if (r <= 0.0) return 1.0;
    if (r >= upper) return 0.0;
    auto integrand = [&d, r](double x) { return (1.0 - r / x) * density(d, x); };
    const auto pts = spread(r, upper);
    return quad::integrate(integrand, pts, kTight).value;
}

double numeric_slope(const DistributionSpec& d, double r, double upper) {
    if (r >= upper) return 0.0;
    auto integrand = [&d](double x) { return density(d, x) / x; };
    const auto pts = spread(r, upper);
    return -quad::integrate(integrand, pts, kTight).value;
}

double unit_kernel(const DistributionSpec& d, double r) {
    r = std::abs(r);
    if (r == 0.0) return 1.0;
    if (std::isinf(r)) return 0.0;
    if (d.is_discrete()) r = snap_integer(r);
    if (const auto slope = closed_slope(d, r)) {
        // An infinite slope means r / scale underflowed; r g(r) -> 0 at such a log singularity.
        if (std::isinf(*slope)) return survival(d, r);
        return std::clamp(survival(d, r) + r * *slope, 0.0, 1.0);
    }
    return numeric_kernel(d, r, upper_cutoff(d));
}

double unit_slope(const DistributionSpec& d, double r) {
    if (std::isinf(r)) return 0.0;
    if (d.is_discrete()) r = snap_integer(r);
    if (const auto slope = closed_slope(d, r)) return *slope;
    return numeric_slope(d, r, upper_cutoff(d));
}

// 1 - A cos(B) without cancellation when A is near 1 and B near 0, given log A.
double one_minus_damped_cos(double log_a, double b) {
    const double s = std::sin(0.5 * b);
    return -std::expm1(log_a) + 2.0 * std::exp(log_a) * s * s;
}

// F[k](t) for the chi(nu) kernel, real nu > 1.
double chi_ft(double nu, double t) {
    const double a = 0.5 * (nu - 1.0);
    const double c = std::exp(log_gamma(a) - log_gamma(0.5 * nu)) / kSqrt2;
    if (nu == 2.0) return -2.0 * c * std::expm1(-0.5 * t * t) / (t * t);
    return -2.0 * c * specfun::kummer_m_minus_one(a, 0.5, -0.5 * t * t) / (t * t);
}

// Half-normal(sigma) transform as the sine integral (2/(t sqrt(pi))) int_0^inf E1(u^2) sin(sigma sqrt(2) t u) du.
double half_normal_ft(double sigma, double t) {
    const double omega = sigma * kSqrt2 * std::abs(t);
    auto integrand = [omega](double u) { return specfun::exp_integral_e1(u * u) * std::sin(omega * u); };
    // E1(u^2) < 1e-20 beyond u = 7.
    constexpr double kUpper = 7.0;
    const quad::Options opts{1e-15, 1e-12, 4000};
    const double value = quad::integrate_panels(integrand, 0.0, kUpper, kPi / omega, opts, 1e-16, 3).value;
    return 2.0 * value / (std::abs(t) * kSqrtPi);
}

std::optional<double> closed_ft(const DistributionSpec& d, double t) {
    const double t2 = t * t;
    if (const auto* p = d.get_if<ShiftedPoisson>()) {
        const double sh = std::sin(0.5 * t);
        return 2.0 * one_minus_damped_cos(-2.0 * p->mu * sh * sh, p->mu * std::sin(t)) / (p->mu * t2);
    }
    auto gamma_ft = [t, t2](double s, double theta) -> std::optional<double> {
        if (s < 1.0) return std::nullopt;
        const double z = theta * theta * t2;
        if (s == 1.0) return std::log1p(z) / (theta * t2);
        const double omega = std::atan(theta * std::abs(t));
        const double v = one_minus_damped_cos(-0.5 * (s - 1.0) * std::log1p(z), (s - 1.0) * omega);
        return 2.0 * v / ((s - 1.0) * theta * t2);
    };
    if (const auto* g = d.get_if<GammaDist>()) return gamma_ft(g->shape, g->scale);
    if (const auto* e = d.get_if<Exponential>()) return gamma_ft(1.0, e->scale);
    if (const auto* c = d.get_if<ChiSquare>()) return gamma_ft(0.5 * c->nu, 2.0);
    if (const auto* c = d.get_if<Chi>()) {
        if (c->nu == 1) return half_normal_ft(1.0, t);
        return chi_ft(c->nu, t);
    }
    if (const auto* n = d.get_if<Nakagami>()) {
        const double c = std::sqrt(n->omega / (2.0 * n->m));
        if (n->m == 0.5) return half_normal_ft(std::sqrt(n->omega), t);
        return c * chi_ft(2.0 * n->m, c * t);
    }
    if (const auto* h = d.get_if<HalfNormal>()) return half_normal_ft(h->sigma, t);
    if (const auto* ra = d.get_if<Rayleigh>()) {
        const double s = ra->sigma;
        return -std::sqrt(2.0 * kPi) * std::expm1(-0.5 * s * s * t2) / (s * t2);
    }
    return std::nullopt;
}

double unit_ft(const DistributionSpec& d, double t) {
    if (t == 0.0) return mean(d);
    if (const auto v = closed_ft(d, t)) return std::max(0.0, *v);
    return eval_ft_numeric(d, t);
}

}  // namespace

KernelSpec::KernelSpec(DistributionSpec dist, double rho) : dist_(std::move(dist)), rho_(rho) {
    if (!(rho > 0.0) || !std::isfinite(rho)) throw DomainError("kernel: rho must be a finite value > 0");
}

KernelSpec KernelSpec::from_tau(DistributionSpec dist, double tau) {
    if (!(tau > 0.0) || !std::isfinite(tau)) throw DomainError("kernel: tau must be a finite value > 0");
    const double rho = mean(dist) / tau;
    KernelSpec spec(std::move(dist), rho);
    spec.tau_ = tau;
    return spec;
}

KernelSpec KernelSpec::parse(std::string_view input) {
    const auto parts = text::split(input, ';');
    DistributionSpec dist = DistributionSpec::parse(parts.front());
    std::optional<double> tau;
    std::optional<double> rho;
    for (std::size_t i = 1; i < parts.size(); ++i) {
        const std::string_view item = text::trim(parts[i]);
        if (item.empty()) continue;
        const auto eq = item.find('=');
        const std::string key(text::trim(item.substr(0, eq)));
        const auto value = eq == std::string_view::npos ? std::nullopt : text::parse_double(item.substr(eq + 1));
        if (!value) throw ParseError("kernel option '" + std::string(item) + "' must be tau=<v> or rho=<v>");
        if (key == "tau") {
            tau = value;
        } else if (key == "rho") {
            rho = value;
        } else {
            throw ParseError("unknown kernel option '" + key + "'");
        }
    }
    if (tau && rho) throw ParseError("kernel: give tau or rho, not both");
    if (tau) return from_tau(std::move(dist), *tau);
    return KernelSpec(std::move(dist), rho.value_or(1.0));
}

std::string KernelSpec::to_string() const {
    std::string out = dist_.to_string();
    if (tau_) {
        out += ";tau=" + text::format_double(*tau_);
    } else if (rho_ != 1.0) {
        out += ";rho=" + text::format_double(rho_);
    }
    return out;
}

double eval_kernel(const KernelSpec& spec, double r) { return unit_kernel(spec.dist(), spec.rho() * r); }

double eval_kernel_numeric(const DistributionSpec& dist, double r) {
    if (r < 0.0) throw DomainError("eval_kernel_numeric: r must be >= 0");
    if (dist.is_discrete()) {
        const auto at = atoms(dist);
        return eval_kernel_numeric(at, r);
    }
    return numeric_kernel(dist, r, upper_cutoff(dist));
}

double eval_kernel_numeric(std::span<const Atom> atoms, double r) {
    if (r < 0.0) throw DomainError("eval_kernel_numeric: r must be >= 0");
    double sum = 0.0;
    for (const Atom& a : atoms) {
        if (a.x > r) sum += (1.0 - r / a.x) * a.mass;
    }
    return sum;
}

double kernel_slope(const KernelSpec& spec, double r) {
    if (r < 0.0) throw DomainError("kernel_slope: r must be >= 0");
    return spec.rho() * unit_slope(spec.dist(), spec.rho() * r);
}

SpectralValue eval_ft(const KernelSpec& spec, double t) {
    const double rho = spec.rho();
    return {t, unit_ft(spec.dist(), t / rho) / rho};
}

double eval_ft_numeric(const DistributionSpec& dist, double t) {
    if (t == 0.0) throw DomainError("eval_ft_numeric: t must be nonzero");
    t = std::abs(t);
    const double t2 = t * t;
    const quad::Options opts{1e-15, 1e-11, 4000};
    double stieltjes = 0.0;
    double cosine = 0.0;
    if (dist.is_discrete()) {
        const auto at = atoms(dist);
        for (const Atom& a : at) {
            const double s = std::sin(0.5 * a.x * t);
            stieltjes += s * s * a.mass / a.x;
        }
        auto integrand = [&at, t](double r) { return eval_kernel_numeric(at, r) * std::cos(r * t); };
        const double last = at.back().x;
        for (double j = 0.0; j < last; j += 1.0) cosine += quad::integrate(integrand, j, j + 1.0, opts).value;
    } else {
        const double upper = upper_cutoff(dist);
        auto stieltjes_integrand = [&dist, t](double x) {
            const double s = std::sin(0.5 * x * t);
            return s * s * density(dist, x) / x;
        };
        stieltjes = quad::integrate_panels(stieltjes_integrand, 0.0, upper, 2.0 * kPi / t, opts).value;
        const bool closed = closed_slope(dist, 1.0).has_value();
        auto cosine_integrand = [&dist, t, upper, closed](double r) {
            const double k = closed ? unit_kernel(dist, r) : numeric_kernel(dist, r, upper);
            return k * std::cos(r * t);
        };
        cosine = quad::integrate_panels(cosine_integrand, 0.0, upper, kPi / t, opts).value;
    }
    stieltjes *= 4.0 / t2;
    cosine *= 2.0;
    if (std::abs(stieltjes - cosine) > 1e-6 * std::max(1.0, std::abs(stieltjes))) {
        throw DisagreementError("eval_ft_numeric: Stieltjes form " + text::format_double(stieltjes) +
                                " and cosine transform " + text::format_double(cosine) + " disagree at t=" +
                                text::format_double(t));
    }
    return stieltjes;
}

double kernel_to_cdf(const KernelSpec& spec, double x) {
    if (!(x > 0.0)) return 0.0;
    const double value = 1.0 - eval_kernel(spec, x) + x * kernel_slope(spec, x);
    return std::clamp(value, 0.0, 1.0);
}

double area_under_curve(const KernelSpec& spec) {
    const DistributionSpec& d = spec.dist();
    const double upper = upper_cutoff(d);
    std::vector<double> pts;
    if (d.is_discrete()) {
        for (double j = 0.0; j <= upper; j += 1.0) pts.push_back(j);
    } else {
        pts = spread(0.0, upper);
    }
    auto integrand = [&d](double r) { return unit_kernel(d, r); };
    const double half = quad::integrate(integrand, pts, {1e-12, 1e-11, 4000}).value;
    return 2.0 * half / spec.rho();
}

double tensor_eval(const KernelSpec& spec, std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) {
        throw DimensionError("tensor_eval: dimensions " + std::to_string(x.size()) + " and " +
                             std::to_string(y.size()) + " differ");
    }
    double value = 1.0;
    for (std::size_t j = 0; j < x.size() && value > 0.0; ++j) value *= eval_kernel(spec, x[j] - y[j]);
    return value;
}

}  // namespace polya
