#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "polya/distributions.hpp"
#include "polya/errors.hpp"

using namespace polya;

namespace {

const std::vector<std::string> kSettings = {
    "poisson:mu=0.5",       "poisson:mu=2",           "poisson:mu=40",
    "gamma:s=0.5",          "gamma:s=2,theta=1",      "gamma:s=3.5,theta=0.7",
    "nakagami:m=0.5",       "nakagami:m=1,omega=2",   "nakagami:m=2.5,omega=0.5",
    "weibull:alpha=0.5",    "weibull:alpha=1",        "weibull:alpha=3,theta=2",
    "exp:theta=1",          "exp:theta=3",            "exp:theta=0.2",
    "chi2:nu=1",            "chi2:nu=2",              "chi2:nu=5",
    "chi:nu=1",             "chi:nu=3",               "chi:nu=7",
    "halfnormal:sigma=1",   "halfnormal:sigma=2.5",   "halfnormal:sigma=0.3",
    "rayleigh:sigma=1",     "rayleigh:sigma=0.3",     "rayleigh:sigma=4",
};

double integrate_density(const DistributionSpec& d, const oracle::Fn& weight) {
    const double scale = mean(d);
    return oracle::half_line([&](double x) { return x > 0.0 ? density(d, x) * weight(x) : 0.0; }, 0.0, scale);
}

// Kolmogorov-Smirnov distance of sorted draws from d, with left limits at the
// jumps of a discrete law.
double ks_distance(const DistributionSpec& d, std::vector<double> xs) {
    std::sort(xs.begin(), xs.end());
    const double n = static_cast<double>(xs.size());
    double worst = 0.0;
    if (d.is_discrete()) {
        std::size_t i = 0;
        while (i < xs.size()) {
            std::size_t j = i;
            while (j < xs.size() && xs[j] == xs[i]) ++j;
            const double below = cdf(d, xs[i] - 1.0);
            const double at = cdf(d, xs[i]);
            worst = std::max({worst, std::abs(static_cast<double>(i) / n - below), std::abs(static_cast<double>(j) / n - at)});
            i = j;
        }
        return worst;
    }
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double f = cdf(d, xs[i]);
        worst = std::max({worst, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
    }
    return worst;
}

}  // namespace

TEST_CASE("density examples") {
    CHECK(density(DistributionSpec::parse("poisson:mu=2"), 1.0) == doctest::Approx(std::exp(-2.0)).epsilon(1e-14));
    CHECK(density(DistributionSpec::parse("poisson:mu=2"), 1.5) == 0.0);
    CHECK(density(DistributionSpec::parse("exp:theta=1"), 0.5) == doctest::Approx(std::exp(-0.5)).epsilon(1e-14));
    // Nakagami(m, Omega) pdf = 2 m^m / (Gamma(m) Omega^m) x^{2m-1} exp(-m x^2 / Omega).
    const double direct = 2.0 / (1.0 * 2.0) * 1.0 * std::exp(-1.0 / 2.0);
    CHECK(density(DistributionSpec::parse("nakagami:m=1,omega=2"), 1.0) == doctest::Approx(direct).epsilon(1e-14));
    CHECK_THROWS_AS(density(DistributionSpec::parse("exp:theta=1"), 0.0), DomainError);
    CHECK_THROWS_AS(density(DistributionSpec::parse("exp:theta=1"), -1.0), DomainError);
}

TEST_CASE("cdf examples") {
    for (const auto& s : kSettings) CHECK(cdf(DistributionSpec::parse(s), 0.0) == 0.0);
    CHECK(cdf(DistributionSpec::parse("rayleigh:sigma=1"), 1.0) == doctest::Approx(1.0 - std::exp(-0.5)).epsilon(1e-14));
    CHECK(cdf(DistributionSpec::parse("gamma:s=2,theta=1"), 3.0) ==
          doctest::Approx(1.0 - 4.0 * std::exp(-3.0)).epsilon(1e-14));
    CHECK(cdf(DistributionSpec::parse("poisson:mu=2"), 1.5) == doctest::Approx(std::exp(-2.0)).epsilon(1e-14));
}

TEST_CASE("cdf agrees with Boost distribution objects") {
    for (double x : {0.05, 0.4, 1.0, 2.7, 6.0, 15.0}) {
        CHECK(cdf(DistributionSpec::parse("gamma:s=3.5,theta=0.7"), x) ==
              doctest::Approx(oracle::boost_gamma_cdf(3.5, 0.7, x)).epsilon(1e-12));
        CHECK(cdf(DistributionSpec::parse("weibull:alpha=3,theta=2"), x) ==
              doctest::Approx(oracle::boost_weibull_cdf(3.0, 2.0, x)).epsilon(1e-12));
        CHECK(cdf(DistributionSpec::parse("rayleigh:sigma=4"), x) ==
              doctest::Approx(oracle::boost_rayleigh_cdf(4.0, x)).epsilon(1e-12));
        CHECK(cdf(DistributionSpec::parse("chi2:nu=5"), x) == doctest::Approx(oracle::boost_chi2_cdf(5.0, x)).epsilon(1e-12));
        // Chi(nu) is the square root of chi-square(nu).
        CHECK(cdf(DistributionSpec::parse("chi:nu=3"), x) == doctest::Approx(oracle::boost_chi2_cdf(3.0, x * x)).epsilon(1e-12));
        // Shifted Poisson: X = Y + 1.
        CHECK(cdf(DistributionSpec::parse("poisson:mu=2"), x) ==
              doctest::Approx(x < 1.0 ? 0.0 : oracle::boost_poisson_cdf(2.0, std::floor(x) - 1.0)).epsilon(1e-12));
    }
}

TEST_CASE("mean examples") {
    CHECK(mean(DistributionSpec::parse("poisson:mu=2")) == 3.0);
    CHECK(mean(DistributionSpec::parse("gamma:s=2,theta=1.5")) == doctest::Approx(3.0).epsilon(1e-15));
    CHECK(mean(DistributionSpec::parse("weibull:alpha=1,theta=1")) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(mean(DistributionSpec::parse("rayleigh:sigma=1")) == doctest::Approx(std::sqrt(std::numbers::pi / 2.0)).epsilon(1e-14));
}

TEST_CASE("densities integrate to one and reproduce the mean") {
    for (const auto& s : kSettings) {
        INFO(s);
        const auto d = DistributionSpec::parse(s);
        if (d.is_discrete()) {
            double total = 0.0;
            double first = 0.0;
            for (const Atom& a : atoms(d, 1e-16)) {
                total += a.mass;
                first += a.x * a.mass;
            }
            CHECK(std::abs(total - 1.0) <= 1e-12);
            CHECK(std::abs(first - mean(d)) <= 1e-6);
            continue;
        }
        CHECK(std::abs(integrate_density(d, [](double) { return 1.0; }) - 1.0) <= 1e-8);
        CHECK(std::abs(integrate_density(d, [](double x) { return x; }) - mean(d)) <= 1e-6);
    }
}

TEST_CASE("cdf derivative matches the density") {
    for (const auto& s : kSettings) {
        const auto d = DistributionSpec::parse(s);
        if (d.is_discrete()) continue;
        INFO(s);
        const double m = mean(d);
        for (double q : {0.2, 0.7, 1.0, 1.6, 3.0}) {
            const double x = q * m;
            const double h = 1e-5 * x;
            const double fd = (cdf(d, x + h) - cdf(d, x - h)) / (2.0 * h);
            CHECK(std::abs(fd - density(d, x)) <= 1e-6 * std::max(1.0, density(d, x)));
            CHECK(cdf(d, x) + survival(d, x) == doctest::Approx(1.0).epsilon(1e-14));
        }
    }
}

TEST_CASE("samplers pass a Kolmogorov-Smirnov test at the 1% level") {
    const std::size_t n = 20000;
    const double critical = 1.628 / std::sqrt(static_cast<double>(n));
    std::uint64_t stream = 0;
    for (const auto& s : kSettings) {
        INFO(s);
        const auto d = DistributionSpec::parse(s);
        RandomStream rng(99, stream++);
        std::vector<double> xs(n);
        for (auto& x : xs) x = sample(d, rng);
        CHECK(*std::min_element(xs.begin(), xs.end()) > 0.0);
        CHECK(ks_distance(d, xs) < critical);
    }
}

TEST_CASE("sampler examples") {
    RandomStream rng(5, 0);
    const auto e = DistributionSpec::parse("exp:theta=2");
    double sum = 0.0;
    const int n = 1000000;
    for (int i = 0; i < n; ++i) sum += sample(e, rng);
    CHECK(std::abs(sum / n - 2.0) <= 3.0 * 2.0 / 1000.0);

    const auto r = DistributionSpec::parse("rayleigh:sigma=1");
    std::vector<double> xs(100000);
    RandomStream rr(5, 1);
    for (auto& x : xs) x = sample(r, rr);
    CHECK(ks_distance(r, xs) < 1.628 / std::sqrt(100000.0));

    const auto p = DistributionSpec::parse("poisson:mu=1");
    RandomStream rp(5, 2);
    for (int i = 0; i < 10000; ++i) {
        const double v = sample(p, rp);
        CHECK(v >= 1.0);
        CHECK(v == std::floor(v));
    }

    RandomStream a(8, 3), b(8, 3);
    for (const auto& s : kSettings) {
        const auto d = DistributionSpec::parse(s);
        CHECK(sample(d, a) == sample(d, b));
    }
}

TEST_CASE("auxiliary samplers") {
    RandomStream rng(6, 0);
    const auto z = aux_sample({AuxKind::Normal, 1.0}, 1000000, rng);
    double m = 0.0, v = 0.0;
    for (double x : z) m += x;
    m /= static_cast<double>(z.size());
    for (double x : z) v += (x - m) * (x - m);
    v /= static_cast<double>(z.size() - 1);
    CHECK(std::abs(v - 1.0) <= 0.01);

    auto c = aux_sample({AuxKind::Cauchy, 1.0}, 100000, rng);
    for (double& x : c) x = std::abs(x);
    std::nth_element(c.begin(), c.begin() + 50000, c.end());
    CHECK(std::abs(c[50000] - 1.0) <= 0.05);

    CHECK(aux_sample({AuxKind::Cauchy, 2.0}, 3, rng).size() == 3);
    CHECK_THROWS_AS(aux_sample({AuxKind::Normal, 0.0}, 3, rng), DomainError);
}

TEST_CASE("decomposition examples") {
    {
        const auto dec = decompose(DistributionSpec::parse("gamma:s=2,theta=1"));
        CHECK(dec.c_constant == doctest::Approx(1.0).epsilon(1e-14));
        const auto* t = std::get_if<DistributionSpec>(&dec.tilted);
        REQUIRE(t != nullptr);
        const auto* g = t->get_if<GammaDist>();
        REQUIRE(g != nullptr);
        CHECK(g->shape == 1.0);
        CHECK(g->scale == 1.0);
    }
    {
        const auto dec = decompose(DistributionSpec::parse("poisson:mu=3"));
        CHECK(dec.c_constant == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
        const auto* y = std::get_if<PoissonLaw>(&dec.tilted);
        REQUIRE(y != nullptr);
        CHECK(y->mu == 3.0);
    }
    {
        const auto dec = decompose(DistributionSpec::parse("rayleigh:sigma=2"));
        CHECK(dec.c_constant == doctest::Approx(0.5 * std::sqrt(std::numbers::pi / 2.0)).epsilon(1e-14));
        const auto* t = std::get_if<DistributionSpec>(&dec.tilted);
        REQUIRE(t != nullptr);
        REQUIRE(t->get_if<HalfNormal>() != nullptr);
        CHECK(t->get_if<HalfNormal>()->sigma == 2.0);
    }
    CHECK_THROWS_AS(decompose(DistributionSpec::parse("halfnormal:sigma=1")), DomainError);
    CHECK_THROWS_AS(decompose(DistributionSpec::parse("nakagami:m=0.5")), DomainError);
    CHECK_THROWS_AS(decompose(DistributionSpec::parse("gamma:s=1")), DomainError);
    CHECK_THROWS_AS(decompose(DistributionSpec::parse("chi2:nu=2")), DomainError);
    CHECK_THROWS_AS(decompose(DistributionSpec::parse("chi:nu=1")), DomainError);
}

TEST_CASE("decomposition constants and tilted laws are consistent") {
    for (const auto& s : kSettings) {
        const auto d = DistributionSpec::parse(s);
        SpecialCaseDecomposition dec{0.0, d};
        try {
            dec = decompose(d);
        } catch (const DomainError&) {
            continue;
        }
        INFO(s);
        // C (1 - F~(r)) = int_(r,inf) dF(x) / x for r >= 0; at r = 0 this is C itself
        // for continuous laws.
        for (double q : {0.0, 0.3, 1.0, 2.5}) {
            const double r = q * mean(d);
            double tail = 0.0;
            if (d.is_discrete()) {
                for (const Atom& a : atoms(d, 1e-16)) {
                    if (a.x > r) tail += a.mass / a.x;
                }
            } else {
                tail = oracle::half_line([&](double x) { return x > r ? density(d, x) / x : 0.0; }, r, r + mean(d));
            }
            CHECK(dec.c_constant * (1.0 - tilted_cdf(dec, r)) == doctest::Approx(tail).epsilon(1e-8));
        }
        if (!d.is_discrete()) {
            CHECK(dec.c_constant == doctest::Approx(integrate_density(d, [](double x) { return 1.0 / x; })).epsilon(1e-8));
            CHECK(tilted_cdf(dec, 0.0) == 0.0);
        }

        // The tilted cdf is nondecreasing and reaches 1.
        CHECK(tilted_cdf(dec, 1e4 * mean(d)) == doctest::Approx(1.0).epsilon(1e-9));
        double prev = 0.0;
        for (double q = 0.05; q < 6.0; q += 0.05) {
            const double v = tilted_cdf(dec, q * mean(d));
            CHECK(v >= prev - 1e-15);
            prev = v;
        }
        // Increments of the tilted cdf match f(x) / (C x).
        if (!d.is_discrete()) {
            const double a = 0.4 * mean(d);
            const double b = 1.7 * mean(d);
            const double mass = oracle::finite([&](double x) { return density(d, x) / (dec.c_constant * x); }, a, b);
            CHECK(std::abs(tilted_cdf(dec, b) - tilted_cdf(dec, a) - mass) <= 1e-9);
        }
    }
}

TEST_CASE("text form") {
    for (const auto& s : kSettings) {
        const auto d = DistributionSpec::parse(s);
        CHECK(DistributionSpec::parse(d.to_string()) == d);
    }
    CHECK(DistributionSpec::parse("gamma:shape=2,scale=3") == DistributionSpec(GammaDist{2.0, 3.0}));
    CHECK_THROWS_AS(DistributionSpec::parse("gamma:s=0"), DomainError);
    CHECK_THROWS_AS(DistributionSpec::parse("nakagami:m=0.4"), DomainError);
    CHECK_THROWS_AS(DistributionSpec::parse("chi:nu=1.5"), ParseError);
    CHECK_THROWS_AS(DistributionSpec::parse("cauchy:scale=1"), ParseError);
    CHECK_THROWS_AS(DistributionSpec::parse("gamma:s=2,foo=1"), ParseError);
    CHECK_THROWS_AS(DistributionSpec::parse("gamma:s=abc"), ParseError);
}
