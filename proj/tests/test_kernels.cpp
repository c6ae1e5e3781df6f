#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "polya/errors.hpp"
#include "polya/kernels.hpp"
#include "polya/specfun.hpp"

using namespace polya;

namespace {

const std::vector<std::string> kSettings = {
    "poisson:mu=0.5",       "poisson:mu=2",           "poisson:mu=40",
    "gamma:s=0.5",          "gamma:s=2,theta=1",      "gamma:s=3.5,theta=0.7",
    "nakagami:m=0.5",       "nakagami:m=0.75",        "nakagami:m=2.5,omega=2",
    "weibull:alpha=0.5",    "weibull:alpha=1",        "weibull:alpha=3,theta=2",
    "exp:theta=1",          "exp:theta=3",            "exp:theta=0.2",
    "chi2:nu=1",            "chi2:nu=2",              "chi2:nu=5",
    "chi:nu=1",             "chi:nu=2",               "chi:nu=7",
    "halfnormal:sigma=1",   "halfnormal:sigma=2.5",   "halfnormal:sigma=0.3",
    "rayleigh:sigma=1",     "rayleigh:sigma=0.3",     "rayleigh:sigma=4",
};

const std::vector<double> kGrid = {0.0, 0.01, 0.1, 0.5, 1.0, 2.0, 5.0, 10.0};

KernelSpec spec_of(const std::string& s, double rho = 1.0) { return KernelSpec(DistributionSpec::parse(s), rho); }

// k(r) = int_r^inf (1 - r/x) dF(x), evaluated with Boost quadrature or a pmf sum.
double stieltjes_oracle(const DistributionSpec& d, double r) {
    if (d.is_discrete()) {
        double k = 0.0;
        for (const Atom& a : atoms(d, 1e-18)) {
            if (a.x > r) k += (1.0 - r / a.x) * a.mass;
        }
        return k;
    }
    const auto f = [&](double x) { return x > r && x > 0.0 ? (1.0 - r / x) * density(d, x) : 0.0; };
    return oracle::half_line(f, r, r + mean(d));
}

}  // namespace

TEST_CASE("kernel examples") {
    for (const auto& s : kSettings) CHECK(eval_kernel(spec_of(s), 0.0) == 1.0);
    CHECK(eval_kernel(spec_of("gamma:s=2,theta=1"), 1.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
    CHECK(eval_kernel(spec_of("exp:theta=1"), 1.0) ==
          doctest::Approx(std::exp(-1.0) - specfun::exp_integral_e1(1.0)).epsilon(1e-13));
    CHECK(eval_kernel(spec_of("exp:theta=1"), 1.0) == doctest::Approx(0.148495).epsilon(1e-5));
    CHECK(eval_kernel(spec_of("poisson:mu=2"), 0.5) == doctest::Approx(1.0 - 0.25 * (1.0 - std::exp(-2.0))).epsilon(1e-14));
    // Even extension.
    CHECK(eval_kernel(spec_of("rayleigh:sigma=1"), -0.7) == eval_kernel(spec_of("rayleigh:sigma=1"), 0.7));
}

TEST_CASE("kernels at distances that underflow the scaled argument") {
    for (const auto& s : kSettings) {
        INFO(s);
        for (double r : {1e-200, 1e-310, 4.9e-324}) {
            const double v = eval_kernel(spec_of(s), r);
            CHECK(v <= 1.0);
            CHECK(v >= 1.0 - 1e-9);
        }
        for (double r : {1e200, 1e308, double(INFINITY)}) CHECK(eval_kernel(spec_of(s), r) == 0.0);
    }
}

TEST_CASE("Poisson kernel is continuous and piecewise linear across integers") {
    const auto k = spec_of("poisson:mu=2");
    for (double n : {1.0, 2.0, 3.0, 7.0}) {
        const double below = eval_kernel(k, std::nextafter(n, 0.0));
        const double above = eval_kernel(k, std::nextafter(n, 100.0));
        CHECK(std::abs(below - eval_kernel(k, n)) < 1e-14);
        CHECK(std::abs(above - eval_kernel(k, n)) < 1e-14);
        // Linear inside (n, n + 1).
        const double a = eval_kernel(k, n + 0.25), b = eval_kernel(k, n + 0.5), c = eval_kernel(k, n + 0.75);
        CHECK(std::abs((a + c) / 2.0 - b) < 1e-14);
    }
}

TEST_CASE("closed forms match the numeric Stieltjes integral") {
    for (const auto& s : kSettings) {
        INFO(s);
        const auto d = DistributionSpec::parse(s);
        for (double r : kGrid) {
            CHECK(std::abs(eval_kernel(KernelSpec(d), r) - eval_kernel_numeric(d, r)) <= 1e-8);
        }
    }
}

TEST_CASE("kernels match an independent quadrature oracle") {
    for (const auto& s : kSettings) {
        INFO(s);
        const auto d = DistributionSpec::parse(s);
        for (double r : {0.01, 0.5, 2.0, 5.0}) {
            INFO("r = ", r);
            CHECK(std::abs(eval_kernel(KernelSpec(d), r) - stieltjes_oracle(d, r)) <= 1e-8);
        }
    }
}

TEST_CASE("numeric kernel of finite atoms") {
    const std::vector<Atom> single{{2.5, 1.0}};
    for (double r : {0.0, 0.5, 1.0, 2.5, 3.0}) CHECK(eval_kernel_numeric(single, r) == doctest::Approx(std::max(0.0, 1.0 - r / 2.5)));
    const std::vector<Atom> two{{1.0, 0.25}, {3.0, 0.75}};
    CHECK(eval_kernel_numeric(two, 2.0) == doctest::Approx(0.75 * (1.0 - 2.0 / 3.0)));
    CHECK(eval_kernel_numeric(DistributionSpec::parse("gamma:s=2,theta=1"), 0.0) == 1.0);
}

TEST_CASE("kernels are monotone, convex and bounded on [0, 10]") {
    for (const auto& s : kSettings) {
        INFO(s);
        const auto k = spec_of(s);
        const int n = 201;
        std::vector<double> v(n);
        for (int i = 0; i < n; ++i) v[i] = eval_kernel(k, 10.0 * i / (n - 1));
        for (int i = 0; i < n; ++i) {
            CHECK(v[i] >= 0.0);
            CHECK(v[i] <= 1.0);
            if (i > 0) CHECK(v[i - 1] >= v[i] - 1e-12);
            if (i > 0 && i + 1 < n) CHECK(v[i - 1] - 2.0 * v[i] + v[i + 1] >= -1e-9);
        }
    }
}

TEST_CASE("kernel_to_cdf reproduces the cdf") {
    for (const auto& s : kSettings) {
        INFO(s);
        const auto k = spec_of(s);
        const auto& d = k.dist();
        for (double q : {0.05, 0.3, 0.8, 1.3, 2.0, 3.5}) {
            const double x = q * mean(d);
            CHECK(std::abs(kernel_to_cdf(k, x) - cdf(d, x)) <= 1e-6);
        }
    }
    const auto e = spec_of("exp:theta=2");
    for (double x : {0.1, 1.0, 4.0}) CHECK(kernel_to_cdf(e, x) == doctest::Approx(1.0 - std::exp(-x / 2.0)).epsilon(1e-12));
    CHECK(kernel_to_cdf(e, 1e-12) == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(kernel_to_cdf(spec_of("poisson:mu=2"), 1.5) == doctest::Approx(std::exp(-2.0)).epsilon(1e-12));
    // With scaling, the recovered law is that of X / rho.
    const auto scaled = spec_of("gamma:s=3,theta=1", 2.0);
    CHECK(kernel_to_cdf(scaled, 1.2) == doctest::Approx(cdf(scaled.dist(), 2.4)).epsilon(1e-10));
}

TEST_CASE("Fourier transform examples") {
    CHECK(eval_ft(spec_of("gamma:s=1,theta=1"), 1.0).value == doctest::Approx(std::log(2.0)).epsilon(1e-14));
    CHECK(eval_ft(spec_of("rayleigh:sigma=1"), 0.0).value == doctest::Approx(std::sqrt(std::numbers::pi / 2.0)).epsilon(1e-14));
    CHECK(eval_ft(spec_of("rayleigh:sigma=1"), 1e-6).value == doctest::Approx(std::sqrt(std::numbers::pi / 2.0)).epsilon(1e-9));
    CHECK(eval_ft(spec_of("rayleigh:sigma=1"), 2.0).value ==
          doctest::Approx(std::sqrt(2.0 * std::numbers::pi) / 4.0 * (1.0 - std::exp(-2.0))).epsilon(1e-14));
    CHECK(eval_ft(spec_of("rayleigh:sigma=1"), 2.0).t == 2.0);
    // Gamma s = 2 is the Laplace kernel exp(-r), whose transform is 2 / (1 + t^2).
    CHECK(eval_ft(spec_of("gamma:s=2,theta=1"), 1.5).value == doctest::Approx(2.0 / (1.0 + 2.25)).epsilon(1e-13));
}

TEST_CASE("numeric Fourier transform examples") {
    CHECK(std::abs(eval_ft_numeric(DistributionSpec::parse("gamma:s=1,theta=1"), 1.0) - std::log(2.0)) <= 1e-6);
    const double pois = (2.0 - 2.0 * std::exp(-2.0)) / (std::numbers::pi * std::numbers::pi);
    CHECK(std::abs(eval_ft_numeric(DistributionSpec::parse("poisson:mu=1"), std::numbers::pi) - pois) <= 1e-6);
    CHECK(std::abs(eval_ft(spec_of("poisson:mu=1"), std::numbers::pi).value - pois) <= 1e-13);
    for (const auto& s : {"weibull:alpha=2", "gamma:s=0.5", "chi2:nu=3"}) {
        for (double t : {0.5, 2.0, 9.0}) CHECK(eval_ft_numeric(DistributionSpec::parse(s), t) >= 0.0);
    }
    CHECK_THROWS_AS(eval_ft_numeric(DistributionSpec::parse("gamma:s=2"), 0.0), DomainError);
}

TEST_CASE("closed-form transforms match the numeric routes") {
    const std::vector<std::string> closed = {"poisson:mu=0.5", "poisson:mu=2",     "gamma:s=1,theta=1", "gamma:s=2,theta=1",
                                             "gamma:s=3,theta=0.5", "chi:nu=2",    "chi:nu=3",          "chi:nu=6",
                                             "rayleigh:sigma=1",  "rayleigh:sigma=2.5", "nakagami:m=1",  "nakagami:m=1.5",
                                             "nakagami:m=0.75,omega=2", "exp:theta=2", "chi2:nu=2",     "chi2:nu=4"};
    for (const auto& s : closed) {
        INFO(s);
        const auto d = DistributionSpec::parse(s);
        for (double t : {0.2, 1.0, 3.0, 7.5}) {
            INFO("t = ", t);
            CHECK(std::abs(eval_ft(KernelSpec(d), t).value - eval_ft_numeric(d, t)) <= 1e-6);
        }
    }
}

TEST_CASE("half-normal transform is self-consistent") {
    for (const auto& s : {"halfnormal:sigma=1", "halfnormal:sigma=0.4", "nakagami:m=0.5,omega=2"}) {
        INFO(s);
        const auto d = DistributionSpec::parse(s);
        for (double t : {0.3, 1.0, 4.0}) CHECK(std::abs(eval_ft(KernelSpec(d), t).value - eval_ft_numeric(d, t)) <= 1e-5);
    }
}

TEST_CASE("transforms are nonnegative and equal mean / rho at zero") {
    for (const auto& s : kSettings) {
        INFO(s);
        for (double rho : {1.0, 0.5, 3.0}) {
            const auto k = spec_of(s, rho);
            CHECK(std::abs(eval_ft(k, 0.0).value - mean(k.dist()) / rho) <= 1e-8);
            for (double t : {0.1, 0.9, 2.5, 6.0}) CHECK(eval_ft(k, t).value >= 0.0);
        }
    }
}

TEST_CASE("scaling rules") {
    for (const auto& s : kSettings) {
        INFO(s);
        const double rho = 1.7;
        const auto unit = spec_of(s);
        const auto scaled = spec_of(s, rho);
        for (double r : {0.1, 0.6, 2.2}) {
            CHECK(std::abs(eval_kernel(scaled, r) - eval_kernel(unit, rho * r)) <= 1e-12);
            CHECK(std::abs(eval_ft(scaled, r).value - eval_ft(unit, r / rho).value / rho) <= 1e-12);
        }
    }
}

TEST_CASE("area under the curve") {
    CHECK(area_under_curve(spec_of("gamma:s=2,theta=1")) == doctest::Approx(2.0).epsilon(1e-6));
    CHECK(area_under_curve(spec_of("rayleigh:sigma=1")) == doctest::Approx(std::sqrt(std::numbers::pi / 2.0)).epsilon(1e-6));
    CHECK(area_under_curve(spec_of("gamma:s=2,theta=1", 2.0)) == doctest::Approx(1.0).epsilon(1e-6));
    const auto tau = KernelSpec::from_tau(DistributionSpec::parse("nakagami:m=1.5"), 0.8);
    CHECK(area_under_curve(tau) == doctest::Approx(0.8).epsilon(1e-6));
}

TEST_CASE("tensor products") {
    const auto k = spec_of("gamma:s=2,theta=1");
    const std::vector<double> a{0.0, 0.0}, b{1.0, 2.0}, c{0.3};
    CHECK(tensor_eval(k, a, a) == 1.0);
    CHECK(tensor_eval(k, a, b) == doctest::Approx(std::exp(-3.0)).epsilon(1e-14));
    const std::vector<double> x{0.7}, y{-0.4};
    CHECK(tensor_eval(k, x, y) == eval_kernel(k, 1.1));
    CHECK_THROWS_AS(tensor_eval(k, a, c), DimensionError);
}

TEST_CASE("kernel spec text form") {
    const auto k = KernelSpec::parse("gamma:s=2,theta=1;tau=0.5");
    CHECK(k.rho() == doctest::Approx(4.0));
    CHECK(k.tau().value() == 0.5);
    CHECK(KernelSpec::parse(k.to_string()).rho() == k.rho());
    CHECK(KernelSpec::parse("rayleigh:sigma=1;rho=3").rho() == 3.0);
    CHECK(KernelSpec::parse("rayleigh:sigma=1").rho() == 1.0);
    CHECK_THROWS_AS(KernelSpec::parse("rayleigh:sigma=1;rho=0"), DomainError);
    CHECK_THROWS_AS(KernelSpec(DistributionSpec::parse("exp:theta=1"), -1.0), DomainError);
    CHECK_THROWS_AS(KernelSpec::parse("rayleigh:sigma=1;width=2"), ParseError);
}
