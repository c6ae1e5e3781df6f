#pragma once

// Polya kernels k(r) = E[max(0, 1 - |r|/X)] for a positively supported X,
// their Fourier transforms, and the inverse map from k back to the cdf of X.

#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "polya/distributions.hpp"

namespace polya {

/// A kernel r -> k(rho * r) built from `dist`.
///
/// Text form: `<dist>[;tau=<v>|;rho=<v>]`, e.g. `gamma:s=2,theta=1;tau=0.5`.
/// When tau is given, rho = mean(dist) / tau, so the area under the kernel equals tau.
class KernelSpec {
public:
    explicit KernelSpec(DistributionSpec dist, double rho = 1.0);
    static KernelSpec from_tau(DistributionSpec dist, double tau);
    static KernelSpec parse(std::string_view text);

    const DistributionSpec& dist() const noexcept { return dist_; }
    double rho() const noexcept { return rho_; }
    std::optional<double> tau() const noexcept { return tau_; }
    std::string to_string() const;

private:
    DistributionSpec dist_;
    double rho_;
    std::optional<double> tau_;
};

struct SpectralValue {
    double t;
    double value;
};

/// k(rho * r); closed form when one exists, else the quadrature oracle.
double eval_kernel(const KernelSpec& spec, double r);

/// k(r) for rho = 1 straight from the Stieltjes integral int_r^inf (1 - r/x) dF(x):
/// adaptive quadrature for continuous laws, a pmf sum for the shifted Poisson.
double eval_kernel_numeric(const DistributionSpec& dist, double r);

/// Same integral for an arbitrary finite discrete law given by its atoms.
double eval_kernel_numeric(std::span<const Atom> atoms, double r);

/// Right derivative of r -> k(rho * r) at r >= 0 (minus infinity at 0 for some families).
double kernel_slope(const KernelSpec& spec, double r);

/// F[k](t) = int k(rho r) e^{-i r t} dr. Returns mean(dist)/rho at t = 0.
SpectralValue eval_ft(const KernelSpec& spec, double t);

/// F[k](t) for rho = 1 by two independent quadratures: the Stieltjes form
/// (4/t^2) int sin^2(xt/2)/x dF(x) and the cosine transform 2 int_0^inf k(r) cos(rt) dr.
/// Returns the first; throws DisagreementError when they differ by more than 1e-6.
double eval_ft_numeric(const DistributionSpec& dist, double t);

/// Recovers the cdf of X / rho from the kernel as 1 - k(x) + x g(x), g the right derivative of k.
double kernel_to_cdf(const KernelSpec& spec, double x);

/// int_{-inf}^{inf} k(rho r) dr by quadrature.
double area_under_curve(const KernelSpec& spec);

/// prod_j k(rho |x_j - y_j|); throws DimensionError on a length mismatch.
double tensor_eval(const KernelSpec& spec, std::span<const double> x, std::span<const double> y);

}  // namespace polya
