#pragma once

// Special functions needed by the closed-form Polya kernels and their
// Fourier transforms. Everything here is real-argument, double precision,
// and pure.

namespace polya::specfun {

/// Value plus a (conservative) estimate of its absolute error.
struct EvalResult {
    double value = 0.0;
    double est_abs_error = 0.0;
};

/// Gamma function for s > 0 (Lanczos, g = 7, 9 terms).
double gamma_fn(double s);

/// log Gamma(s) for s > 0.
double log_gamma(double s);

/// Upper incomplete gamma Gamma(s, t) = int_t^inf x^{s-1} e^{-x} dx.
/// Requires t >= 0, s >= 0 and not s = t = 0. Gamma(0, t) = E1(t).
double upper_inc_gamma(double s, double t);
EvalResult upper_inc_gamma_checked(double s, double t);

/// Regularized incomplete gammas P(s,t) = gamma(s,t)/Gamma(s) and Q = 1 - P,
/// each computed directly on its own side so that small values keep full
/// relative precision. P(0, t) = 1 and Q(0, t) = 0 by continuity in s.
double regularized_lower_gamma(double s, double t);
double regularized_upper_gamma(double s, double t);

/// Exponential integral E1(z), z > 0.
double exp_integral_e1(double z);

/// Kummer's confluent hypergeometric M(a, b, z); b must not be a nonpositive integer.
double kummer_m(double a, double b, double z);

/// M(a, b, z) - 1 without cancellation for small |z|.
double kummer_m_minus_one(double a, double b, double z);

enum class ErfKind { Erf, Erfc, Erfi };

double erf_family(ErfKind kind, double x);

inline double erf(double x) { return erf_family(ErfKind::Erf, x); }
inline double erfc(double x) { return erf_family(ErfKind::Erfc, x); }
inline double erfi(double x) { return erf_family(ErfKind::Erfi, x); }

inline constexpr double kEulerGamma = 0.57721566490153286060651209008240243;

}  // namespace polya::specfun
