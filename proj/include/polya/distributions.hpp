#pragma once

// Positively supported sampling distributions. Every family here puts zero
// mass at the origin; the Poisson family is shifted by one for that reason.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "polya/random.hpp"

namespace polya {

struct ShiftedPoisson {
    double mu;  // rate of the underlying Poisson; support {1, 2, ...}
};
struct GammaDist {
    double shape;
    double scale = 1.0;
};
struct Nakagami {
    double m;
    double omega = 1.0;
};
struct Weibull {
    double shape;
    double scale = 1.0;
};
struct Exponential {
    double scale = 1.0;
};
struct ChiSquare {
    int nu;
};
struct Chi {
    int nu;
};
struct HalfNormal {
    double sigma = 1.0;
};
struct Rayleigh {
    double sigma = 1.0;
};

using DistributionLaw =
    std::variant<ShiftedPoisson, GammaDist, Nakagami, Weibull, Exponential, ChiSquare, Chi, HalfNormal, Rayleigh>;

/// A validated distribution family with its parameters.
///
/// Text form is `family:param=value,...`, e.g. `gamma:s=2,theta=1`,
/// `poisson:mu=2`, `nakagami:m=1.5,omega=1`, `weibull:alpha=2,theta=1`,
/// `exp:theta=1`, `chi2:nu=3`, `chi:nu=2`, `halfnormal:sigma=1`,
/// `rayleigh:sigma=1`. Scale parameters default to 1.
class DistributionSpec {
public:
    /// Throws DomainError when a parameter is outside its family's bounds.
    explicit DistributionSpec(DistributionLaw law);

    static DistributionSpec parse(std::string_view text);

    const DistributionLaw& law() const noexcept { return law_; }
    std::string family_name() const;
    std::string to_string() const;
    bool is_discrete() const noexcept { return std::holds_alternative<ShiftedPoisson>(law_); }

    template <class Family>
    const Family* get_if() const noexcept {
        return std::get_if<Family>(&law_);
    }

    friend bool operator==(const DistributionSpec& a, const DistributionSpec& b) { return a.to_string() == b.to_string(); }

private:
    DistributionLaw law_;
};

/// pdf (continuous) or pmf (discrete) at x > 0; a pmf is zero off the integers.
double density(const DistributionSpec& d, double x);
double cdf(const DistributionSpec& d, double x);
/// 1 - cdf, computed directly on the upper side.
double survival(const DistributionSpec& d, double x);
double mean(const DistributionSpec& d);
/// Exact draw from d.
double sample(const DistributionSpec& d, RandomStream& stream);

/// Smallest point found (to bisection accuracy) with survival(x) <= tail.
double upper_cutoff(const DistributionSpec& d, double tail = 1e-17);

/// Support points and masses of a discrete d, truncated once the remaining mass is below `tail`.
struct Atom {
    double x;
    double mass;
};
std::vector<Atom> atoms(const DistributionSpec& d, double tail = 1e-17);

/// Auxiliary laws used by random Fourier maps: centered Cauchy with the given
/// scale, or centered normal with the given standard deviation.
enum class AuxKind { Cauchy, Normal };
struct AuxLaw {
    AuxKind kind;
    double scale;
};
double aux_draw(const AuxLaw& law, RandomStream& stream);
std::vector<double> aux_sample(const AuxLaw& law, std::size_t dim, RandomStream& stream);

/// Unshifted Poisson law on {0, 1, 2, ...}.
struct PoissonLaw {
    double mu;
};

/// Cdf of a continuous law given only its density, by quadrature from cached
/// panel integrals (absolute tolerance 1e-10).
class NumericCdf {
public:
    NumericCdf(std::function<double(double)> density, double upper);
    double operator()(double x) const;
    double density(double x) const { return impl_->density(x); }
    double upper() const noexcept { return impl_->upper; }

private:
    struct Impl {
        std::function<double(double)> density;
        double upper;
        std::vector<double> knots;
        std::vector<double> cumulative;
    };
    std::shared_ptr<const Impl> impl_;
};

using TiltedLaw = std::variant<DistributionSpec, PoissonLaw, NumericCdf>;

/// The pair (C, X~) with C = E[1/X] and dF~(x) = dF(x) / (C x).
///
/// The shifted Poisson returns C = 1/mu and X~ = Y, the unshifted Poisson. That
/// pair puts mass e^{-mu} at 0 and C exceeds E[1/X] = (1 - e^{-mu})/mu, but
/// C (1 - F~(r)) = int_(r,inf) dF(x)/x holds for every r >= 0, which is all the
/// kernel and transform formulas use.
struct SpecialCaseDecomposition {
    double c_constant;
    TiltedLaw tilted;
};

/// Throws DomainError when C is infinite for d.
SpecialCaseDecomposition decompose(const DistributionSpec& d);

double tilted_cdf(const SpecialCaseDecomposition& dec, double x);

}  // namespace polya
