#pragma once

#include <cstddef>
#include <functional>
#include <span>

namespace polya::quad {

using Integrand = std::function<double(double)>;

struct Options {
    double abs_tol = 1e-12;
    double rel_tol = 1e-12;
    std::size_t max_intervals = 4000;
};

struct Result {
    double value = 0.0;
    double abs_error = 0.0;
    std::size_t evaluations = 0;
};

/// Globally adaptive Gauss-Kronrod (10/21) quadrature on a finite [a, b].
/// Throws QuadratureError when max(abs_tol, rel_tol*|I|) is not reached.
Result integrate(const Integrand& f, double a, double b, const Options& opts = {});

/// Same, with the initial partition given by sorted breakpoints (at least two).
/// Use this to place kinks and discontinuities on interval boundaries.
Result integrate(const Integrand& f, std::span<const double> breakpoints, const Options& opts = {});

/// Integral over [a, inf) through the map x = a + u / (1 - u).
Result integrate_to_infinity(const Integrand& f, double a, const Options& opts = {});

/// Integral over [a, b] of f split into consecutive panels of the given width,
/// for oscillatory integrands whose zeros fall on panel boundaries. The panel
/// sum stops early once `stop_after` consecutive panels each contribute less
/// than `panel_tol` in absolute value.
Result integrate_panels(const Integrand& f, double a, double b, double panel_width, const Options& opts,
                        double panel_tol = 0.0, std::size_t stop_after = 3);

}  // namespace polya::quad
