#include "polya/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <vector>

#include "polya/errors.hpp"

namespace polya::quad {
namespace {

// Kronrod 21-point abscissae (nonnegative half); odd indices are the Gauss 10-point nodes.
constexpr std::array<double, 11> kXgk = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.000000000000000000000000000000000};

constexpr std::array<double, 11> kWgk = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077208031519180, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};

constexpr std::array<double, 5> kWg = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

struct Segment {
    double a;
    double b;
    double value;
    double error;
    bool operator<(const Segment& other) const { return error < other.error; }
};

Segment gauss_kronrod(const Integrand& f, double a, double b) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(center);
    double kronrod = fc * kWgk[10];
    double gauss = 0.0;
    for (std::size_t j = 0; j < 10; ++j) {
        const double dx = half * kXgk[j];
        const double pair = f(center - dx) + f(center + dx);
        kronrod += kWgk[j] * pair;
        if (j % 2 == 1) gauss += kWg[j / 2] * pair;
    }
    kronrod *= half;
    gauss *= half;
    double error = std::abs(kronrod - gauss);
    if (!std::isfinite(kronrod)) error = std::numeric_limits<double>::infinity();
    return {a, b, kronrod, error};
}

Result adapt(const Integrand& f, std::vector<Segment> initial, const Options& opts) {
    std::priority_queue<Segment> heap;
    double total = 0.0;
    double total_error = 0.0;
    std::size_t evaluations = 21 * initial.size();
    for (const auto& s : initial) {
        total += s.value;
        total_error += s.error;
        heap.push(s);
    }
    auto converged = [&] { return total_error <= std::max(opts.abs_tol, opts.rel_tol * std::abs(total)); };
    while (!converged()) {
        if (heap.size() >= opts.max_intervals) {
            throw QuadratureError("adaptive quadrature: interval budget exhausted", total, total_error);
        }
        const Segment worst = heap.top();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b)) {
            throw QuadratureError("adaptive quadrature: interval below floating-point resolution", total,
                                  total_error);
        }
        heap.pop();
        const Segment left = gauss_kronrod(f, worst.a, mid);
        const Segment right = gauss_kronrod(f, mid, worst.b);
        evaluations += 42;
        total += left.value + right.value - worst.value;
        total_error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        // Refresh sums from scratch now and then so cancellation in the running
        // totals cannot fake convergence.
        if (heap.size() % 64 == 0 || converged()) {
            auto copy = heap;
            total = 0.0;
            total_error = 0.0;
            while (!copy.empty()) {
                total += copy.top().value;
                total_error += copy.top().error;
                copy.pop();
            }
        }
    }
    if (!std::isfinite(total)) throw QuadratureError("adaptive quadrature: non-finite integrand", total, total_error);
    return {total, total_error, evaluations};
}

}  // namespace

Result integrate(const Integrand& f, double a, double b, const Options& opts) {
    if (a == b) return {};
    if (a > b) {
        Result r = integrate(f, b, a, opts);
        r.value = -r.value;
        return r;
    }
    return adapt(f, {gauss_kronrod(f, a, b)}, opts);
}

Result integrate(const Integrand& f, std::span<const double> breakpoints, const Options& opts) {
    if (breakpoints.size() < 2) throw DomainError("integrate: need at least two breakpoints");
    std::vector<Segment> initial;
    for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
        if (!(breakpoints[i] <= breakpoints[i + 1])) throw DomainError("integrate: breakpoints must be sorted");
        if (breakpoints[i] < breakpoints[i + 1]) initial.push_back(gauss_kronrod(f, breakpoints[i], breakpoints[i + 1]));
    }
    if (initial.empty()) return {};
    return adapt(f, std::move(initial), opts);
}

Result integrate_to_infinity(const Integrand& f, double a, const Options& opts) {
    auto mapped = [&](double u) {
        const double one_minus = 1.0 - u;
        if (one_minus <= 0.0) return 0.0;
        const double x = a + u / one_minus;
        const double v = f(x);
        return v == 0.0 ? 0.0 : v / (one_minus * one_minus);
    };
    return adapt(mapped, {gauss_kronrod(mapped, 0.0, 0.5), gauss_kronrod(mapped, 0.5, 1.0)}, opts);
}

Result integrate_panels(const Integrand& f, double a, double b, double panel_width, const Options& opts,
                        double panel_tol, std::size_t stop_after) {
    if (!(panel_width > 0.0)) throw DomainError("integrate_panels: panel width must be positive");
    Result total;
    std::size_t quiet = 0;
    for (std::size_t i = 0;; ++i) {
        const double lo = a + static_cast<double>(i) * panel_width;
        if (!(lo < b)) break;
        const double hi = std::min(b, a + static_cast<double>(i + 1) * panel_width);
        if (!(hi > lo)) break;
        const Result r = integrate(f, lo, hi, opts);
        total.value += r.value;
        total.abs_error += r.abs_error;
        total.evaluations += r.evaluations;
        quiet = std::abs(r.value) < panel_tol ? quiet + 1 : 0;
        if (panel_tol > 0.0 && quiet >= stop_after) break;
    }
    return total;
}

}  // namespace polya::quad
