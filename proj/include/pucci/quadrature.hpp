#pragma once

// Globally adaptive Gauss-Kronrod (7/15) quadrature. Nodes are interior, so
// integrable endpoint singularities such as t^(-1/2) are handled by bisection.

#include "pucci/error.hpp"

#include <array>
#include <cmath>
#include <queue>
#include <vector>

namespace pucci {

struct QuadratureResult {
    double value = 0.0;
    double error = 0.0;
    int intervals = 0;
    bool converged = false;
};

namespace detail {

struct GkPanel {
    double a, b, value, error;
    bool operator<(const GkPanel& o) const { return error < o.error; }
};

template <class F>
GkPanel gauss_kronrod15(F& f, double a, double b) {
    static constexpr std::array<double, 8> x{
        0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
        0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
        0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
        0.207784955007898467600689403773245, 0.0};
    static constexpr std::array<double, 8> wk{
        0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
        0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
        0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
        0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
    static constexpr std::array<double, 4> wg{
        0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
        0.381830050505118944950369775488975, 0.417959183673469387755102040816327};
    const double c = 0.5 * (a + b), hw = 0.5 * (b - a);
    const double fc = f(c);
    double k = wk[7] * fc, g = wg[3] * fc;
    for (int i = 0; i < 7; ++i) {
        const double f1 = f(c - hw * x[i]), f2 = f(c + hw * x[i]);
        k += wk[i] * (f1 + f2);
        if (i % 2 == 1) g += wg[i / 2] * (f1 + f2);
    }
    return {a, b, k * hw, std::abs((k - g) * hw)};
}

}  // namespace detail

/// Integrates f over [a, b] until the error estimate is below
/// max(abs_tol, rel_tol * |value|).
template <class F>
QuadratureResult integrate_adaptive(F&& f, double a, double b, double abs_tol, double rel_tol,
                                    int max_intervals = 4000) {
    QuadratureResult out;
    if (a == b) {
        out.converged = true;
        return out;
    }
    std::priority_queue<detail::GkPanel> heap;
    heap.push(detail::gauss_kronrod15(f, a, b));
    double value = heap.top().value, error = heap.top().error;
    while (error > std::max(abs_tol, rel_tol * std::abs(value)) &&
           static_cast<int>(heap.size()) < max_intervals) {
        const detail::GkPanel worst = heap.top();
        heap.pop();
        const double m = 0.5 * (worst.a + worst.b);
        if (!(m > worst.a && m < worst.b)) {
            heap.push(worst);
            break;
        }
        const auto left = detail::gauss_kronrod15(f, worst.a, m);
        const auto right = detail::gauss_kronrod15(f, m, worst.b);
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }
    // re-sum to drop accumulated cancellation in the running totals
    value = 0.0;
    error = 0.0;
    out.intervals = static_cast<int>(heap.size());
    while (!heap.empty()) {
        value += heap.top().value;
        error += heap.top().error;
        heap.pop();
    }
    out.value = value;
    out.error = error;
    out.converged = error <= std::max(abs_tol, rel_tol * std::abs(value));
    return out;
}

}  // namespace pucci
