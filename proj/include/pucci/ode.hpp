#pragma once

// Embedded Runge-Kutta 5(4) (Dormand-Prince) with adaptive step control and
// the standard fourth-order continuous extension.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>

namespace pucci::ode {

template <std::size_t N>
using State = std::array<double, N>;

struct StepControl {
    double rtol = 1e-10;
    double atol = 1e-14;
    double initial_step = 0.0;  ///< 0 selects a step automatically
    double max_step = std::numeric_limits<double>::infinity();
    double min_step_rel = 1e-14;  ///< failure once h < min_step_rel * max(|t|, 1e-300)
    long max_steps = 2'000'000;
};

namespace tableau {
inline constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
inline constexpr double a21 = 1.0 / 5;
inline constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
inline constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
inline constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                        a54 = -212.0 / 729;
inline constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                        a64 = 49.0 / 176, a65 = -5103.0 / 18656;
inline constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                        b6 = 11.0 / 84;
// b - b* (fifth minus fourth order weights)
inline constexpr std::array<double, 7> e{71.0 / 57600,   0.0, -71.0 / 16695, 71.0 / 1920,
                                         -17253.0 / 339200, 22.0 / 525,    -1.0 / 40};
// Dense output: y(t0 + theta h) = y0 + h sum_k k_k sum_j P[k][j] theta^(j+1)
inline constexpr double P[7][4] = {
    {1.0, -8048581381.0 / 2820520608, 8663915743.0 / 2820520608, -12715105075.0 / 11282082432},
    {0.0, 0.0, 0.0, 0.0},
    {0.0, 131558114200.0 / 32700410799, -68118460800.0 / 10900136933,
     87487479700.0 / 32700410799},
    {0.0, -1754552775.0 / 470086768, 14199869525.0 / 1410260304, -10690763975.0 / 1880347072},
    {0.0, 127303824393.0 / 49829197408, -318862633887.0 / 49829197408,
     701980252875.0 / 199316789632},
    {0.0, -282668133.0 / 205662961, 2019193451.0 / 616988883, -1453857185.0 / 822651844},
    {0.0, 40617522.0 / 29380423, -110615467.0 / 29380423, 69997945.0 / 29380423},
};
}  // namespace tableau

/// One accepted step with its continuous extension.
template <std::size_t N>
struct DenseStep {
    double t0 = 0.0;
    double h = 0.0;
    State<N> y0{};
    std::array<State<N>, 4> q{};

    double t1() const noexcept { return t0 + h; }

    State<N> eval(double t) const noexcept {
        const double th = (t - t0) / h;
        State<N> y = y0;
        for (std::size_t i = 0; i < N; ++i) {
            const double p = th * (q[0][i] + th * (q[1][i] + th * (q[2][i] + th * q[3][i])));
            y[i] += h * p;
        }
        return y;
    }

    /// Time derivative of the interpolant.
    State<N> derivative(double t) const noexcept {
        const double th = (t - t0) / h;
        State<N> d{};
        for (std::size_t i = 0; i < N; ++i)
            d[i] = q[0][i] + th * (2.0 * q[1][i] + th * (3.0 * q[2][i] + th * 4.0 * q[3][i]));
        return d;
    }
};

enum class Outcome { ReachedEnd, Stopped, StepFailure };

template <std::size_t N>
struct Result {
    Outcome outcome = Outcome::ReachedEnd;
    double t = 0.0;
    State<N> y{};
    long accepted = 0;
    long rejected = 0;
    long evaluations = 0;
};

namespace detail {

template <std::size_t N>
double error_norm(const State<N>& err, const State<N>& y0, const State<N>& y1,
                  const StepControl& c) {
    double s = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
        const double sc = c.atol + c.rtol * std::max(std::abs(y0[i]), std::abs(y1[i]));
        const double r = err[i] / sc;
        s += r * r;
    }
    return std::sqrt(s / static_cast<double>(N));
}

template <std::size_t N>
bool all_finite(const State<N>& y) {
    for (double v : y)
        if (!std::isfinite(v)) return false;
    return true;
}

}  // namespace detail

/// Integrates y' = f(t, y) from t0 towards t_end (t_end > t0).
///
/// `observer(step, y1, f1)` is called after every accepted step and returns
/// false to stop the integration (events). `f` may return non-finite values,
/// which cause the step to be rejected and retried smaller.
template <std::size_t N, class Rhs, class Observer>
Result<N> integrate(Rhs&& f, double t0, const State<N>& y_init, double t_end, const StepControl& ctl,
                    Observer&& observer) {
    using namespace tableau;
    Result<N> res;
    double t = t0;
    State<N> y = y_init;
    State<N> k1 = f(t, y);
    res.evaluations = 1;

    auto scale = [&](const State<N>& v, std::size_t i) {
        return ctl.atol + ctl.rtol * std::abs(v[i]);
    };

    double h = ctl.initial_step;
    if (!(h > 0.0)) {
        double d0 = 0.0, d1 = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            d0 += std::pow(y[i] / scale(y, i), 2);
            d1 += std::pow(k1[i] / scale(y, i), 2);
        }
        d0 = std::sqrt(d0 / N);
        d1 = std::sqrt(d1 / N);
        h = (d0 < 1e-5 || d1 < 1e-5 || !std::isfinite(d1)) ? 1e-6 * std::max(1.0, std::abs(t))
                                                          : 0.01 * d0 / d1;
        h = std::min(h, t_end - t);
    }
    h = std::min(h, ctl.max_step);

    bool last_rejected = false;
    while (t < t_end) {
        if (res.accepted + res.rejected >= ctl.max_steps) {
            res.outcome = Outcome::StepFailure;
            break;
        }
        const double min_h = ctl.min_step_rel * std::max(std::abs(t), 1e-300);
        if (h < min_h) {
            res.outcome = Outcome::StepFailure;
            break;
        }
        bool final_step = false;
        if (t + h >= t_end) {
            h = t_end - t;
            final_step = true;
        }

        State<N> yt, k2, k3, k4, k5, k6, k7, y1, err;
        for (std::size_t i = 0; i < N; ++i) yt[i] = y[i] + h * a21 * k1[i];
        k2 = f(t + c2 * h, yt);
        for (std::size_t i = 0; i < N; ++i) yt[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
        k3 = f(t + c3 * h, yt);
        for (std::size_t i = 0; i < N; ++i) yt[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        k4 = f(t + c4 * h, yt);
        for (std::size_t i = 0; i < N; ++i)
            yt[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        k5 = f(t + c5 * h, yt);
        for (std::size_t i = 0; i < N; ++i)
            yt[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
        const double t1 = final_step ? t_end : t + h;
        k6 = f(t1, yt);
        for (std::size_t i = 0; i < N; ++i)
            y1[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
        k7 = f(t1, y1);
        res.evaluations += 6;
        for (std::size_t i = 0; i < N; ++i)
            err[i] = h * (e[0] * k1[i] + e[2] * k3[i] + e[3] * k4[i] + e[4] * k5[i] + e[5] * k6[i] +
                          e[6] * k7[i]);

        double en = detail::error_norm(err, y, y1, ctl);
        if (!detail::all_finite(y1) || !detail::all_finite(k7) || !std::isfinite(en)) en = 1e10;

        if (en <= 1.0) {
            DenseStep<N> step;
            step.t0 = t;
            step.h = h;
            step.y0 = y;
            const std::array<const State<N>*, 7> K{&k1, &k2, &k3, &k4, &k5, &k6, &k7};
            for (std::size_t j = 0; j < 4; ++j)
                for (std::size_t i = 0; i < N; ++i) {
                    double s = 0.0;
                    for (std::size_t k = 0; k < 7; ++k) s += (*K[k])[i] * P[k][j];
                    step.q[j][i] = s;
                }
            t = t1;
            y = y1;
            k1 = k7;
            ++res.accepted;
            const bool go_on = observer(static_cast<const DenseStep<N>&>(step), y, k1);
            double fac = en == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(en, -0.2), 0.2, 5.0);
            if (last_rejected) fac = std::min(fac, 1.0);
            last_rejected = false;
            if (!go_on) {
                res.outcome = Outcome::Stopped;
                res.t = t;
                res.y = y;
                return res;
            }
            if (!final_step) h = std::min(h * fac, ctl.max_step);
        } else {
            ++res.rejected;
            last_rejected = true;
            const double fac = en >= 1e10 ? 0.1 : std::clamp(0.9 * std::pow(en, -0.2), 0.1, 0.9);
            h *= fac;
        }
    }
    if (t >= t_end) res.outcome = Outcome::ReachedEnd;
    res.t = t;
    res.y = y;
    return res;
}

template <std::size_t N, class Rhs>
Result<N> integrate(Rhs&& f, double t0, const State<N>& y0, double t_end, const StepControl& ctl) {
    return integrate<N>(std::forward<Rhs>(f), t0, y0, t_end, ctl,
                        [](const DenseStep<N>&, const State<N>&, const State<N>&) { return true; });
}

}  // namespace pucci::ode
