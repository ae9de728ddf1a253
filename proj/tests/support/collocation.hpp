#pragma once

// Independent oracle for radial Dirichlet problems: second-order finite
// differences on a uniform grid over [0, R], u(R) = 0, solved by semismooth
// Newton (the Pucci weighting is piecewise linear) with a tridiagonal solve.

#include "pucci/pucci_core.hpp"

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace oracle {

struct Collocation {
    std::vector<double> r;
    std::vector<double> v;
    int iterations = 0;
    double residual = 0.0;
};

inline double slope(double x, const pucci::Ellipticity& ell, pucci::OperatorSign s) {
    return x > 0.0 ? ell.positive_weight(s) : ell.negative_weight(s);
}

/// Solves w(v'') + (n-1) w(v'/r) + h(v) = 0 on (0, R), v'(0) = 0, v(R) = 0.
inline Collocation solve(const std::function<double(double)>& h, const std::function<double(double)>& dh,
                         const pucci::Ellipticity& ell, pucci::OperatorSign sign, double R, int points,
                         const std::function<double(double)>& guess) {
    const int N = points;  // unknowns v_0 .. v_{N-1}; v_N = 0 at r = R
    const double d = R / N;
    Collocation out;
    out.r.resize(N + 1);
    out.v.assign(N + 1, 0.0);
    for (int i = 0; i <= N; ++i) {
        out.r[i] = d * i;
        out.v[i] = i == N ? 0.0 : guess(out.r[i]);
    }
    const int n = ell.n();
    std::vector<double> F(N), lo(N), di(N), up(N);
    for (int it = 0; it < 100; ++it) {
        auto& v = out.v;
        double norm = 0.0;
        for (int i = 0; i < N; ++i) {
            if (i == 0) {
                const double x = 2.0 * (v[1] - v[0]) / (d * d);
                const double w = slope(x, ell, sign);
                F[0] = n * pucci::weighting(x, ell, sign) + h(v[0]);
                di[0] = -2.0 * n * w / (d * d) + dh(v[0]);
                up[0] = 2.0 * n * w / (d * d);
                lo[0] = 0.0;
            } else {
                const double x = (v[i + 1] - 2.0 * v[i] + v[i - 1]) / (d * d);
                const double y = (v[i + 1] - v[i - 1]) / (2.0 * d * out.r[i]);
                const double wx = slope(x, ell, sign), wy = (n - 1) * slope(y, ell, sign);
                F[i] = pucci::weighting(x, ell, sign) + (n - 1) * pucci::weighting(y, ell, sign) + h(v[i]);
                di[i] = -2.0 * wx / (d * d) + dh(v[i]);
                lo[i] = wx / (d * d) - wy / (2.0 * d * out.r[i]);
                up[i] = wx / (d * d) + wy / (2.0 * d * out.r[i]);
            }
            norm = std::max(norm, std::abs(F[i]));
        }
        out.residual = norm;
        out.iterations = it;
        if (norm < 1e-11) return out;
        // Thomas algorithm for J dv = -F (last row has no upper neighbour)
        std::vector<double> c(N), g(N);
        c[0] = up[0] / di[0];
        g[0] = -F[0] / di[0];
        for (int i = 1; i < N; ++i) {
            const double m = di[i] - lo[i] * c[i - 1];
            c[i] = i + 1 < N ? up[i] / m : 0.0;
            g[i] = (-F[i] - lo[i] * g[i - 1]) / m;
        }
        std::vector<double> dv(N);
        dv[N - 1] = g[N - 1];
        for (int i = N - 2; i >= 0; --i) dv[i] = g[i] - c[i] * dv[i + 1];
        double step = 0.0, size = 0.0;
        for (int i = 0; i < N; ++i) {
            v[i] += dv[i];
            step = std::max(step, std::abs(dv[i]));
            size = std::max(size, std::abs(v[i]));
        }
        // the residual bottoms out at rounding / d^2; a vanishing update is convergence
        if (step <= 1e-13 * (1.0 + size)) return out;
    }
    throw std::runtime_error("collocation Newton did not converge");
}

}  // namespace oracle
