// Positive radial solution of M+(D^2 u) + |Du|^2 + f(u) = 0 on a ball,
// with g = 1 and f = (-(e^t - 1) + (e^t - 1)^2) e^-t, so h(s) = -s + s^2.

#include "pucci/pucci.hpp"

#include <cstdio>

int main() {
    using namespace pucci;
    const Ellipticity ell(1.0, 2.0, 5);
    const auto pair = builtin_pair("proto-uniq", {{"p", 2.0}});
    const auto bp = make_ball_problem(SourceSpec::from_pair(), pair, ell, OperatorSign::Plus);

    const double R = 5.0;
    const auto scan = uniqueness_scan(bp, R, default_amplitude_grid(41));
    std::printf("R = %g: %zu solution(s) over %zu amplitudes\n", R, scan.solutions.size(), scan.samples.size());
    for (const auto& sol : scan.solutions) {
        std::printf("  v(0) = %.10f  rho = %.12f\n", sol.amplitude, sol.rho);
        std::printf("  residuals: transformed %.2e, original %.2e\n", sol.residual_transformed, sol.residual_original);
        for (std::size_t i = 0; i < sol.u_profile.size(); i += sol.u_profile.size() / 8)
            std::printf("    r = %.4f  u = %.8f\n", sol.u_profile[i].r, sol.u_profile[i].u);
    }
    for (const auto& note : scan.notes) std::printf("  note: %s\n", note.c_str());
}
