#include "pucci/ode.hpp"
#include "pucci/quadrature.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

using namespace pucci;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("dense output weights reproduce the step at theta = 1") {
    using namespace ode::tableau;
    const double b[7] = {b1, 0.0, b3, b4, b5, b6, 0.0};
    for (int k = 0; k < 7; ++k) {
        double s = 0.0;
        for (int j = 0; j < 4; ++j) s += P[k][j];
        CHECK_THAT(s, WithinAbs(b[k], 1e-15));
    }
}

TEST_CASE("exponential decay to tolerance") {
    ode::StepControl ctl;
    ctl.rtol = 1e-12;
    ctl.atol = 1e-14;
    auto res = ode::integrate<1>([](double, const ode::State<1>& y) { return ode::State<1>{-y[0]}; },
                                 0.0, {1.0}, 10.0, ctl);
    CHECK(res.outcome == ode::Outcome::ReachedEnd);
    CHECK(res.t == 10.0);
    CHECK_THAT(res.y[0], WithinRel(std::exp(-10.0), 1e-9));
}

TEST_CASE("dense output of the harmonic oscillator") {
    ode::StepControl ctl;
    ctl.rtol = 1e-11;
    ctl.atol = 1e-13;
    double worst = 0.0;
    long steps = 0;
    auto res = ode::integrate<2>(
        [](double, const ode::State<2>& y) { return ode::State<2>{y[1], -y[0]}; }, 0.0, {0.0, 1.0},
        20.0, ctl, [&](const ode::DenseStep<2>& st, const ode::State<2>&, const ode::State<2>&) {
            ++steps;
            for (int i = 1; i < 8; ++i) {
                const double t = st.t0 + st.h * i / 8.0;
                worst = std::max(worst, std::abs(st.eval(t)[0] - std::sin(t)));
                worst = std::max(worst, std::abs(st.derivative(t)[0] - std::cos(t)));
            }
            return true;
        });
    CHECK(res.outcome == ode::Outcome::ReachedEnd);
    CHECK(steps == res.accepted);
    CHECK(worst < 1e-8);
}

TEST_CASE("observer can stop the integration") {
    auto res = ode::integrate<1>(
        [](double, const ode::State<1>&) { return ode::State<1>{1.0}; }, 0.0, {0.0}, 100.0, {},
        [](const ode::DenseStep<1>&, const ode::State<1>& y, const ode::State<1>&) {
            return y[0] < 3.0;
        });
    CHECK(res.outcome == ode::Outcome::Stopped);
    CHECK(res.y[0] >= 3.0);
    CHECK(res.t < 100.0);
}

TEST_CASE("blow-up is reported as a step failure") {
    // y' = y^2, y(0) = 1 blows up at t = 1
    auto res = ode::integrate<1>(
        [](double, const ode::State<1>& y) { return ode::State<1>{y[0] * y[0]}; }, 0.0, {1.0}, 2.0,
        {});
    CHECK(res.outcome == ode::Outcome::StepFailure);
    CHECK_THAT(res.t, WithinAbs(1.0, 1e-3));
}

TEST_CASE("adaptive Gauss-Kronrod quadrature") {
    auto r1 = integrate_adaptive([](double x) { return std::exp(x); }, 0.0, 1.0, 1e-13, 1e-13);
    CHECK(r1.converged);
    CHECK_THAT(r1.value, WithinAbs(std::numbers::e - 1.0, 1e-13));

    auto r2 = integrate_adaptive([](double x) { return 2 * x / (1 + x * x); }, 0.0, 1.0, 1e-12, 1e-12);
    CHECK_THAT(r2.value, WithinAbs(std::log(2.0), 1e-12));

    // integrable endpoint singularity
    auto r3 = integrate_adaptive([](double x) { return 0.5 / std::sqrt(x); }, 0.0, 4.0, 1e-10, 1e-10);
    CHECK(r3.converged);
    CHECK_THAT(r3.value, WithinAbs(2.0, 1e-9));

    auto r4 = integrate_adaptive([](double) { return 1.0; }, 2.0, 2.0, 1e-10, 1e-10);
    CHECK(r4.value == 0.0);
}
