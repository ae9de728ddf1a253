#pragma once

// Randomized checks of the transform engine: phi^{-1}(phi(s)) = s on [0, 10]
// for every registry pair, and h against hand-simplified closed forms.

#include "pucci/kk_transform.hpp"
#include "pucci/pairs.hpp"
#include "pucci/properties.hpp"

#include <cmath>
#include <cstdint>
#include <functional>
#include <string>

namespace pucci {

inline PropertyReport check_transform_properties(std::uint64_t seed, int points = 20, double roundtrip_tol = 1e-8,
                                                 double closed_form_tol = 1e-7) {
    detail::PropertyRng rng(seed);
    PropertyReport rep{"transform", seed, {}};
    const TransformOptions opts{1e-12, 50.0, 700.0};

    for (const auto& [name, params] : builtin_pair_examples()) {
        const TransformTable table(builtin_pair(name, params), opts);
        PropertyCheck c{"roundtrip_" + name};
        for (int i = 0; i < points; ++i) {
            const double s = rng.uniform(0.0, 10.0);
            detail::record(c, std::abs(table.phi_inv(table.phi(s)) - s), roundtrip_tol);
        }
        rep.checks.push_back(c);
    }

    struct ClosedForm {
        std::string check;
        std::string pair;
        Params params;
        std::function<double(double)> h;
    };
    const ClosedForm forms[] = {
        {"h_exp_one", "exp-one", {{"a", 1.5}, {"p", 2.0}}, [](double v) { return 1.5 * v * v; }},
        {"h_regular_log", "regular-log", {{"p", 1.5}}, [](double s) { return std::pow(s, 1.5); }},
        {"h_prototype", "proto-uniq", {{"p", 2.0}}, [](double s) { return -s + s * s; }},
        {"h_prototype_logistic", "proto-logistic", {{"p", 3.0}}, [](double s) { return -s + s * s * s; }},
    };
    for (const auto& f : forms) {
        const TransformTable table(builtin_pair(f.pair, f.params), opts);
        PropertyCheck c{f.check};
        for (int i = 0; i < points; ++i) {
            const double s = rng.uniform(0.0, 5.0);
            detail::record(c, std::abs(table.h(s) - f.h(s)), closed_form_tol);
        }
        rep.checks.push_back(c);
    }
    return rep;
}

}  // namespace pucci
