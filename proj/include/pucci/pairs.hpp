#pragma once

// Gradient pairs (g, f) and the registry of named example pairs.

#include "pucci/error.hpp"
#include "pucci/expr.hpp"

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace pucci {

/// The pair of scalar functions defining
///   M(D^2 u + g(u) grad u (x) grad u) + f(u) = 0.
/// g must be non-negative on [0, inf).
struct GradientPair {
    Expr g;
    Expr f;
    Params params;
    std::string label;

    BoundExpr bound_g() const { return g.bind(params); }
    BoundExpr bound_f() const { return f.bind(params); }
};

/// Log-spaced grid used for the g >= 0 check, [1e-8, 1e8].
inline std::vector<double> nonnegativity_grid(int per_decade = 8) {
    std::vector<double> ts;
    for (int k = -8 * per_decade; k <= 8 * per_decade; ++k)
        ts.push_back(std::pow(10.0, static_cast<double>(k) / per_decade));
    return ts;
}

/// Throws InvalidInput unless g is evaluable and >= 0 at every grid point.
/// +inf is accepted (integrable singularities such as t^(-1/2)).
inline void validate_pair(const GradientPair& pair) {
    if (pair.g.empty() || pair.f.empty()) throw InvalidInput("pair needs both g and f");
    for (const auto& name : pair.g.parameters())
        if (!pair.params.count(name)) throw UnboundParameter(name);
    for (const auto& name : pair.f.parameters())
        if (!pair.params.count(name)) throw UnboundParameter(name);
    const BoundExpr g = pair.bound_g();
    for (double t : nonnegativity_grid()) {
        double v = 0.0;
        try {
            v = g(t);
        } catch (const DomainError& e) {
            throw InvalidInput("g is not evaluable at t = " + detail::format_number(t) + ": " +
                               e.what());
        }
        if (std::isnan(v) || v < 0.0)
            throw InvalidInput("g must be non-negative; g(" + detail::format_number(t) +
                               ") = " + detail::format_number(v));
    }
}

inline GradientPair make_pair(const std::string& g, const std::string& f, Params params = {},
                              std::string label = {}) {
    GradientPair p{Expr::parse(g), Expr::parse(f), std::move(params), std::move(label)};
    if (p.label.empty()) p.label = "g=" + g + "; f=" + f;
    validate_pair(p);
    return p;
}

namespace detail {

struct ParamRule {
    const char* name;
    double min;
    bool strict;  // value > min rather than >= min
    std::optional<double> fallback;
};

struct RegistryEntry {
    const char* name;
    const char* g;
    const char* f;
    const char* label;
    std::vector<ParamRule> rules;
    std::function<void(const Params&)> extra_check;
};

inline const std::vector<RegistryEntry>& registry() {
    static const std::vector<RegistryEntry> entries = {
        {"power-m", "m*t^(m-1)", "t^p*exp(-(t^m))",
         "g(t)=m t^(m-1), f(t)=t^p exp(-t^m)",
         {{"m", 0.0, true, {}}, {"p", 0.0, true, {}}},
         {}},
        {"power-m-super", "m*t^(m-1)", "nu*t*exp(t^q-t^m)",
         "g(t)=m t^(m-1), f(t)=nu t exp(t^q - t^m)",
         {{"m", 0.0, true, {}}, {"q", 0.0, true, {}}, {"nu", 0.0, true, {}}},
         [](const Params& p) {
             if (!(p.at("q") > p.at("m"))) throw InvalidInput("power-m-super requires q > m");
         }},
        {"exp-one", "1", "a*(exp(t)-1)^p*exp(-t)",
         "g(t)=1, f(t)=a (e^t-1)^p e^-t",
         {{"a", 0.0, true, 1.0}, {"p", 0.0, true, {}}},
         {}},
        {"mu-over-1+t", "mu/(1+t)", "a/(mu+1)^p*((1+t)^(mu+1)-1)^p*(1+t)^(-mu)",
         "g(t)=mu/(1+t), f(t)=a/(mu+1)^p [(1+t)^(mu+1)-1]^p (1+t)^-mu",
         {{"a", 0.0, true, 1.0}, {"mu", 0.0, true, {}}, {"p", 0.0, true, {}}},
         {}},
        // sinh(t)/(cosh(t)+1) == tanh(t/2); the tanh form does not overflow.
        {"sinh-cosh", "tanh(t/2)",
         "a/(1+cosh(t))*((sinh(t)+t)^p-gamma*(sinh(t)+t))",
         "g(t)=sinh t/(cosh t+1), f(t)=a/(1+cosh t) [(sinh t+t)^p - gamma (sinh t+t)]",
         {{"a", 0.0, true, 1.0}, {"p", 0.0, true, {}}, {"gamma", 0.0, false, 0.0}},
         {}},
        // e^t(1+t)/(t e^t+1) == (1+t)/(t+e^-t).
        {"texp", "(1+t)/(t+exp(-t))",
         "a/(t*exp(t)+1)*(mu*log(2+t+(t-1)*exp(t))-gamma*(1+t+(t-1)*exp(t)))",
         "g(t)=e^t(1+t)/(t e^t+1), f(t)=a/(t e^t+1) [mu ln(2+t+(t-1)e^t) - gamma (1+t+(t-1)e^t)]",
         {{"a", 0.0, true, 1.0}, {"mu", 0.0, true, {}}, {"gamma", 0.0, false, 0.0}},
         {}},
        {"regular-log", "1/((t+euler)*log(t+euler))",
         "(t+euler)^p/log(t+euler)*(log(t+euler)-1)^p",
         "g(t)=1/((t+e) ln(t+e)), f(t)=(t+e)^p/ln(t+e) (ln(t+e)-1)^p",
         {{"p", 0.0, true, {}}},
         {}},
        {"tanh-psi", "tanh(t)", "(-gamma+mu+sinh(t)^(p-1))*tanh(t)",
         "g(t)=tanh t, f(t)=(-gamma+mu+sinh^(p-1) t) tanh t",
         {{"gamma", 0.0, false, 0.0}, {"mu", 0.0, false, 0.0}, {"p", 1.0, true, {}}},
         {}},
        {"two-t-rational", "2*t/(1+t^2)", "1/(1+t^2)*(t+t^3/3)^p",
         "g(t)=2t/(1+t^2), f(t)=(t+t^3/3)^p/(1+t^2)",
         {{"p", 0.0, true, {}}},
         {}},
        {"proto-uniq", "1", "(-(exp(t)-1)+(exp(t)-1)^p)*exp(-t)",
         "g(t)=1, f(t)=[-phi(t)+phi(t)^p] e^-G(t) with phi(t)=e^t-1",
         {{"p", 1.0, true, {}}},
         {}},
        // e^t/(1+e^t) == 1/(1+e^-t).
        {"proto-logistic", "1/(1+exp(-t))",
         "2/(1+exp(t))*(((exp(t)+t-1)/2)^p-(exp(t)+t-1)/2)",
         "g(t)=e^t/(1+e^t), f(t)=2/(1+e^t) [((e^t+t-1)/2)^p - (e^t+t-1)/2]",
         {{"p", 1.0, true, {}}},
         {}},
    };
    return entries;
}

}  // namespace detail

inline std::vector<std::string> builtin_pair_names() {
    std::vector<std::string> out;
    for (const auto& e : detail::registry()) out.emplace_back(e.name);
    return out;
}

/// One admissible parameter set per registry entry, in registry order.
inline std::vector<std::pair<std::string, Params>> builtin_pair_examples() {
    return {
        {"power-m", {{"m", 1.0}, {"p", 0.5}}},
        {"power-m-super", {{"m", 1.0}, {"q", 2.0}, {"nu", 1.0}}},
        {"exp-one", {{"a", 1.0}, {"p", 2.0}}},
        {"mu-over-1+t", {{"mu", 2.0}, {"p", 2.0}}},
        {"sinh-cosh", {{"p", 2.0}, {"gamma", 0.5}}},
        {"texp", {{"mu", 1.0}}},
        {"regular-log", {{"p", 1.5}}},
        {"tanh-psi", {{"p", 2.0}}},
        {"two-t-rational", {{"p", 2.0}}},
        {"proto-uniq", {{"p", 2.0}}},
        {"proto-logistic", {{"p", 2.0}}},
    };
}

/// Looks up a named pair and substitutes parameters. Missing optional
/// parameters take their documented defaults (a = 1, gamma = 0, mu = 0 for tanh-psi).
inline GradientPair builtin_pair(const std::string& name, const Params& params) {
    for (const auto& e : detail::registry()) {
        if (name != e.name) continue;
        Params bound;
        for (const auto& rule : e.rules) {
            auto it = params.find(rule.name);
            double v = 0.0;
            if (it != params.end()) {
                v = it->second;
            } else if (rule.fallback) {
                v = *rule.fallback;
            } else {
                throw InvalidInput("pair '" + name + "' requires parameter '" + rule.name + "'");
            }
            const bool ok = std::isfinite(v) && (rule.strict ? v > rule.min : v >= rule.min);
            if (!ok)
                throw InvalidInput("pair '" + name + "': parameter " + rule.name + " = " +
                                   detail::format_number(v) + " must be " +
                                   (rule.strict ? "> " : ">= ") + detail::format_number(rule.min));
            bound[rule.name] = v;
        }
        for (const auto& [k, v] : params) {
            if (!bound.count(k))
                throw InvalidInput("pair '" + name + "' has no parameter '" + k + "'");
        }
        if (e.extra_check) e.extra_check(bound);
        GradientPair p{Expr::parse(e.g), Expr::parse(e.f), std::move(bound), e.label};
        validate_pair(p);
        return p;
    }
    std::string known;
    for (const auto& n : builtin_pair_names()) known += (known.empty() ? "" : ", ") + n;
    throw InvalidInput("unknown pair '" + name + "' (known: " + known + ")");
}

}  // namespace pucci
