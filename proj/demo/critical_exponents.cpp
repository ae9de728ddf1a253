// Constants and located critical exponents for a few ellipticity triples.

#include "pucci/pucci.hpp"

#include <cstdio>

int main() {
    using namespace pucci;
    const Ellipticity triples[] = {{1.0, 1.0, 3}, {1.0, 2.0, 5}, {1.0, 2.0, 3}};
    for (const auto& ell : triples) {
        const auto c = critical_constants(ell);
        std::printf("lambda=%g Lambda=%g n=%d  N+=%.6f N-=%.6f\n", ell.lambda(), ell.Lambda(), ell.n(), c.N_plus,
                    c.N_minus);
        for (OperatorSign s : {OperatorSign::Plus, OperatorSign::Minus}) {
            try {
                CriticalSearch opts;
                opts.tol_p = 1e-4;
                const auto r = find_critical_p(ell, s, opts);
                std::printf("  %-5s p* = %.5f  in [%.6f, %.6f] after %d shots\n", to_string(s), r.p_star, r.lo, r.hi,
                            r.iterations);
            } catch (const Error& e) {
                std::printf("  %-5s skipped: %s\n", to_string(s), e.what());
            }
        }
    }
}
