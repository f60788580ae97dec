// Dirichlet and Neumann-Dirichlet spectra of the gasket lattice at a few levels,
// with each N-D eigenvalue mapped through the decimation polynomial.
#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "pcf/builtins.hpp"
#include "pcf/spectral.hpp"

int main(int argc, char** argv) {
    using namespace pcf;
    const int n_max = argc > 1 ? std::atoi(argv[1]) : 4;
    auto g = builtin("gasket");
    for (int n = 1; n <= n_max; ++n) {
        auto op = assemble(g.base, g.spec, build_level(g.spec, n));
        auto dir = counting_measure(spectrum(op, Boundary::dirichlet));
        auto nd = nd_spectrum(op);
        std::printf("level %d: |F| = %d, %zu Dirichlet eigenvalues, N-D mass %g\n", n, op.size(),
                    op.interior().size(), nd.total());
        for (const auto& a : nd.atoms) {
            double img = a.location * (5 + 2 * a.location);
            if (std::abs(img) < 5e-9) img = 0;
            std::printf("  %12.8f  x%-4g  phat -> %12.8f  (Dirichlet mult %g)\n", a.location, a.mass, img,
                        dir.mass_near(a.location, 1e-7));
        }
    }
}
