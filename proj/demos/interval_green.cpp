// Green function of the interval renormalization map along a horizontal line,
// compared with the log-determinant growth of the Dirichlet polynomials.
#include <cstdio>
#include <cstdlib>

#include "pcf/builtins.hpp"
#include "pcf/dynamics.hpp"

int main(int argc, char** argv) {
    using namespace pcf;
    const mpq_class alpha = argc > 1 ? parse_rational(argv[1]) : mpq_class(1, 3);
    const double im = argc > 2 ? std::atof(argv[2]) : 0.3;
    const std::complex<double> one(1.0, 0.0);
    std::printf("alpha = %s, Im lambda = %g\n", alpha.get_str().c_str(), im);
    std::printf("%10s %16s %10s %14s\n", "Re lambda", "G", "iters", "|G20 - G30|");
    for (int k = 0; k <= 16; ++k) {
        const std::complex<double> lam(-4.0 + 0.25 * k, im);
        auto X = interval_phihat(lam, one, one);
        auto g20 = interval_green(alpha, X, 20);
        auto g30 = interval_green(alpha, X, 30);
        std::printf("%10.4f %16.10f %10d %14.3e\n", lam.real(), g30.value, g30.iterations,
                    std::abs(g30.value - g20.value));
    }
}
