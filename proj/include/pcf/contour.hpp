#pragma once
// Zero counting of analytic functions on rectangles by continuous argument tracking.
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>

#include <Eigen/Dense>

#include "pcf/error.hpp"

namespace pcf {

using Complex = std::complex<double>;

struct Rect {
    double re_lo, re_hi, im_lo, im_hi;
};

struct WindingResult {
    int zeros = 0;
    double winding = 0; // raw accumulated argument / 2pi
};

// f returns a value whose phase is that of the analytic function; its modulus is unused.
inline WindingResult count_zeros(const std::function<Complex(Complex)>& f, const Rect& r, int base_steps = 64,
                                 double max_step_angle = 0.5) {
    const Complex corners[5] = {{r.re_lo, r.im_lo}, {r.re_hi, r.im_lo}, {r.re_hi, r.im_hi}, {r.re_lo, r.im_hi},
                                {r.re_lo, r.im_lo}};
    double total = 0;
    std::function<double(Complex, Complex, Complex, Complex, int)> walk = [&](Complex a, Complex b, Complex fa,
                                                                              Complex fb, int depth) -> double {
        const double d = std::arg(fb / fa);
        const Complex m = 0.5 * (a + b);
        const Complex fm = f(m);
        if (std::abs(fm) == 0) throw DomainError("zero on the contour");
        // Accept only when the halves agree with the whole, which rules out aliasing by 2pi.
        const double d1 = std::arg(fm / fa), d2 = std::arg(fb / fm);
        if (std::abs(d) <= max_step_angle && std::abs(d1 + d2 - d) < 1e-9) return d;
        if (depth > 40) throw DomainError("argument tracking failed: zero on or near the contour");
        return walk(a, m, fa, fm, depth + 1) + walk(m, b, fm, fb, depth + 1);
    };
    for (int e = 0; e < 4; ++e) {
        Complex a = corners[e];
        Complex fa = f(a);
        for (int s = 1; s <= base_steps; ++s) {
            const Complex b = corners[e] + (corners[e + 1] - corners[e]) * (static_cast<double>(s) / base_steps);
            const Complex fb = f(b);
            if (std::abs(fb) == 0) throw DomainError("zero on the contour");
            total += walk(a, b, fa, fb, 0);
            a = b;
            fa = fb;
        }
    }
    WindingResult w;
    w.winding = total / (2 * std::numbers::pi);
    w.zeros = static_cast<int>(std::lround(w.winding));
    return w;
}

// Phase of det(M) as a unit complex number, from an LU factorization.
inline Complex det_phase(const Eigen::MatrixXcd& M) {
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(M);
    const auto& LU = lu.matrixLU();
    Complex p = lu.permutationP().determinant();
    for (Eigen::Index i = 0; i < LU.rows(); ++i) {
        const Complex d = LU(i, i);
        if (std::abs(d) == 0) return 0;
        p *= d / std::abs(d);
    }
    return p;
}

} // namespace pcf
