#pragma once
// Bivariate polynomials over Q as Poly<QPoly>: outer variable x, inner variable y.
#include <algorithm>
#include <vector>

#include "pcf/poly.hpp"

namespace pcf {

using BiPoly = Poly<QPoly>;

inline int deg_x(const BiPoly& f) { return f.deg(); }
inline int deg_y(const BiPoly& f) {
    int d = -1;
    for (const auto& c : f.c) d = std::max(d, c.deg());
    return d;
}
inline int total_degree(const BiPoly& f) {
    int d = -1;
    for (int i = 0; i <= f.deg(); ++i)
        if (!f.c[i].is_zero()) d = std::max(d, i + f.c[i].deg());
    return d;
}

inline BiPoly bi_x() { return BiPoly::x(); }
inline BiPoly bi_y() { return BiPoly(QPoly::x()); }
inline BiPoly bi_const(const mpq_class& v) { return BiPoly(QPoly(v)); }

// Monic gcd of all y-coefficients.
inline QPoly content(const BiPoly& f) {
    QPoly g;
    for (const auto& c : f.c) {
        g = gcd(g, c);
        if (g.deg() == 0) break;
    }
    return g;
}

inline BiPoly divide_coeffs(const BiPoly& f, const QPoly& d) {
    std::vector<QPoly> out;
    for (const auto& c : f.c) out.push_back(exact_div(c, d));
    return BiPoly(std::move(out));
}

inline BiPoly primitive_part(const BiPoly& f) {
    if (f.is_zero()) return f;
    return divide_coeffs(f, content(f));
}

// Pseudo-remainder of a by b in x over Q[y].
inline BiPoly prem(BiPoly a, const BiPoly& b) {
    const int db = b.deg();
    const QPoly lb = b.lead();
    while (!a.is_zero() && a.deg() >= db) {
        const int shift = a.deg() - db;
        const QPoly la = a.lead();
        a = a * lb - BiPoly::monomial(la, shift) * b;
    }
    return a;
}

// Normalized so the leading y-coefficient of the leading x-coefficient is 1.
inline BiPoly normalize(const BiPoly& f) {
    if (f.is_zero()) return f;
    return f * QPoly(mpq_class(1 / f.lead().lead()));
}

// f(x, r) as a polynomial in x.
inline QPoly specialize_y(const BiPoly& f, const mpq_class& r) {
    std::vector<mpq_class> v;
    for (const auto& c : f.c) v.push_back(c.eval(r));
    return QPoly(std::move(v));
}

// gcd over Q[x, y] by the primitive remainder sequence.
inline BiPoly gcd(const BiPoly& a, const BiPoly& b) {
    if (a.is_zero()) return normalize(b);
    if (b.is_zero()) return normalize(a);
    QPoly c = gcd(content(a), content(b));
    // A common factor of positive x-degree survives every specialization y = r that keeps
    // both leading coefficients nonzero, so a trivial univariate gcd certifies it away.
    for (int r = 0; r < 8; ++r) {
        if (a.lead().eval(mpq_class(r)) == 0 || b.lead().eval(mpq_class(r)) == 0) continue;
        if (gcd(specialize_y(a, r), specialize_y(b, r)).deg() == 0) return normalize(BiPoly(c));
        break;
    }
    BiPoly A = primitive_part(a), B = primitive_part(b);
    if (A.deg() < B.deg()) std::swap(A, B);
    while (!B.is_zero()) {
        BiPoly R = prem(A, B);
        A = std::move(B);
        B = R.is_zero() ? R : primitive_part(R);
    }
    return normalize(primitive_part(A) * c);
}

// Exact division in Q[x, y]; throws if b does not divide a.
inline BiPoly exact_div(BiPoly a, const BiPoly& b) {
    if (b.is_zero()) throw DomainError("division by zero polynomial");
    const int db = b.deg();
    std::vector<QPoly> q(std::max(0, a.deg() - db + 1));
    while (!a.is_zero() && a.deg() >= db) {
        const int shift = a.deg() - db;
        auto [qc, r] = divmod(a.lead(), b.lead());
        if (!r.is_zero()) throw DomainError("inexact bivariate division");
        q[shift] = qc;
        a -= BiPoly::monomial(qc, shift) * b;
    }
    if (!a.is_zero()) throw DomainError("inexact bivariate division");
    return BiPoly(std::move(q));
}

} // namespace pcf
