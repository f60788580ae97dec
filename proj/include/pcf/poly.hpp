#pragma once
// Dense univariate polynomials over a commutative ring, with field-only helpers
// (division, gcd, square-free split, real roots) for exact rationals.
#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include <gmpxx.h>

#include "pcf/error.hpp"

namespace pcf {

// "3", "-2/7" or a finite decimal such as "0.25", converted exactly.
inline mpq_class parse_rational(const std::string& s) {
    auto dot = s.find('.');
    mpq_class q;
    if (dot == std::string::npos) {
        if (s.empty() || q.set_str(s, 10) != 0 || q.get_den() == 0) throw ConfigError("not a rational number: " + s);
    } else {
        std::string digits = s.substr(0, dot) + s.substr(dot + 1);
        mpz_class num;
        if (digits.empty() || digits == "-" || num.set_str(digits, 10) != 0)
            throw ConfigError("not a rational number: " + s);
        mpz_class den;
        mpz_ui_pow_ui(den.get_mpz_t(), 10, s.size() - dot - 1);
        q = mpq_class(num, den);
    }
    q.canonicalize();
    return q;
}

template <class T>
class Poly {
public:
    std::vector<T> c; // c[i] multiplies x^i; no trailing zeros

    Poly() = default;
    Poly(const T& v) {
        if (!(v == T(0))) c.push_back(v);
    }
    explicit Poly(int v) : Poly(T(v)) {}
    explicit Poly(std::vector<T> coeffs) : c(std::move(coeffs)) { trim(); }

    static Poly x() { return Poly(std::vector<T>{T(0), T(1)}); }
    static Poly monomial(const T& a, int k) {
        std::vector<T> v(k + 1, T(0));
        v[k] = a;
        return Poly(std::move(v));
    }

    int deg() const { return static_cast<int>(c.size()) - 1; }
    bool is_zero() const { return c.empty(); }
    T lead() const { return c.empty() ? T(0) : c.back(); }
    T coeff(int i) const { return (i >= 0 && i < static_cast<int>(c.size())) ? c[i] : T(0); }

    void trim() {
        while (!c.empty() && c.back() == T(0)) c.pop_back();
    }

    template <class S>
    S eval(const S& v) const {
        S r = S(0);
        for (int i = deg(); i >= 0; --i) r = r * v + S(c[i]);
        return r;
    }

    Poly derivative() const {
        std::vector<T> d;
        for (int i = 1; i <= deg(); ++i) d.push_back(T(c[i] * T(i)));
        return Poly(std::move(d));
    }

    Poly& operator+=(const Poly& o) {
        if (o.c.size() > c.size()) c.resize(o.c.size(), T(0));
        for (std::size_t i = 0; i < o.c.size(); ++i) c[i] = c[i] + o.c[i];
        trim();
        return *this;
    }
    Poly& operator-=(const Poly& o) {
        if (o.c.size() > c.size()) c.resize(o.c.size(), T(0));
        for (std::size_t i = 0; i < o.c.size(); ++i) c[i] = c[i] - o.c[i];
        trim();
        return *this;
    }
    friend Poly operator+(Poly a, const Poly& b) { return a += b; }
    friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
    friend Poly operator-(Poly a) {
        for (auto& v : a.c) v = T(0) - v;
        return a;
    }
    friend Poly operator*(const Poly& a, const Poly& b) {
        if (a.is_zero() || b.is_zero()) return Poly();
        std::vector<T> r(a.c.size() + b.c.size() - 1, T(0));
        for (std::size_t i = 0; i < a.c.size(); ++i) {
            if (a.c[i] == T(0)) continue;
            for (std::size_t j = 0; j < b.c.size(); ++j) r[i + j] = r[i + j] + a.c[i] * b.c[j];
        }
        return Poly(std::move(r));
    }
    Poly& operator*=(const Poly& o) { return *this = *this * o; }
    friend Poly operator*(const Poly& a, const T& s) {
        if (s == T(0)) return Poly();
        Poly r = a;
        for (auto& v : r.c) v = v * s;
        r.trim();
        return r;
    }
    friend bool operator==(const Poly& a, const Poly& b) { return a.c == b.c; }
    friend bool operator!=(const Poly& a, const Poly& b) { return !(a == b); }
};

using QPoly = Poly<mpq_class>;

inline QPoly qpoly(std::initializer_list<long> coeffs) {
    std::vector<mpq_class> v;
    for (long x : coeffs) v.emplace_back(x);
    return QPoly(std::move(v));
}

template <class T>
Poly<T> pow(const Poly<T>& p, int k) {
    Poly<T> r(T(1));
    for (int i = 0; i < k; ++i) r *= p;
    return r;
}

// Division with remainder over Q.
inline std::pair<QPoly, QPoly> divmod(const QPoly& a, const QPoly& b) {
    if (b.is_zero()) throw DomainError("polynomial division by zero");
    std::vector<mpq_class> r = a.c;
    const int db = b.deg();
    std::vector<mpq_class> q(std::max(0, a.deg() - db + 1), mpq_class(0));
    for (int i = a.deg(); i >= db; --i) {
        if (r[i] == 0) continue;
        mpq_class f = r[i] / b.c[db];
        q[i - db] = f;
        for (int j = 0; j <= db; ++j) r[i - db + j] -= f * b.c[j];
    }
    r.resize(std::max(0, db));
    return {QPoly(std::move(q)), QPoly(std::move(r))};
}

inline QPoly monic(const QPoly& p) {
    if (p.is_zero()) return p;
    return p * mpq_class(1 / p.lead());
}

inline QPoly gcd(QPoly a, QPoly b) {
    while (!b.is_zero()) {
        auto r = divmod(a, b).second;
        a = std::move(b);
        b = monic(r);
    }
    return monic(a);
}

inline QPoly exact_div(const QPoly& a, const QPoly& b) {
    auto [q, r] = divmod(a, b);
    if (!r.is_zero()) throw DomainError("inexact polynomial division");
    return q;
}

// Multiplicity of v as a root of p (p nonzero).
inline int root_multiplicity(QPoly p, const mpq_class& v) {
    if (p.is_zero()) throw DomainError("zero polynomial has no root multiplicity");
    QPoly lin(std::vector<mpq_class>{mpq_class(-v), mpq_class(1)});
    int k = 0;
    while (p.eval(v) == 0) {
        p = exact_div(p, lin);
        ++k;
    }
    return k;
}

// Yun's algorithm: p = lead * prod_k f_k^k with f_k square-free and pairwise coprime.
inline std::vector<QPoly> square_free_factors(const QPoly& p) {
    std::vector<QPoly> out;
    if (p.deg() < 1) return out;
    QPoly a = monic(p);
    QPoly b = a.derivative();
    QPoly g = gcd(a, b);
    QPoly c = exact_div(a, g);
    QPoly d = exact_div(b, g) - c.derivative();
    while (c.deg() > 0) {
        QPoly f = gcd(c, d);
        out.push_back(f);
        c = exact_div(c, f);
        d = exact_div(d, f) - c.derivative();
    }
    return out;
}

namespace detail {

inline int sign_changes(const std::vector<QPoly>& seq, const mpq_class& x) {
    int changes = 0, last = 0;
    for (const auto& p : seq) {
        mpq_class v = p.eval(x);
        int s = sgn(v);
        if (s == 0) continue;
        if (last != 0 && s != last) ++changes;
        last = s;
    }
    return changes;
}

inline std::vector<QPoly> sturm_sequence(const QPoly& p) {
    std::vector<QPoly> seq{p, p.derivative()};
    while (!seq.back().is_zero()) {
        auto r = divmod(seq[seq.size() - 2], seq.back()).second;
        if (r.is_zero()) break;
        seq.push_back(-r);
    }
    return seq;
}

} // namespace detail

// Real roots of a square-free polynomial, refined by exact bisection to width < tol.
inline std::vector<double> real_roots_squarefree(const QPoly& p, double tol = 1e-14) {
    std::vector<double> roots;
    if (p.deg() < 1) return roots;
    const auto seq = detail::sturm_sequence(p);
    // Cauchy bound.
    mpq_class bound = 0;
    for (int i = 0; i < p.deg(); ++i) bound = std::max(bound, mpq_class(abs(p.c[i] / p.lead())));
    bound += 1;
    const mpq_class qtol(tol);
    std::vector<std::pair<mpq_class, mpq_class>> stack{{-bound, bound}};
    std::vector<std::pair<mpq_class, mpq_class>> isolated;
    while (!stack.empty()) {
        auto [lo, hi] = stack.back();
        stack.pop_back();
        // Roots in (lo, hi]
        int cnt = detail::sign_changes(seq, lo) - detail::sign_changes(seq, hi);
        if (cnt == 0) continue;
        if (cnt == 1) {
            isolated.emplace_back(lo, hi);
            continue;
        }
        mpq_class mid = (lo + hi) / 2;
        stack.emplace_back(lo, mid);
        stack.emplace_back(mid, hi);
    }
    for (auto [lo, hi] : isolated) {
        if (p.eval(hi) == 0) {
            roots.push_back(hi.get_d());
            continue;
        }
        // One simple root in (lo, hi) and p(hi) != 0, so p has the opposite sign just above lo.
        int slo = -sgn(p.eval(hi));
        while (hi - lo > qtol * (1 + abs(hi))) {
            mpq_class mid = (lo + hi) / 2;
            int sm = sgn(p.eval(mid));
            if (sm == 0) {
                lo = hi = mid;
                break;
            }
            if (sm == slo) lo = mid; else hi = mid;
        }
        roots.push_back(mpq_class((lo + hi) / 2).get_d());
    }
    std::sort(roots.begin(), roots.end());
    return roots;
}

struct RootWithMultiplicity {
    double location;
    int multiplicity;
};

inline std::vector<RootWithMultiplicity> real_roots(const QPoly& p, double tol = 1e-14) {
    std::vector<RootWithMultiplicity> out;
    auto factors = square_free_factors(p);
    for (std::size_t k = 0; k < factors.size(); ++k)
        for (double r : real_roots_squarefree(factors[k], tol)) out.push_back({r, static_cast<int>(k + 1)});
    std::sort(out.begin(), out.end(), [](auto& a, auto& b) { return a.location < b.location; });
    return out;
}

// Exact interpolation through (x_i, y_i) by Newton divided differences.
inline QPoly interpolate(const std::vector<mpq_class>& xs, std::vector<mpq_class> ys) {
    const std::size_t n = xs.size();
    for (std::size_t j = 1; j < n; ++j)
        for (std::size_t i = n - 1; i >= j; --i) {
            ys[i] = (ys[i] - ys[i - 1]) / (xs[i] - xs[i - j]);
            if (i == j) break;
        }
    QPoly r;
    for (std::size_t i = n; i-- > 0;) {
        QPoly lin(std::vector<mpq_class>{mpq_class(-xs[i]), mpq_class(1)});
        r = r * lin + QPoly(ys[i]);
    }
    return r;
}

} // namespace pcf
