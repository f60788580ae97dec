#pragma once
// Explicit renormalization maps of the gasket and the interval, the gasket limit
// measure, and exact degree bookkeeping for iterated rational maps.
#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <gmpxx.h>

#include "pcf/multipoly.hpp"
#include "pcf/poly.hpp"
#include "pcf/renorm.hpp"
#include "pcf/spectral.hpp"

namespace pcf {

// ---- one-variable maps ---------------------------------------------------------

struct RationalMap1D {
    QPoly num, den;

    int degree() const { return std::max(num.deg(), den.deg()); }

    static RationalMap1D make(QPoly n, QPoly d) {
        RationalMap1D f{std::move(n), std::move(d)};
        f.reduce();
        return f;
    }
    void reduce() {
        if (den.is_zero()) throw DomainError("zero denominator");
        QPoly g = gcd(num, den);
        if (g.deg() > 0) {
            num = exact_div(num, g);
            den = exact_div(den, g);
        }
        mpq_class l = den.lead();
        num = num * mpq_class(1 / l);
        den = den * mpq_class(1 / l);
    }
    mpq_class operator()(const mpq_class& x) const { return num.eval(x) / den.eval(x); }
    std::complex<double> operator()(std::complex<double> z) const {
        auto ev = [&](const QPoly& p) {
            std::complex<double> r = 0;
            for (int i = p.deg(); i >= 0; --i) r = r * z + p.c[i].get_d();
            return r;
        };
        return ev(num) / ev(den);
    }
    friend bool operator==(const RationalMap1D& a, const RationalMap1D& b) {
        return a.num * b.den == b.num * a.den;
    }
};

// f o g without reduction: numerator and denominator of f homogenized in (num_g, den_g).
inline std::pair<QPoly, QPoly> compose_raw(const RationalMap1D& f, const RationalMap1D& g) {
    const int d = f.degree();
    std::vector<QPoly> np{QPoly(mpq_class(1))}, dp{QPoly(mpq_class(1))};
    for (int i = 1; i <= d; ++i) {
        np.push_back(np.back() * g.num);
        dp.push_back(dp.back() * g.den);
    }
    QPoly n, m;
    for (int i = 0; i <= d; ++i) {
        n += np[i] * dp[d - i] * f.num.coeff(i);
        m += np[i] * dp[d - i] * f.den.coeff(i);
    }
    return {n, m};
}

inline RationalMap1D compose(const RationalMap1D& f, const RationalMap1D& g) {
    auto [n, d] = compose_raw(f, g);
    return RationalMap1D::make(n, d);
}

struct Composition1D {
    RationalMap1D map;
    std::vector<int> degrees; // reduced degree of f^k, k = 1..n
};

inline Composition1D compose_reduce_1d(const RationalMap1D& f, int n, std::size_t bit_limit = 1u << 22) {
    Composition1D out{f, {}};
    if (n < 1) return out;
    out.degrees.push_back(f.degree());
    for (int k = 2; k <= n; ++k) {
        out.map = compose(f, out.map);
        std::size_t bits = 0;
        for (const auto& c : out.map.num.c) bits += mpz_sizeinbase(c.get_num_mpz_t(), 2);
        if (bits > bit_limit) throw CeilingError("coefficient growth beyond the bit limit");
        out.degrees.push_back(out.map.degree());
    }
    return out;
}

// ---- gasket --------------------------------------------------------------------

// ghat(z) = z(z+5) / ((2z+1)(z+1))
inline RationalMap1D gasket_ghat() { return RationalMap1D::make(qpoly({0, 5, 1}), qpoly({1, 3, 2})); }

// phat(v) = v(5+2v): the one-dimensional decimation map on eigenvalues of H.
inline RationalMap1D gasket_phat() { return RationalMap1D::make(qpoly({0, 5, 2}), qpoly({1})); }

// v = 3z/(1-z)
inline RationalMap1D gasket_conjugacy() { return RationalMap1D::make(qpoly({0, 3}), qpoly({1, -1})); }

// T on Sym^G coordinates (u0, u1).
inline std::pair<std::complex<double>, std::complex<double>> gasket_t(std::complex<double> u0,
                                                                      std::complex<double> u1) {
    return {3.0 * u0 * u1 / (2.0 * u0 + u1), 3.0 * u1 * (u0 + u1) / (5.0 * u1 + u0)};
}

// Real solutions of phat^k(v) = target, all in [-5/2, 0].
inline std::vector<double> phat_preimages(double target, int k) {
    if (target < -2.5 || target > 0) throw DomainError("target outside the backward invariant interval [-5/2, 0]");
    std::vector<double> cur{target};
    for (int step = 0; step < k; ++step) {
        std::vector<double> next;
        for (double t : cur) {
            const double r = std::sqrt(25.0 + 8.0 * t);
            next.push_back((-5.0 - r) / 4.0);
            next.push_back((-5.0 + r) / 4.0);
        }
        cur = std::move(next);
    }
    std::sort(cur.begin(), cur.end());
    return cur;
}

struct LimitMeasure {
    AtomicMeasure measure;
    std::vector<int> depth;          // per atom, -1 for the isolated atom at -3
    std::vector<mpq_class> exact;    // exact masses per atom
    mpq_class deficit;               // mass left out by the truncation
};

// 1/2 delta_{-3} + sum_{k <= k_max} 3^{-k-1}/2 sum over k-th preimages of -3/2 and -5/2.
inline LimitMeasure gasket_limit_measure(int k_max, double merge_tol = kDefaultMergeTol) {
    if (k_max < 0) throw DomainError("k_max must be nonnegative");
    struct Entry {
        double loc;
        int depth;
        mpq_class mass;
    };
    std::vector<Entry> e{{-3.0, -1, mpq_class(1, 2)}};
    mpz_class pow3 = 3;
    for (int k = 0; k <= k_max; ++k) {
        mpq_class m(1, 2 * pow3);
        m.canonicalize();
        for (double t : {-1.5, -2.5})
            for (double v : phat_preimages(t, k)) e.push_back({v, k, m});
        pow3 *= 3;
    }
    std::sort(e.begin(), e.end(), [](const Entry& a, const Entry& b) { return a.loc < b.loc; });
    LimitMeasure out;
    std::vector<Atom> atoms;
    for (const auto& x : e) {
        atoms.push_back({x.loc, x.mass.get_d()});
        out.depth.push_back(x.depth);
        out.exact.push_back(x.mass);
    }
    out.measure = AtomicMeasure::from_atoms(atoms, merge_tol);
    // sum_{k > k_max} 2^k 3^{-k-1} = (2/3)^{k_max+1}
    mpz_class a, b;
    mpz_ui_pow_ui(a.get_mpz_t(), 2, k_max + 1);
    mpz_ui_pow_ui(b.get_mpz_t(), 3, k_max + 1);
    out.deficit = mpq_class(a, b);
    out.deficit.canonicalize();
    return out;
}

// ---- maps on P1 x P1 -------------------------------------------------------------

// Bihomogeneous polynomial stored dehomogenized (v0 = v1 = 1) with its bidegree.
struct BiHom {
    BiPoly f; // x = u0, y = u1
    int p = 0, q = 0;
};

// Pairs (P0, Q0) and (P1, Q1): z0 -> [P0 : Q0], z1 -> [P1 : Q1].
struct BiProjectiveMap {
    std::array<BiHom, 4> comp;
};

struct DegreeMatrix {
    std::array<std::array<long, 2>, 2> d{};
    double l = 0; // spectral radius

    static DegreeMatrix of(long a, long b, long c, long e) {
        DegreeMatrix m;
        m.d = {{{a, b}, {c, e}}};
        const double tr = a + e, det = double(a) * e - double(b) * c;
        m.l = 0.5 * (tr + std::sqrt(std::max(0.0, tr * tr - 4 * det)));
        return m;
    }
};

namespace detail {

inline BiPoly substitute(const BiHom& P, const BiPoly& a0, const BiPoly& b0, const BiPoly& a1, const BiPoly& b1) {
    std::vector<BiPoly> pa{bi_const(1)}, pb{bi_const(1)}, qa{bi_const(1)}, qb{bi_const(1)};
    for (int i = 1; i <= P.p; ++i) {
        pa.push_back(pa.back() * a0);
        pb.push_back(pb.back() * b0);
    }
    for (int j = 1; j <= P.q; ++j) {
        qa.push_back(qa.back() * a1);
        qb.push_back(qb.back() * b1);
    }
    BiPoly out;
    for (int i = 0; i <= P.f.deg(); ++i)
        for (int j = 0; j <= P.f.c[i].deg(); ++j) {
            const mpq_class& c = P.f.c[i].c[j];
            if (c == 0) continue;
            out += pa[i] * pb[P.p - i] * qa[j] * qb[P.q - j] * QPoly(c);
        }
    return out;
}

// Divide a pair by its common factor: polynomial gcd plus common powers of v0, v1.
inline void reduce_pair(BiHom& P, BiHom& Q) {
    BiPoly h = gcd(P.f, Q.f);
    if (total_degree(h) > 0) {
        P.f = exact_div(P.f, h);
        Q.f = exact_div(Q.f, h);
        P.p -= deg_x(h);
        Q.p -= deg_x(h);
        P.q -= deg_y(h);
        Q.q -= deg_y(h);
    }
    const int e0 = std::min(P.p - deg_x(P.f), Q.p - deg_x(Q.f));
    const int e1 = std::min(P.q - deg_y(P.f), Q.q - deg_y(Q.f));
    P.p -= e0;
    Q.p -= e0;
    P.q -= e1;
    Q.q -= e1;
}

} // namespace detail

// f o g.
inline BiProjectiveMap compose(const BiProjectiveMap& f, const BiProjectiveMap& g) {
    BiProjectiveMap out;
    for (int k = 0; k < 4; ++k) {
        const auto& P = f.comp[k];
        out.comp[k].f = detail::substitute(P, g.comp[0].f, g.comp[1].f, g.comp[2].f, g.comp[3].f);
        out.comp[k].p = P.p * g.comp[0].p + P.q * g.comp[2].p;
        out.comp[k].q = P.p * g.comp[0].q + P.q * g.comp[2].q;
    }
    return out;
}

inline BiProjectiveMap reduced(BiProjectiveMap m) {
    detail::reduce_pair(m.comp[0], m.comp[1]);
    detail::reduce_pair(m.comp[2], m.comp[3]);
    return m;
}

inline DegreeMatrix degree_matrix(const BiProjectiveMap& m) {
    return DegreeMatrix::of(m.comp[0].p, m.comp[0].q, m.comp[2].p, m.comp[2].q);
}

// Degree matrices d_1..d_n of the reduced iterates.
inline std::vector<DegreeMatrix> bidegree_sequence(const BiProjectiveMap& m, int n, std::size_t bit_limit = 1u << 24) {
    std::vector<DegreeMatrix> out;
    BiProjectiveMap base = reduced(m);
    BiProjectiveMap cur = base;
    for (int k = 1; k <= n; ++k) {
        if (k > 1) cur = reduced(compose(base, cur));
        std::size_t bits = 0;
        for (const auto& c : cur.comp)
            for (const auto& row : c.f.c)
                for (const auto& v : row.c) bits += mpz_sizeinbase(v.get_num_mpz_t(), 2);
        if (bits > bit_limit) throw CeilingError("coefficient growth beyond the bit limit");
        out.push_back(degree_matrix(cur));
    }
    return out;
}

namespace detail {
inline BiHom bihom(std::vector<std::tuple<long, int, int>> terms, int p, int q) {
    BiHom h;
    h.p = p;
    h.q = q;
    for (auto [c, i, j] : terms) h.f += BiPoly::monomial(QPoly::monomial(mpq_class(c), j), i);
    return h;
}
} // namespace detail

// g([u0:v0],[u1:v1]) = ([3u0u1 : 2u0v1 + u1v0], [3u1(u0v1 + u1v0) : 5u1v0v1 + u0v1^2]).
inline BiProjectiveMap gasket_g() {
    using detail::bihom;
    BiProjectiveMap g;
    g.comp[0] = bihom({{3, 1, 1}}, 1, 1);
    g.comp[1] = bihom({{2, 1, 0}, {1, 0, 1}}, 1, 1);
    g.comp[2] = bihom({{3, 1, 1}, {3, 0, 2}}, 1, 2);
    g.comp[3] = bihom({{5, 0, 1}, {1, 1, 0}}, 1, 2);
    return g;
}

// The lift on C^2 x C^2 before removing common factors:
// ((3u0u1v1, 2u0v1^2 + v0u1v1), (6u1(u0v1 + u1v0), 2(5u1v0v1 + u0v1^2))).
inline BiProjectiveMap gasket_lift() {
    using detail::bihom;
    BiProjectiveMap g;
    g.comp[0] = bihom({{3, 1, 1}}, 1, 2);
    g.comp[1] = bihom({{2, 1, 0}, {1, 0, 1}}, 1, 2);
    g.comp[2] = bihom({{6, 1, 1}, {6, 0, 2}}, 1, 2);
    g.comp[3] = bihom({{10, 0, 1}, {2, 1, 0}}, 1, 2);
    return g;
}

// (f, id) on P1 x P1 for a one-variable map f.
inline BiProjectiveMap product_map(const RationalMap1D& f) {
    BiProjectiveMap m;
    const int d = f.degree();
    for (int i = 0; i <= d; ++i) {
        m.comp[0].f += BiPoly::monomial(QPoly(f.num.coeff(i)), i);
        m.comp[1].f += BiPoly::monomial(QPoly(f.den.coeff(i)), i);
    }
    m.comp[0].p = m.comp[1].p = d;
    m.comp[0].q = m.comp[1].q = 0;
    m.comp[2] = detail::bihom({{1, 0, 1}}, 0, 1);
    m.comp[3] = detail::bihom({{1, 0, 0}}, 0, 1);
    return m;
}

// ---- interval --------------------------------------------------------------------

// T(a, d, q) for the interval, delta = alpha / (1 - alpha).
inline std::array<std::complex<double>, 3> interval_t(std::complex<double> a, std::complex<double> d,
                                                      std::complex<double> q, double delta) {
    const auto s = a + d / delta;
    return {(a * s - q * q / delta) / s, (delta * d * s - delta * q * q) / s, -q * q / s};
}

// Rhat = p(Q) T(Q) with p = delta (a + d/delta): homogeneous of degree 2 on C^3.
template <class T>
std::array<T, 3> interval_rhat(const std::array<T, 3>& x, const T& delta) {
    const T& a = x[0];
    const T& d = x[1];
    const T& q = x[2];
    return {T(delta * a * a + a * d - q * q), T(delta * delta * a * d + delta * d * d - delta * delta * q * q),
            T(T(0) - delta * q * q)};
}

inline mpq_class interval_delta(const mpq_class& alpha) { return mpq_class(alpha / (1 - alpha)); }

// phihat(lambda) = A + lambda diag(m0, m1) in coordinates (a, d, q).
template <class T>
std::array<T, 3> interval_phihat(const T& lambda, const T& m0, const T& m1) {
    return {T(T(1) + lambda * m0), T(T(1) + lambda * m1), T(-1)};
}

using C3 = std::array<std::complex<double>, 3>;

inline GreenEstimate interval_green(const mpq_class& alpha, const C3& X, int n_max = 40) {
    const std::complex<double> delta(interval_delta(alpha).get_d(), 0.0);
    auto nrm = [](const C3& x) { return std::sqrt(std::norm(x[0]) + std::norm(x[1]) + std::norm(x[2])); };
    auto scl = [](const C3& x, double s) { return C3{x[0] * s, x[1] * s, x[2] * s}; };
    return green_iterate(X, 2, n_max, [&](const C3& x) { return interval_rhat(x, delta); }, nrm, scl);
}

struct ZeroLocusReport {
    bool phihat_avoids = true; // no common root of the components of Rhat^k(phihat(lambda))
    bool locus_matches = true; // Rhat^k vanishes on the predicted lines and not just off them
};

// Points of the q = 0 chart where Rhat^k vanishes: the ratio d/a is multiplied by delta at
// each step and the first coordinate factor is delta a + d, so Rhat^k = 0 exactly on the lines
// d = -delta^(1-j) a, j = 0..k-1.
inline std::vector<mpq_class> interval_zero_ratios(const mpq_class& alpha, int k) {
    const mpq_class delta = interval_delta(alpha);
    std::vector<mpq_class> out;
    mpq_class r = -delta; // j = 0
    for (int j = 0; j < k; ++j) {
        out.push_back(r);
        r /= delta;
    }
    return out;
}

inline ZeroLocusReport interval_zero_locus_check(const mpq_class& alpha, int n, const mpq_class& m0 = 1,
                                                 const mpq_class& m1 = 1) {
    ZeroLocusReport rep;
    const mpq_class delta = interval_delta(alpha);
    const QPoly dp(delta);
    std::array<QPoly, 3> x = interval_phihat(QPoly::x(), QPoly(m0), QPoly(m1));
    for (int k = 1; k <= n; ++k) {
        x = interval_rhat(x, dp);
        QPoly g = gcd(gcd(x[0], x[1]), x[2]);
        if (g.deg() > 0 || g.is_zero()) rep.phihat_avoids = false;
    }
    auto vanishes = [&](std::array<mpq_class, 3> y, int k) {
        for (int i = 0; i < k; ++i) y = interval_rhat(y, delta);
        return y[0] == 0 && y[1] == 0 && y[2] == 0;
    };
    const auto ratios = interval_zero_ratios(alpha, n);
    for (int j = 0; j < n; ++j)
        for (int t = 1; t <= 3; ++t) {
            const mpq_class a(t), d = ratios[j] * t;
            // with delta = 1 all lines coincide; only the first occurrence is sharp
            const bool first = std::find(ratios.begin(), ratios.end(), ratios[j]) == ratios.begin() + j;
            if (first && j > 0 && vanishes({a, d, 0}, j)) rep.locus_matches = false;
            if (!vanishes({a, d, 0}, j + 1)) rep.locus_matches = false;
            const mpq_class off = d / (a + 1);
            const bool on_locus = std::find(ratios.begin(), ratios.end(), off) != ratios.end();
            if ((!on_locus && vanishes({a + 1, d, 0}, n)) || vanishes({a, d, 1}, n)) rep.locus_matches = false;
        }
    return rep;
}

// Reduced degrees of Rhat^k, k = 1..n (homogeneous on C^3, dehomogenized at q = 1).
inline std::vector<int> interval_rhat_degrees(const mpq_class& alpha, int n) {
    const mpq_class delta = interval_delta(alpha);
    const BiPoly D = bi_const(delta);
    // components as polynomials in (a, d) with q = 1
    std::array<BiPoly, 3> cur{bi_x(), bi_y(), bi_const(1)};
    int degree = 1;
    std::vector<int> out;
    for (int k = 1; k <= n; ++k) {
        std::array<BiPoly, 3> nx = interval_rhat(cur, D);
        degree *= 2;
        BiPoly g = gcd(gcd(nx[0], nx[1]), nx[2]);
        if (total_degree(g) > 0) {
            for (auto& c : nx) c = exact_div(c, g);
            degree -= total_degree(g);
        }
        int slack = degree;
        for (const auto& c : nx) slack = std::min(slack, degree - total_degree(c));
        degree -= slack; // common power of q
        cur = nx;
        out.push_back(degree);
    }
    return out;
}

// ---- degree growth and the dichotomy ----------------------------------------------

struct DegreeEstimate {
    double d_inf = 0;                 // l_n^{1/n} at the largest n
    std::vector<double> sequence;     // l_k^{1/k}
};

inline DegreeEstimate dynamical_degree(const std::vector<double>& l) {
    DegreeEstimate e;
    for (std::size_t k = 0; k < l.size(); ++k) {
        if (!(l[k] > 0)) throw DomainError("degree sequence must be positive");
        e.sequence.push_back(std::pow(l[k], 1.0 / static_cast<double>(k + 1)));
    }
    if (!e.sequence.empty()) e.d_inf = e.sequence.back();
    return e;
}

enum class Dichotomy { case_i, case_ii, inconclusive };

inline std::string to_string(Dichotomy d) {
    switch (d) {
    case Dichotomy::case_i: return "case_i";
    case Dichotomy::case_ii: return "case_ii";
    default: return "inconclusive";
    }
}

// case_i: d_inf < N (pure point, compactly supported eigenfunctions);
// case_ii: d_inf = N. A margin of 0.2 below N is required for case_i.
inline Dichotomy dichotomy_classify(double d_inf, int N, double margin = 0.2) {
    if (d_inf <= N - margin) return Dichotomy::case_i;
    if (std::abs(d_inf - N) <= 1e-9 * N) return Dichotomy::case_ii;
    return Dichotomy::inconclusive;
}

struct GrowthResult {
    std::vector<int> levels;
    std::vector<double> mass; // |nu^+_<n> - nu^ND_<n>|
    double slope = 0;         // -inf if the difference vanishes
};

inline GrowthResult growth_check(const StructureSpec& s, const BaseOperator& base, int n_lo, int n_hi,
                                 double tol = kDefaultNullTol, double merge_tol = kDefaultMergeTol) {
    GrowthResult g;
    bool any_zero = false;
    for (int n = n_lo; n <= n_hi; ++n) {
        auto op = assemble(base, s, build_level(s, n));
        auto plus = counting_measure(spectrum(op, Boundary::neumann), merge_tol);
        auto nd = nd_spectrum(op, tol, merge_tol);
        const double m = difference(plus, nd, merge_tol).total();
        g.levels.push_back(n);
        g.mass.push_back(m);
        if (m <= 0.5) any_zero = true;
    }
    if (any_zero) {
        g.slope = -std::numeric_limits<double>::infinity();
        return g;
    }
    const int k = static_cast<int>(g.levels.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = 0; i < k; ++i) {
        const double x = g.levels[i], y = std::log(g.mass[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    g.slope = (k * sxy - sx * sy) / (k * sxx - sx * sx);
    return g;
}

// ---- decimation containment ----------------------------------------------------------

struct DecimationReport {
    int checked = 0;
    int excluded = 0;
    int violations = 0;
    double max_mismatch = 0;
};

// phat(Dirichlet spectrum at n+1) inside Dirichlet u Neumann spectrum at n, away from {-3, -3/2, -5/2}.
inline DecimationReport decimation_check(const StructureSpec& s, const BaseOperator& base, int n,
                                         double tol = 1e-7) {
    DecimationReport r;
    auto fine = spectrum(assemble(base, s, build_level(s, n + 1)), Boundary::dirichlet);
    auto coarse_op = assemble(base, s, build_level(s, n));
    auto dn = spectrum(coarse_op, Boundary::dirichlet).values;
    auto nn = spectrum(coarse_op, Boundary::neumann).values;
    std::vector<double> target = dn;
    target.insert(target.end(), nn.begin(), nn.end());
    for (double lam : fine.values) {
        if (std::abs(lam + 3) < tol || std::abs(lam + 1.5) < tol || std::abs(lam + 2.5) < tol) {
            ++r.excluded;
            continue;
        }
        const double img = lam * (5 + 2 * lam);
        double best = std::numeric_limits<double>::infinity();
        for (double t : target) best = std::min(best, std::abs(img - t));
        ++r.checked;
        r.max_mismatch = std::max(r.max_mismatch, best);
        if (best > tol) ++r.violations;
    }
    return r;
}

} // namespace pcf
