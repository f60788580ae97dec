#pragma once
// The balanced subalgebra of the Grassmann algebra over {etabar_x, eta_x}, x in F.
//
// Basis monomials are etabar_I eta_J with I, J sorted and |I| = |J|; a pair is
// stored as the key (I << 32) | J with I, J bitmasks over F.
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <unordered_map>
#include <vector>

#include <gmpxx.h>

#include "pcf/error.hpp"
#include "pcf/poly.hpp"

namespace pcf {

namespace scalar {
template <class T>
T conj(const T& x) {
    return x;
}
template <class R>
std::complex<R> conj(const std::complex<R>& x) {
    return std::conj(x);
}
template <class T>
bool is_zero(const T& x) {
    return x == T(0);
}
inline bool is_zero(const QPoly& p) { return p.is_zero(); }
} // namespace scalar

using Mask = std::uint32_t;
using GKey = std::uint64_t;

inline GKey gkey(Mask I, Mask J) { return (static_cast<GKey>(I) << 32) | J; }
inline Mask gkey_I(GKey k) { return static_cast<Mask>(k >> 32); }
inline Mask gkey_J(GKey k) { return static_cast<Mask>(k & 0xffffffffu); }

namespace detail {

// Parity of the sort of the concatenation A.B of two sorted disjoint index lists.
inline int merge_parity(Mask A, Mask B) {
    int p = 0;
    while (B) {
        int b = std::countr_zero(B);
        B &= B - 1;
        Mask above = (b >= 31) ? 0u : (A & ~((Mask{2} << b) - 1));
        p += std::popcount(above);
    }
    return p & 1;
}

// Sign of e_{I,J} e_{K,L} in canonical order, or 0.
inline int product_sign(Mask I, Mask J, Mask K, Mask L) {
    if ((I & K) || (J & L)) return 0;
    int p = (std::popcount(J) * std::popcount(K)) & 1;
    p ^= merge_parity(I, K);
    p ^= merge_parity(J, L);
    return p ? -1 : 1;
}

// Image of a sorted index set under an injective map, with the parity of the re-sort.
inline Mask map_mask(Mask I, const std::vector<int>& f, int& parity) {
    std::vector<int> img;
    while (I) {
        int i = std::countr_zero(I);
        I &= I - 1;
        img.push_back(f[i]);
    }
    int inv = 0;
    for (std::size_t a = 0; a < img.size(); ++a)
        for (std::size_t b = a + 1; b < img.size(); ++b)
            if (img[a] > img[b]) ++inv;
    parity ^= inv & 1;
    Mask out = 0;
    for (int v : img) out |= Mask{1} << v;
    return out;
}

} // namespace detail

template <class T>
class GElem {
public:
    int n = 0; // number of points of F
    std::map<GKey, T> c;

    GElem() = default;
    explicit GElem(int nvars) : n(nvars) {
        if (nvars > 16) throw CeilingError("Grassmann algebra limited to 16 points");
    }
    static GElem unit(int nvars) {
        GElem e(nvars);
        e.c[0] = T(1);
        return e;
    }
    static GElem basis(int nvars, Mask I, Mask J, const T& v = T(1)) {
        GElem e(nvars);
        e.set(I, J, v);
        return e;
    }

    T coeff(Mask I, Mask J) const {
        auto it = c.find(gkey(I, J));
        return it == c.end() ? T(0) : it->second;
    }
    void set(Mask I, Mask J, const T& v) {
        if (std::popcount(I) != std::popcount(J)) throw DomainError("unbalanced monomial");
        if (scalar::is_zero(v)) c.erase(gkey(I, J)); else c[gkey(I, J)] = v;
    }
    void add(GKey k, const T& v) {
        auto it = c.find(k);
        if (it == c.end()) {
            if (!scalar::is_zero(v)) c.emplace(k, v);
            return;
        }
        it->second = it->second + v;
        if (scalar::is_zero(it->second)) c.erase(it);
    }
    bool is_zero() const { return c.empty(); }

    GElem& operator+=(const GElem& o) {
        for (const auto& [k, v] : o.c) add(k, v);
        return *this;
    }
    friend GElem operator+(GElem a, const GElem& b) { return a += b; }
    friend GElem operator-(GElem a, const GElem& b) {
        for (const auto& [k, v] : b.c) a.add(k, T(T(0) - v));
        return a;
    }
    friend GElem operator*(const T& s, GElem a) {
        if (scalar::is_zero(s)) return GElem(a.n);
        for (auto& [k, v] : a.c) v = v * s;
        return a;
    }
};

using CGElem = GElem<std::complex<double>>;
using QGElem = GElem<mpq_class>;
using PGElem = GElem<QPoly>;

template <class T>
GElem<T> gr_mul(const GElem<T>& X, const GElem<T>& Y) {
    if (X.n != Y.n) throw DomainError("Grassmann elements over different sets");
    GElem<T> out(X.n);
    if (X.n <= 8) {
        // Dense accumulator over all (I, J) pairs.
        const std::size_t side = std::size_t{1} << X.n;
        std::vector<T> acc(side * side, T(0));
        std::vector<char> used(side * side, 0);
        for (const auto& [kx, vx] : X.c) {
            const Mask I = gkey_I(kx), J = gkey_J(kx);
            for (const auto& [ky, vy] : Y.c) {
                const Mask K = gkey_I(ky), L = gkey_J(ky);
                int s = detail::product_sign(I, J, K, L);
                if (s == 0) continue;
                const std::size_t idx = static_cast<std::size_t>(I | K) * side + (J | L);
                T p = vx * vy;
                if (s > 0) acc[idx] = acc[idx] + p; else acc[idx] = acc[idx] - p;
                used[idx] = 1;
            }
        }
        for (std::size_t idx = 0; idx < acc.size(); ++idx)
            if (used[idx] && !scalar::is_zero(acc[idx]))
                out.c.emplace_hint(out.c.end(), gkey(static_cast<Mask>(idx / side), static_cast<Mask>(idx % side)),
                                   acc[idx]);
        return out;
    }
    for (const auto& [kx, vx] : X.c)
        for (const auto& [ky, vy] : Y.c) {
            int s = detail::product_sign(gkey_I(kx), gkey_J(kx), gkey_I(ky), gkey_J(ky));
            if (s == 0) continue;
            T p = vx * vy;
            out.add(gkey(gkey_I(kx) | gkey_I(ky), gkey_J(kx) | gkey_J(ky)), s > 0 ? p : T(T(0) - p));
        }
    return out;
}

// Hermitian scalar product making the canonical basis orthonormal.
template <class T>
T inner(const GElem<T>& X, const GElem<T>& Z) {
    T s = T(0);
    auto it = Z.c.begin();
    for (const auto& [k, v] : X.c) {
        while (it != Z.c.end() && it->first < k) ++it;
        if (it == Z.c.end()) break;
        if (it->first == k) s = s + v * scalar::conj(it->second);
    }
    return s;
}

inline double norm(const CGElem& X) {
    double s = 0;
    for (const auto& [k, v] : X.c) s += std::norm(v);
    return std::sqrt(s);
}

inline mpq_class norm2(const QGElem& X) {
    mpq_class s = 0;
    for (const auto& [k, v] : X.c) s += v * v;
    return s;
}

// Adjoint of left multiplication by Y: <i_Y X, Z> = <X, Y Z>.
template <class T>
GElem<T> interior_product(const GElem<T>& Y, const GElem<T>& X) {
    GElem<T> out(X.n);
    for (const auto& [ka, ya] : Y.c) {
        const Mask Ia = gkey_I(ka), Ja = gkey_J(ka);
        const T cy = scalar::conj(ya);
        for (const auto& [kc, xc] : X.c) {
            const Mask Ic = gkey_I(kc), Jc = gkey_J(kc);
            if ((Ic & Ia) != Ia || (Jc & Ja) != Ja) continue;
            const Mask Ib = Ic & ~Ia, Jb = Jc & ~Ja;
            int s = detail::product_sign(Ia, Ja, Ib, Jb);
            T p = xc * cy;
            out.add(gkey(Ib, Jb), s > 0 ? p : T(T(0) - p));
        }
    }
    return out;
}

// prod_{x in K} etabar_x eta_x in the interleaved order.
template <class T>
GElem<T> interleaved_product(int n, Mask K) {
    const int k = std::popcount(K);
    T v = ((k * (k - 1) / 2) % 2) ? T(-1) : T(1);
    return GElem<T>::basis(n, K, K, v);
}

// Transport along an injective map F -> F'' (|F''| = m), re-sorting monomials.
template <class T>
GElem<T> reindex(const GElem<T>& X, const std::vector<int>& f, int m) {
    GElem<T> out(m);
    for (const auto& [k, v] : X.c) {
        int parity = 0;
        Mask I = detail::map_mask(gkey_I(k), f, parity);
        Mask J = detail::map_mask(gkey_J(k), f, parity);
        out.c.emplace(gkey(I, J), parity ? T(T(0) - v) : v);
    }
    return out;
}

// R_{F -> F'}: interior product with prod_{x notin F'} etabar_x eta_x, then
// relabel F' (ascending) as 0..|F'|-1.
template <class T>
GElem<T> restrict_to(const GElem<T>& X, Mask Fprime) {
    const Mask full = (X.n == 32) ? ~Mask{0} : ((Mask{1} << X.n) - 1);
    const Mask K = full & ~Fprime;
    const int k = std::popcount(K);
    const bool flip = (k * (k - 1) / 2) % 2;
    std::vector<int> f(X.n, -1);
    int m = 0;
    for (int x = 0; x < X.n; ++x)
        if (Fprime >> x & 1) f[x] = m++;
    GElem<T> out(m);
    for (const auto& [kc, xc] : X.c) {
        const Mask Ic = gkey_I(kc), Jc = gkey_J(kc);
        if ((Ic & K) != K || (Jc & K) != K) continue;
        const Mask Ib = Ic & ~K, Jb = Jc & ~K;
        int s = detail::product_sign(K, K, Ib, Jb);
        if (flip) s = -s;
        int parity = 0;
        Mask I2 = detail::map_mask(Ib, f, parity);
        Mask J2 = detail::map_mask(Jb, f, parity);
        out.add(gkey(I2, J2), s > 0 ? xc : T(T(0) - xc));
    }
    return out;
}

// Scale each k-balanced coefficient by c^k.
template <class T>
GElem<T> tau(const GElem<T>& X, const T& c) {
    GElem<T> out = X;
    std::vector<T> powers{T(1)};
    for (auto& [k, v] : out.c) {
        const int d = std::popcount(gkey_I(k));
        while (static_cast<int>(powers.size()) <= d) powers.push_back(powers.back() * c);
        v = v * powers[d];
    }
    std::erase_if(out.c, [](const auto& kv) { return scalar::is_zero(kv.second); });
    return out;
}

// exp(etabar Q eta): coefficient of (I, J) is (-1)^{k(k-1)/2} det Q_{I,J}.
// q(i, j) returns the entry; minors come from a memoized Laplace expansion, so
// any commutative scalar ring works.
template <class T, class Entry>
GElem<T> exp_q(int n, Entry&& q) {
    GElem<T> out = GElem<T>::unit(n);
    std::unordered_map<GKey, T> prev{{gkey(0, 0), T(1)}};
    std::vector<std::vector<Mask>> by_size(n + 1);
    for (Mask s = 0; s < (Mask{1} << n); ++s) by_size[std::popcount(s)].push_back(s);
    for (int k = 1; k <= n; ++k) {
        std::unordered_map<GKey, T> cur;
        const bool flip = (k * (k - 1) / 2) % 2;
        for (Mask I : by_size[k]) {
            const int i0 = std::countr_zero(I);
            const Mask Irest = I & (I - 1);
            for (Mask J : by_size[k]) {
                T det = T(0);
                int t = 0;
                for (Mask Jw = J; Jw; Jw &= Jw - 1, ++t) {
                    const int j = std::countr_zero(Jw);
                    auto it = prev.find(gkey(Irest, J & ~(Mask{1} << j)));
                    if (it == prev.end()) continue;
                    T term = q(i0, j) * it->second;
                    det = (t % 2) ? T(det - term) : T(det + term);
                }
                if (scalar::is_zero(det)) continue;
                cur.emplace(gkey(I, J), det);
                out.c.emplace(gkey(I, J), flip ? T(T(0) - det) : det);
            }
        }
        prev = std::move(cur);
    }
    return out;
}

// Convenience for Eigen-like matrices.
template <class T, class Mat>
GElem<T> exp_q_matrix(const Mat& Q) {
    return exp_q<T>(static_cast<int>(Q.rows()), [&](int i, int j) { return T(Q(i, j)); });
}

// Vanishing order at lambda = 0 of lambda -> R_{F->F'}(exp(etabar (Q0 - lambda B) eta)),
// computed on exact polynomial coefficients.
template <class Mat>
int nd_order(const Mat& Q0, const Mat& B, Mask Fprime) {
    const int n = static_cast<int>(Q0.rows());
    auto entry = [&](int i, int j) {
        return QPoly(std::vector<mpq_class>{mpq_class(Q0(i, j)), mpq_class(-mpq_class(B(i, j)))});
    };
    auto X = restrict_to(exp_q<QPoly>(n, entry), Fprime);
    if (X.is_zero()) throw DomainError("restricted exponential vanishes identically");
    int order = 1 << 30;
    for (const auto& [k, p] : X.c) {
        int z = 0;
        while (z <= p.deg() && p.c[z] == 0) ++z;
        order = std::min(order, z);
    }
    return order;
}

} // namespace pcf
