#pragma once
// Abstract finitely ramified self-similar structures and their finite lattices.
#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "pcf/error.hpp"

namespace pcf {

// A weight keeps its exact value when the input was rational.
struct Weight {
    mpq_class q;
    double d = 0.0;
    bool exact = true;

    Weight() = default;
    Weight(const mpq_class& v) : q(v), d(v.get_d()), exact(true) { q.canonicalize(); }
    static Weight from_double(double v) {
        Weight w;
        w.q = mpq_class(v);
        w.d = v;
        w.exact = false;
        return w;
    }
};

struct StructureSpec {
    std::string name;
    int N = 0;
    int N0 = 0;
    // 0-based generator pairs (i, x, i2, x2): point x of cell i equals point x2 of cell i2.
    std::vector<std::array<int, 4>> relation;
    std::vector<std::vector<int>> group; // permutations of 0..N-1
    std::vector<Weight> alpha;
    std::vector<Weight> beta;

    bool exact_weights() const {
        auto ex = [](const Weight& w) { return w.exact; };
        return std::all_of(alpha.begin(), alpha.end(), ex) && std::all_of(beta.begin(), beta.end(), ex);
    }
};

namespace detail {

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    }
    // The smaller root wins, so roots end up being class minima.
    void unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        if (a < b) parent[b] = a; else parent[a] = b;
    }
};

inline void check_shape(const StructureSpec& s) {
    if (s.N < 1) throw ConfigError("N must be positive");
    if (s.N0 < 2 || s.N0 > s.N) throw ConfigError("N0 must satisfy 1 < N0 <= N");
    for (const auto& r : s.relation) {
        if (r[0] < 0 || r[0] >= s.N || r[2] < 0 || r[2] >= s.N || r[1] < 0 || r[1] >= s.N0 || r[3] < 0 ||
            r[3] >= s.N0)
            throw ConfigError("relation index out of range");
    }
    for (const auto& g : s.group) {
        if (static_cast<int>(g.size()) != s.N) throw ConfigError("malformed permutation: wrong length");
        std::vector<char> seen(s.N, 0);
        for (int v : g) {
            if (v < 0 || v >= s.N || seen[v]) throw ConfigError("malformed permutation");
            seen[v] = 1;
        }
        for (int x = 0; x < s.N0; ++x)
            if (g[x] >= s.N0) throw ConfigError("permutation does not preserve the boundary set");
    }
    if (static_cast<int>(s.alpha.size()) != s.N || static_cast<int>(s.beta.size()) != s.N)
        throw ConfigError("alpha and beta need N entries");
    for (const auto& w : s.alpha)
        if (w.q <= 0) throw ConfigError("weight <= 0");
    for (const auto& w : s.beta)
        if (w.q <= 0) throw ConfigError("weight <= 0");
}

// Closure of the generator pairs on {0..N-1} x F, optionally under the group.
inline UnionFind level1_closure(const StructureSpec& s, bool with_group) {
    UnionFind uf(static_cast<std::size_t>(s.N) * s.N0);
    auto id = [&](int i, int x) { return i * s.N0 + x; };
    for (const auto& r : s.relation) {
        uf.unite(id(r[0], r[1]), id(r[2], r[3]));
        if (!with_group) continue;
        for (const auto& g : s.group) uf.unite(id(g[r[0]], g[r[1]]), id(g[r[2]], g[r[3]]));
    }
    if (with_group && !s.group.empty()) {
        // Iterate to a fixed point: images of derived pairs must also be identified.
        bool changed = true;
        while (changed) {
            changed = false;
            for (int a = 0; a < s.N * s.N0; ++a) {
                int b = uf.find(a);
                if (a == b) continue;
                for (const auto& g : s.group) {
                    int ga = id(g[a / s.N0], g[a % s.N0]);
                    int gb = id(g[b / s.N0], g[b % s.N0]);
                    if (uf.find(ga) != uf.find(gb)) {
                        uf.unite(ga, gb);
                        changed = true;
                    }
                }
            }
        }
    }
    return uf;
}

} // namespace detail

// Identified pairs ((i,x),(i2,x2)) of the closed relation, each unordered pair once.
inline std::vector<std::array<int, 4>> closed_relation(const StructureSpec& s) {
    auto uf = detail::level1_closure(s, true);
    std::vector<std::array<int, 4>> out;
    const int M = s.N * s.N0;
    for (int a = 0; a < M; ++a)
        for (int b = a + 1; b < M; ++b)
            if (uf.find(a) == uf.find(b)) out.push_back({a / s.N0, a % s.N0, b / s.N0, b % s.N0});
    return out;
}

struct AxiomCheck {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct ValidationReport {
    std::vector<AxiomCheck> checks;
    bool ok() const {
        return std::all_of(checks.begin(), checks.end(), [](const AxiomCheck& c) { return c.passed; });
    }
};

inline ValidationReport validate_structure(const StructureSpec& s) {
    detail::check_shape(s);
    ValidationReport rep;
    auto uf = detail::level1_closure(s, true);
    auto id = [&](int i, int x) { return i * s.N0 + x; };

    AxiomCheck a1{"no self-gluing inside a cell", true, ""};
    for (int i = 0; i < s.N && a1.passed; ++i)
        for (int x = 0; x < s.N0; ++x)
            for (int y = x + 1; y < s.N0; ++y)
                if (uf.find(id(i, x)) == uf.find(id(i, y))) {
                    a1.passed = false;
                    a1.detail = "(" + std::to_string(i + 1) + "," + std::to_string(x + 1) + ") ~ (" +
                                std::to_string(i + 1) + "," + std::to_string(y + 1) + ")";
                }
    rep.checks.push_back(a1);

    AxiomCheck a2{"fixed corners are singletons", true, ""};
    for (int i = 0; i < s.N0; ++i) {
        int r = uf.find(id(i, i));
        for (int a = 0; a < s.N * s.N0; ++a)
            if (a != id(i, i) && uf.find(a) == r) {
                a2.passed = false;
                a2.detail = "class of (" + std::to_string(i + 1) + "," + std::to_string(i + 1) + ") not a singleton";
            }
    }
    rep.checks.push_back(a2);

    AxiomCheck a3{"cell graph connected", true, ""};
    {
        detail::UnionFind cells(s.N);
        for (int a = 0; a < s.N * s.N0; ++a) cells.unite(a / s.N0, uf.find(a) / s.N0);
        for (int i = 1; i < s.N; ++i)
            if (cells.find(i) != cells.find(0)) {
                a3.passed = false;
                a3.detail = "cell " + std::to_string(i + 1) + " is disconnected from cell 1";
                break;
            }
    }
    rep.checks.push_back(a3);

    AxiomCheck a4{"group invariance", true, ""};
    {
        auto plain = detail::level1_closure(s, false);
        for (const auto& g : s.group) {
            for (int a = 0; a < s.N * s.N0 && a4.passed; ++a)
                for (int b = a + 1; b < s.N * s.N0; ++b) {
                    if (plain.find(a) != plain.find(b)) continue;
                    int ga = id(g[a / s.N0], g[a % s.N0]);
                    int gb = id(g[b / s.N0], g[b % s.N0]);
                    if (plain.find(ga) != plain.find(gb)) {
                        a4.passed = false;
                        a4.detail = "relation not invariant";
                        break;
                    }
                }
            for (int i = 0; i < s.N && a4.passed; ++i)
                if (s.alpha[g[i]].q != s.alpha[i].q || s.beta[g[i]].q != s.beta[i].q) {
                    a4.passed = false;
                    a4.detail = "weights not invariant";
                }
        }
    }
    rep.checks.push_back(a4);

    AxiomCheck a5{"alpha_i * beta_i constant", true, ""};
    if (s.exact_weights()) {
        mpq_class g0 = s.alpha[0].q * s.beta[0].q;
        for (int i = 1; i < s.N; ++i)
            if (s.alpha[i].q * s.beta[i].q != g0) a5.passed = false;
    } else {
        double g0 = s.alpha[0].d * s.beta[0].d;
        for (int i = 1; i < s.N; ++i)
            if (std::abs(s.alpha[i].d * s.beta[i].d - g0) > 1e-12 * std::abs(g0)) a5.passed = false;
    }
    if (!a5.passed) a5.detail = "products differ";
    rep.checks.push_back(a5);
    return rep;
}

// The finite quotient F_<n> of {0..N-1}^n x F.
class LatticeLevel {
public:
    int n = 0;
    int N = 0;
    int N0 = 0;
    int num_vertices = 0;
    std::vector<int> word_to_vertex; // indexed by encoded word
    std::vector<std::int64_t> min_word; // representative word of each vertex
    std::vector<int> boundary;          // vertex of (x,...,x) for each x in F
    std::vector<char> is_boundary;

    std::int64_t encode(std::span<const int> letters, int x) const {
        std::int64_t w = 0;
        for (int j : letters) w = w * N + j;
        return w * N0 + x;
    }
    int vertex(std::span<const int> letters, int x) const { return word_to_vertex[encode(letters, x)]; }

    std::vector<int> decode(std::int64_t w, int& x) const {
        x = static_cast<int>(w % N0);
        w /= N0;
        std::vector<int> letters(n);
        for (int k = n - 1; k >= 0; --k) {
            letters[k] = static_cast<int>(w % N);
            w /= N;
        }
        return letters;
    }

    // Corners of the sub-cell with the given prefix: images of prefix.x...x.
    std::vector<int> corners(std::span<const int> prefix) const {
        std::vector<int> out(N0);
        std::vector<int> letters(prefix.begin(), prefix.end());
        letters.resize(n);
        for (int x = 0; x < N0; ++x) {
            std::fill(letters.begin() + prefix.size(), letters.end(), x);
            out[x] = vertex(letters, x);
        }
        return out;
    }

    // All vertices of the sub-cell with the given prefix, sorted.
    std::vector<int> cell_points(std::span<const int> prefix) const {
        std::int64_t span = N0;
        for (int k = static_cast<int>(prefix.size()); k < n; ++k) span *= N;
        std::int64_t base = 0;
        for (int j : prefix) base = base * N + j;
        base *= span;
        std::vector<int> out;
        for (std::int64_t w = base; w < base + span; ++w) out.push_back(word_to_vertex[w]);
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    }

    std::vector<int> interior() const {
        std::vector<int> out;
        for (int v = 0; v < num_vertices; ++v)
            if (!is_boundary[v]) out.push_back(v);
        return out;
    }

    // Vertex permutation induced by a permutation of the cell labels.
    std::vector<int> induced_permutation(const std::vector<int>& g) const {
        std::vector<int> out(num_vertices);
        for (int v = 0; v < num_vertices; ++v) {
            int x;
            auto letters = decode(min_word[v], x);
            for (auto& j : letters) j = g[j];
            out[v] = vertex(letters, g[x]);
        }
        return out;
    }
};

inline LatticeLevel build_level(const StructureSpec& s, int n) {
    detail::check_shape(s);
    if (n < 0) throw ConfigError("level must be nonnegative");
    LatticeLevel L;
    L.n = n;
    L.N = s.N;
    L.N0 = s.N0;
    std::int64_t nwords = s.N0;
    for (int k = 0; k < n; ++k) nwords *= s.N;
    if (nwords > (std::int64_t{1} << 31)) throw CeilingError("lattice too large");
    detail::UnionFind uf(static_cast<std::size_t>(nwords));
    const auto rel = closed_relation(s);

    std::vector<std::int64_t> powN(n + 1, 1);
    for (int k = 1; k <= n; ++k) powN[k] = powN[k - 1] * s.N;

    for (int k0 = 1; k0 <= n; ++k0) {
        // word = prefix . c . x^(k0-1) . x
        for (std::int64_t p = 0; p < powN[n - k0]; ++p) {
            for (const auto& r : rel) {
                auto word = [&](int c, int x) {
                    std::int64_t w = p * s.N + c;
                    for (int t = 0; t < k0 - 1; ++t) w = w * s.N + x;
                    return w * s.N0 + x;
                };
                uf.unite(static_cast<int>(word(r[0], r[1])), static_cast<int>(word(r[2], r[3])));
            }
        }
    }
    L.word_to_vertex.assign(nwords, -1);
    std::vector<int> root_id(nwords, -1);
    for (std::int64_t w = 0; w < nwords; ++w) {
        int r = uf.find(static_cast<int>(w));
        if (root_id[r] < 0) {
            root_id[r] = L.num_vertices++;
            L.min_word.push_back(w);
        }
        L.word_to_vertex[w] = root_id[r];
    }
    L.is_boundary.assign(L.num_vertices, 0);
    std::vector<int> empty;
    L.boundary = L.corners(empty);
    for (int v : L.boundary) L.is_boundary[v] = 1;
    return L;
}

} // namespace pcf
