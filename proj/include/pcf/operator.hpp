#pragma once
// Self-similar difference operators A_<n>, b_<n> on the lattices F_<n>.
#include <cmath>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <gmpxx.h>

#include "pcf/structure.hpp"

namespace pcf {

// A on F in the form Af(x) = -sum_y a_xy (f(y) - f(x)), and positive weights b.
struct BaseOperator {
    int size = 0;
    std::vector<std::vector<mpq_class>> A; // exact entries
    std::vector<mpq_class> b;

    Eigen::MatrixXd A_dense() const {
        Eigen::MatrixXd M(size, size);
        for (int i = 0; i < size; ++i)
            for (int j = 0; j < size; ++j) M(i, j) = A[i][j].get_d();
        return M;
    }
    Eigen::VectorXd b_dense() const {
        Eigen::VectorXd v(size);
        for (int i = 0; i < size; ++i) v(i) = b[i].get_d();
        return v;
    }

    // Build from conductances a_xy on the upper triangle.
    static BaseOperator from_conductances(int n, const std::vector<std::tuple<int, int, mpq_class>>& a,
                                          std::vector<mpq_class> b) {
        BaseOperator op;
        op.size = n;
        op.A.assign(n, std::vector<mpq_class>(n, 0));
        for (const auto& [x, y, w] : a) {
            if (x < 0 || y < 0 || x >= n || y >= n || x == y) throw ConfigError("conductance index out of range");
            op.A[x][y] -= w;
            op.A[y][x] -= w;
            op.A[x][x] += w;
            op.A[y][y] += w;
        }
        op.b = std::move(b);
        if (static_cast<int>(op.b.size()) != n) throw ConfigError("b has wrong length");
        return op;
    }
};

inline ValidationReport validate_base(const BaseOperator& op, const StructureSpec& s) {
    if (op.size != s.N0) throw ConfigError("base operator size differs from N0");
    ValidationReport rep;
    AxiomCheck sym{"A symmetric with zero row sums and nonnegative conductances", true, ""};
    for (int x = 0; x < op.size; ++x) {
        mpq_class row = 0;
        for (int y = 0; y < op.size; ++y) {
            row += op.A[x][y];
            if (op.A[x][y] != op.A[y][x]) sym.passed = false;
            if (x != y && op.A[x][y] > 0) sym.passed = false;
        }
        if (row != 0) sym.passed = false;
    }
    rep.checks.push_back(sym);

    AxiomCheck conn{"A irreducible", true, ""};
    detail::UnionFind uf(op.size);
    for (int x = 0; x < op.size; ++x)
        for (int y = x + 1; y < op.size; ++y)
            if (op.A[x][y] != 0) uf.unite(x, y);
    for (int x = 1; x < op.size; ++x)
        if (uf.find(x) != uf.find(0)) conn.passed = false;
    rep.checks.push_back(conn);

    AxiomCheck ginv{"A and b group invariant, b positive", true, ""};
    for (const auto& bx : op.b)
        if (bx <= 0) ginv.passed = false;
    for (const auto& g : s.group)
        for (int x = 0; x < op.size; ++x) {
            if (op.b[g[x]] != op.b[x]) ginv.passed = false;
            for (int y = 0; y < op.size; ++y)
                if (op.A[g[x]][g[y]] != op.A[x][y]) ginv.passed = false;
        }
    rep.checks.push_back(ginv);
    return rep;
}

struct LevelOperator {
    int level = 0;
    Eigen::SparseMatrix<double> A;
    Eigen::VectorXd b;
    std::vector<int> boundary;
    std::vector<char> is_boundary;

    int size() const { return static_cast<int>(b.size()); }
    std::vector<int> interior() const {
        std::vector<int> out;
        for (int v = 0; v < size(); ++v)
            if (!is_boundary[v]) out.push_back(v);
        return out;
    }
};

// Weights alpha_1^n / prod alpha_{i_k} of the <0>-cells, in word order.
inline std::vector<mpq_class> cell_weights(const StructureSpec& s, int n, bool use_alpha = true) {
    std::vector<mpq_class> w{mpq_class(1)};
    for (int k = 0; k < n; ++k) {
        std::vector<mpq_class> next;
        next.reserve(w.size() * s.N);
        for (const auto& c : w)
            for (int i = 0; i < s.N; ++i) {
                mpq_class f = use_alpha ? mpq_class(s.alpha[0].q / s.alpha[i].q) : mpq_class(s.beta[i].q / s.beta[0].q);
                next.push_back(c * f);
            }
        w = std::move(next);
    }
    return w;
}

inline LevelOperator assemble(const BaseOperator& base, const StructureSpec& s, const LatticeLevel& lat) {
    if (base.size != s.N0 || lat.N0 != s.N0 || lat.N != s.N) throw ConfigError("dimension mismatch");
    const int n = lat.n;
    const auto wa = cell_weights(s, n, true);
    const auto wb = cell_weights(s, n, false);
    const Eigen::MatrixXd A0 = base.A_dense();
    LevelOperator op;
    op.level = n;
    op.b = Eigen::VectorXd::Zero(lat.num_vertices);
    std::vector<Eigen::Triplet<double>> trip;
    std::vector<int> letters(n, 0);
    for (std::size_t c = 0; c < wa.size(); ++c) {
        std::size_t rem = c;
        for (int k = n - 1; k >= 0; --k) {
            letters[k] = static_cast<int>(rem % s.N);
            rem /= s.N;
        }
        auto v = lat.corners(letters);
        const double ca = wa[c].get_d();
        const double cb = wb[c].get_d();
        for (int x = 0; x < s.N0; ++x) {
            op.b(v[x]) += cb * base.b[x].get_d();
            for (int y = 0; y < s.N0; ++y)
                if (A0(x, y) != 0.0) trip.emplace_back(v[x], v[y], ca * A0(x, y));
        }
    }
    op.A.resize(lat.num_vertices, lat.num_vertices);
    op.A.setFromTriplets(trip.begin(), trip.end());
    op.boundary = lat.boundary;
    op.is_boundary = lat.is_boundary;
    return op;
}

// Symmetric generalized pencil (A, diag b); H f = lambda f  <=>  (A + lambda diag b) f = 0.
struct Pencil {
    Eigen::MatrixXd A;
    Eigen::VectorXd b;
};

struct HMatrices {
    Pencil neumann;
    Pencil dirichlet;
};

inline HMatrices h_matrices(const LevelOperator& op) {
    HMatrices h;
    h.neumann.A = Eigen::MatrixXd(op.A);
    h.neumann.b = op.b;
    const auto in = op.interior();
    const int m = static_cast<int>(in.size());
    h.dirichlet.A.resize(m, m);
    h.dirichlet.b.resize(m);
    for (int i = 0; i < m; ++i) {
        h.dirichlet.b(i) = op.b(in[i]);
        for (int j = 0; j < m; ++j) h.dirichlet.A(i, j) = h.neumann.A(in[i], in[j]);
    }
    return h;
}

} // namespace pcf
