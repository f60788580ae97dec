#pragma once
// Eigensolves of the lattice pencils, counting measures, Neumann-Dirichlet detection.
#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "pcf/linalg.hpp"
#include "pcf/operator.hpp"

namespace pcf {

inline constexpr double kDefaultNullTol = 1e-8;
inline constexpr double kDefaultMergeTol = 1e-7;
inline constexpr int kDefaultDenseCeiling = 10000;

struct Atom {
    double location;
    double mass;
};

// Finite sum of point masses; locations closer than merge_tol are coalesced.
class AtomicMeasure {
public:
    std::vector<Atom> atoms; // strictly increasing locations
    double merge_tol = kDefaultMergeTol;

    AtomicMeasure() = default;
    explicit AtomicMeasure(double tol) : merge_tol(tol) {}

    // Chains of values with consecutive gaps <= tol become one atom at their weighted mean.
    static AtomicMeasure from_atoms(std::vector<Atom> in, double tol = kDefaultMergeTol) {
        AtomicMeasure m(tol);
        std::sort(in.begin(), in.end(), [](const Atom& a, const Atom& b) { return a.location < b.location; });
        std::size_t i = 0;
        while (i < in.size()) {
            std::size_t j = i + 1;
            while (j < in.size() && in[j].location - in[j - 1].location <= tol) ++j;
            double mass = 0, moment = 0;
            for (std::size_t k = i; k < j; ++k) {
                mass += in[k].mass;
                moment += in[k].mass * in[k].location;
            }
            if (mass > 0) m.atoms.push_back({moment / mass, mass});
            i = j;
        }
        return m;
    }
    static AtomicMeasure from_values(const std::vector<double>& values, double tol = kDefaultMergeTol) {
        std::vector<Atom> a;
        a.reserve(values.size());
        for (double v : values) a.push_back({v, 1.0});
        return from_atoms(std::move(a), tol);
    }

    double total() const {
        double s = 0;
        for (const auto& a : atoms) s += a.mass;
        return s;
    }
    AtomicMeasure scaled(double c) const {
        AtomicMeasure m = *this;
        for (auto& a : m.atoms) a.mass *= c;
        return m;
    }
    // Mass in [lambda, +inf); all lattice spectra sit in (-inf, 0].
    double cdf(double lambda) const {
        double s = 0;
        for (const auto& a : atoms)
            if (a.location >= lambda) s += a.mass;
        return s;
    }
    // Total mass of atoms within tol of loc.
    double mass_near(double loc, double tol) const {
        double s = 0;
        for (const auto& a : atoms)
            if (std::abs(a.location - loc) <= tol) s += a.mass;
        return s;
    }
};

inline double sup_cdf_distance(const AtomicMeasure& a, const AtomicMeasure& b) {
    std::vector<double> pts;
    for (const auto& x : a.atoms) pts.push_back(x.location);
    for (const auto& x : b.atoms) pts.push_back(x.location);
    std::sort(pts.begin(), pts.end());
    double d = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        d = std::max(d, std::abs(a.cdf(pts[i]) - b.cdf(pts[i])));
        double above = (i + 1 < pts.size()) ? 0.5 * (pts[i] + pts[i + 1]) : pts[i] + 1.0;
        d = std::max(d, std::abs(a.cdf(above) - b.cdf(above)));
    }
    return d;
}

// m1 >= m2 atomwise: every atom of m2 is covered by m1 mass within tol of its location.
inline bool dominates(const AtomicMeasure& m1, const AtomicMeasure& m2, double tol = kDefaultMergeTol,
                      double mass_slack = 1e-9) {
    for (const auto& a : m2.atoms)
        if (m1.mass_near(a.location, tol) < a.mass - mass_slack * std::max(1.0, a.mass)) return false;
    return true;
}

// m1 - m2 with atoms matched within tol; negative remainders are kept out and reported.
inline AtomicMeasure difference(const AtomicMeasure& m1, const AtomicMeasure& m2, double tol = kDefaultMergeTol,
                                double* negative_mass = nullptr) {
    std::vector<Atom> out;
    std::vector<double> left(m2.atoms.size());
    for (std::size_t j = 0; j < m2.atoms.size(); ++j) left[j] = m2.atoms[j].mass;
    for (const auto& a : m1.atoms) {
        double mass = a.mass;
        for (std::size_t j = 0; j < m2.atoms.size(); ++j) {
            if (std::abs(m2.atoms[j].location - a.location) > tol || left[j] <= 0) continue;
            double take = std::min(mass, left[j]);
            mass -= take;
            left[j] -= take;
        }
        if (mass > 1e-12) out.push_back({a.location, mass});
    }
    if (negative_mass) {
        *negative_mass = 0;
        for (double l : left) *negative_mass += std::max(0.0, l);
    }
    return AtomicMeasure::from_atoms(std::move(out), m1.merge_tol);
}

enum class Boundary { neumann, dirichlet };

// Eigenvalues of H (descending, <= 0) and eigenvectors orthonormal for the b-weighted product.
struct EigenDecomposition {
    std::vector<double> values;
    Eigen::MatrixXd vectors;
};

inline EigenDecomposition pencil_spectrum(const Pencil& p, bool want_vectors) {
    const Eigen::VectorXd s = p.b.cwiseSqrt().cwiseInverse();
    const Eigen::MatrixXd S = s.asDiagonal() * p.A * s.asDiagonal();
    auto eig = sym_eig(S, want_vectors);
    EigenDecomposition out;
    out.values.resize(eig.values.size());
    for (Eigen::Index i = 0; i < eig.values.size(); ++i) out.values[i] = -eig.values(i);
    if (want_vectors) out.vectors = s.asDiagonal() * eig.vectors;
    return out;
}

inline EigenDecomposition spectrum(const LevelOperator& op, Boundary bc, bool want_vectors = false,
                                   int ceiling = kDefaultDenseCeiling) {
    if (op.size() > ceiling) throw CeilingError("dense eigensolve above the configured size ceiling");
    const auto h = h_matrices(op);
    return pencil_spectrum(bc == Boundary::neumann ? h.neumann : h.dirichlet, want_vectors);
}

inline AtomicMeasure counting_measure(const EigenDecomposition& eig, double merge_tol = kDefaultMergeTol) {
    return AtomicMeasure::from_values(eig.values, merge_tol);
}

namespace detail {

// Upper bound for ||A + lambda diag b||_2 via the row sums max_i (sum_j |A_ij| + |lambda| b_i).
struct PencilScale {
    Eigen::VectorXd rowabs, b;
    PencilScale(const Eigen::MatrixXd& A, const Eigen::VectorXd& bb) : rowabs(A.cwiseAbs().rowwise().sum()), b(bb) {}
    double operator()(double lambda) const {
        return std::max(1.0, (rowabs + std::abs(lambda) * b).maxCoeff());
    }
};

} // namespace detail

// dim{f : Q f = 0, f|boundary = 0} as the numerical nullity of [Q; boundary indicator rows].
inline int stacked_nullity(const Eigen::MatrixXd& Q, const std::vector<int>& boundary, double tol = kDefaultNullTol) {
    const auto n = Q.cols();
    const auto nb = static_cast<Eigen::Index>(boundary.size());
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(Q.rows() + nb, n);
    M.topRows(Q.rows()) = Q;
    for (Eigen::Index k = 0; k < nb; ++k) M(Q.rows() + k, boundary[k]) = 1.0;
    auto sv = singular_values(M);
    const double thresh = tol * sv.maxCoeff();
    int rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) > thresh) ++rank;
    return static_cast<int>(n) - rank;
}

// dim{f : f|boundary = 0, (A + lambda diag b) f = 0} by the stacked system.
inline int nd_nullity_stacked(const LevelOperator& op, double lambda, double tol = kDefaultNullTol) {
    Eigen::MatrixXd M(op.A);
    M.diagonal() += lambda * op.b;
    return stacked_nullity(M, op.boundary, tol);
}

// Neumann-Dirichlet spectrum. Each Dirichlet cluster with eigenvectors V contributes
// m - rank(A_{boundary,interior} V): those combinations already satisfy the interior
// rows, so this equals the nullity of the stacked system at the cluster mean.
inline AtomicMeasure nd_spectrum(const LevelOperator& op, double tol = kDefaultNullTol,
                                 double merge_tol = kDefaultMergeTol, int ceiling = kDefaultDenseCeiling) {
    AtomicMeasure out(merge_tol);
    const auto in = op.interior();
    if (in.empty()) return out;
    auto eig = spectrum(op, Boundary::dirichlet, true, ceiling);
    const Eigen::MatrixXd Afull(op.A);
    const int nb = static_cast<int>(op.boundary.size());
    Eigen::MatrixXd Abi(nb, in.size());
    for (int k = 0; k < nb; ++k)
        for (std::size_t j = 0; j < in.size(); ++j) Abi(k, j) = Afull(op.boundary[k], in[j]);
    const detail::PencilScale scale(Afull, op.b);

    // values are descending
    std::vector<Atom> atoms;
    std::size_t i = 0;
    const auto& v = eig.values;
    while (i < v.size()) {
        std::size_t j = i + 1;
        while (j < v.size() && v[j - 1] - v[j] <= merge_tol) ++j;
        const int m = static_cast<int>(j - i);
        double lambda = 0;
        for (std::size_t k = i; k < j; ++k) lambda += v[k];
        lambda /= m;
        Eigen::MatrixXd V = eig.vectors.middleCols(i, m);
        // Normalize columns in the Euclidean norm so the threshold is scale free.
        for (int c = 0; c < m; ++c) V.col(c).normalize();
        Eigen::MatrixXd P = Abi * V;
        auto sv = singular_values(P);
        const double thresh = tol * scale(lambda);
        int rank = 0;
        for (Eigen::Index k = 0; k < sv.size(); ++k)
            if (sv(k) > thresh) ++rank;
        if (m - rank > 0) atoms.push_back({lambda, static_cast<double>(m - rank)});
        i = j;
    }
    return AtomicMeasure::from_atoms(std::move(atoms), merge_tol);
}

} // namespace pcf
