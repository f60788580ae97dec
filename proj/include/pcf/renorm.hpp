#pragma once
// Renormalization: the trace map T on symmetric matrices, its Grassmann lift R,
// the Green function estimator and the spectral polynomials built from R^n(phi).
#include <cmath>
#include <complex>
#include <limits>
#include <vector>

#include <Eigen/Dense>
#include <gmpxx.h>

#include "pcf/grassmann.hpp"
#include "pcf/linalg.hpp"
#include "pcf/operator.hpp"
#include "pcf/poly.hpp"
#include "pcf/qmatrix.hpp"
#include "pcf/schur.hpp"
#include "pcf/spectral.hpp"

namespace pcf {

namespace scalar {
template <class T>
T from_q(const mpq_class& q);
template <>
inline std::complex<double> from_q(const mpq_class& q) {
    return {q.get_d(), 0.0};
}
template <>
inline mpq_class from_q(const mpq_class& q) {
    return q;
}
template <>
inline QPoly from_q(const mpq_class& q) {
    return QPoly(q);
}
} // namespace scalar

// Symmetric matrices commuting with every group permutation restricted to F.
inline std::vector<QMatrix> symg_basis(const StructureSpec& s) {
    const int n = s.N0;
    std::vector<std::pair<int, int>> pairs;
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) pairs.emplace_back(i, j);
    auto idx = [&](int i, int j) {
        if (i > j) std::swap(i, j);
        for (std::size_t k = 0; k < pairs.size(); ++k)
            if (pairs[k] == std::make_pair(i, j)) return static_cast<int>(k);
        return -1;
    };
    std::vector<std::vector<mpq_class>> rows;
    for (const auto& g : s.group)
        for (const auto& [i, j] : pairs) {
            // Q[g i][g j] - Q[i][j] = 0
            std::vector<mpq_class> r(pairs.size(), 0);
            r[idx(g[i], g[j])] += 1;
            r[idx(i, j)] -= 1;
            rows.push_back(r);
        }
    QMatrix M(static_cast<int>(rows.size()), static_cast<int>(pairs.size()));
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < pairs.size(); ++c) M(static_cast<int>(r), static_cast<int>(c)) = rows[r][c];
    QMatrix K = rows.empty() ? QMatrix::identity(static_cast<int>(pairs.size())) : M.nullspace();
    std::vector<QMatrix> out;
    for (int k = 0; k < K.cols(); ++k) {
        QMatrix Q(n, n);
        for (std::size_t p = 0; p < pairs.size(); ++p) {
            Q(pairs[p].first, pairs[p].second) = K(static_cast<int>(p), k);
            Q(pairs[p].second, pairs[p].first) = K(static_cast<int>(p), k);
        }
        out.push_back(Q);
    }
    return out;
}

class RenormContext {
public:
    StructureSpec spec;
    LatticeLevel level1;
    int N = 0, N0 = 0;
    std::vector<mpq_class> c_q; // alpha_1 / alpha_i
    std::vector<double> c_d;
    std::vector<std::vector<int>> lift; // lift[i][x] = vertex of (i, x) in F_<1>
    Mask boundary_mask = 0;
    std::vector<int> boundary_back; // position in ascending boundary ids -> x
    std::vector<QMatrix> basis;     // Sym^G

    explicit RenormContext(const StructureSpec& s) : spec(s), level1(build_level(s, 1)), N(s.N), N0(s.N0) {
        if (level1.num_vertices > 16) throw CeilingError("level-1 lattice too large for the Grassmann lift");
        for (int i = 0; i < N; ++i) {
            c_q.push_back(s.alpha[0].q / s.alpha[i].q);
            c_d.push_back(c_q.back().get_d());
            std::vector<int> l(N0);
            for (int x = 0; x < N0; ++x) l[x] = level1.vertex(std::vector<int>{i}, x);
            lift.push_back(l);
        }
        std::vector<std::pair<int, int>> b;
        for (int x = 0; x < N0; ++x) {
            boundary_mask |= Mask{1} << level1.boundary[x];
            b.emplace_back(level1.boundary[x], x);
        }
        std::sort(b.begin(), b.end());
        for (auto& [v, x] : b) boundary_back.push_back(x);
        basis = symg_basis(s);
    }

    // Q_<n> = sum over <0>-cells of alpha_1^n / prod alpha * (copy of Q).
    template <class Mat>
    Mat level_matrix(const Mat& Q, const LatticeLevel& lat) const {
        const auto w = cell_weights(spec, lat.n, true);
        Mat out = Mat::Zero(lat.num_vertices, lat.num_vertices);
        std::vector<int> letters(lat.n, 0);
        for (std::size_t c = 0; c < w.size(); ++c) {
            std::size_t rem = c;
            for (int k = lat.n - 1; k >= 0; --k) {
                letters[k] = static_cast<int>(rem % N);
                rem /= N;
            }
            auto v = lat.corners(letters);
            const double cw = w[c].get_d();
            for (int x = 0; x < N0; ++x)
                for (int y = 0; y < N0; ++y) out(v[x], v[y]) += cw * Q(x, y);
        }
        return out;
    }

    CMatrix t_map(const CMatrix& Q) const {
        return trace_on_subset(level_matrix(Q, level1), level1.boundary);
    }

    // (Q_<n>) traced on the boundary of F_<n> in one step.
    CMatrix t_map_direct(const CMatrix& Q, int n) const {
        auto lat = build_level(spec, n);
        return trace_on_subset(level_matrix(Q, lat), lat.boundary);
    }

    std::complex<double> interior_det(const CMatrix& Q, int n) const {
        auto lat = build_level(spec, n);
        auto in = lat.interior();
        if (in.empty()) return 1.0;
        CMatrix M = level_matrix(Q, lat);
        return detail::submatrix(M, in, in).determinant();
    }

    // R(X) = R_{F_<1> -> boundary}( prod_i s_i(tau_{c_i} X) ), relabelled to F.
    template <class T>
    GElem<T> r_map(const GElem<T>& X) const {
        if (X.n != N0) throw DomainError("element over the wrong set");
        const int m = level1.num_vertices;
        GElem<T> prod = GElem<T>::unit(m);
        for (int i = 0; i < N; ++i) {
            auto lifted = reindex(tau(X, scalar::from_q<T>(c_q[i])), lift[i], m);
            prod = gr_mul(prod, lifted);
        }
        auto r = restrict_to(prod, boundary_mask);
        return reindex(r, boundary_back, N0);
    }

    // Constant with <R^n exp Q, 1> = C_n det((Q_<n>)|interior).
    mpq_class C(int n) const {
        mpq_class base = 1;
        for (int k = 0; k < N; ++k) base *= spec.alpha[k].q / spec.alpha[0].q;
        mpq_class out = 1;
        for (int j = 1; j < n; ++j) {
            const int interior = build_level(spec, j).num_vertices - N0;
            // exponent |interior(F_<j>)| * N^(n-1-j)
            unsigned long e = static_cast<unsigned long>(interior);
            for (int t = 0; t < n - 1 - j; ++t) e *= static_cast<unsigned long>(N);
            mpz_class num, den;
            mpz_pow_ui(num.get_mpz_t(), base.get_num_mpz_t(), e);
            mpz_pow_ui(den.get_mpz_t(), base.get_den_mpz_t(), e);
            mpq_class p(num, den);
            out *= p;
        }
        return out;
    }
};

// phi(lambda) = exp(etabar (A + lambda diag b) eta); zeros of <R^n phi, 1> are the
// Dirichlet eigenvalues of H_<n> (which are <= 0).
template <class T>
GElem<T> phi(const BaseOperator& base, const T& lambda) {
    return exp_q<T>(base.size, [&](int i, int j) {
        T v = scalar::from_q<T>(base.A[i][j]);
        if (i == j) v = v + lambda * scalar::from_q<T>(base.b[i]);
        return v;
    });
}

inline CMatrix phi_matrix(const BaseOperator& base, std::complex<double> lambda) {
    CMatrix Q(base.size, base.size);
    for (int i = 0; i < base.size; ++i)
        for (int j = 0; j < base.size; ++j)
            Q(i, j) = base.A[i][j].get_d() + (i == j ? lambda * base.b[i].get_d() : 0.0);
    return Q;
}

// Gasket Sym^G coordinates: Q = u0 J/3 + u1 (I - J/3).
inline std::pair<std::complex<double>, std::complex<double>> gasket_coords(const CMatrix& Q) {
    return {Q.row(0).sum(), Q(0, 0) - Q(0, 1)};
}
inline CMatrix gasket_matrix(std::complex<double> u0, std::complex<double> u1) {
    CMatrix Q(3, 3);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) Q(i, j) = u0 / 3.0 + u1 * ((i == j ? 1.0 : 0.0) - 1.0 / 3.0);
    return Q;
}

struct GreenEstimate {
    double value = 0;
    int iterations = 0;
    double tail_bound = 0;
    std::vector<double> log_norm_history;
    int zero_hit = -1; // iteration at which an exact zero appeared, or -1
};

// Normalized iteration of a degree-d homogeneous map F:
// G(X) ~ ln|X| + sum_{k < n_max} g_k / d^{k+1}, g_k = ln|F(x_k)|, x_{k+1} = F(x_k)/|F(x_k)|.
template <class Elem, class Map, class Norm, class Scale>
GreenEstimate green_iterate(const Elem& X, int degree, int n_max, Map&& F, Norm&& norm_of, Scale&& scale) {
    GreenEstimate g;
    const double n0 = norm_of(X);
    if (!(n0 > 1e-280)) {
        g.value = -std::numeric_limits<double>::infinity();
        g.zero_hit = 0;
        return g;
    }
    Elem x = scale(X, 1.0 / n0);
    double value = std::log(n0), weight = 1.0, sup = 0.0;
    for (int k = 0; k < n_max; ++k) {
        Elem y = F(x);
        const double ny = norm_of(y);
        weight /= degree;
        if (!(ny > 1e-280)) {
            g.value = -std::numeric_limits<double>::infinity();
            g.zero_hit = k + 1;
            g.iterations = k + 1;
            return g;
        }
        const double gk = std::log(ny);
        g.log_norm_history.push_back(gk);
        value += gk * weight;
        sup = std::max(sup, std::abs(gk));
        x = scale(y, 1.0 / ny);
    }
    g.value = value;
    g.iterations = n_max;
    g.tail_bound = sup * weight / (degree - 1);
    return g;
}

inline GreenEstimate green_estimate(const RenormContext& ctx, const CGElem& X, int n_max = 40) {
    return green_iterate(
        X, ctx.N, n_max, [&](const CGElem& x) { return ctx.r_map(x); }, [](const CGElem& x) { return norm(x); },
        [](const CGElem& x, double s) { return std::complex<double>(s, 0.0) * x; });
}

namespace detail {

template <class T>
T top_interleaved(const GElem<T>& X) {
    const int n = X.n;
    const Mask all = (Mask{1} << n) - 1;
    T v = X.coeff(all, all);
    return ((n * (n - 1) / 2) % 2) ? T(T(0) - v) : v;
}

inline mpq_class r_power_pairing(const RenormContext& ctx, const BaseOperator& base, const mpq_class& lambda, int n,
                                 bool neumann) {
    QGElem X = phi<mpq_class>(base, lambda);
    for (int k = 0; k < n; ++k) X = ctx.r_map(X);
    return neumann ? top_interleaved(X) : X.coeff(0, 0);
}

inline QPoly interpolate_pairing(const RenormContext& ctx, const BaseOperator& base, int n, int degree, bool neumann) {
    std::vector<mpq_class> xs, ys;
    for (int k = 0; k <= degree; ++k) {
        // Nodes spread over [-6, 1] to keep values moderate.
        mpq_class x(7 * k, std::max(1, degree));
        x -= 6;
        x.canonicalize();
        xs.push_back(x);
        ys.push_back(r_power_pairing(ctx, base, x, n, neumann));
    }
    return interpolate(xs, ys);
}

} // namespace detail

// lambda -> <R^n phi(lambda), 1> = C_n det((A_<n> + lambda b_<n>)|interior), exact.
inline QPoly dirichlet_poly(const RenormContext& ctx, const BaseOperator& base, int n) {
    const int deg = build_level(ctx.spec, n).num_vertices - ctx.N0;
    return detail::interpolate_pairing(ctx, base, n, deg, false);
}

// lambda -> <R^n phi(lambda), prod etabar eta> = C_n det(A_<n> + lambda b_<n>), exact.
inline QPoly neumann_poly(const RenormContext& ctx, const BaseOperator& base, int n) {
    const int deg = build_level(ctx.spec, n).num_vertices;
    return detail::interpolate_pairing(ctx, base, n, deg, true);
}

// rho_n(lambda0): N-D kernel dimension of (A + lambda0 b)_<n>.
inline int rho_n(const StructureSpec& s, const BaseOperator& base, double lambda0, int n,
                 double tol = kDefaultNullTol) {
    auto op = assemble(base, s, build_level(s, n));
    return nd_nullity_stacked(op, lambda0, tol);
}

// Same quantity as the vanishing order at lambda0 of the polynomial family lambda -> R^n(phi(lambda)).
inline int rho_n_exact(const RenormContext& ctx, const BaseOperator& base, const mpq_class& lambda0, int n) {
    // Shift so the order is read at the origin: phi(lambda0 + t).
    QPoly t(std::vector<mpq_class>{lambda0, mpq_class(1)});
    PGElem X = phi<QPoly>(base, t);
    for (int k = 0; k < n; ++k) X = ctx.r_map(X);
    if (X.is_zero()) throw DomainError("R^n(phi) vanishes identically");
    int order = std::numeric_limits<int>::max();
    for (const auto& [k, p] : X.c) {
        int z = 0;
        while (z <= p.deg() && p.c[z] == 0) ++z;
        order = std::min(order, z);
    }
    return order;
}

// nu^ND_<n> / N^n.
inline AtomicMeasure mu_nd_estimate(const StructureSpec& s, const BaseOperator& base, int n,
                                    double tol = kDefaultNullTol, double merge_tol = kDefaultMergeTol) {
    auto op = assemble(base, s, build_level(s, n));
    return nd_spectrum(op, tol, merge_tol).scaled(std::pow(static_cast<double>(s.N), -n));
}

// ---- Siegel half-space -------------------------------------------------------

inline bool in_siegel(const CMatrix& Q) {
    Eigen::MatrixXd Im = Q.imag();
    Im = 0.5 * (Im + Im.transpose());
    return sym_eig(Im, false).values.minCoeff() > 0;
}

inline double siegel_distance(const CMatrix& Q1, const CMatrix& Q2) {
    if (!in_siegel(Q1) || !in_siegel(Q2)) throw DomainError("argument outside the Siegel half-space");
    const CMatrix Q1b = Q1.conjugate(), Q2b = Q2.conjugate();
    const CMatrix R = (Q1 - Q2) * (Q1 - Q2b).inverse() * (Q1b - Q2b) * (Q1b - Q2).inverse();
    Eigen::ComplexEigenSolver<CMatrix> es(R, false);
    double d2 = 0;
    for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) {
        double r = std::clamp(es.eigenvalues()(k).real(), 0.0, 1.0 - 1e-16);
        const double s = std::sqrt(r);
        const double l = std::log((1 + s) / (1 - s));
        d2 += l * l;
    }
    return std::sqrt(d2);
}

struct SiegelChecks {
    bool image_in_siegel = false;
    bool im_bound = false;     // rho(Im TQ) >= alpha_1/alpha_max rho(Im Q)
    bool inv_im_bound = false; // rho(Im (TQ)^-1) >= alpha_min/alpha_1 rho(Im Q^-1)
    bool contraction = false;  // d(iI, T^n Q) <= sqrt|F| (d(iI, Q) + n d(iI, T(iI))), n <= n_max
    bool all() const { return image_in_siegel && im_bound && inv_im_bound && contraction; }
};

inline SiegelChecks siegel_invariance_check(const RenormContext& ctx, const CMatrix& Q, int n_max = 3) {
    SiegelChecks c;
    double amax = 0, amin = std::numeric_limits<double>::infinity();
    for (const auto& a : ctx.spec.alpha) {
        amax = std::max(amax, a.d);
        amin = std::min(amin, a.d);
    }
    const double a1 = ctx.spec.alpha[0].d;
    const CMatrix TQ = ctx.t_map(Q);
    c.image_in_siegel = in_siegel(TQ);
    const double slack = 1e-10;
    c.im_bound = rho_min(Eigen::MatrixXd(TQ.imag())) >= (a1 / amax) * rho_min(Eigen::MatrixXd(Q.imag())) * (1 - slack);
    c.inv_im_bound = rho_min(Eigen::MatrixXd(TQ.inverse().imag())) >=
                     (amin / a1) * rho_min(Eigen::MatrixXd(Q.inverse().imag())) * (1 - slack);
    const CMatrix I = CMatrix::Identity(Q.rows(), Q.cols()) * std::complex<double>(0, 1);
    const double dQ = siegel_distance(I, Q);
    const double dT = siegel_distance(I, ctx.t_map(I));
    const double rootF = std::sqrt(static_cast<double>(Q.rows()));
    c.contraction = c.image_in_siegel;
    CMatrix X = Q;
    for (int n = 1; n <= n_max && c.contraction; ++n) {
        X = ctx.t_map(X);
        c.contraction = siegel_distance(I, X) <= rootF * (dQ + n * dT) * (1 + slack) + slack;
    }
    return c;
}

} // namespace pcf
