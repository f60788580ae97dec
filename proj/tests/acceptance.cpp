// Acceptance run: ten criteria, one PASS/FAIL line each; nonzero exit if any fails.
#include <chrono>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include "pcf/pcf.hpp"

using namespace pcf;
using C = std::complex<double>;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

void fail_if(Outcome& o, bool bad, const std::string& what) {
    if (bad) {
        o.pass = false;
        o.detail += (o.detail.empty() ? "" : "; ") + what;
    }
}

std::string num(double v) {
    char b[32];
    std::snprintf(b, sizeof b, "%.3g", v);
    return b;
}

std::mt19937 rng(20240917);

C cnormal() {
    std::normal_distribution<double> g;
    return {g(rng), g(rng)};
}

Eigen::MatrixXd random_spd(int n) {
    std::normal_distribution<double> g;
    Eigen::MatrixXd M(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) M(i, j) = g(rng);
    return M * M.transpose() + 0.5 * Eigen::MatrixXd::Identity(n, n);
}

CMatrix random_siegel(int n) {
    std::normal_distribution<double> g;
    Eigen::MatrixXd X(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) X(i, j) = g(rng);
    X = (0.5 * (X + X.transpose())).eval();
    return X.cast<C>() + C(0, 1) * random_spd(n).cast<C>();
}

CMatrix random_csym(int n) {
    CMatrix Q(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) Q(i, j) = Q(j, i) = cnormal();
    return Q;
}

template <class Mat>
double rel(const Mat& a, const Mat& b) {
    return (a - b).norm() / std::max(1e-300, b.norm());
}
double rel(const CGElem& a, const CGElem& b) { return norm(a - b) / norm(b); }

// ---- 1 ---------------------------------------------------------------------------

Outcome schur_suite() {
    Outcome o;
    const std::vector<int> sub{0, 2, 3}, inner{0, 2}, inner_pos{0, 1};
    double worst_inv = 0, worst_var = 0, worst_tower = 0;
    for (int t = 0; t < 200; ++t) {
        const CMatrix Q = t < 100 ? CMatrix(random_spd(6).cast<C>()) : random_siegel(6);
        const CMatrix S = trace_on_subset(Q, sub);
        const CMatrix inv = CMatrix(detail::submatrix(CMatrix(Q.inverse()), sub, sub)).inverse();
        worst_inv = std::max(worst_inv, rel(S, inv));
        // stationary value of the quadratic form over extensions
        CVector f(3);
        f << cnormal(), cnormal(), cnormal();
        const CVector h = harmonic_prolongation(Q, sub, f);
        const C bil_l = (f.transpose() * S * f)(0, 0), bil_r = (h.transpose() * Q * h)(0, 0);
        worst_var = std::max(worst_var, std::abs(bil_l - bil_r) / std::abs(bil_l));
        const CMatrix two = trace_on_subset(S, inner_pos);
        worst_tower = std::max(worst_tower, rel(two, CMatrix(trace_on_subset(Q, inner))));
    }
    fail_if(o, worst_inv > 1e-10, "inverse-restrict-invert " + num(worst_inv));
    fail_if(o, worst_var > 1e-10, "variational " + num(worst_var));
    fail_if(o, worst_tower > 1e-10, "tower " + num(worst_tower));
    o.detail = o.detail.empty() ? "max rel err inv " + num(worst_inv) + ", var " + num(worst_var) + ", tower " +
                                      num(worst_tower)
                                : o.detail;
    return o;
}

// ---- 2 ---------------------------------------------------------------------------

std::vector<GKey> balanced_keys(int n) {
    std::vector<GKey> out;
    for (Mask I = 0; I < (Mask{1} << n); ++I)
        for (Mask J = 0; J < (Mask{1} << n); ++J)
            if (std::popcount(I) == std::popcount(J)) out.push_back(gkey(I, J));
    return out;
}

QGElem random_qelem(int n, int terms) {
    static const auto keys = balanced_keys(3);
    std::uniform_int_distribution<std::size_t> pick(0, keys.size() - 1);
    std::uniform_int_distribution<int> u(-5, 5), d(1, 4);
    QGElem X(n);
    for (int t = 0; t < terms; ++t) {
        mpq_class v(u(rng), d(rng));
        v.canonicalize();
        X.add(keys[pick(rng)], v);
    }
    return X;
}

Outcome grassmann_suite() {
    Outcome o;
    double w_norm = 0, w_25 = 0, w_26 = 0, w_27 = 0, w_block = 0;
    int adj_bad = 0;
    for (int t = 0; t < 100; ++t) {
        const CMatrix Q = random_csym(3);
        const double n2 = std::pow(norm(exp_q_matrix<C>(Q)), 2);
        const double det = (CMatrix::Identity(3, 3) + Q * Q.adjoint()).determinant().real();
        w_norm = std::max(w_norm, std::abs(n2 - det) / det);
    }
    const std::vector<int> keep{1, 3}, rest{0, 2};
    for (int t = 0; t < 100; ++t) {
        const CMatrix Q = random_csym(4);
        const auto R = restrict_to(exp_q_matrix<C>(Q), Mask{0b1010});
        const C top = inner(R, interleaved_product<C>(2, 3));
        w_25 = std::max(w_25, std::abs(top - Q.determinant()) / std::abs(Q.determinant()));
        const C dint = CMatrix(detail::submatrix(Q, rest, rest)).determinant();
        w_26 = std::max(w_26, std::abs(R.coeff(0, 0) - dint) / std::abs(dint));
        if (std::abs(dint) > 1e-8) w_27 = std::max(w_27, rel(R, dint * exp_q_matrix<C>(trace_on_subset(Q, keep))));
    }
    for (int t = 0; t < 100; ++t) {
        auto X = random_qelem(3, 10), Y = random_qelem(3, 4), Z = random_qelem(3, 8);
        if (inner(interior_product(Y, X), Z) != inner(X, gr_mul(Y, Z))) ++adj_bad;
    }
    for (int t = 0; t < 100; ++t) {
        const CMatrix Qa = random_csym(2), Qb = random_csym(3);
        CMatrix Q = CMatrix::Zero(5, 5);
        Q.topLeftCorner(2, 2) = Qa;
        Q.bottomRightCorner(3, 3) = Qb;
        const auto lhs = exp_q_matrix<C>(Q);
        const auto rhs = gr_mul(reindex(exp_q_matrix<C>(Qa), {0, 1}, 5), reindex(exp_q_matrix<C>(Qb), {2, 3, 4}, 5));
        w_block = std::max(w_block, rel(lhs, rhs));
    }
    fail_if(o, w_norm > 1e-10, "norm identity " + num(w_norm));
    fail_if(o, w_25 > 1e-10 || w_26 > 1e-10 || w_27 > 1e-10,
              "restriction triple " + num(w_25) + "/" + num(w_26) + "/" + num(w_27));
    fail_if(o, adj_bad > 0, "adjointness failures " + std::to_string(adj_bad));
    fail_if(o, w_block > 1e-10, "block factorization " + num(w_block));
    if (o.pass)
        o.detail = "norm " + num(w_norm) + ", triple " + num(w_25) + "/" + num(w_26) + "/" + num(w_27) +
                   ", adjoint exact, block " + num(w_block);
    return o;
}

// ---- 3 ---------------------------------------------------------------------------

CMatrix random_invariant(const RenormContext& ctx) {
    std::normal_distribution<double> g;
    CMatrix Q = CMatrix::Zero(ctx.N0, ctx.N0);
    for (const auto& B : ctx.basis) Q += C(g(rng), std::exp(g(rng))) * B.to_double().cast<C>();
    return Q;
}

double lift_error(const RenormContext& ctx, const CMatrix& Q, int n) {
    CGElem X = exp_q_matrix<C>(Q);
    for (int k = 0; k < n; ++k) X = ctx.r_map(X);
    const C scale = ctx.C(n).get_d() * ctx.interior_det(Q, n);
    return rel(X, scale * exp_q_matrix<C>(ctx.t_map_direct(Q, n)));
}

Outcome renorm_consistency() {
    Outcome o;
    double w31 = 0, wg = 0, wi = 0;
    for (const char* name : {"gasket", "interval:1/2", "interval:1/3"}) {
        RenormContext ctx(builtin(name).spec);
        for (int t = 0; t < 5; ++t) {
            const CMatrix Q = random_invariant(ctx);
            for (int n = 1; n <= 2; ++n) w31 = std::max(w31, lift_error(ctx, Q, n));
        }
    }
    RenormContext g(gasket_spec());
    for (int t = 0; t < 100; ++t) {
        const C u0 = cnormal(), u1 = cnormal();
        auto [a, b] = gasket_coords(g.t_map(gasket_matrix(u0, u1)));
        auto [x, y] = gasket_t(u0, u1);
        wg = std::max({wg, std::abs(a - x) / std::max(1.0, std::abs(x)), std::abs(b - y) / std::max(1.0, std::abs(y))});
    }
    for (auto alpha : {mpq_class(1, 2), mpq_class(1, 3)}) {
        RenormContext ctx(interval_spec(alpha));
        const double delta = interval_delta(alpha).get_d();
        for (int t = 0; t < 100; ++t) {
            const C a = cnormal(), d = cnormal(), q = cnormal();
            CMatrix Q(2, 2);
            Q << a, q, q, d;
            const CMatrix T = ctx.t_map(Q);
            const auto f = interval_t(a, d, q, delta);
            const C got[3] = {T(0, 0), T(1, 1), T(0, 1)};
            for (int i = 0; i < 3; ++i) wi = std::max(wi, std::abs(got[i] - f[i]) / std::max(1.0, std::abs(f[i])));
        }
    }
    fail_if(o, w31 > 1e-9, "lift consistency " + num(w31));
    fail_if(o, wg > 1e-12, "gasket T " + num(wg));
    fail_if(o, wi > 1e-12, "interval T " + num(wi));
    if (o.pass) o.detail = "lift rel err " + num(w31) + ", gasket T " + num(wg) + ", interval T " + num(wi);
    return o;
}

// ---- 4 ---------------------------------------------------------------------------

bool roots_match(const QPoly& p, const AtomicMeasure& m, double& worst) {
    auto roots = real_roots(p);
    if (roots.size() != m.atoms.size()) return false;
    for (std::size_t k = 0; k < roots.size(); ++k) {
        worst = std::max(worst, std::abs(roots[k].location - m.atoms[k].location));
        if (roots[k].multiplicity != static_cast<int>(std::lround(m.atoms[k].mass))) return false;
    }
    return worst <= 1e-8;
}

Outcome spectral_cross_validation() {
    Outcome o;
    double worst = 0;
    for (auto [name, n_hi] : {std::pair{"gasket", 2}, {"interval:1/2", 3}, {"interval:1/3", 3}}) {
        auto b = builtin(name);
        RenormContext ctx(b.spec);
        for (int n = 1; n <= n_hi; ++n) {
            auto op = assemble(b.base, b.spec, build_level(b.spec, n));
            auto dir = counting_measure(spectrum(op, Boundary::dirichlet));
            auto neu = counting_measure(spectrum(op, Boundary::neumann));
            fail_if(o, !roots_match(dirichlet_poly(ctx, b.base, n), dir, worst),
                      std::string(name) + " Dirichlet n=" + std::to_string(n));
            fail_if(o, !roots_match(neumann_poly(ctx, b.base, n), neu, worst),
                      std::string(name) + " Neumann n=" + std::to_string(n));
        }
    }
    o.detail += (o.detail.empty() ? "" : "; ") + std::string("max root-eigenvalue gap ") + num(worst);
    return o;
}

// ---- 5 ---------------------------------------------------------------------------

Outcome gasket_measure() {
    Outcome o;
    auto b = builtin("gasket");
    auto est = mu_nd_estimate(b.spec, b.base, 6);
    auto lim = gasket_limit_measure(5);
    double worst = 0;
    int excess = 0;
    for (const auto& a : est.atoms) {
        double best = std::numeric_limits<double>::infinity(), mass = 0;
        for (const auto& l : lim.measure.atoms)
            if (std::abs(a.location - l.location) < best) {
                best = std::abs(a.location - l.location);
                mass = l.mass;
            }
        worst = std::max(worst, best);
        if (a.mass > mass + 1e-12) ++excess;
    }
    const double total = est.total(), at3 = est.mass_near(-3.0, 1e-7);
    fail_if(o, worst > 1e-7, "location mismatch " + num(worst));
    fail_if(o, excess > 0, std::to_string(excess) + " atoms above limit mass");
    fail_if(o, std::abs(total - 1.5) > 0.1, "total N-D mass " + num(total) + " not within 0.1 of 1.5");
    fail_if(o, std::abs(at3 - 0.5) > 0.1, "mass at -3 " + num(at3));
    o.detail += (o.detail.empty() ? "" : "; ") + std::string("|F|=") +
                std::to_string(build_level(b.spec, 6).num_vertices) + ", atoms " + std::to_string(est.atoms.size()) +
                ", worst location " + num(worst) + ", total " + num(total) + ", at -3 " + num(at3);
    return o;
}

// ---- 6 ---------------------------------------------------------------------------

Outcome dichotomy_and_growth() {
    Outcome o;
    auto dh = compose_reduce_1d(gasket_ghat(), 5).degrees;
    for (int k = 1; k <= 5; ++k) fail_if(o, dh[k - 1] != (1 << k), "dhat_" + std::to_string(k));
    auto bd = bidegree_sequence(gasket_g(), 3);
    using D = std::array<std::array<long, 2>, 2>;
    fail_if(o, bd[0].d != D{{{1, 1}, {1, 2}}}, "d_1 mismatch");
    auto est = dynamical_degree(std::vector<double>(dh.begin(), dh.end()));
    auto verdict = dichotomy_classify(est.d_inf, 3);
    fail_if(o, verdict != Dichotomy::case_i, "verdict " + to_string(verdict));
    fail_if(o, est.d_inf < 1.8 || est.d_inf > 2.2, "d_inf " + num(est.d_inf));
    auto b = builtin("gasket");
    auto g = growth_check(b.spec, b.base, 3, 7);
    fail_if(o, std::abs(g.slope - std::log(2.0)) > 0.15, "growth slope " + num(g.slope));
    std::ostringstream s;
    s << "d_inf " << num(est.d_inf) << " (" << to_string(verdict) << "), bidegree l_3^(1/3) "
      << num(std::pow(bd[2].l, 1.0 / 3)) << ", |nu+ - nuND| =";
    for (double m : g.mass) s << ' ' << m;
    s << ", slope " << num(g.slope);
    o.detail += (o.detail.empty() ? "" : "; ") + s.str();
    return o;
}

// ---- 7 ---------------------------------------------------------------------------

Outcome interval_suite() {
    Outcome o;
    double gap = 0;
    int rects = 0;
    for (auto alpha : {mpq_class(1, 2), mpq_class(1, 3)}) {
        auto z = interval_zero_locus_check(alpha, 5);
        fail_if(o, !z.phihat_avoids, "phihat meets the zero locus, alpha=" + alpha.get_str());
        fail_if(o, !z.locus_matches, "zero locus mismatch, alpha=" + alpha.get_str());
        for (int k = 0; k < 20; ++k) {
            const C lam(-3.0 + 0.18 * k, (k % 2 ? -1 : 1) * (0.25 + 0.05 * (k % 5)));
            auto X = interval_phihat<C>(lam, 1.0, 1.0);
            gap = std::max(gap, std::abs(interval_green(alpha, X, 30).value - interval_green(alpha, X, 20).value));
        }
        auto s = interval_spec(alpha);
        for (int n = 1; n <= 6; ++n) {
            auto op = assemble(interval_base(), s, build_level(s, n));
            const Eigen::MatrixXd A(op.A);
            auto ev = spectrum(op, Boundary::neumann).values;
            auto phase = [&](C l) {
                Eigen::MatrixXcd M = A.cast<C>();
                for (Eigen::Index i = 0; i < M.rows(); ++i) M(i, i) += l * op.b(i);
                return det_phase(M);
            };
            // whole spectrum, then the left and right halves split between eigenvalues
            const std::size_t mid = ev.size() / 2;
            const double cut = 0.5 * (ev[mid - 1] + ev[mid]);
            const Rect boxes[3] = {{ev.back() - 0.0137, 0.0113, -0.5, 0.5},
                                   {ev.back() - 0.0137, cut, -0.3, 0.4},
                                   {cut, 0.0113, -0.4, 0.3}};
            for (const auto& box : boxes) {
                int expect = 0;
                for (double v : ev) expect += (v > box.re_lo && v < box.re_hi);
                auto w = count_zeros(phase, box, 256);
                ++rects;
                fail_if(o, w.zeros != expect,
                          "alpha=" + alpha.get_str() + " n=" + std::to_string(n) + " winding " +
                              std::to_string(w.zeros) + " vs " + std::to_string(expect));
            }
        }
    }
    fail_if(o, gap > 1e-6, "Cauchy gap " + num(gap));
    o.detail += (o.detail.empty() ? "" : "; ") + std::string("Cauchy gap ") + num(gap) + ", " + std::to_string(rects) +
                " rectangles counted";
    return o;
}

// ---- 8 ---------------------------------------------------------------------------

Outcome siegel_suite() {
    Outcome o;
    auto b = builtin("gasket");
    RenormContext ctx(b.spec);
    int bad = 0;
    std::normal_distribution<double> g;
    for (int t = 0; t < 100; ++t) {
        const C u0(g(rng), std::exp(g(rng))), u1(g(rng), std::exp(g(rng)));
        if (!siegel_invariance_check(ctx, gasket_matrix(u0, u1), 3).all()) ++bad;
    }
    fail_if(o, bad > 0, std::to_string(bad) + " of 100 samples fail");
    // Five-point Laplacian of lambda -> G(phi(lambda)), scaled by 1/h^2.
    auto G = [&](C l) { return green_estimate(ctx, phi<C>(b.base, l), 40).value; };
    const double h = 0.01;
    double worst = 0;
    for (double y : {0.5, -0.5})
        for (double x = -4.0; x <= 1.0 + 1e-9; x += 0.5) {
            const C c(x, y);
            const double lap = (G(c + h) + G(c - h) + G(c + C(0, h)) + G(c - C(0, h)) - 4 * G(c)) / (h * h);
            worst = std::max(worst, std::abs(lap));
        }
    fail_if(o, worst > 1e-3, "Laplacian residual " + num(worst));
    o.detail += (o.detail.empty() ? "" : "; ") + std::string("100 samples checked, Laplacian residual ") + num(worst) +
                " (h=0.01)";
    return o;
}

// ---- 9 ---------------------------------------------------------------------------

// Q0 with kernel spanned by `dim` vectors vanishing on {0,1,2}, optionally plus one generic
// kernel vector, built as sum c_i w_i w_i^t over a basis w of the kernel's orthogonal complement.
QMatrix designed_q0(int dim, bool generic_extra, bool indefinite) {
    std::uniform_int_distribution<int> u(-3, 3), pos(1, 5);
    const int n = 6;
    std::vector<std::vector<mpq_class>> kernel;
    for (int k = 0; k < dim; ++k) {
        std::vector<mpq_class> v(n, 0);
        for (int x = 3; x < n; ++x) v[x] = u(rng);
        v[3 + k] += 7; // keeps the designed vectors independent
        kernel.push_back(v);
    }
    if (generic_extra) {
        std::vector<mpq_class> v(n, 0);
        for (int x = 0; x < n; ++x) v[x] = u(rng);
        v[0] = 5;
        kernel.push_back(v);
    }
    QMatrix W(static_cast<int>(kernel.size()), n);
    for (std::size_t k = 0; k < kernel.size(); ++k)
        for (int x = 0; x < n; ++x) W(static_cast<int>(k), x) = kernel[k][x];
    QMatrix comp = kernel.empty() ? QMatrix::identity(n) : W.nullspace(); // columns orthogonal to the kernel
    QMatrix Q(n, n);
    for (int c = 0; c < comp.cols(); ++c) {
        mpq_class coef = pos(rng);
        if (indefinite && c % 2) coef = -coef;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) Q(i, j) += coef * comp(i, c) * comp(j, c);
    }
    return Q;
}

Outcome order_duality() {
    Outcome o;
    int cases = 0;
    std::uniform_int_distribution<int> u(1, 4);
    for (int t = 0; t < 20; ++t) {
        const int dim = t % 3;
        const QMatrix Q0 = designed_q0(dim, t % 2 == 1, t % 4 >= 2);
        const int stacked = stacked_nullity(Q0.to_double(), {0, 1, 2});
        for (int s = 0; s < 2; ++s) {
            QMatrix B = QMatrix::identity(6);
            if (s == 1)
                for (int i = 0; i < 6; ++i) {
                    B(i, i) = u(rng) + 2;
                    if (i + 1 < 6) B(i, i + 1) = B(i + 1, i) = mpq_class(1, u(rng));
                }
            const int order = nd_order(Q0, B, Mask{0b000111});
            ++cases;
            fail_if(o, order != stacked || order != dim,
                      "case " + std::to_string(t) + ": order " + std::to_string(order) + ", stacked " +
                          std::to_string(stacked) + ", designed " + std::to_string(dim));
        }
    }
    o.detail += (o.detail.empty() ? "" : "; ") + std::to_string(cases) + " (Q0, B) pairs, kernel dims 0/1/2";
    return o;
}

// ---- 10 --------------------------------------------------------------------------

Outcome monotonicity() {
    Outcome o;
    auto b = builtin("gasket");
    AtomicMeasure prev = nd_spectrum(assemble(b.base, b.spec, build_level(b.spec, 1)));
    for (int n = 1; n <= 5; ++n) {
        auto next = nd_spectrum(assemble(b.base, b.spec, build_level(b.spec, n + 1)));
        fail_if(o, !dominates(next, prev.scaled(3.0)), "n=" + std::to_string(n));
        prev = next;
    }
    if (o.pass) o.detail = "nu^ND_<n+1> >= 3 nu^ND_<n> for n = 1..5";
    return o;
}

} // namespace

int main() {
    struct Criterion {
        const char* name;
        double limit_s;
        std::function<Outcome()> run;
    };
    const Criterion all[] = {
        {"Schur suite", 5, schur_suite},
        {"Grassmann identities", 30, grassmann_suite},
        {"renormalization consistency", 120, renorm_consistency},
        {"spectral cross-validation", 120, spectral_cross_validation},
        {"gasket N-D measure at n=6", 300, gasket_measure},
        {"dichotomy and growth", 300, dichotomy_and_growth},
        {"interval side conditions", 120, interval_suite},
        {"Siegel half-space suite", 120, siegel_suite},
        {"order-of-vanishing duality", 60, order_duality},
        {"N-D monotonicity", 300, monotonicity},
    };
    int failed = 0, k = 0;
    for (const auto& c : all) {
        ++k;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (secs > c.limit_s) {
            o.pass = false;
            o.detail += "; runtime over " + num(c.limit_s) + " s";
        }
        failed += !o.pass;
        std::printf("%s %2d %s: %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", k, c.name, o.detail.c_str(), secs);
        std::fflush(stdout);
    }
    std::printf("%d of 10 criteria passed\n", 10 - failed);
    return failed ? 1 : 0;
}
