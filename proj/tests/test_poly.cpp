#include <gtest/gtest.h>

#include "pcf/dynamics.hpp"
#include "pcf/multipoly.hpp"
#include "pcf/qmatrix.hpp"

using namespace pcf;

TEST(Poly, ArithmeticAndDivision) {
    QPoly a = qpoly({-1, 0, 1}), b = qpoly({1, 1});
    auto [q, r] = divmod(a, b);
    EXPECT_EQ(q, qpoly({-1, 1}));
    EXPECT_TRUE(r.is_zero());
    EXPECT_EQ(a * b, qpoly({-1, -1, 1, 1}));
    EXPECT_EQ(a.derivative(), qpoly({0, 2}));
    EXPECT_EQ(a.eval(mpq_class(3)), mpq_class(8));
    EXPECT_THROW(exact_div(a, qpoly({2, 1})), DomainError);
}

TEST(Poly, GcdAndMultiplicity) {
    QPoly p = qpoly({1, 1}) * qpoly({1, 1}) * qpoly({-2, 1});
    QPoly q = qpoly({1, 1}) * qpoly({3, 1});
    EXPECT_EQ(gcd(p, q), qpoly({1, 1}));
    EXPECT_EQ(root_multiplicity(p, mpq_class(-1)), 2);
    EXPECT_EQ(root_multiplicity(p, mpq_class(2)), 1);
    EXPECT_EQ(root_multiplicity(p, mpq_class(0)), 0);
}

TEST(Poly, RealRootsWithMultiplicity) {
    // (2x + 5)^2 (x + 1) (x - 1/3)
    QPoly p = qpoly({5, 2}) * qpoly({5, 2}) * qpoly({1, 1}) * QPoly(std::vector<mpq_class>{mpq_class(-1, 3), 1});
    auto r = real_roots(p);
    ASSERT_EQ(r.size(), 3u);
    EXPECT_NEAR(r[0].location, -2.5, 1e-12);
    EXPECT_EQ(r[0].multiplicity, 2);
    EXPECT_NEAR(r[1].location, -1.0, 1e-12);
    EXPECT_NEAR(r[2].location, 1.0 / 3, 1e-12);
    EXPECT_TRUE(real_roots(qpoly({1, 0, 1})).empty());
}

TEST(Poly, SturmCountsRoots) {
    QPoly p = qpoly({0, -1, 0, 1}); // x^3 - x
    auto s = detail::sturm_sequence(p);
    EXPECT_EQ(detail::sign_changes(s, mpq_class(-2)) - detail::sign_changes(s, mpq_class(2)), 3);
    EXPECT_EQ(detail::sign_changes(s, mpq_class(1, 2)) - detail::sign_changes(s, mpq_class(2)), 1);
}

TEST(Poly, InterpolationIsExact) {
    QPoly p = qpoly({3, -1, 0, 2});
    std::vector<mpq_class> xs, ys;
    for (int k = 0; k < 4; ++k) {
        mpq_class x(k * 7, 3);
        x.canonicalize();
        xs.push_back(x - 2);
        ys.push_back(p.eval(xs.back()));
    }
    EXPECT_EQ(interpolate(xs, ys), p);
}

TEST(Poly, BivariateGcdRecoversCommonFactor) {
    const BiPoly x = bi_x(), y = bi_y();
    const BiPoly h = x * y + bi_const(2) * x + bi_const(1);
    const BiPoly f = h * (x + y * y);
    const BiPoly g = h * (x * x - bi_const(3) * y);
    EXPECT_EQ(gcd(f, g), normalize(h));
    EXPECT_EQ(exact_div(f, h), x + y * y);
    // Coprime inputs take the specialization shortcut.
    EXPECT_EQ(total_degree(gcd(x + y, x - y)), 0);
    // A common factor in y alone lives in the content.
    const BiPoly c = y + bi_const(1);
    EXPECT_EQ(gcd(c * x, c * (x + bi_const(1))), normalize(c));
}

TEST(Poly, BivariateGcdWhenLeadingCoefficientsVanishAtSmallIntegers) {
    const BiPoly x = bi_x(), y = bi_y();
    BiPoly lead = bi_const(1);
    for (int r = 0; r < 8; ++r) lead = lead * (y - bi_const(r));
    const BiPoly h = x + y;
    EXPECT_EQ(gcd(h * (lead * x + bi_const(1)), h * (lead * x * x + y)), normalize(h));
}

TEST(Poly, RationalMapComposition) {
    auto g = gasket_ghat();
    EXPECT_EQ(g.degree(), 2);
    auto gg = compose(g, g);
    EXPECT_EQ(gg.degree(), 4);
    const mpq_class z(2, 7);
    EXPECT_EQ(gg(z), g(g(z)));
}

TEST(QMatrixTest, RankNullspaceDet) {
    QMatrix M(3, 3);
    int v = 1;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) M(i, j) = v++;
    EXPECT_EQ(M.rank(), 2);
    EXPECT_EQ(M.det(), mpq_class(0));
    QMatrix K = M.nullspace();
    ASSERT_EQ(K.cols(), 1);
    QMatrix Z = M * K;
    for (int i = 0; i < 3; ++i) EXPECT_EQ(Z(i, 0), mpq_class(0));
    QMatrix I = QMatrix::identity(3);
    I(0, 1) = mpq_class(1, 2);
    I(2, 2) = 3;
    EXPECT_EQ(I.det(), mpq_class(3));
}
