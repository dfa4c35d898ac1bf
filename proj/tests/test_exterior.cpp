#include "g2lab/exterior.hpp"
#include "oracle.hpp"

#include <gtest/gtest.h>

#include <unsupported/Eigen/MatrixFunctions>

using namespace g2lab;
using R = Rational;

namespace {

double diff(const KForm<double>& a, const KForm<double>& b)
{
    return (a - b).max_abs();
}

} // namespace

TEST(Basis, MonomialCountsAndPositions)
{
    for (int n = 1; n <= 8; ++n)
        for (int k = 0; k <= n; ++k) {
            const auto& monos = basis::monomials(n, k);
            ASSERT_EQ(static_cast<int>(monos.size()), basis::binomial(n, k));
            for (size_t i = 0; i < monos.size(); ++i) EXPECT_EQ(basis::position(n, monos[i]), static_cast<int>(i));
            for (size_t i = 1; i < monos.size(); ++i) EXPECT_LT(basis::labels(monos[i - 1]), basis::labels(monos[i]));
        }
}

TEST(Basis, WedgeSignCountsInversions)
{
    EXPECT_EQ(basis::wedge_sign(basis::from_labels({1}), basis::from_labels({2})), 1);
    EXPECT_EQ(basis::wedge_sign(basis::from_labels({2}), basis::from_labels({1})), -1);
    EXPECT_EQ(basis::wedge_sign(basis::from_labels({3, 4}), basis::from_labels({1, 2})), 1);
    EXPECT_EQ(basis::wedge_sign(basis::from_labels({2, 4}), basis::from_labels({1, 3})), -1);
    EXPECT_EQ(basis::wedge_sign(basis::from_labels({1}), basis::from_labels({1})), 0);
}

TEST(KFormOps, MonomialAndCoefficientAccess)
{
    auto f = KForm<R>::monomial(7, {1, 2, 7}, R(3, 2));
    EXPECT_EQ(f.coeff({1, 2, 7}), R(3, 2));
    EXPECT_EQ(f.coeff({1, 2, 6}), R(0));
    EXPECT_EQ(f.degree(), 3);
    EXPECT_EQ(f.size(), 35);
    EXPECT_EQ(f.str(), "3/2 e^{127}");
    EXPECT_TRUE(KForm<R>(7, 3).is_zero());
}

TEST(Wedge, MatchesPermutationOracle)
{
    std::mt19937_64 rng(1);
    for (int trial = 0; trial < 12; ++trial) {
        const int n = 5 + trial % 3;
        const int k = 1 + trial % 3, l = 1 + (trial / 3) % 2;
        const auto a = oracle::random_form(rng, n, k);
        const auto b = oracle::random_form(rng, n, l);
        EXPECT_LT(diff(wedge(a, b), oracle::wedge(a, b)), 1e-10) << n << " " << k << " " << l;
    }
}

TEST(Wedge, GradedCommutativityAndAssociativity)
{
    std::mt19937_64 rng(2);
    const auto a = oracle::random_form(rng, 7, 2);
    const auto b = oracle::random_form(rng, 7, 3);
    const auto c = oracle::random_form(rng, 7, 1);
    EXPECT_LT(diff(wedge(a, b), wedge(b, a)), 1e-12);
    EXPECT_LT(diff(wedge(b, c), -wedge(c, b)), 1e-12);
    EXPECT_LT(diff(wedge(wedge(a, b), c), wedge(a, wedge(b, c))), 1e-12);
    EXPECT_TRUE(wedge(c, c).is_zero());
}

TEST(Wedge, ExactOnRationals)
{
    const auto e1 = KForm<R>::monomial(4, {1});
    const auto e23 = KForm<R>::monomial(4, {2, 3}, R(1, 3));
    const auto e4 = KForm<R>::monomial(4, {4}, R(-2));
    EXPECT_EQ(wedge(e1, e23, e4), KForm<R>::monomial(4, {1, 2, 3, 4}, R(-2, 3)));
    EXPECT_EQ(wedge(e23, e1), KForm<R>::monomial(4, {1, 2, 3}, R(1, 3)));
}

TEST(Interior, MatchesEvaluationOracle)
{
    std::mt19937_64 rng(3);
    const auto a = oracle::random_form(rng, 7, 3);
    const Vec<double> x = Vec<double>::Random(7);
    const auto ix = interior(x, a);
    for (int i = 0; i < 7; ++i)
        for (int j = i + 1; j < 7; ++j) {
            const double expect = oracle::evaluate(a, {x, Vec<double>::Unit(7, i), Vec<double>::Unit(7, j)});
            EXPECT_NEAR(oracle::evaluate(ix, oracle::unit_vectors(7, {i, j})), expect, 1e-12);
        }
    EXPECT_LT(diff(interior(2, a), interior(Vec<double>(Vec<double>::Unit(7, 2)), a)), 1e-15);
}

TEST(Interior, IsAnAntiderivation)
{
    std::mt19937_64 rng(4);
    const auto a = oracle::random_form(rng, 6, 2);
    const auto b = oracle::random_form(rng, 6, 3);
    const Vec<double> x = Vec<double>::Random(6);
    const auto lhs = interior(x, wedge(a, b));
    const auto rhs = wedge(interior(x, a), b) + wedge(a, interior(x, b));
    EXPECT_LT(diff(lhs, rhs), 1e-12);
}

TEST(Pullback, MatchesEvaluationAndCompound)
{
    std::mt19937_64 rng(5);
    const auto a = oracle::random_form(rng, 6, 3);
    const Mat<double> m = oracle::random_matrix(rng, 6);
    const auto p = pullback(m, a);
    for (int i = 0; i < 6; ++i)
        for (int j = i + 1; j < 6; ++j)
            for (int k = j + 1; k < 6; ++k) {
                const double expect = oracle::evaluate(a, {m.col(i), m.col(j), m.col(k)});
                EXPECT_NEAR(oracle::evaluate(p, oracle::unit_vectors(6, {i, j, k})), expect, 1e-10);
            }
    const Mat<double> m2 = oracle::random_matrix(rng, 6);
    EXPECT_LT((compound(Mat<double>(m * m2), 3) - compound(m, 3) * compound(m2, 3)).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_LT(diff(pullback(Mat<double>(m * m2), a), pullback(m2, pullback(m, a))), 1e-10);
}

TEST(EndoAction, IsTheDerivativeOfPullback)
{
    std::mt19937_64 rng(6);
    const auto a = oracle::random_form(rng, 7, 3);
    const Mat<double> m = oracle::random_matrix(rng, 7);
    const double h = 1e-5;
    const Mat<double> plus = (h * m).exp(), minus = (-h * m).exp();
    const auto fd = (pullback(plus, a) - pullback(minus, a)) / (2 * h);
    EXPECT_LT(diff(endo_action(m, a), fd), 1e-8);
    const Mat<double> mat = endo_action_matrix(m, 3);
    EXPECT_LT((mat * a.coeffs() - endo_action(m, a).coeffs()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(EndoAction, IsADerivationOfTheWedge)
{
    const Mat<R> m = (Mat<R>(3, 3) << 1, 2, 0, R(1, 2), -1, 3, 0, 0, 2).finished();
    const auto a = KForm<R>::monomial(3, {1}) + KForm<R>::monomial(3, {3}, R(2));
    const auto b = KForm<R>::monomial(3, {2, 3}, R(-1));
    EXPECT_EQ(endo_action(m, wedge(a, b)), wedge(endo_action(m, a), b) + wedge(a, endo_action(m, b)));
    EXPECT_EQ(endo_action(m, KForm<R>::monomial(3, {1, 2, 3})), KForm<R>::monomial(3, {1, 2, 3}, R(2)));
}

TEST(WedgeMatrix, AgreesWithWedge)
{
    std::mt19937_64 rng(7);
    const auto a = oracle::random_form(rng, 7, 2);
    const auto b = oracle::random_form(rng, 7, 3);
    EXPECT_LT((wedge_matrix(a, 3) * b.coeffs() - wedge(a, b).coeffs()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(LiftRestrict, RoundTrip)
{
    const auto a = KForm<R>::monomial(6, {1, 3}) + KForm<R>::monomial(6, {2, 6}, R(5));
    const auto up = lift(a, 7);
    EXPECT_EQ(up.dim(), 7);
    EXPECT_EQ(up.coeff({2, 6}), R(5));
    EXPECT_EQ(restrict_to(up, 6), a);
    EXPECT_EQ(restrict_to(up, 5), restrict_to(KForm<R>::monomial(7, {1, 3}), 5));
}

TEST(Hodge, DefiningIdentityOnRandomMetrics)
{
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 5; ++trial) {
        const Mat<double> g = oracle::random_spd(rng, 7);
        const auto m = make_metric<double>(g);
        EXPECT_NEAR(m.vol, std::sqrt(g.determinant()), 1e-12);
        for (int k = 0; k <= 7; ++k) {
            const auto a = oracle::random_form(rng, 7, k);
            const auto b = oracle::random_form(rng, 7, k);
            const double ip = oracle::inner(g, a, b);
            EXPECT_NEAR(inner(m, a, b), ip, 1e-9 * (1 + std::abs(ip)));
            const auto lhs = wedge(a, hodge(m, b));
            EXPECT_NEAR(lhs.coeffs()(0), ip * m.vol, 1e-9 * (1 + std::abs(ip)));
        }
    }
}

TEST(Hodge, InvolutionSign)
{
    std::mt19937_64 rng(9);
    for (int n : {4, 6, 7}) {
        const auto m = make_metric<double>(oracle::random_spd(rng, n));
        for (int k = 0; k <= n; ++k) {
            const auto a = oracle::random_form(rng, n, k);
            const double sign = (k * (n - k)) % 2 ? -1.0 : 1.0;
            EXPECT_LT(diff(hodge(m, hodge(m, a)), sign * a), 1e-9) << n << " " << k;
        }
    }
}

TEST(Hodge, EuclideanExact)
{
    const auto m = euclidean_metric<R>(7);
    EXPECT_EQ(hodge(m, KForm<R>::monomial(7, {1, 2, 7})), KForm<R>::monomial(7, {3, 4, 5, 6}));
    EXPECT_EQ(hodge(m, KForm<R>::monomial(7, {1, 3, 5})), KForm<R>::monomial(7, {2, 4, 6, 7}, R(-1)));
    EXPECT_EQ(hodge(m, KForm<R>::constant(7, R(2))), KForm<R>::monomial(7, basis::full(7), R(2)));
}

TEST(Metric, RejectsIndefiniteAndIrrationalVolume)
{
    Mat<R> g = Mat<R>::Identity(3, 3);
    g(2, 2) = -1;
    EXPECT_THROW(make_metric<R>(g), Error);
    g(2, 2) = 2;
    EXPECT_THROW(make_metric<R>(g), Error);
    g(2, 2) = 4;
    EXPECT_EQ(make_metric<R>(g).vol, R(2));
}
