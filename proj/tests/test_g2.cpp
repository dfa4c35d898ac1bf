#include "g2lab/catalog.hpp"
#include "g2lab/g2.hpp"
#include "g2lab/io.hpp"
#include "g2lab/linalg.hpp"
#include "oracle.hpp"

#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

using namespace g2lab;
using R = Rational;

namespace {

/// Q1 diag(s) Q2 with singular values in [1/2, 2] and positive determinant.
Mat<double> random_orientation_preserving(std::mt19937_64& rng)
{
    const Eigen::HouseholderQR<Mat<double>> q1(oracle::random_matrix(rng, 7));
    const Eigen::HouseholderQR<Mat<double>> q2(oracle::random_matrix(rng, 7));
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Vec<double> s(7);
    for (int i = 0; i < 7; ++i) s(i) = std::exp2(u(rng));
    Mat<double> a = Mat<double>(q1.householderQ()) * s.asDiagonal() * Mat<double>(q2.householderQ());
    if (a.determinant() < 0) a.col(0) *= -1.0;
    return a;
}

KForm<double> random_positive(std::mt19937_64& rng)
{
    return pullback(random_orientation_preserving(rng), standard_phi<double>());
}

G2Structure<R> entry_structure(const std::string& id, const Params& p)
{
    const auto e = catalog::get(id, p);
    return G2Structure<R>(e.algebra, *e.phi);
}

/// Ricci from the left-invariant curvature formula, as a bilinear form.
Mat<double> oracle_ricci(const LieAlgebra<double>& l, const Mat<double>& g)
{
    return oracle::ricci(oracle::Bracket(l), g);
}

} // namespace

TEST(StandardPhi, InducesTheEuclideanMetric)
{
    const auto phi = standard_phi<R>();
    const auto m = metric_from_phi(phi);
    EXPECT_EQ(m.g, (Mat<R>::Identity(7, 7)));
    EXPECT_EQ(m.vol, R(1));
    const G2Structure<R> g(LieAlgebra<R>::abelian(7), phi);
    EXPECT_EQ(g.norm_sq(phi), R(7));
    EXPECT_EQ(wedge(phi, g.psi()), KForm<R>::monomial(7, basis::full(7), R(7)));
    EXPECT_EQ(g.psi(), io::parse_kform<R>("e1234 + e1256 + e1367 + e1457 + e2357 - e2467 + e3456", 7, 4));
}

TEST(StandardPhi, NegativeAndDegenerateFormsAreRejected)
{
    EXPECT_FALSE(is_positive(KForm<R>(-standard_phi<R>())));
    EXPECT_FALSE(is_positive(KForm<R>::monomial(7, {1, 2, 3})));
    EXPECT_THROW(metric_from_phi(KForm<R>(-standard_phi<R>())), Error);
    try {
        metric_from_phi(KForm<R>::monomial(7, {1, 2, 3}));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::InvalidStructure);
    }
}

TEST(StandardPhi, ExactMetricNeedsARationalNinthRoot)
{
    // b is cubic in phi, so det b scales by c^21
    EXPECT_TRUE(has_exact_metric(standard_phi<R>()));
    EXPECT_FALSE(has_exact_metric(KForm<R>(standard_phi<R>() * R(2))));
    EXPECT_TRUE(has_exact_metric(KForm<R>(standard_phi<R>() * R(8))));
    const auto m = metric_from_phi(KForm<R>(standard_phi<R>() * R(8)));
    EXPECT_EQ(m.g, (Mat<R>::Identity(7, 7) * R(4)));
    EXPECT_EQ(m.vol, R(128));
    try {
        metric_from_phi(KForm<R>(standard_phi<R>() * R(2)));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Numerical);
    }
}

TEST(Bilinear, MatchesPermutationOracle)
{
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 3; ++trial) {
        const auto phi = trial == 0 ? standard_phi<double>() : random_positive(rng);
        const Mat<double> expect = oracle::phi_bilinear(phi);
        EXPECT_LT((phi_bilinear(phi) - expect).cwiseAbs().maxCoeff(), 1e-10);
    }
    // an arbitrary (non-positive) form too
    const auto f = oracle::random_form(rng, 7, 3);
    EXPECT_LT((phi_bilinear(f) - oracle::phi_bilinear(f)).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Bilinear, MetricIsEquivariant)
{
    std::mt19937_64 rng(22);
    for (int trial = 0; trial < 10; ++trial) {
        const Mat<double> a = random_orientation_preserving(rng);
        const auto m = metric_from_phi(pullback(a, standard_phi<double>()));
        EXPECT_LT((m.g - a.transpose() * a).cwiseAbs().maxCoeff(), 1e-10);
        EXPECT_NEAR(m.vol, a.determinant(), 1e-10);
    }
}

TEST(RandomPositiveForms, HodgeInvolutionAndProjectorIdempotence)
{
    std::mt19937_64 rng(100);
    const auto flat = LieAlgebra<double>::abelian(7);
    for (int trial = 0; trial < 100; ++trial) {
        const auto phi = random_positive(rng);
        ASSERT_TRUE(is_positive(phi));
        const G2Structure<double> g(flat, phi);
        for (int k : {2, 3}) {
            const auto a = oracle::random_form(rng, 7, k);
            EXPECT_LT((g.star(g.star(a)) - a).max_abs(), 1e-10 * (1 + a.max_abs()));
        }
        const auto a = oracle::random_form(rng, 7, 2);
        const auto p = project_14(g, a);
        EXPECT_LT((project_14(g, p) - p).max_abs(), 1e-10);
        // the 14-dimensional summand is the kernel of ^psi and the -1 eigenspace of *(. ^ phi)
        EXPECT_LT(wedge(p, g.psi()).max_abs(), 1e-10);
        EXPECT_LT((g.star(wedge(p, phi)) + p).max_abs(), 1e-10);
        // the 7-dimensional summand: i_X phi with eigenvalue 2
        const Vec<double> x = Vec<double>::Random(7);
        const auto ix = interior(x, phi);
        EXPECT_LT(project_14(g, ix).max_abs(), 1e-10);
        EXPECT_LT((g.star(wedge(ix, phi)) - 2.0 * ix).max_abs(), 1e-10);
    }
}

TEST(Lambda214, BasisHasDimensionFourteen)
{
    const G2Structure<R> g(LieAlgebra<R>::abelian(7), standard_phi<R>());
    const Mat<R> b = lambda2_14_basis(g);
    EXPECT_EQ(b.cols(), 14);
    EXPECT_EQ(linalg::rank(b), 14);
    for (Eigen::Index c = 0; c < b.cols(); ++c) {
        const KForm<R> a(7, 2, b.col(c));
        EXPECT_TRUE(wedge(a, g.psi()).is_zero());
        EXPECT_EQ(project_14(g, a), a);
    }
}

TEST(Torsion, NewExampleGoldenValues)
{
    const auto g = entry_structure("g_abk", {{"a", 1}, {"b", 1}, {"k", 0}});
    ASSERT_TRUE(g.is_closed());
    const auto t = torsion_form(g);
    EXPECT_EQ(t.tau, io::parse_kform<R>("-e12 + 3 e34 - 2 e56", 7));
    EXPECT_EQ(t.tau_norm_sq, R(14));
    EXPECT_EQ(t.residual, 0.0);
    const auto c = curvature(g, t);
    EXPECT_EQ(c.scal, R(-7));
    EXPECT_EQ(c.ric_trace, R(-7));
    EXPECT_EQ(c.ric_norm_sq, R(11));
    EXPECT_EQ(hodge_laplacian_closed(g),
              io::parse_kform<R>("-e127 + 3 e135 - 3 e146 - 3 e236 - 3 e245 + 3 e347", 7));
}

TEST(Torsion, SatisfiesDefiningEquations)
{
    for (const auto& [id, p] : std::vector<std::pair<std::string, Params>>{
             {"g_a", {{"a", R(1, 2)}}}, {"g_ab", {{"a", 1}, {"b", 2}}}, {"g_abk", {{"a", 2}, {"b", 1}, {"k", 3}}}}) {
        const auto g = entry_structure(id, p);
        const auto t = torsion_form(g);
        EXPECT_EQ(wedge(t.tau, g.phi()), g.d(g.psi())) << id;
        EXPECT_EQ(project_14(g, t.tau), t.tau) << id;
        // tau = -*d*phi on closed structures
        EXPECT_EQ(t.tau, -g.star(g.d(g.psi()))) << id;
        EXPECT_EQ(t.dtau, g.d(t.tau)) << id;
        EXPECT_EQ(curvature(g, t).scal, -t.tau_norm_sq / 2) << id;
    }
}

TEST(Torsion, RequiresClosedForm)
{
    const auto e = catalog::get("g_a", {{"a", 1}});
    Mat<R> shear = Mat<R>::Identity(7, 7);
    shear(6, 0) = 1;
    const auto phi = pullback(shear, standard_phi<R>());
    const G2Structure<R> g(e.algebra, phi);
    ASSERT_FALSE(g.is_closed());
    try {
        torsion_form(g);
        FAIL();
    } catch (const Error& err) {
        EXPECT_EQ(err.kind(), ErrorKind::InvalidStructure);
    }
}

TEST(Torsion, FlatAndFloatBackends)
{
    const G2Structure<R> flat(LieAlgebra<R>::abelian(7), standard_phi<R>());
    EXPECT_TRUE(torsion_form(flat).tau.is_zero());
    EXPECT_EQ(curvature(flat).scal, R(0));

    const auto e = catalog::get("g_abk", {{"a", 1}, {"b", 2}, {"k", 1}});
    const G2Structure<R> gr(e.algebra, *e.phi);
    const G2Structure<double> gd(e.algebra.cast<double>(), e.phi->cast<double>());
    const auto tr = torsion_form(gr);
    const auto td = torsion_form(gd);
    EXPECT_LT((td.tau - tr.tau.cast<double>()).max_abs(), 1e-10);
    EXPECT_NEAR(td.tau_norm_sq, to_double(tr.tau_norm_sq), 1e-10);
}

TEST(Curvature, AgreesWithLeftInvariantRicciFormula)
{
    std::vector<std::pair<std::string, Params>> cases = {
        {"g_abk", {{"a", 1}, {"b", 1}, {"k", 0}}}, {"g_abk", {{"a", 1}, {"b", 2}, {"k", 1}}},
        {"g_a", {{"a", R(1, 2)}}},                 {"g_a", {{"a", 1}}},
        {"g_ab", {{"a", 1}, {"b", 2}}},            {"nonsolv_levi", {}},
        {"nonsolv_2", {{"mu", R(1, 4)}}},          {"nonsolv_3", {{"mu", 1}}},
    };
    for (const auto& [id, p] : cases) {
        const auto e = catalog::get(id, p);
        const LieAlgebra<double> l = e.algebra.cast<double>();
        const G2Structure<double> g(l, e.phi->cast<double>());
        ASSERT_TRUE(g.is_closed()) << id;
        const auto c = curvature(g);
        const Mat<double> expect = oracle_ricci(l, g.metric().g);
        const double scale = 1 + expect.cwiseAbs().maxCoeff();
        EXPECT_LT((c.ric - expect).cwiseAbs().maxCoeff(), 1e-8 * scale) << id;
        EXPECT_NEAR(c.ric_trace, c.scal, 1e-8 * scale) << id;
    }
}

TEST(Curvature, PointwiseBoundEqualityAtTheErpPoint)
{
    const auto g = entry_structure("g_a", {{"a", 1}});
    const auto c = curvature(g);
    EXPECT_EQ(c.scal * c.scal, 3 * c.ric_norm_sq);
    EXPECT_EQ(c.scal, R(-9));
}

TEST(Curvature, PointwiseBoundHoldsOnUnimodularEntries)
{
    for (const auto& [id, p] : std::vector<std::pair<std::string, Params>>{
             {"nonsolv_levi", {}}, {"nonsolv_1", {}}, {"nonsolv_2", {{"mu", R(1, 4)}}}, {"nonsolv_3", {{"mu", 1}}}}) {
        const auto e = catalog::get(id, p);
        const G2Structure<double> g(e.algebra.cast<double>(), e.phi->cast<double>());
        const auto c = curvature(g);
        EXPECT_LT(c.scal * c.scal, 3 * c.ric_norm_sq) << id;
    }
}

TEST(Curvature, PointwiseBoundFailsOnTheNonUnimodularExample)
{
    // Frozen from the left-invariant Ricci formula: Scal^2 = 49 > 33 = 3|Ric|^2.
    const auto e = catalog::get("g_abk", {{"a", 1}, {"b", 1}, {"k", 0}});
    const Mat<double> ric = oracle_ricci(e.algebra.cast<double>(), Mat<double>::Identity(7, 7));
    EXPECT_NEAR(ric.trace(), -7.0, 1e-12);
    EXPECT_NEAR(ric.squaredNorm(), 11.0, 1e-12);
    const auto c = curvature(entry_structure("g_abk", {{"a", 1}, {"b", 1}, {"k", 0}}));
    EXPECT_EQ(c.scal * c.scal, R(49));
    EXPECT_EQ(3 * c.ric_norm_sq, R(33));
    EXPECT_EQ(c.ric_eigenvalues, (std::vector<double>{-2, -2, -1, -1, -1, 0, 0}));
}

TEST(Erp, LauretFamilyAtOne)
{
    const auto g = entry_structure("g_a", {{"a", 1}});
    EXPECT_EQ(erp_residual(g), 0.0);
    const ErpReport r = erp_diagnostics(g);
    EXPECT_TRUE(r.passed());
    EXPECT_EQ(r.tau_norm_sq, 18.0);
    EXPECT_EQ(r.tau_squared_annihilator_dim, 3);
    ASSERT_EQ(r.ric_eigenvalues.size(), 7u);
    for (int i = 0; i < 3; ++i) EXPECT_NEAR(r.ric_eigenvalues[i], -3.0, 1e-12);
    for (int i = 3; i < 7; ++i) EXPECT_NEAR(r.ric_eigenvalues[i], 0.0, 1e-12);
}

TEST(Erp, NonErpStructuresAreRejected)
{
    const auto g = entry_structure("g_abk", {{"a", 1}, {"b", 1}, {"k", 0}});
    EXPECT_NEAR(erp_residual(g), 4.0 / std::sqrt(3.0), 1e-12);
    EXPECT_THROW(erp_diagnostics(g), Error);
    EXPECT_THROW(erp_diagnostics(G2Structure<R>(LieAlgebra<R>::abelian(7), standard_phi<R>())), Error);
    const auto half = entry_structure("g_a", {{"a", R(1, 2)}});
    EXPECT_GT(erp_residual(half), kErpTolerance);
}

TEST(Search, FindsClosedPositiveFormsDeterministically)
{
    const auto l = catalog::get("ffkm_n").algebra;
    const auto a = search_closed_positive(l, catalog::kSearchAttempts, 7);
    const auto b = search_closed_positive(l, catalog::kSearchAttempts, 7);
    ASSERT_TRUE(a.phi);
    EXPECT_EQ(*a.phi, *b.phi);
    EXPECT_EQ(a.attempts_used, b.attempts_used);
    EXPECT_EQ(a.closed_dim, 23);
    EXPECT_TRUE(is_positive(*a.phi));
    EXPECT_TRUE(ce_differential(l, *a.phi).is_zero());

    const auto flat = search_closed_positive(LieAlgebra<R>::abelian(7), 10, 1, std::optional(standard_phi<R>()));
    EXPECT_EQ(*flat.phi, standard_phi<R>());
    EXPECT_EQ(flat.attempts_used, 0);
    EXPECT_EQ(flat.closed_dim, 35);
}

TEST(Search, FloatBackendAlsoFindsForms)
{
    const auto l = catalog::get("nonsolv_levi").algebra.cast<double>();
    const auto r = search_closed_positive(l, 2000, 11);
    ASSERT_TRUE(r.phi);
    EXPECT_LT(ce_differential(l, *r.phi).max_abs(), 1e-9);
    EXPECT_TRUE(is_positive(*r.phi));
}

TEST(JMap, SendsPhiToAMultipleOfTheMetric)
{
    const G2Structure<R> g(LieAlgebra<R>::abelian(7), standard_phi<R>());
    const Mat<R> j = j_map(g, standard_phi<R>());
    EXPECT_EQ(j, (Mat<R>::Identity(7, 7) * R(6)));
}
