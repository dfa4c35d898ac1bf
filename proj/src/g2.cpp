#include "g2lab/g2.hpp"
#include "g2lab/linalg.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <random>

namespace g2lab {

namespace {

template <Scalar S>
bool negligible(const S& x, double scale, double tol)
{
    if constexpr (ScalarTraits<S>::exact) {
        return x == 0;
    } else {
        return std::abs(x) <= tol * std::max(1.0, scale);
    }
}

template <Scalar S>
void require_g2_shape(const KForm<S>& phi)
{
    if (phi.dim() != 7 || phi.degree() != 3) fail(ErrorKind::Usage, "expected a 3-form on R^7");
}

template <Scalar S>
std::vector<KForm<S>> contractions(const KForm<S>& phi)
{
    std::vector<KForm<S>> out;
    out.reserve(7);
    for (int i = 0; i < 7; ++i) out.push_back(interior(i, phi));
    return out;
}

std::vector<double> generalized_eigenvalues(const Mat<double>& a, const Mat<double>& g)
{
    Eigen::GeneralizedSelfAdjointEigenSolver<Mat<double>> es(a, g, Eigen::EigenvaluesOnly);
    std::vector<double> ev(es.eigenvalues().data(),
                           es.eigenvalues().data() + es.eigenvalues().size());
    std::sort(ev.begin(), ev.end());
    return ev;
}

} // namespace

template <Scalar S>
KForm<S> standard_phi()
{
    KForm<S> phi(7, 3);
    phi.set(basis::from_labels({1, 2, 7}), S(1));
    phi.set(basis::from_labels({3, 4, 7}), S(1));
    phi.set(basis::from_labels({5, 6, 7}), S(1));
    phi.set(basis::from_labels({1, 3, 5}), S(1));
    phi.set(basis::from_labels({1, 4, 6}), S(-1));
    phi.set(basis::from_labels({2, 3, 6}), S(-1));
    phi.set(basis::from_labels({2, 4, 5}), S(-1));
    return phi;
}

template <Scalar S>
Mat<S> phi_bilinear(const KForm<S>& phi)
{
    require_g2_shape(phi);
    const auto ip = contractions(phi);
    const Mask top = basis::full(7);
    Mat<S> b(7, 7);
    for (int i = 0; i < 7; ++i) {
        const KForm<S> left = wedge(ip[static_cast<size_t>(i)], phi);
        for (int j = i; j < 7; ++j) {
            const S v = wedge(ip[static_cast<size_t>(j)], left).coeff(top) / S(6);
            b(i, j) = v;
            b(j, i) = v;
        }
    }
    return b;
}

template <Scalar S>
MetricData<S> metric_from_phi(const KForm<S>& phi)
{
    const Mat<S> b = phi_bilinear(phi);
    if (!linalg::is_positive_definite(b)) fail(ErrorKind::InvalidStructure, "not a positive 3-form");
    const S det = linalg::determinant(b);
    if (!(det > 0)) fail(ErrorKind::InvalidStructure, "not a positive 3-form");
    const auto vol = ScalarTraits<S>::root(det, 9);
    if (!vol) {
        fail(ErrorKind::Numerical,
             "det(b)^(1/9) is irrational for this form; use the float backend");
    }
    return make_metric<S>(b / *vol, *vol);
}

template <Scalar S>
bool is_positive(const KForm<S>& phi)
{
    if (phi.dim() != 7 || phi.degree() != 3) return false;
    const Mat<S> b = phi_bilinear(phi);
    return linalg::is_positive_definite(b) && linalg::determinant(b) > 0;
}

bool has_exact_metric(const KForm<Rational>& phi)
{
    if (!is_positive(phi)) return false;
    return ScalarTraits<Rational>::root(linalg::determinant(phi_bilinear(phi)), 9).has_value();
}

template <Scalar S>
G2Structure<S>::G2Structure(LieAlgebra<S> algebra, KForm<S> phi)
    : m_algebra(std::move(algebra))
    , m_phi(std::move(phi))
{
    if (m_algebra.dim() != 7) fail(ErrorKind::Usage, "G2-structures live on 7-dimensional algebras");
    require_g2_shape(m_phi);
    m_metric = metric_from_phi(m_phi);
    for (int k = 0; k <= 7; ++k) {
        m_star.push_back(g2lab::hodge_matrix(m_metric, k));
        m_gram.push_back(gram_matrix(m_metric, k));
    }
    m_psi = star(m_phi);
}

template <Scalar S>
KForm<S> G2Structure<S>::star(const KForm<S>& a) const
{
    require(a.dim() == 7, "form dimension mismatch");
    return KForm<S>(7, 7 - a.degree(), hodge_matrix(a.degree()) * a.coeffs());
}

template <Scalar S>
S G2Structure<S>::inner(const KForm<S>& a, const KForm<S>& b) const
{
    require(a.dim() == 7 && b.dim() == 7 && a.degree() == b.degree(), "form shape mismatch");
    return a.coeffs().dot(m_gram.at(static_cast<size_t>(a.degree())) * b.coeffs());
}

template <Scalar S>
bool G2Structure<S>::is_closed() const
{
    return negligible(closed_residual(), to_double(m_phi.max_abs()), 1e-10);
}

template <Scalar S>
KForm<S> project_14(const G2Structure<S>& g, const KForm<S>& a)
{
    require(a.dim() == 7 && a.degree() == 2, "project_14 expects a 2-form on R^7");
    return (S(2) * a - g.star(wedge(a, g.phi()))) / S(3);
}

template <Scalar S>
Mat<S> lambda2_14_basis(const G2Structure<S>& g)
{
    const Mat<S> p =
        (S(2) * Mat<S>::Identity(21, 21) - g.hodge_matrix(5) * wedge_matrix(g.phi(), 2)) / S(3);
    Mat<S> b = linalg::column_basis(p);
    if (b.cols() != 14) fail(ErrorKind::Numerical, "projector onto the 14-dimensional summand has wrong rank");
    return b;
}

template <Scalar S>
TorsionData<S> torsion_form(const G2Structure<S>& g)
{
    if (!g.is_closed()) fail(ErrorKind::InvalidStructure, "not closed");
    const Mat<S> basis14 = lambda2_14_basis(g);
    const Mat<S> a = wedge_matrix(g.phi(), 2) * basis14;
    const KForm<S> rhs = g.d(g.psi());
    const auto ls = linalg::least_squares<S>(a, rhs.coeffs());
    const double scale = to_double(rhs.max_abs());
    if (!negligible(ls.residual_sq, scale * scale, 1e-18) || ls.rank != 14)
        fail(ErrorKind::Numerical, "inconsistent torsion system");

    TorsionData<S> t;
    t.tau = KForm<S>(7, 2, basis14 * ls.x);
    t.tau_norm_sq = g.norm_sq(t.tau);
    t.dtau = g.d(t.tau);
    t.residual = ls.residual();
    return t;
}

template <Scalar S>
Mat<S> j_map(const G2Structure<S>& g, const KForm<S>& gamma)
{
    require(gamma.dim() == 7 && gamma.degree() == 3, "j_map expects a 3-form on R^7");
    const auto ip = contractions(g.phi());
    const Mask top = basis::full(7);
    Mat<S> j(7, 7);
    for (int a = 0; a < 7; ++a) {
        const KForm<S> left = wedge(ip[static_cast<size_t>(a)], gamma);
        for (int b = a; b < 7; ++b) {
            const S v = wedge(ip[static_cast<size_t>(b)], left).coeff(top) / g.metric().vol;
            j(a, b) = v;
            j(b, a) = v;
        }
    }
    return j;
}

template <Scalar S>
CurvatureData<S> curvature(const G2Structure<S>& g, const TorsionData<S>& t)
{
    const KForm<S> gamma = t.dtau - g.star(wedge(t.tau, t.tau)) / S(2);
    CurvatureData<S> c;
    c.ric = t.tau_norm_sq / S(4) * g.metric().g - j_map(g, gamma) / S(4);
    c.scal = -t.tau_norm_sq / S(2);
    const Mat<S> raised = g.metric().g_inv * c.ric;
    c.ric_trace = raised.trace();
    c.ric_norm_sq = (raised * raised).trace();
    if (!negligible(S(c.ric_trace - c.scal), std::abs(to_double(c.scal)), 1e-8))
        fail(ErrorKind::Numerical, "Ricci trace disagrees with the scalar curvature");
    c.ric_eigenvalues = generalized_eigenvalues(linalg::cast<double>(c.ric),
                                                linalg::cast<double>(g.metric().g));
    return c;
}

template <Scalar S>
CurvatureData<S> curvature(const G2Structure<S>& g)
{
    return curvature(g, torsion_form(g));
}

namespace {

template <Scalar S>
KForm<S> erp_defect(const G2Structure<S>& g, const TorsionData<S>& t)
{
    return t.dtau - t.tau_norm_sq / S(6) * g.phi() - g.star(wedge(t.tau, t.tau)) / S(6);
}

} // namespace

template <Scalar S>
double erp_residual(const G2Structure<S>& g)
{
    const auto t = torsion_form(g);
    return std::sqrt(std::max(0.0, to_double(g.norm_sq(erp_defect(g, t)))));
}

template <Scalar S>
ErpReport erp_diagnostics(const G2Structure<S>& g)
{
    const auto t = torsion_form(g);
    ErpReport r;
    r.tau_norm_sq = to_double(t.tau_norm_sq);
    if (negligible(t.tau_norm_sq, 1.0, 1e-12)) fail(ErrorKind::InvalidStructure, "not ERP (torsion vanishes)");
    r.residual = std::sqrt(std::max(0.0, to_double(g.norm_sq(erp_defect(g, t)))));
    if (r.residual >= kErpTolerance * std::max(1.0, r.tau_norm_sq))
        fail(ErrorKind::InvalidStructure, "not ERP (residual " + to_string(r.residual) + ")");

    const double scale = r.tau_norm_sq;
    const KForm<S> tt = wedge(t.tau, t.tau);
    r.tau_cubed_zero = negligible(wedge(tt, t.tau).max_abs(), scale * std::sqrt(scale), 1e-9);
    r.tau_squared_closed = negligible(g.d(tt).max_abs(), scale, 1e-9);
    r.star_tau_squared_closed = negligible(g.d(g.star(tt)).max_abs(), scale, 1e-9);

    Mat<S> contr(35, 7);
    for (int i = 0; i < 7; ++i) contr.col(i) = interior(i, tt).coeffs();
    r.tau_squared_annihilator_dim = static_cast<int>(linalg::nullspace(contr).cols());
    r.tau_squared_simple = r.tau_squared_annihilator_dim == 3;

    const auto c = curvature(g, t);
    const Mat<S> alt = j_map(g, g.star(tt)) / S(12);
    r.ricci_formula_deviation = to_double(linalg::max_abs(Mat<S>(c.ric - alt)));
    r.ric_eigenvalues = c.ric_eigenvalues;
    std::vector<double> expected = {-scale / 6, -scale / 6, -scale / 6, 0, 0, 0, 0};
    r.eigenvalues_match = true;
    for (size_t i = 0; i < 7; ++i)
        if (std::abs(expected[i] - r.ric_eigenvalues[i]) >= 1e-7 * std::max(1.0, scale))
            r.eigenvalues_match = false;
    return r;
}

template <Scalar S>
KForm<S> hodge_laplacian_closed(const G2Structure<S>& g)
{
    const auto t = torsion_form(g);
    const KForm<S> alt = -g.d(g.star(g.d(g.psi())));
    const double scale = to_double(t.dtau.max_abs());
    if (!negligible((alt - t.dtau).max_abs(), scale, 1e-9))
        fail(ErrorKind::Numerical, "d tau disagrees with -d*d*phi");
    return t.dtau;
}

namespace {

/// Signed definiteness of B(phi): positive iff B or -B is positive definite.
double definiteness(const Mat<double>& kernel, const Vec<double>& x)
{
    const KForm<double> probe(7, 3, kernel * x);
    const Eigen::SelfAdjointEigenSolver<Mat<double>> es(phi_bilinear(probe), Eigen::EigenvaluesOnly);
    const Vec<double>& ev = es.eigenvalues();
    const double scale = std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1)));
    if (scale == 0) return -1.0;
    return std::max(ev(0), -ev(ev.size() - 1)) / scale;
}

template <Scalar S>
std::optional<KForm<S>> realise(const Mat<S>& kernel, const Mat<double>& kernel_f, const Vec<double>& x)
{
    auto signed_form = [&](const Vec<S>& c) -> std::optional<KForm<S>> {
        const Mat<double> b = phi_bilinear(KForm<double>(7, 3, kernel_f * linalg::cast<double>(c)));
        int sign = 0;
        if (linalg::is_positive_definite(b)) sign = 1;
        else if (linalg::is_positive_definite(Mat<double>(-b))) sign = -1;
        if (sign == 0) return std::nullopt;
        KForm<S> phi(7, 3, kernel * c);
        if (sign < 0) phi = -phi;
        if (!is_positive(phi)) return std::nullopt;
        return phi;
    };
    if constexpr (!ScalarTraits<S>::exact) {
        return signed_form(x);
    } else {
        // smallest integer multiple grid that keeps the form positive
        const double top = x.cwiseAbs().maxCoeff();
        for (int q = 1; q <= 4096; q *= 2) {
            Vec<S> c(x.size());
            for (Eigen::Index i = 0; i < x.size(); ++i) c(i) = S(static_cast<long>(std::lround(x(i) / top * q)));
            if (auto phi = signed_form(c)) return phi;
        }
        return std::nullopt;
    }
}

} // namespace

template <Scalar S>
SearchResult<S> search_closed_positive(const LieAlgebra<S>& l, int attempts, std::uint64_t seed,
                                       const std::optional<KForm<S>>& initial)
{
    SearchResult<S> out;
    if (l.dim() != 7) return out;
    const Mat<S>& d3 = l.differential_matrix(3);
    const Mat<S> kernel = linalg::nullspace(d3);
    out.closed_dim = static_cast<int>(kernel.cols());

    auto closed = [&](const KForm<S>& phi) {
        return negligible(S(linalg::max_abs(Vec<S>(d3 * phi.coeffs()))),
                          to_double(phi.max_abs()), 1e-10);
    };
    if (initial && initial->dim() == 7 && initial->degree() == 3 && closed(*initial) &&
        is_positive(*initial)) {
        out.phi = *initial;
        return out;
    }
    if (kernel.cols() == 0) return out;

    // (1+1) evolution strategy on the definiteness score, restarted from a
    // fresh small-integer point whenever it stalls
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> small(-3, 3);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const Mat<double> kernel_f = linalg::cast<double>(kernel);
    const Eigen::Index m = kernel.cols();

    Vec<double> x(m);
    double score = 0, sigma = 0;
    int stall = 0;
    bool fresh = true;
    for (int attempt = 0; attempt < attempts; ++attempt) {
        out.attempts_used = attempt + 1;
        Vec<double> y(m);
        if (fresh) {
            for (Eigen::Index i = 0; i < m; ++i) y(i) = small(rng);
        } else {
            for (Eigen::Index i = 0; i < m; ++i) y(i) = x(i) + sigma * gauss(rng);
        }
        const double s = definiteness(kernel_f, y);
        if (s > 0) {
            if (auto phi = realise(kernel, kernel_f, y)) {
                out.phi = std::move(phi);
                return out;
            }
        }
        if (fresh || s > score) {
            x = y;
            score = s;
            sigma = fresh ? 0.5 * x.norm() / std::sqrt(static_cast<double>(m)) : sigma * 1.5;
            stall = 0;
        } else {
            sigma *= 0.9;
            ++stall;
        }
        fresh = stall > 60 || sigma < 1e-9 * (x.norm() + 1);
    }
    return out;
}

#define G2LAB_INSTANTIATE(S)                                                                  \
    template KForm<S> standard_phi<S>();                                                      \
    template Mat<S> phi_bilinear<S>(const KForm<S>&);                                         \
    template MetricData<S> metric_from_phi<S>(const KForm<S>&);                               \
    template bool is_positive<S>(const KForm<S>&);                                            \
    template class G2Structure<S>;                                                            \
    template KForm<S> project_14<S>(const G2Structure<S>&, const KForm<S>&);                  \
    template Mat<S> lambda2_14_basis<S>(const G2Structure<S>&);                               \
    template TorsionData<S> torsion_form<S>(const G2Structure<S>&);                           \
    template Mat<S> j_map<S>(const G2Structure<S>&, const KForm<S>&);                         \
    template CurvatureData<S> curvature<S>(const G2Structure<S>&);                            \
    template CurvatureData<S> curvature<S>(const G2Structure<S>&, const TorsionData<S>&);     \
    template double erp_residual<S>(const G2Structure<S>&);                                   \
    template ErpReport erp_diagnostics<S>(const G2Structure<S>&);                             \
    template KForm<S> hodge_laplacian_closed<S>(const G2Structure<S>&);                       \
    template SearchResult<S> search_closed_positive<S>(const LieAlgebra<S>&, int, std::uint64_t, \
                                                       const std::optional<KForm<S>>&);

G2LAB_INSTANTIATE(double)
G2LAB_INSTANTIATE(Rational)

#undef G2LAB_INSTANTIATE

} // namespace g2lab
