#pragma once

#include "g2lab/exterior.hpp"
#include "g2lab/liealg.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace g2lab {

/// e^{127} + e^{347} + e^{567} + e^{135} - e^{146} - e^{236} - e^{245}
template <Scalar S>
KForm<S> standard_phi();

/// b_{ij} with (1/6) i_{e_i}phi ^ i_{e_j}phi ^ phi = b_{ij} e^{1..7}.
template <Scalar S>
Mat<S> phi_bilinear(const KForm<S>& phi);

/// g = det(b)^{-1/9} b with volume coefficient det(b)^{1/9}. Throws
/// InvalidStructure("not a positive 3-form") unless b is positive-definite.
template <Scalar S>
MetricData<S> metric_from_phi(const KForm<S>& phi);

template <Scalar S>
bool is_positive(const KForm<S>& phi);

/// True when det(b)^{1/9} is rational, i.e. the exact backend can carry the metric.
bool has_exact_metric(const KForm<Rational>& phi);

/// A 3-form on a 7-dimensional Lie algebra together with its induced metric,
/// volume and Hodge tables (all computed at construction).
template <Scalar S>
class G2Structure
{
public:
    G2Structure(LieAlgebra<S> algebra, KForm<S> phi);

    const LieAlgebra<S>& algebra() const { return m_algebra; }
    const KForm<S>& phi() const { return m_phi; }
    const MetricData<S>& metric() const { return m_metric; }
    /// *phi
    const KForm<S>& psi() const { return m_psi; }

    const Mat<S>& hodge_matrix(int k) const { return m_star.at(static_cast<size_t>(k)); }
    KForm<S> star(const KForm<S>& a) const;
    KForm<S> d(const KForm<S>& a) const { return ce_differential(m_algebra, a); }
    S inner(const KForm<S>& a, const KForm<S>& b) const;
    S norm_sq(const KForm<S>& a) const { return inner(a, a); }

    /// max |coeff(d phi)|
    S closed_residual() const { return d(m_phi).max_abs(); }
    bool is_closed() const;

private:
    LieAlgebra<S> m_algebra;
    KForm<S> m_phi;
    MetricData<S> m_metric;
    std::vector<Mat<S>> m_star;
    std::vector<Mat<S>> m_gram;
    KForm<S> m_psi;
};

/// (2 a - *(a ^ phi)) / 3: the component in the 14-dimensional summand.
template <Scalar S>
KForm<S> project_14(const G2Structure<S>& g, const KForm<S>& a);

/// Column basis of the 14-dimensional summand of 2-forms.
template <Scalar S>
Mat<S> lambda2_14_basis(const G2Structure<S>& g);

template <Scalar S>
struct TorsionData
{
    KForm<S> tau;
    S tau_norm_sq;
    KForm<S> dtau;
    double residual = 0.0;   ///< |tau ^ phi - d*phi| in coefficient space
};

/// Solves d*phi = tau ^ phi over the 14-dimensional summand. Requires d phi = 0.
template <Scalar S>
TorsionData<S> torsion_form(const G2Structure<S>& g);

/// j(gamma)(X, Y) = *(i_X phi ^ i_Y phi ^ gamma) on basis vectors.
template <Scalar S>
Mat<S> j_map(const G2Structure<S>& g, const KForm<S>& gamma);

template <Scalar S>
struct CurvatureData
{
    Mat<S> ric;
    S scal;                               ///< -|tau|^2 / 2
    S ric_trace;                          ///< g-trace of ric
    S ric_norm_sq;                        ///< |Ric|_g^2
    std::vector<double> ric_eigenvalues;  ///< eigenvalues of ric relative to g, ascending
};

/// Ricci tensor of a closed structure from its torsion form.
template <Scalar S>
CurvatureData<S> curvature(const G2Structure<S>& g);

template <Scalar S>
CurvatureData<S> curvature(const G2Structure<S>& g, const TorsionData<S>& t);

/// |d tau - |tau|^2/6 phi - 1/6 *(tau ^ tau)|_g
template <Scalar S>
double erp_residual(const G2Structure<S>& g);

inline constexpr double kErpTolerance = 1e-8;

struct ErpReport
{
    double residual = 0.0;
    double tau_norm_sq = 0.0;
    bool tau_cubed_zero = false;
    bool tau_squared_closed = false;
    bool star_tau_squared_closed = false;
    int tau_squared_annihilator_dim = 0;
    bool tau_squared_simple = false;
    double ricci_formula_deviation = 0.0;   ///< max |Ric - j(*(tau^tau))/12|
    std::vector<double> ric_eigenvalues;
    bool eigenvalues_match = false;         ///< {-|tau|^2/6 x3, 0 x4} within 1e-7
    bool passed() const
    {
        return tau_cubed_zero && tau_squared_closed && star_tau_squared_closed &&
               tau_squared_simple && ricci_formula_deviation < 1e-7 && eigenvalues_match;
    }
};

/// Structural checks that hold for extremally Ricci-pinched structures.
/// Throws InvalidStructure("not ERP") when tau = 0 or the ERP residual is too large.
template <Scalar S>
ErpReport erp_diagnostics(const G2Structure<S>& g);

/// Delta phi = d tau for closed phi, cross-checked against -d*d*phi.
template <Scalar S>
KForm<S> hodge_laplacian_closed(const G2Structure<S>& g);

template <Scalar S>
struct SearchResult
{
    std::optional<KForm<S>> phi;
    int attempts_used = 0;
    int closed_dim = 0;   ///< dim ker(d) on 3-forms
};

/// Stochastic search in the space of closed 3-forms: small-integer starts,
/// then a hill climb on how definite B(phi) is, restarted when it stalls.
/// Each candidate counts as one attempt. Exact results are rounded back to
/// integer combinations of a kernel basis and re-checked. Deterministic for
/// a fixed seed. When `initial` is closed and positive it is returned as is.
/// Algebras that are not 7-dimensional give no form.
template <Scalar S>
SearchResult<S> search_closed_positive(const LieAlgebra<S>& l, int attempts, std::uint64_t seed,
                                       const std::optional<KForm<S>>& initial = std::nullopt);

} // namespace g2lab
