#pragma once

#include "g2lab/g2.hpp"
#include "g2lab/liealg.hpp"

#include <optional>
#include <vector>

namespace g2lab {

/// e^{12} + e^{34} + e^{56}
template <Scalar S>
KForm<S> standard_omega();

/// e^{135} - e^{146} - e^{236} - e^{245}
template <Scalar S>
KForm<S> standard_psi();

template <Scalar S>
struct SU3Structure
{
    LieAlgebra<S> algebra;
    KForm<S> omega;
    KForm<S> psi;
    KForm<S> psi_hat;
    Mat<S> J;            ///< column j = J(e_j)
    MetricData<S> metric;
};

/// Recovers J, psi_hat and g from (omega, psi). J comes from the Hitchin
/// endomorphism K(X) defined by i_{K X} vol0 = i_X psi ^ psi, normalised by
/// sqrt(-tr(K^2)/6) and signed so that g = omega(., J .) is positive.
template <Scalar S>
SU3Structure<S> reconstruct_su3(const LieAlgebra<S>& l, const KForm<S>& omega, const KForm<S>& psi);

/// Hitchin's quartic invariant tr(K^2)/6; negative on stable forms of the relevant type.
template <Scalar S>
S hitchin_lambda(const KForm<S>& psi);

enum class SU3TorsionKind { SymplecticHalfFlat, Coupled, Generic };

std::string to_string(SU3TorsionKind k);

template <Scalar S>
struct SU3TorsionClass
{
    SU3TorsionKind kind = SU3TorsionKind::Generic;
    S c = S(0);
    double residual = 0.0;   ///< max |d omega - c psi|
};

template <Scalar S>
SU3TorsionClass<S> su3_torsion_class(const SU3Structure<S>& s);

/// Column basis (as 2-form coefficients) of the primitive (1,1) forms.
template <Scalar S>
Mat<S> primitive_11_basis(const SU3Structure<S>& s);

template <Scalar S>
struct CoupledData
{
    S c;
    KForm<S> w2;
    double residual = 0.0;
};

/// Solves d psi_hat = -(2c/3) omega^2 + w2 ^ omega for primitive (1,1) w2.
template <Scalar S>
CoupledData<S> w2_of(const SU3Structure<S>& s, const S& c);

template <Scalar S>
struct Dw2Check
{
    bool proportional = false;
    S mu = S(0);              ///< d w2 = mu psi when proportional
    S w2_norm_sq = S(0);
    bool mu_matches = false;  ///< mu = |w2|^2 / 4
    double residual = 0.0;
};

template <Scalar S>
Dw2Check<S> check_dw2_prop_psi(const SU3Structure<S>& s, const KForm<S>& w2);

/// Derivations D with D^* psi = -c psi, as particular + span(directions).
template <Scalar S>
struct AffineDerivations
{
    bool feasible = false;
    Mat<S> particular;
    std::vector<Mat<S>> directions;
    int dim() const { return feasible ? static_cast<int>(directions.size()) : -1; }
    bool contains(const Mat<S>& d) const;
};

template <Scalar S>
AffineDerivations<S> find_compatible_derivations(const SU3Structure<S>& s, const S& c);

template <Scalar S>
struct ExtensionResult
{
    LieAlgebra<S> algebra;
    KForm<S> phi;                     ///< omega ^ eta + psi
    bool closed = false;
    bool conditions_hold = false;     ///< d omega = -D^* psi and d psi = 0
    bool direct_closed = false;       ///< d phi = 0 on the extension
};

/// Throws Numerical if the three closedness tests disagree.
template <Scalar S>
ExtensionResult<S> g2_from_extension(const SU3Structure<S>& s, const Mat<S>& d);

} // namespace g2lab
