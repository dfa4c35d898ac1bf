#include "g2lab/su3.hpp"
#include "g2lab/linalg.hpp"

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
Mat<S> two_form_matrix(const KForm<S>& w)
{
    const int n = w.dim();
    Mat<S> m = Mat<S>::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const S v = w.coeff(static_cast<Mask>((1u << i) | (1u << j)));
            m(i, j) = v;
            m(j, i) = -v;
        }
    return m;
}

template <Scalar S>
Mat<S> hitchin_k(const KForm<S>& psi)
{
    const Mask top = basis::full(6);
    Mat<S> k(6, 6);
    for (int i = 0; i < 6; ++i) {
        const KForm<S> beta = wedge(interior(i, psi), psi);
        for (int j = 0; j < 6; ++j) {
            const S c = beta.coeff(static_cast<Mask>(top & ~(1u << j)));
            k(j, i) = (j % 2) ? S(-c) : c;
        }
    }
    return k;
}

template <Scalar S>
S proportionality(const KForm<S>& a, const KForm<S>& b)
{
    const S bb = b.coeffs().squaredNorm();
    return bb == S(0) ? S(0) : S(a.coeffs().dot(b.coeffs()) / bb);
}

} // namespace

template <Scalar S>
KForm<S> standard_omega()
{
    return KForm<S>::monomial(6, {1, 2}) + KForm<S>::monomial(6, {3, 4}) +
           KForm<S>::monomial(6, {5, 6});
}

template <Scalar S>
KForm<S> standard_psi()
{
    return KForm<S>::monomial(6, {1, 3, 5}) - KForm<S>::monomial(6, {1, 4, 6}) -
           KForm<S>::monomial(6, {2, 3, 6}) - KForm<S>::monomial(6, {2, 4, 5});
}

template <Scalar S>
S hitchin_lambda(const KForm<S>& psi)
{
    require(psi.dim() == 6 && psi.degree() == 3, "expected a 3-form on R^6");
    const Mat<S> k = hitchin_k(psi);
    return (k * k).trace() / S(6);
}

template <Scalar S>
SU3Structure<S> reconstruct_su3(const LieAlgebra<S>& l, const KForm<S>& omega, const KForm<S>& psi)
{
    if (l.dim() != 6) fail(ErrorKind::Usage, "SU(3)-structures live on 6-dimensional algebras");
    if (omega.dim() != 6 || omega.degree() != 2 || psi.dim() != 6 || psi.degree() != 3)
        fail(ErrorKind::Usage, "expected a 2-form and a 3-form on R^6");

    const KForm<S> omega3 = wedge(omega, omega, omega);
    if (omega3.is_zero()) fail(ErrorKind::InvalidStructure, "omega degenerate");

    const Mat<S> k = hitchin_k(psi);
    const S lambda = (k * k).trace() / S(6);
    if (!(lambda < 0)) fail(ErrorKind::InvalidStructure, "psi not stable");
    const auto scale = ScalarTraits<S>::root(S(-lambda), 2);
    if (!scale) fail(ErrorKind::Numerical, "sqrt(-lambda) is irrational; use the float backend");
    Mat<S> j = k / *scale;

    const double tol = 1e-10;
    if (!negligible(S(linalg::max_abs(Mat<S>(j * j + Mat<S>::Identity(6, 6)))), 1.0, tol))
        fail(ErrorKind::InvalidStructure, "psi not stable");
    if (!negligible(wedge(omega, psi).max_abs(), to_double(psi.max_abs()), tol))
        fail(ErrorKind::InvalidStructure, "incompatible pair");

    const Mat<S> om = two_form_matrix(omega);
    Mat<S> g = om * j;
    if (!linalg::is_positive_definite(g)) {
        j = -j;
        g = -g;
        if (!linalg::is_positive_definite(g)) fail(ErrorKind::InvalidStructure, "metric not positive");
    }

    SU3Structure<S> s;
    s.algebra = l;
    s.omega = omega;
    s.psi = psi;
    s.J = j;
    s.psi_hat = endo_action(j, psi) / S(-3);

    // omega must be J-invariant and the pair normalised: 3 psi ^ psi_hat = 2 omega^3
    if (!negligible((pullback(j, omega) - omega).max_abs(), to_double(omega.max_abs()), tol))
        fail(ErrorKind::InvalidStructure, "incompatible pair");
    const KForm<S> norm = S(3) * wedge(psi, s.psi_hat) - S(2) * omega3;
    if (!negligible(norm.max_abs(), to_double(omega3.max_abs()), tol))
        fail(ErrorKind::InvalidStructure, "incompatible pair (normalisation 3 psi^psi_hat = 2 omega^3 fails)");

    s.metric = make_metric<S>(Mat<S>((g + g.transpose()) / S(2)));
    return s;
}

std::string to_string(SU3TorsionKind k)
{
    switch (k) {
    case SU3TorsionKind::SymplecticHalfFlat: return "symplectic-half-flat";
    case SU3TorsionKind::Coupled: return "coupled";
    case SU3TorsionKind::Generic: return "generic";
    }
    return "generic";
}

template <Scalar S>
SU3TorsionClass<S> su3_torsion_class(const SU3Structure<S>& s)
{
    const LieAlgebra<S>& l = s.algebra;
    const KForm<S> domega = ce_differential(l, s.omega);
    const KForm<S> dpsi = ce_differential(l, s.psi);
    const double scale = to_double(s.psi.max_abs());
    SU3TorsionClass<S> out;
    if (negligible(domega.max_abs(), scale, 1e-10)) {
        out.kind = negligible(dpsi.max_abs(), scale, 1e-10) ? SU3TorsionKind::SymplecticHalfFlat
                                                           : SU3TorsionKind::Generic;
        return out;
    }
    const S c = proportionality(domega, s.psi);
    const S res = (domega - c * s.psi).max_abs();
    out.residual = to_double(res);
    if (negligible(res, scale, 1e-10) && !negligible(c, 1.0, 1e-10)) {
        out.kind = SU3TorsionKind::Coupled;
        out.c = c;
    }
    return out;
}

template <Scalar S>
Mat<S> primitive_11_basis(const SU3Structure<S>& s)
{
    const auto& monos = basis::monomials(6, 2);
    Mat<S> sys = Mat<S>::Zero(16, 15);
    for (size_t c = 0; c < monos.size(); ++c) {
        const KForm<S> e = KForm<S>::monomial(6, monos[c]);
        const auto col = static_cast<Eigen::Index>(c);
        sys.col(col).head(15) = (pullback(s.J, e) - e).coeffs();
        sys(15, col) = wedge(e, s.omega, s.omega).coeffs()(0);
    }
    Mat<S> b = linalg::nullspace(sys);
    if (b.cols() != 8) fail(ErrorKind::Numerical, "primitive (1,1) space is not 8-dimensional");
    return b;
}

template <Scalar S>
CoupledData<S> w2_of(const SU3Structure<S>& s, const S& c)
{
    const Mat<S> basis11 = primitive_11_basis(s);
    const Mat<S> a = wedge_matrix(s.omega, 2) * basis11;
    const KForm<S> rhs =
        ce_differential(s.algebra, s.psi_hat) + S(2) * c / S(3) * wedge(s.omega, s.omega);
    const auto ls = linalg::least_squares<S>(a, rhs.coeffs());
    if (ls.rank != 8) fail(ErrorKind::Numerical, "w2 system is rank deficient");
    const double scale = to_double(rhs.max_abs());
    if (!negligible(ls.residual_sq, scale * scale, 1e-18))
        fail(ErrorKind::Numerical, "inconsistent: d psi_hat + (2c/3) omega^2 is not w2 ^ omega");
    CoupledData<S> out{c, KForm<S>(6, 2, basis11 * ls.x), ls.residual()};
    return out;
}

template <Scalar S>
Dw2Check<S> check_dw2_prop_psi(const SU3Structure<S>& s, const KForm<S>& w2)
{
    Dw2Check<S> out;
    const KForm<S> dw2 = ce_differential(s.algebra, w2);
    out.mu = proportionality(dw2, s.psi);
    const S res = (dw2 - out.mu * s.psi).max_abs();
    out.residual = to_double(res);
    out.w2_norm_sq = norm_sq(s.metric, w2);
    out.proportional = negligible(res, to_double(dw2.max_abs()), 1e-10);
    if (!out.proportional) out.mu = S(0);
    out.mu_matches = out.proportional &&
                     negligible(S(out.mu - out.w2_norm_sq / S(4)), to_double(out.w2_norm_sq), 1e-8);
    return out;
}

template <Scalar S>
bool AffineDerivations<S>::contains(const Mat<S>& d) const
{
    if (!feasible || d.rows() != particular.rows() || d.cols() != particular.cols()) return false;
    const Eigen::Index n = particular.size();
    const Mat<S> diff = d - particular;
    const Vec<S> v = Eigen::Map<const Vec<S>>(diff.data(), n);
    if (directions.empty()) return negligible(linalg::max_abs(v), 1.0, 1e-10);
    Mat<S> span(n, static_cast<Eigen::Index>(directions.size()));
    for (size_t i = 0; i < directions.size(); ++i)
        span.col(static_cast<Eigen::Index>(i)) = Eigen::Map<const Vec<S>>(directions[i].data(), n);
    return linalg::in_span(span, v);
}

template <Scalar S>
AffineDerivations<S> find_compatible_derivations(const SU3Structure<S>& s, const S& c)
{
    const auto der = derivation_space(s.algebra);
    AffineDerivations<S> out;
    const int n = s.algebra.dim();
    out.particular = Mat<S>::Zero(n, n);
    const KForm<S> target = -c * s.psi;
    if (der.dim() == 0) {
        out.feasible = target.is_zero();
        return out;
    }
    Mat<S> m(20, der.dim());
    for (int i = 0; i < der.dim(); ++i)
        m.col(i) = endo_action(der.basis[static_cast<size_t>(i)], s.psi).coeffs();
    const auto ls = linalg::least_squares<S>(m, target.coeffs());
    const double scale = to_double(target.max_abs());
    if (!negligible(ls.residual_sq, scale * scale, 1e-18)) return out;
    out.feasible = true;
    for (int i = 0; i < der.dim(); ++i) out.particular += ls.x(i) * der.basis[static_cast<size_t>(i)];
    const Mat<S> kernel = linalg::nullspace(m);
    for (Eigen::Index k = 0; k < kernel.cols(); ++k) {
        Mat<S> dir = Mat<S>::Zero(n, n);
        for (int i = 0; i < der.dim(); ++i) dir += kernel(i, k) * der.basis[static_cast<size_t>(i)];
        out.directions.push_back(std::move(dir));
    }
    return out;
}

template <Scalar S>
ExtensionResult<S> g2_from_extension(const SU3Structure<S>& s, const Mat<S>& d)
{
    if (!is_derivation(s.algebra, d)) fail(ErrorKind::InvalidAlgebra, "D is not a derivation");
    ExtensionResult<S> out;
    out.algebra = rank_one_extension(s.algebra, d);
    const KForm<S> eta = KForm<S>::monomial(7, {7});
    out.phi = wedge(lift(s.omega, 7), eta) + lift(s.psi, 7);

    const KForm<S> domega = ce_differential(s.algebra, s.omega);
    const KForm<S> dpsi = ce_differential(s.algebra, s.psi);
    const double scale = std::max(to_double(s.psi.max_abs()), to_double(s.omega.max_abs()));
    out.conditions_hold = negligible((domega + endo_action(d, s.psi)).max_abs(), scale, 1e-10) &&
                          negligible(dpsi.max_abs(), scale, 1e-10);
    out.direct_closed = negligible(ce_differential(out.algebra, out.phi).max_abs(), scale, 1e-10);
    if (out.conditions_hold != out.direct_closed)
        fail(ErrorKind::Numerical, "closedness conditions disagree with the direct computation");
    out.closed = out.direct_closed;
    return out;
}

#define G2LAB_INSTANTIATE(S)                                                                  \
    template KForm<S> standard_omega<S>();                                                    \
    template KForm<S> standard_psi<S>();                                                      \
    template S hitchin_lambda<S>(const KForm<S>&);                                            \
    template SU3Structure<S> reconstruct_su3<S>(const LieAlgebra<S>&, const KForm<S>&,        \
                                                const KForm<S>&);                             \
    template SU3TorsionClass<S> su3_torsion_class<S>(const SU3Structure<S>&);                 \
    template Mat<S> primitive_11_basis<S>(const SU3Structure<S>&);                            \
    template CoupledData<S> w2_of<S>(const SU3Structure<S>&, const S&);                       \
    template Dw2Check<S> check_dw2_prop_psi<S>(const SU3Structure<S>&, const KForm<S>&);      \
    template struct AffineDerivations<S>;                                                     \
    template AffineDerivations<S> find_compatible_derivations<S>(const SU3Structure<S>&,      \
                                                                 const S&);                   \
    template ExtensionResult<S> g2_from_extension<S>(const SU3Structure<S>&, const Mat<S>&);

G2LAB_INSTANTIATE(double)
G2LAB_INSTANTIATE(Rational)

#undef G2LAB_INSTANTIATE

} // namespace g2lab
