#include "g2lab/liealg.hpp"
#include "g2lab/linalg.hpp"

#include <bit>

namespace g2lab {

template <Scalar S>
LieAlgebra<S>::LieAlgebra(std::vector<KForm<S>> structure_equations, std::string name,
                          Params params)
    : m_n(static_cast<int>(structure_equations.size()))
    , m_d(std::move(structure_equations))
    , m_name(std::move(name))
    , m_params(std::move(params))
{
    if (m_n < 1 || m_n > kMaxDim) {
        fail(ErrorKind::InvalidAlgebra, "Lie algebra dimension must be in [1, 8]");
    }
    for (const auto& de : m_d) {
        if (de.dim() != m_n || de.degree() != 2) {
            fail(ErrorKind::InvalidAlgebra, "structure equations must be 2-forms on R^n");
        }
    }
    m_dk.resize(static_cast<size_t>(m_n + 1));
    for (int k = 0; k <= m_n; ++k) {
        const auto& src = basis::monomials(m_n, k);
        const auto rows = static_cast<Eigen::Index>(basis::binomial(m_n, k + 1));
        Mat<S> dk = Mat<S>::Zero(rows, static_cast<Eigen::Index>(src.size()));
        if (k < m_n) {
            for (size_t c = 0; c < src.size(); ++c) {
                // d(e^{i_1} ^ ... ^ e^{i_k}) = sum_p (-1)^p de^{i_p} ^ e^{rest}
                // (de^{i_p} is even, so it moves to the front for free)
                const Mask m = src[c];
                KForm<S> acc(m_n, k + 1);
                int p = 0;
                for (unsigned mm = m; mm != 0; mm &= mm - 1, ++p) {
                    const int i = std::countr_zero(mm);
                    const Mask rest = static_cast<Mask>(m & ~(1u << i));
                    const KForm<S> term =
                        wedge(m_d[static_cast<size_t>(i)], KForm<S>::monomial(m_n, rest));
                    if (p % 2) acc -= term;
                    else acc += term;
                }
                dk.col(static_cast<Eigen::Index>(c)) = acc.coeffs();
            }
        }
        m_dk[static_cast<size_t>(k)] = std::move(dk);
    }
}

template <Scalar S>
LieAlgebra<S> LieAlgebra<S>::abelian(int n)
{
    return LieAlgebra(std::vector<KForm<S>>(static_cast<size_t>(n), KForm<S>(n, 2)),
                      "abelian" + std::to_string(n));
}

template <Scalar S>
S LieAlgebra<S>::structure_constant(int i, int j, int k) const
{
    if (i == j) return S(0);
    const S sign = i < j ? S(1) : S(-1);
    const Mask m = static_cast<Mask>((1u << i) | (1u << j));
    return -sign * m_d[static_cast<size_t>(k)].coeff(m);
}

template <Scalar S>
Vec<S> LieAlgebra<S>::bracket(const Vec<S>& x, const Vec<S>& y) const
{
    return ad(x) * y;
}

template <Scalar S>
Mat<S> LieAlgebra<S>::ad(int i) const
{
    Mat<S> out = Mat<S>::Zero(m_n, m_n);
    for (int j = 0; j < m_n; ++j)
        for (int k = 0; k < m_n; ++k) out(k, j) = structure_constant(i, j, k);
    return out;
}

template <Scalar S>
Mat<S> LieAlgebra<S>::ad(const Vec<S>& x) const
{
    Mat<S> out = Mat<S>::Zero(m_n, m_n);
    for (int i = 0; i < m_n; ++i) {
        if (x(i) != S(0)) out += x(i) * ad(i);
    }
    return out;
}

template <Scalar S>
template <Scalar T>
LieAlgebra<T> LieAlgebra<S>::cast() const
{
    std::vector<KForm<T>> d;
    for (const auto& de : m_d) d.push_back(de.template cast<T>());
    return LieAlgebra<T>(std::move(d), m_name, m_params);
}

template <Scalar S>
KForm<S> ce_differential(const LieAlgebra<S>& l, const KForm<S>& g)
{
    require(g.dim() == l.dim(), "ce_differential: form lives on a different space");
    if (g.degree() == l.dim()) return KForm<S>(l.dim(), l.dim());
    return KForm<S>(l.dim(), g.degree() + 1, l.differential_matrix(g.degree()) * g.coeffs());
}

template <Scalar S>
S jacobi_residual(const LieAlgebra<S>& l)
{
    S worst(0);
    if (l.dim() < 3) return worst;
    for (const auto& de : l.structure_equations()) {
        const S r = ce_differential(l, de).max_abs();
        if (r > worst) worst = r;
    }
    return worst;
}

template <Scalar S>
int betti(const LieAlgebra<S>& l, int k)
{
    require(k >= 0 && k <= l.dim(), "betti: degree out of range");
    const auto dim_k = basis::binomial(l.dim(), k);
    const auto rank_out = k < l.dim() ? linalg::rank(l.differential_matrix(k)) : 0;
    const auto rank_in = k > 0 ? linalg::rank(l.differential_matrix(k - 1)) : 0;
    return static_cast<int>(dim_k - rank_out - rank_in);
}

template <Scalar S>
std::vector<int> betti_numbers(const LieAlgebra<S>& l)
{
    std::vector<Eigen::Index> ranks;
    for (int k = 0; k < l.dim(); ++k) ranks.push_back(linalg::rank(l.differential_matrix(k)));
    std::vector<int> out;
    for (int k = 0; k <= l.dim(); ++k) {
        const auto out_rank = k < l.dim() ? ranks[static_cast<size_t>(k)] : 0;
        const auto in_rank = k > 0 ? ranks[static_cast<size_t>(k - 1)] : 0;
        out.push_back(static_cast<int>(basis::binomial(l.dim(), k) - out_rank - in_rank));
    }
    return out;
}

template <Scalar S>
bool is_unimodular(const LieAlgebra<S>& l)
{
    for (int i = 0; i < l.dim(); ++i) {
        const S tr = l.ad(i).trace();
        if (!ScalarTraits<S>::is_zero(tr)) return false;
    }
    return true;
}

template <Scalar S>
Mat<S> killing_form(const LieAlgebra<S>& l)
{
    const int n = l.dim();
    std::vector<Mat<S>> ads;
    for (int i = 0; i < n; ++i) ads.push_back(l.ad(i));
    Mat<S> k(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            k(i, j) = (ads[static_cast<size_t>(i)] * ads[static_cast<size_t>(j)]).trace();
            k(j, i) = k(i, j);
        }
    return k;
}

template <Scalar S>
Mat<S> bracket_span(const LieAlgebra<S>& l, const Mat<S>& a, const Mat<S>& b)
{
    Mat<S> all(l.dim(), a.cols() * b.cols());
    Eigen::Index c = 0;
    for (Eigen::Index i = 0; i < a.cols(); ++i)
        for (Eigen::Index j = 0; j < b.cols(); ++j)
            all.col(c++) = l.bracket(Vec<S>(a.col(i)), Vec<S>(b.col(j)));
    return linalg::column_basis(all);
}

std::string to_string(LeviType t)
{
    switch (t) {
    case LeviType::None: return "none";
    case LeviType::SL2R: return "sl(2,R)";
    case LeviType::SU2: return "su(2)";
    case LeviType::Other: return "other";
    }
    return "other";
}

namespace {

/// Extends the independent columns of `sub` to a basis of R^n by appending
/// standard vectors; returns the appended columns.
template <Scalar S>
Mat<S> complement_basis(const Mat<S>& sub, int n)
{
    Mat<S> current = sub;
    std::vector<int> picked;
    for (int i = 0; i < n && current.cols() < n; ++i) {
        Mat<S> trial(n, current.cols() + 1);
        trial << current, Mat<S>::Identity(n, n).col(i);
        if (linalg::rank(trial) > current.cols()) {
            current = trial;
            picked.push_back(i);
        }
    }
    Mat<S> out(n, static_cast<Eigen::Index>(picked.size()));
    for (size_t c = 0; c < picked.size(); ++c)
        out.col(static_cast<Eigen::Index>(c)) = Mat<S>::Identity(n, n).col(picked[c]);
    return out;
}

template <Scalar S>
std::vector<int> derived_series_of(const LieAlgebra<S>& l, Mat<S> current)
{
    std::vector<int> dims{static_cast<int>(current.cols())};
    while (current.cols() > 0) {
        Mat<S> next = bracket_span(l, current, current);
        if (next.cols() == current.cols()) break;
        dims.push_back(static_cast<int>(next.cols()));
        current = std::move(next);
    }
    return dims;
}

} // namespace

template <Scalar S>
StructureFlags structure_flags(const LieAlgebra<S>& l)
{
    const int n = l.dim();
    const Mat<S> id = Mat<S>::Identity(n, n);
    StructureFlags f;

    f.derived_series = derived_series_of(l, id);
    f.solvable = f.derived_series.back() == 0;

    Mat<S> lower = id;
    f.lower_central_series.push_back(n);
    while (lower.cols() > 0) {
        Mat<S> next = bracket_span(l, id, lower);
        if (next.cols() == lower.cols()) break;
        f.lower_central_series.push_back(static_cast<int>(next.cols()));
        lower = std::move(next);
    }
    f.nilpotent = f.lower_central_series.back() == 0;
    f.nilpotency_step = f.nilpotent ? static_cast<int>(f.lower_central_series.size()) - 1 : 0;

    // radical = Killing-orthogonal complement of [g, g]
    const Mat<S> derived = bracket_span(l, id, id);
    const Mat<S> kill = killing_form(l);
    const Mat<S> radical = derived.cols() == 0 ? id : linalg::nullspace<S>(derived.transpose() * kill);
    f.radical_dim = static_cast<int>(radical.cols());
    f.semisimple_dim = n - f.radical_dim;
    f.radical_derived_series = derived_series_of(l, radical);
    f.radical_abelian = f.radical_derived_series.size() == 1 || f.radical_derived_series[1] == 0;

    if (f.semisimple_dim == 0) {
        f.levi = LeviType::None;
    } else if (f.semisimple_dim != 3) {
        f.levi = LeviType::Other;
    } else {
        // structure constants of g / rad in the complement basis, then its Killing form
        const Mat<S> comp = complement_basis(radical, n);
        Mat<S> full(n, n);
        full << radical, comp;
        Mat<S> aug(n, 2 * n);
        aug << full, id;
        const Mat<S> full_inv = linalg::rref(aug).reduced.rightCols(n);
        const int q = f.semisimple_dim;
        std::vector<Mat<S>> ads(static_cast<size_t>(q), Mat<S>::Zero(q, q));
        for (int a = 0; a < q; ++a)
            for (int b = 0; b < q; ++b) {
                const Vec<S> br = l.bracket(Vec<S>(comp.col(a)), Vec<S>(comp.col(b)));
                const Vec<S> coords = full_inv * br;
                ads[static_cast<size_t>(a)].col(b) = coords.tail(q);
            }
        Mat<S> kq(q, q);
        for (int a = 0; a < q; ++a)
            for (int b = 0; b < q; ++b)
                kq(a, b) = (ads[static_cast<size_t>(a)] * ads[static_cast<size_t>(b)]).trace();
        const auto in = linalg::inertia(kq);
        if (in.zero != 0) f.levi = LeviType::Other;
        else if (in.negative == 3) f.levi = LeviType::SU2;
        else if (in.positive == 2 && in.negative == 1) f.levi = LeviType::SL2R;
        else f.levi = LeviType::Other;
    }
    return f;
}

template <Scalar S>
DerivationSpace<S> derivation_space(const LieAlgebra<S>& l)
{
    const int n = l.dim();
    const auto var = [n](int row, int col) { return row * n + col; };
    Mat<S> sys = Mat<S>::Zero(n * basis::binomial(n, 2), n * n);
    Eigen::Index r = 0;
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b)
            for (int m = 0; m < n; ++m, ++r) {
                // (D[e_a, e_b])^m - ([D e_a, e_b])^m - ([e_a, D e_b])^m = 0
                for (int k = 0; k < n; ++k) {
                    sys(r, var(m, k)) += l.structure_constant(a, b, k);
                    sys(r, var(k, a)) -= l.structure_constant(k, b, m);
                    sys(r, var(k, b)) -= l.structure_constant(a, k, m);
                }
            }
    const Mat<S> ker = linalg::nullspace(sys);
    DerivationSpace<S> out;
    for (Eigen::Index c = 0; c < ker.cols(); ++c) {
        Mat<S> d(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) d(i, j) = ker(var(i, j), c);
        out.basis.push_back(std::move(d));
    }
    return out;
}

template <Scalar S>
bool is_derivation(const LieAlgebra<S>& l, const Mat<S>& d)
{
    const int n = l.dim();
    if (d.rows() != n || d.cols() != n) return false;
    const Mat<S> id = Mat<S>::Identity(n, n);
    S worst(0);
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b) {
            const Vec<S> ea = id.col(a), eb = id.col(b);
            const Vec<S> lhs = d * l.bracket(ea, eb);
            const Vec<S> rhs = l.bracket(Vec<S>(d * ea), eb) + l.bracket(ea, Vec<S>(d * eb));
            const S r = linalg::max_abs(Vec<S>(lhs - rhs));
            if (r > worst) worst = r;
        }
    if constexpr (ScalarTraits<S>::exact) {
        return worst == 0;
    } else {
        return worst <= ScalarTraits<double>::eps * std::max(1.0, linalg::max_abs(d));
    }
}

template <Scalar S>
LieAlgebra<S> rank_one_extension(const LieAlgebra<S>& l, const Mat<S>& d, std::string name)
{
    const int n = l.dim();
    if (n + 1 > kMaxDim) fail(ErrorKind::InvalidAlgebra, "extension would exceed dimension 8");
    if (!is_derivation(l, d)) {
        fail(ErrorKind::InvalidAlgebra, "rank-one extension requires a derivation");
    }
    const KForm<S> eta = KForm<S>::monomial(n + 1, static_cast<Mask>(1u << n));
    std::vector<KForm<S>> eqs;
    for (int i = 0; i < n; ++i) {
        const KForm<S> ei = KForm<S>::monomial(n, static_cast<Mask>(1u << i));
        eqs.push_back(lift(l.structure_equations()[static_cast<size_t>(i)], n + 1) +
                      wedge(lift(endo_action(d, ei), n + 1), eta));
    }
    eqs.emplace_back(n + 1, 2);
    if (name.empty()) name = l.name() + "_ext";
    LieAlgebra<S> out(std::move(eqs), std::move(name), l.params());
    const S res = jacobi_residual(out);
    if (!ScalarTraits<S>::is_zero(res, std::max(1.0, to_double(linalg::max_abs(d))))) {
        fail(ErrorKind::Numerical, "rank-one extension violates Jacobi");
    }
    return out;
}

#define G2LAB_INSTANTIATE(S)                                                                  \
    template class LieAlgebra<S>;                                                            \
    template KForm<S> ce_differential<S>(const LieAlgebra<S>&, const KForm<S>&);             \
    template S jacobi_residual<S>(const LieAlgebra<S>&);                                     \
    template int betti<S>(const LieAlgebra<S>&, int);                                        \
    template std::vector<int> betti_numbers<S>(const LieAlgebra<S>&);                        \
    template bool is_unimodular<S>(const LieAlgebra<S>&);                                    \
    template Mat<S> killing_form<S>(const LieAlgebra<S>&);                                   \
    template Mat<S> bracket_span<S>(const LieAlgebra<S>&, const Mat<S>&, const Mat<S>&);     \
    template StructureFlags structure_flags<S>(const LieAlgebra<S>&);                        \
    template DerivationSpace<S> derivation_space<S>(const LieAlgebra<S>&);                   \
    template bool is_derivation<S>(const LieAlgebra<S>&, const Mat<S>&);                     \
    template LieAlgebra<S> rank_one_extension<S>(const LieAlgebra<S>&, const Mat<S>&,        \
                                                 std::string);

G2LAB_INSTANTIATE(double)
G2LAB_INSTANTIATE(Rational)

#undef G2LAB_INSTANTIATE

template LieAlgebra<double> LieAlgebra<Rational>::cast<double>() const;
template LieAlgebra<double> LieAlgebra<double>::cast<double>() const;
template LieAlgebra<Rational> LieAlgebra<Rational>::cast<Rational>() const;

} // namespace g2lab
