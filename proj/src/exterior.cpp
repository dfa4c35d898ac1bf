#include "g2lab/exterior.hpp"
#include "g2lab/linalg.hpp"

#include <Eigen/LU>
#include <array>
#include <bit>
#include <sstream>

namespace g2lab {

namespace basis {

namespace {

struct Tables
{
    // monomials[n][k], position[n][mask]
    std::array<std::array<std::vector<Mask>, kMaxDim + 1>, kMaxDim + 1> monomials;
    std::array<std::vector<int>, kMaxDim + 1> position;

    Tables()
    {
        for (int n = 0; n <= kMaxDim; ++n) {
            position[static_cast<size_t>(n)].assign(1u << n, -1);
            for (int k = 0; k <= n; ++k) {
                auto& list = monomials[static_cast<size_t>(n)][static_cast<size_t>(k)];
                std::vector<int> idx(static_cast<size_t>(k));
                for (int i = 0; i < k; ++i) idx[static_cast<size_t>(i)] = i;
                while (true) {
                    Mask m = 0;
                    for (int i : idx) m = static_cast<Mask>(m | (1u << i));
                    position[static_cast<size_t>(n)][m] = static_cast<int>(list.size());
                    list.push_back(m);
                    int i = k - 1;
                    while (i >= 0 && idx[static_cast<size_t>(i)] == n - k + i) --i;
                    if (i < 0) break;
                    ++idx[static_cast<size_t>(i)];
                    for (int j = i + 1; j < k; ++j)
                        idx[static_cast<size_t>(j)] = idx[static_cast<size_t>(j - 1)] + 1;
                }
            }
        }
    }
};

const Tables& tables()
{
    static const Tables t;
    return t;
}

void check_dim(int n)
{
    if (n < 0 || n > kMaxDim) fail(ErrorKind::Usage, "ambient dimension must be in [0, 8]");
}

} // namespace

int binomial(int n, int k)
{
    if (k < 0 || k > n) return 0;
    int r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

const std::vector<Mask>& monomials(int n, int k)
{
    check_dim(n);
    require(k >= 0 && k <= n, "form degree out of range");
    return tables().monomials[static_cast<size_t>(n)][static_cast<size_t>(k)];
}

int position(int n, Mask m)
{
    check_dim(n);
    require(m < (1u << n), "monomial label exceeds ambient dimension");
    return tables().position[static_cast<size_t>(n)][m];
}

int degree(Mask m)
{
    return std::popcount(static_cast<unsigned>(m));
}

Mask from_labels(const std::vector<int>& labels)
{
    Mask m = 0;
    for (int l : labels) {
        require(l >= 1 && l <= kMaxDim, "basis label out of range");
        const Mask bit = static_cast<Mask>(1u << (l - 1));
        require((m & bit) == 0, "repeated basis label");
        m = static_cast<Mask>(m | bit);
    }
    return m;
}

Mask from_labels(std::initializer_list<int> labels)
{
    return from_labels(std::vector<int>(labels));
}

std::vector<int> labels(Mask m)
{
    std::vector<int> out;
    for (int i = 0; i < 16; ++i)
        if (m & (1u << i)) out.push_back(i + 1);
    return out;
}

int wedge_sign(Mask a, Mask b)
{
    if (a & b) return 0;
    // count pairs (i in a, j in b) with i > j
    int inversions = 0;
    for (unsigned bb = b; bb != 0; bb &= bb - 1) {
        const int j = std::countr_zero(bb);
        const unsigned above = ~((2u << j) - 1u);
        inversions += std::popcount(static_cast<unsigned>(a) & above);
    }
    return (inversions % 2) ? -1 : 1;
}

int complement_sign(int n, Mask m)
{
    return wedge_sign(m, static_cast<Mask>(full(n) & ~m));
}

} // namespace basis

namespace {

template <Scalar S>
using Small = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxDim, kMaxDim>;

template <Scalar S>
S small_det(Small<S> m)
{
    const Eigen::Index n = m.rows();
    S det(1);
    for (Eigen::Index c = 0; c < n; ++c) {
        Eigen::Index p = c;
        if constexpr (ScalarTraits<S>::exact) {
            while (p < n && m(p, c) == 0) ++p;
        } else {
            for (Eigen::Index i = c + 1; i < n; ++i)
                if (std::abs(m(i, c)) > std::abs(m(p, c))) p = i;
            if (m(p, c) == 0.0) p = n;
        }
        if (p == n) return S(0);
        if (p != c) {
            m.row(p).swap(m.row(c));
            det = -det;
        }
        det *= m(c, c);
        for (Eigen::Index i = c + 1; i < n; ++i) {
            if (m(i, c) == S(0)) continue;
            const S f = m(i, c) / m(c, c);
            for (Eigen::Index j = c + 1; j < n; ++j) m(i, j) -= f * m(c, j);
        }
    }
    return det;
}

template <Scalar S>
void require_same_space(const KForm<S>& a, const KForm<S>& b)
{
    require(a.dim() == b.dim() && a.degree() == b.degree(), "form dimension/degree mismatch");
}

} // namespace

template <Scalar S>
KForm<S>::KForm(int n, int k)
    : m_n(n)
    , m_k(k)
    , m_coeffs(Vec<S>::Zero(static_cast<Eigen::Index>(basis::monomials(n, k).size())))
{}

template <Scalar S>
KForm<S>::KForm(int n, int k, Vec<S> coeffs)
    : m_n(n)
    , m_k(k)
    , m_coeffs(std::move(coeffs))
{
    require(m_coeffs.size() == static_cast<Eigen::Index>(basis::monomials(n, k).size()),
            "coefficient count must be C(n, k)");
}

template <Scalar S>
KForm<S> KForm<S>::monomial(int n, Mask m, const S& c)
{
    KForm out(n, basis::degree(m));
    out.set(m, c);
    return out;
}

template <Scalar S>
KForm<S> KForm<S>::monomial(int n, std::initializer_list<int> labels, const S& c)
{
    return monomial(n, basis::from_labels(labels), c);
}

template <Scalar S>
S KForm<S>::coeff(Mask m) const
{
    require(basis::degree(m) == m_k, "monomial degree does not match form degree");
    return m_coeffs(basis::position(m_n, m));
}

template <Scalar S>
void KForm<S>::set(Mask m, const S& c)
{
    require(basis::degree(m) == m_k, "monomial degree does not match form degree");
    m_coeffs(basis::position(m_n, m)) = c;
}

template <Scalar S>
bool KForm<S>::is_zero() const
{
    return m_coeffs.isZero();
}

template <Scalar S>
S KForm<S>::max_abs() const
{
    return linalg::max_abs(m_coeffs);
}

template <Scalar S>
KForm<S>& KForm<S>::operator+=(const KForm& o)
{
    require_same_space(*this, o);
    m_coeffs += o.m_coeffs;
    return *this;
}

template <Scalar S>
KForm<S>& KForm<S>::operator-=(const KForm& o)
{
    require_same_space(*this, o);
    m_coeffs -= o.m_coeffs;
    return *this;
}

template <Scalar S>
KForm<S>& KForm<S>::operator*=(const S& c)
{
    m_coeffs *= c;
    return *this;
}

template <Scalar S>
KForm<S> KForm<S>::operator-() const
{
    KForm out = *this;
    out.m_coeffs = -out.m_coeffs;
    return out;
}

template <Scalar S>
template <Scalar T>
KForm<T> KForm<S>::cast() const
{
    return KForm<T>(m_n, m_k, linalg::cast<T>(m_coeffs));
}

template <Scalar S>
std::string KForm<S>::str() const
{
    std::ostringstream os;
    bool first = true;
    for_each_term([&](Mask m, const S& c) {
        const bool neg = c < S(0);
        const S mag = neg ? S(-c) : c;
        if (first) {
            if (neg) os << "-";
        } else {
            os << (neg ? " - " : " + ");
        }
        first = false;
        const bool unit = mag == S(1);
        if (!unit || m == 0) os << to_string(mag);
        if (m != 0) {
            if (!unit) os << " ";
            os << "e^{";
            for (int l : basis::labels(m)) os << l;
            os << "}";
        }
    });
    if (first) os << "0";
    return os.str();
}

template <Scalar S>
KForm<S> wedge(const KForm<S>& a, const KForm<S>& b)
{
    require(a.dim() == b.dim(), "wedge: ambient dimension mismatch");
    require(a.degree() + b.degree() <= a.dim(), "wedge: degree exceeds ambient dimension");
    KForm<S> out(a.dim(), a.degree() + b.degree());
    a.for_each_term([&](Mask ma, const S& ca) {
        b.for_each_term([&](Mask mb, const S& cb) {
            const int s = basis::wedge_sign(ma, mb);
            if (s == 0) return;
            const auto pos = basis::position(a.dim(), static_cast<Mask>(ma | mb));
            if (s > 0) out.coeffs()(pos) += ca * cb;
            else out.coeffs()(pos) -= ca * cb;
        });
    });
    return out;
}

template <Scalar S>
KForm<S> interior(int i, const KForm<S>& a)
{
    require(a.degree() >= 1, "interior product of a 0-form");
    require(i >= 0 && i < a.dim(), "interior: vector index out of range");
    KForm<S> out(a.dim(), a.degree() - 1);
    const Mask bit = static_cast<Mask>(1u << i);
    a.for_each_term([&](Mask m, const S& c) {
        if (!(m & bit)) return;
        const int before = std::popcount(static_cast<unsigned>(m) & (bit - 1u));
        const Mask rest = static_cast<Mask>(m & ~bit);
        if (before % 2) out.coeffs()(basis::position(a.dim(), rest)) -= c;
        else out.coeffs()(basis::position(a.dim(), rest)) += c;
    });
    return out;
}

template <Scalar S>
KForm<S> interior(const Vec<S>& x, const KForm<S>& a)
{
    require(x.size() == a.dim(), "interior: vector dimension mismatch");
    KForm<S> out(a.dim(), a.degree() - 1);
    require(a.degree() >= 1, "interior product of a 0-form");
    for (int i = 0; i < a.dim(); ++i) {
        if (x(i) == S(0)) continue;
        out += x(i) * interior(i, a);
    }
    return out;
}

template <Scalar S>
KForm<S> endo_action(const Mat<S>& a, const KForm<S>& g)
{
    const int n = g.dim();
    require(a.rows() == n && a.cols() == n, "endo_action: shape mismatch");
    KForm<S> out(n, g.degree());
    g.for_each_term([&](Mask m, const S& c) {
        int p = 0;
        for (unsigned mm = m; mm != 0; mm &= mm - 1, ++p) {
            const int i = std::countr_zero(mm);
            const Mask rest = static_cast<Mask>(m & ~(1u << i));
            // e^{..i..} = (-1)^p e^i ^ e^{rest}; A^* e^i = sum_j A(i, j) e^j
            for (int j = 0; j < n; ++j) {
                if (a(i, j) == S(0)) continue;
                const Mask bj = static_cast<Mask>(1u << j);
                const int s = basis::wedge_sign(bj, rest);
                if (s == 0) continue;
                const S term = c * a(i, j);
                const auto pos = basis::position(n, static_cast<Mask>(rest | bj));
                if ((s > 0) == (p % 2 == 0)) out.coeffs()(pos) += term;
                else out.coeffs()(pos) -= term;
            }
        }
    });
    return out;
}

template <Scalar S>
Mat<S> compound(const Mat<S>& a, int k)
{
    const int n = static_cast<int>(a.rows());
    require(a.cols() == n, "compound: square matrix expected");
    const auto& monos = basis::monomials(n, k);
    const auto sz = static_cast<Eigen::Index>(monos.size());
    Mat<S> out(sz, sz);
    std::vector<std::vector<int>> idx;
    idx.reserve(monos.size());
    for (Mask m : monos) {
        std::vector<int> v;
        for (int l : basis::labels(m)) v.push_back(l - 1);
        idx.push_back(std::move(v));
    }
    Small<S> sub(k, k);
    for (Eigen::Index r = 0; r < sz; ++r) {
        for (Eigen::Index c = 0; c < sz; ++c) {
            const auto& ri = idx[static_cast<size_t>(r)];
            const auto& ci = idx[static_cast<size_t>(c)];
            for (int x = 0; x < k; ++x)
                for (int y = 0; y < k; ++y)
                    sub(x, y) = a(ri[static_cast<size_t>(x)], ci[static_cast<size_t>(y)]);
            out(r, c) = k == 0 ? S(1) : small_det<S>(sub);
        }
    }
    return out;
}

template <Scalar S>
KForm<S> pullback(const Mat<S>& a, const KForm<S>& g)
{
    require(a.rows() == g.dim() && a.cols() == g.dim(), "pullback: shape mismatch");
    return KForm<S>(g.dim(), g.degree(), compound(a, g.degree()).transpose() * g.coeffs());
}

template <Scalar S>
KForm<S> lift(const KForm<S>& a, int m)
{
    require(m >= a.dim(), "lift: target dimension smaller than source");
    KForm<S> out(m, a.degree());
    a.for_each_term([&](Mask mask, const S& c) { out.set(mask, c); });
    return out;
}

template <Scalar S>
KForm<S> restrict_to(const KForm<S>& a, int m)
{
    require(m <= a.dim() && a.degree() <= m, "restrict_to: invalid target dimension");
    KForm<S> out(m, a.degree());
    const Mask keep = basis::full(m);
    a.for_each_term([&](Mask mask, const S& c) {
        if ((mask & ~keep) == 0) out.set(mask, c);
    });
    return out;
}

template <Scalar S>
Mat<S> wedge_matrix(const KForm<S>& a, int k)
{
    const int n = a.dim();
    const auto& src = basis::monomials(n, k);
    const auto rows = static_cast<Eigen::Index>(basis::binomial(n, k + a.degree()));
    Mat<S> out = Mat<S>::Zero(rows, static_cast<Eigen::Index>(src.size()));
    for (size_t j = 0; j < src.size(); ++j) {
        out.col(static_cast<Eigen::Index>(j)) =
            wedge(a, KForm<S>::monomial(n, src[j])).coeffs();
    }
    return out;
}

template <Scalar S>
Mat<S> endo_action_matrix(const Mat<S>& a, int k)
{
    const int n = static_cast<int>(a.rows());
    const auto& src = basis::monomials(n, k);
    Mat<S> out(static_cast<Eigen::Index>(src.size()), static_cast<Eigen::Index>(src.size()));
    for (size_t j = 0; j < src.size(); ++j) {
        out.col(static_cast<Eigen::Index>(j)) =
            endo_action(a, KForm<S>::monomial(n, src[j])).coeffs();
    }
    return out;
}

template <Scalar S>
MetricData<S> make_metric(const Mat<S>& g, const S& vol)
{
    if (!linalg::is_positive_definite(g)) {
        fail(ErrorKind::InvalidStructure, "metric is not positive-definite");
    }
    require(vol > S(0), "volume coefficient must be positive");
    require(g.rows() <= kMaxDim, "metric dimension exceeds 8");
    MetricData<S> m;
    m.g = g;
    if constexpr (ScalarTraits<S>::exact) {
        const auto n = g.rows();
        Mat<S> aug(n, 2 * n);
        aug << g, Mat<S>::Identity(n, n);
        m.g_inv = linalg::rref(aug).reduced.rightCols(n);
    } else {
        m.g_inv = g.inverse();
    }
    m.vol = vol;
    return m;
}

template <Scalar S>
MetricData<S> make_metric(const Mat<S>& g)
{
    const S det = linalg::determinant(g);
    const auto vol = ScalarTraits<S>::root(det, 2);
    if (!vol) {
        fail(ErrorKind::Numerical,
             "volume of this metric is irrational; use the float backend");
    }
    return make_metric(g, *vol);
}

template <Scalar S>
Mat<S> gram_matrix(const MetricData<S>& m, int k)
{
    return compound(m.g_inv, k);
}

template <Scalar S>
S inner(const MetricData<S>& m, const KForm<S>& a, const KForm<S>& b)
{
    require_same_space(a, b);
    require(a.dim() == m.dim(), "inner: metric dimension mismatch");
    return a.coeffs().dot(gram_matrix(m, a.degree()) * b.coeffs());
}

template <Scalar S>
Mat<S> hodge_matrix(const MetricData<S>& m, int k)
{
    const int n = m.dim();
    const auto& src = basis::monomials(n, k);
    const auto sz = static_cast<Eigen::Index>(src.size());
    // *b = sum_I sign(I) <e^I, b> vol e^{I^c}
    Mat<S> perm = Mat<S>::Zero(sz, sz);
    for (size_t i = 0; i < src.size(); ++i) {
        const Mask comp = static_cast<Mask>(basis::full(n) & ~src[i]);
        perm(basis::position(n, comp), static_cast<Eigen::Index>(i)) =
            S(basis::complement_sign(n, src[i]));
    }
    return (perm * gram_matrix(m, k)) * m.vol;
}

template <Scalar S>
KForm<S> hodge(const MetricData<S>& m, const KForm<S>& g)
{
    require(g.dim() == m.dim(), "hodge: metric dimension mismatch");
    return KForm<S>(g.dim(), g.dim() - g.degree(), hodge_matrix(m, g.degree()) * g.coeffs());
}

#define G2LAB_INSTANTIATE(S)                                                                  \
    template class KForm<S>;                                                                 \
    template KForm<S> wedge<S>(const KForm<S>&, const KForm<S>&);                            \
    template KForm<S> interior<S>(const Vec<S>&, const KForm<S>&);                           \
    template KForm<S> interior<S>(int, const KForm<S>&);                                     \
    template KForm<S> endo_action<S>(const Mat<S>&, const KForm<S>&);                        \
    template KForm<S> pullback<S>(const Mat<S>&, const KForm<S>&);                           \
    template KForm<S> lift<S>(const KForm<S>&, int);                                         \
    template KForm<S> restrict_to<S>(const KForm<S>&, int);                                  \
    template Mat<S> compound<S>(const Mat<S>&, int);                                         \
    template Mat<S> wedge_matrix<S>(const KForm<S>&, int);                                   \
    template Mat<S> endo_action_matrix<S>(const Mat<S>&, int);                               \
    template MetricData<S> make_metric<S>(const Mat<S>&);                                    \
    template MetricData<S> make_metric<S>(const Mat<S>&, const S&);                          \
    template Mat<S> gram_matrix<S>(const MetricData<S>&, int);                               \
    template S inner<S>(const MetricData<S>&, const KForm<S>&, const KForm<S>&);             \
    template Mat<S> hodge_matrix<S>(const MetricData<S>&, int);                              \
    template KForm<S> hodge<S>(const MetricData<S>&, const KForm<S>&);

G2LAB_INSTANTIATE(double)
G2LAB_INSTANTIATE(Rational)

#undef G2LAB_INSTANTIATE

template KForm<double> KForm<Rational>::cast<double>() const;
template KForm<double> KForm<double>::cast<double>() const;
template KForm<Rational> KForm<Rational>::cast<Rational>() const;

} // namespace g2lab
