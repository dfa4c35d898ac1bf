#pragma once

#include "g2lab/error.hpp"
#include "g2lab/scalar.hpp"

#include <cstdint>
#include <initializer_list>
#include <string>
#include <vector>

namespace g2lab {

inline constexpr int kMaxDim = 8;

/// Bit i set <=> covector e^{i+1} appears in the monomial.
using Mask = std::uint16_t;

/// Lexicographic tables for the monomial basis e^{i_1...i_k}, i_1 < ... < i_k,
/// of the k-th exterior power of (R^n)*.
namespace basis {

int binomial(int n, int k);
const std::vector<Mask>& monomials(int n, int k);
/// Position of a monomial inside monomials(n, popcount(m)).
int position(int n, Mask m);
int degree(Mask m);
/// 1-based labels, e.g. {1, 2, 7} for e^{127}.
Mask from_labels(std::initializer_list<int> labels);
Mask from_labels(const std::vector<int>& labels);
std::vector<int> labels(Mask m);
/// Sign s with e^a ^ e^b = s e^{a|b}; zero when the monomials overlap.
int wedge_sign(Mask a, Mask b);
/// Sign s with e^m ^ e^{complement} = s e^{1...n}.
int complement_sign(int n, Mask m);
inline Mask full(int n) { return static_cast<Mask>((1u << n) - 1u); }

} // namespace basis

/// Degree-k alternating form on R^n, stored as coefficients over the
/// lexicographic monomial basis.
template <Scalar S>
class KForm
{
public:
    using scalar_type = S;

    KForm() = default;
    KForm(int n, int k);
    KForm(int n, int k, Vec<S> coeffs);

    /// c * e^{labels}, e.g. monomial<double>(7, {1, 2, 7}).
    static KForm monomial(int n, std::initializer_list<int> labels, const S& c = S(1));
    static KForm monomial(int n, Mask m, const S& c = S(1));
    static KForm constant(int n, const S& c) { return monomial(n, Mask{0}, c); }

    int dim() const { return m_n; }
    int degree() const { return m_k; }
    Eigen::Index size() const { return m_coeffs.size(); }

    const Vec<S>& coeffs() const { return m_coeffs; }
    Vec<S>& coeffs() { return m_coeffs; }

    S coeff(Mask m) const;
    S coeff(std::initializer_list<int> labels) const { return coeff(basis::from_labels(labels)); }
    void set(Mask m, const S& c);

    bool is_zero() const;
    S max_abs() const;

    KForm& operator+=(const KForm& o);
    KForm& operator-=(const KForm& o);
    KForm& operator*=(const S& c);
    KForm operator-() const;

    friend KForm operator+(KForm a, const KForm& b) { return a += b; }
    friend KForm operator-(KForm a, const KForm& b) { return a -= b; }
    friend KForm operator*(KForm a, const S& c) { return a *= c; }
    friend KForm operator*(const S& c, KForm a) { return a *= c; }
    friend KForm operator/(KForm a, const S& c) { return a *= S(1) / c; }
    friend bool operator==(const KForm& a, const KForm& b)
    {
        return a.m_n == b.m_n && a.m_k == b.m_k && a.m_coeffs == b.m_coeffs;
    }

    template <Scalar T>
    KForm<T> cast() const;

    /// Human-readable, e.g. "-e^{12} + 3 e^{34}".
    std::string str() const;

    /// Visits (mask, coefficient) for every nonzero coefficient.
    template <typename Fn>
    void for_each_term(Fn&& fn) const
    {
        const auto& monos = basis::monomials(m_n, m_k);
        for (Eigen::Index i = 0; i < m_coeffs.size(); ++i) {
            if (m_coeffs(i) != S(0)) fn(monos[static_cast<size_t>(i)], m_coeffs(i));
        }
    }

private:
    int m_n = 0;
    int m_k = 0;
    Vec<S> m_coeffs = Vec<S>::Zero(1);
};

template <Scalar S>
KForm<S> wedge(const KForm<S>& a, const KForm<S>& b);

template <Scalar S, typename... Rest>
KForm<S> wedge(const KForm<S>& a, const KForm<S>& b, const Rest&... rest)
{
    return wedge(wedge(a, b), rest...);
}

/// Contraction with the vector x (components in the dual basis e_1..e_n).
template <Scalar S>
KForm<S> interior(const Vec<S>& x, const KForm<S>& a);

/// Contraction with the basis vector e_{i+1} (0-based i).
template <Scalar S>
KForm<S> interior(int i, const KForm<S>& a);

/// Derivation action (A^* g)(X_1..X_k) = sum_j g(X_1, .., A X_j, .., X_k).
/// Column j of A holds the image A(e_j).
template <Scalar S>
KForm<S> endo_action(const Mat<S>& a, const KForm<S>& g);

/// Pullback (A^# g)(X_1..X_k) = g(A X_1, .., A X_k).
template <Scalar S>
KForm<S> pullback(const Mat<S>& a, const KForm<S>& g);

/// Embeds a form on R^n into R^m (m >= n), keeping the same labels.
template <Scalar S>
KForm<S> lift(const KForm<S>& a, int m);

/// Restricts a form on R^n to the span of e_1..e_m (drops any term with a label > m).
template <Scalar S>
KForm<S> restrict_to(const KForm<S>& a, int m);

/// k-th compound matrix: entry (I, J) = det(a[I, J]) over lexicographic k-subsets.
template <Scalar S>
Mat<S> compound(const Mat<S>& a, int k);

/// Matrix of b -> a ^ b on degree-k forms.
template <Scalar S>
Mat<S> wedge_matrix(const KForm<S>& a, int k);

/// Matrix of g -> A^* g on degree-k forms.
template <Scalar S>
Mat<S> endo_action_matrix(const Mat<S>& a, int k);

/// Inner-product data on R^n: metric on vectors, its inverse (metric on
/// covectors), and the volume coefficient sqrt(det g) in the orientation e^{1..n}.
template <Scalar S>
struct MetricData
{
    Mat<S> g;
    Mat<S> g_inv;
    S vol;

    int dim() const { return static_cast<int>(g.rows()); }
    KForm<S> volume_form() const { return KForm<S>::monomial(dim(), basis::full(dim()), vol); }
};

/// Validates positive-definiteness and computes the inverse. The volume
/// coefficient is sqrt(det g); the rational backend requires it to be exact.
template <Scalar S>
MetricData<S> make_metric(const Mat<S>& g);

/// As above with a caller-supplied volume coefficient (must satisfy vol^2 = det g).
template <Scalar S>
MetricData<S> make_metric(const Mat<S>& g, const S& vol);

template <Scalar S>
MetricData<S> euclidean_metric(int n)
{
    return make_metric<S>(Mat<S>::Identity(n, n), S(1));
}

/// Gram matrix of the induced inner product on degree-k forms.
template <Scalar S>
Mat<S> gram_matrix(const MetricData<S>& m, int k);

template <Scalar S>
S inner(const MetricData<S>& m, const KForm<S>& a, const KForm<S>& b);

template <Scalar S>
S norm_sq(const MetricData<S>& m, const KForm<S>& a)
{
    return inner(m, a, a);
}

/// Matrix of the Hodge star from degree k to degree n-k.
template <Scalar S>
Mat<S> hodge_matrix(const MetricData<S>& m, int k);

/// Hodge star defined by a ^ *b = <a, b> vol.
template <Scalar S>
KForm<S> hodge(const MetricData<S>& m, const KForm<S>& g);

} // namespace g2lab
