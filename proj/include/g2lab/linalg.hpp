#pragma once

#include "g2lab/scalar.hpp"

#include <vector>

/// Dense kernels shared by both scalar backends. Rational overloads are exact
/// (fraction Gaussian elimination); float overloads defer to Eigen
/// decompositions with a relative threshold of ScalarTraits<double>::eps.
namespace g2lab::linalg {

template <Scalar S>
struct Echelon
{
    Mat<S> reduced;                     ///< reduced row echelon form
    std::vector<Eigen::Index> pivots;   ///< pivot column per nonzero row
};

template <Scalar S>
Echelon<S> rref(Mat<S> a);

template <Scalar S>
Eigen::Index rank(const Mat<S>& a);

/// Basis of ker(a), one vector per column.
template <Scalar S>
Mat<S> nullspace(const Mat<S>& a);

/// A maximal linearly independent subset of the columns of a, in order.
template <Scalar S>
Mat<S> column_basis(const Mat<S>& a);

template <Scalar S>
S determinant(const Mat<S>& a);

template <Scalar S>
struct LeastSquares
{
    Vec<S> x;
    S residual_sq;     ///< |a x - b|^2 in coefficient space
    Eigen::Index rank;
    double residual() const { return std::sqrt(to_double(residual_sq)); }
};

/// Minimises |a x - b|. The float path returns the minimum-norm solution;
/// the rational path solves the normal equations exactly, zeroing free
/// variables.
template <Scalar S>
LeastSquares<S> least_squares(const Mat<S>& a, const Vec<S>& b);

/// Symmetric positive-definiteness by LDL^T pivots (pivot floor 1e-12 relative
/// for floats, strict positivity for rationals).
template <Scalar S>
bool is_positive_definite(const Mat<S>& a);

struct Inertia
{
    int positive = 0;
    int negative = 0;
    int zero = 0;
};

/// Sylvester inertia of a symmetric matrix. The rational path reads it off
/// the characteristic polynomial via Descartes' rule (exact since all roots
/// are real).
template <Scalar S>
Inertia inertia(const Mat<S>& a);

/// Coefficients c_0..c_n of det(x I - a), lowest degree first.
template <Scalar S>
std::vector<S> characteristic_polynomial(const Mat<S>& a);

template <Scalar S>
bool in_span(const Mat<S>& basis, const Vec<S>& v);

template <typename Derived>
typename Derived::Scalar max_abs(const Eigen::MatrixBase<Derived>& a)
{
    using S = typename Derived::Scalar;
    S m(0);
    for (Eigen::Index j = 0; j < a.cols(); ++j)
        for (Eigen::Index i = 0; i < a.rows(); ++i) {
            const S v = ScalarTraits<S>::abs(a(i, j));
            if (v > m) m = v;
        }
    return m;
}

template <Scalar To, typename Derived>
Eigen::Matrix<To, Derived::RowsAtCompileTime, Derived::ColsAtCompileTime> cast(
    const Eigen::MatrixBase<Derived>& a)
{
    using From = typename Derived::Scalar;
    Eigen::Matrix<To, Derived::RowsAtCompileTime, Derived::ColsAtCompileTime> out(a.rows(),
                                                                                   a.cols());
    for (Eigen::Index j = 0; j < a.cols(); ++j)
        for (Eigen::Index i = 0; i < a.rows(); ++i) out(i, j) = scalar_cast<To, From>(a(i, j));
    return out;
}

} // namespace g2lab::linalg
