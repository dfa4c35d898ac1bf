#include "g2lab/linalg.hpp"
#include "g2lab/error.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/QR>
#include <Eigen/SVD>

#include <algorithm>

namespace g2lab::linalg {

namespace {

template <Scalar S>
bool negligible(const S& v, const S& threshold)
{
    if constexpr (ScalarTraits<S>::exact) {
        return v == 0;
    } else {
        return std::abs(v) <= threshold;
    }
}

template <Scalar S>
S pivot_threshold(const Mat<S>& a)
{
    if constexpr (ScalarTraits<S>::exact) {
        return S(0);
    } else {
        return ScalarTraits<double>::eps * std::max(max_abs(a), 1e-300);
    }
}

int sign_changes(const std::vector<Rational>& coeffs)
{
    int changes = 0;
    int last = 0;
    for (const auto& c : coeffs) {
        const int s = c > 0 ? 1 : (c < 0 ? -1 : 0);
        if (s == 0) continue;
        if (last != 0 && s != last) ++changes;
        last = s;
    }
    return changes;
}

Eigen::VectorXd singular_values(const Mat<double>& a)
{
    if (a.rows() == 0 || a.cols() == 0) return {};
    return Eigen::JacobiSVD<Mat<double>>(a).singularValues();
}

} // namespace

template <Scalar S>
Echelon<S> rref(Mat<S> a)
{
    const S tol = pivot_threshold(a);
    Echelon<S> out;
    Eigen::Index row = 0;
    for (Eigen::Index col = 0; col < a.cols() && row < a.rows(); ++col) {
        Eigen::Index best = -1;
        if constexpr (ScalarTraits<S>::exact) {
            for (Eigen::Index i = row; i < a.rows(); ++i) {
                if (a(i, col) != 0) {
                    best = i;
                    break;
                }
            }
        } else {
            double best_abs = tol;
            for (Eigen::Index i = row; i < a.rows(); ++i) {
                if (std::abs(a(i, col)) > best_abs) {
                    best_abs = std::abs(a(i, col));
                    best = i;
                }
            }
        }
        if (best < 0) continue;
        a.row(row).swap(a.row(best));
        const S inv = S(1) / a(row, col);
        for (Eigen::Index j = col; j < a.cols(); ++j) a(row, j) *= inv;
        for (Eigen::Index i = 0; i < a.rows(); ++i) {
            if (i == row) continue;
            const S f = a(i, col);
            if (negligible(f, S(0))) continue;
            for (Eigen::Index j = col; j < a.cols(); ++j) a(i, j) -= f * a(row, j);
        }
        out.pivots.push_back(col);
        ++row;
    }
    out.reduced = std::move(a);
    return out;
}

template <Scalar S>
Eigen::Index rank(const Mat<S>& a)
{
    if constexpr (ScalarTraits<S>::exact) {
        return static_cast<Eigen::Index>(rref(a).pivots.size());
    } else {
        const Eigen::VectorXd sv = singular_values(a);
        if (sv.size() == 0 || sv(0) == 0.0) return 0;
        const double tol = ScalarTraits<double>::eps * sv(0);
        return static_cast<Eigen::Index>((sv.array() > tol).count());
    }
}

template <Scalar S>
Mat<S> nullspace(const Mat<S>& a)
{
    const Eigen::Index n = a.cols();
    if constexpr (ScalarTraits<S>::exact) {
        const Echelon<S> e = rref(a);
        std::vector<bool> is_pivot(static_cast<size_t>(n), false);
        for (auto p : e.pivots) is_pivot[static_cast<size_t>(p)] = true;
        std::vector<Eigen::Index> free;
        for (Eigen::Index j = 0; j < n; ++j)
            if (!is_pivot[static_cast<size_t>(j)]) free.push_back(j);
        Mat<S> basis = Mat<S>::Zero(n, static_cast<Eigen::Index>(free.size()));
        for (size_t f = 0; f < free.size(); ++f) {
            const auto col = static_cast<Eigen::Index>(f);
            basis(free[f], col) = S(1);
            for (size_t r = 0; r < e.pivots.size(); ++r) {
                basis(e.pivots[r], col) = -e.reduced(static_cast<Eigen::Index>(r), free[f]);
            }
        }
        return basis;
    } else {
        if (a.rows() == 0) return Mat<double>::Identity(n, n);
        Eigen::JacobiSVD<Mat<double>> svd(a, Eigen::ComputeFullV);
        const Eigen::VectorXd sv = svd.singularValues();
        const double tol = sv.size() > 0 ? ScalarTraits<double>::eps * std::max(sv(0), 1e-300) : 0;
        Eigen::Index r = 0;
        while (r < sv.size() && sv(r) > tol) ++r;
        return svd.matrixV().rightCols(n - r);
    }
}

template <Scalar S>
Mat<S> column_basis(const Mat<S>& a)
{
    const Echelon<S> e = rref(a);
    Mat<S> out(a.rows(), static_cast<Eigen::Index>(e.pivots.size()));
    for (size_t i = 0; i < e.pivots.size(); ++i)
        out.col(static_cast<Eigen::Index>(i)) = a.col(e.pivots[i]);
    return out;
}

template <Scalar S>
S determinant(const Mat<S>& a)
{
    require(a.rows() == a.cols(), "determinant of a non-square matrix");
    if constexpr (ScalarTraits<S>::exact) {
        Mat<S> m = a;
        S det(1);
        const Eigen::Index n = m.rows();
        for (Eigen::Index c = 0; c < n; ++c) {
            Eigen::Index p = c;
            while (p < n && m(p, c) == 0) ++p;
            if (p == n) return S(0);
            if (p != c) {
                m.row(p).swap(m.row(c));
                det = -det;
            }
            det *= m(c, c);
            const S inv = S(1) / m(c, c);
            for (Eigen::Index i = c + 1; i < n; ++i) {
                if (m(i, c) == 0) continue;
                const S f = m(i, c) * inv;
                for (Eigen::Index j = c; j < n; ++j) m(i, j) -= f * m(c, j);
            }
        }
        return det;
    } else {
        if (a.rows() == 0) return 1.0;
        return a.partialPivLu().determinant();
    }
}

template <Scalar S>
LeastSquares<S> least_squares(const Mat<S>& a, const Vec<S>& b)
{
    require(a.rows() == b.size(), "least_squares: row mismatch");
    LeastSquares<S> out;
    if constexpr (ScalarTraits<S>::exact) {
        const Mat<S> at = a.transpose();
        Mat<S> aug(a.cols(), a.cols() + 1);
        aug.leftCols(a.cols()) = at * a;
        aug.col(a.cols()) = at * b;
        const Echelon<S> e = rref(aug);
        out.x = Vec<S>::Zero(a.cols());
        Eigen::Index r = 0;
        for (size_t i = 0; i < e.pivots.size(); ++i) {
            // the augmented column is never a pivot: A^T b lies in range(A^T A)
            if (e.pivots[i] == a.cols()) break;
            out.x(e.pivots[i]) = e.reduced(static_cast<Eigen::Index>(i), a.cols());
            ++r;
        }
        out.rank = r;
    } else {
        if (a.cols() == 0) {
            out.x = Vec<double>::Zero(0);
            out.rank = 0;
        } else {
            Eigen::CompleteOrthogonalDecomposition<Mat<double>> cod(a);
            cod.setThreshold(ScalarTraits<double>::eps);
            out.x = cod.solve(b);
            out.rank = cod.rank();
        }
    }
    const Vec<S> res = a * out.x - b;
    out.residual_sq = res.squaredNorm();
    return out;
}

template <Scalar S>
bool is_positive_definite(const Mat<S>& a)
{
    if (a.rows() != a.cols()) return false;
    const Eigen::Index n = a.rows();
    if constexpr (ScalarTraits<S>::exact) {
        if (a != a.transpose()) return false;
    } else {
        if ((a - a.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(max_abs(a), 1e-300))
            return false;
    }
    Mat<S> m = a;
    S floor(0);
    if constexpr (!ScalarTraits<S>::exact) floor = 1e-12 * m.diagonal().cwiseAbs().maxCoeff();
    for (Eigen::Index k = 0; k < n; ++k) {
        const S pivot = m(k, k);
        if (!(pivot > floor)) return false;
        for (Eigen::Index i = k + 1; i < n; ++i) {
            const S f = m(i, k) / pivot;
            for (Eigen::Index j = k + 1; j < n; ++j) m(i, j) -= f * m(k, j);
        }
    }
    return true;
}

template <Scalar S>
std::vector<S> characteristic_polynomial(const Mat<S>& a)
{
    require(a.rows() == a.cols(), "characteristic polynomial of a non-square matrix");
    const Eigen::Index n = a.rows();
    std::vector<S> c(static_cast<size_t>(n + 1), S(0));
    c[static_cast<size_t>(n)] = S(1);
    Mat<S> m = Mat<S>::Zero(n, n);
    const Mat<S> id = Mat<S>::Identity(n, n);
    for (Eigen::Index k = 1; k <= n; ++k) {
        m = a * m + c[static_cast<size_t>(n - k + 1)] * id;
        const S tr = (a * m).trace();
        c[static_cast<size_t>(n - k)] = -tr / S(k);
    }
    return c;
}

template <Scalar S>
Inertia inertia(const Mat<S>& a)
{
    Inertia out;
    if constexpr (ScalarTraits<S>::exact) {
        const std::vector<S> p = characteristic_polynomial(a);
        size_t z = 0;
        while (z < p.size() && p[z] == 0) ++z;
        out.zero = static_cast<int>(z);
        out.positive = sign_changes(p);
        std::vector<S> q = p;
        for (size_t i = 1; i < q.size(); i += 2) q[i] = -q[i];
        out.negative = sign_changes(q);
    } else {
        Eigen::SelfAdjointEigenSolver<Mat<double>> es(a, Eigen::EigenvaluesOnly);
        const Eigen::VectorXd ev = es.eigenvalues();
        const double tol = ev.size() ? ScalarTraits<double>::eps * ev.cwiseAbs().maxCoeff() : 0.0;
        for (Eigen::Index i = 0; i < ev.size(); ++i) {
            if (ev(i) > tol) ++out.positive;
            else if (ev(i) < -tol) ++out.negative;
            else ++out.zero;
        }
    }
    return out;
}

template <Scalar S>
bool in_span(const Mat<S>& basis, const Vec<S>& v)
{
    if (basis.cols() == 0) {
        if constexpr (ScalarTraits<S>::exact) return v.isZero();
        else return v.cwiseAbs().maxCoeff() <= ScalarTraits<double>::eps;
    }
    Mat<S> aug(basis.rows(), basis.cols() + 1);
    aug << basis, v;
    return rank(aug) == rank(basis);
}

#define G2LAB_INSTANTIATE(S)                                                                  \
    template Echelon<S> rref<S>(Mat<S>);                                                     \
    template Eigen::Index rank<S>(const Mat<S>&);                                            \
    template Mat<S> nullspace<S>(const Mat<S>&);                                             \
    template Mat<S> column_basis<S>(const Mat<S>&);                                          \
    template S determinant<S>(const Mat<S>&);                                                \
    template LeastSquares<S> least_squares<S>(const Mat<S>&, const Vec<S>&);                 \
    template bool is_positive_definite<S>(const Mat<S>&);                                    \
    template std::vector<S> characteristic_polynomial<S>(const Mat<S>&);                     \
    template Inertia inertia<S>(const Mat<S>&);                                              \
    template bool in_span<S>(const Mat<S>&, const Vec<S>&);

G2LAB_INSTANTIATE(double)
G2LAB_INSTANTIATE(Rational)

#undef G2LAB_INSTANTIATE

} // namespace g2lab::linalg
