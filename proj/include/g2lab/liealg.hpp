#pragma once

#include "g2lab/exterior.hpp"

#include <map>
#include <string>
#include <vector>

namespace g2lab {

using Params = std::map<std::string, Rational>;

/// Finite-dimensional real Lie algebra given by its structure equations
/// (de^1, ..., de^n). Brackets follow de^k(e_i, e_j) = -e^k([e_i, e_j]).
///
/// The Chevalley-Eilenberg differential is tabulated per degree at
/// construction. Jacobi is not enforced here so that broken inputs can be
/// inspected; see jacobi_residual().
template <Scalar S>
class LieAlgebra
{
public:
    LieAlgebra() = default;
    explicit LieAlgebra(std::vector<KForm<S>> structure_equations, std::string name = {},
                        Params params = {});

    static LieAlgebra abelian(int n);

    int dim() const { return m_n; }
    const std::vector<KForm<S>>& structure_equations() const { return m_d; }
    const std::string& name() const { return m_name; }
    const Params& params() const { return m_params; }

    /// c^k_{ij} with [e_i, e_j] = sum_k c^k_{ij} e_k (0-based indices).
    S structure_constant(int i, int j, int k) const;
    Vec<S> bracket(const Vec<S>& x, const Vec<S>& y) const;
    /// ad_x as an n x n matrix (column j = [x, e_j]).
    Mat<S> ad(const Vec<S>& x) const;
    Mat<S> ad(int i) const;

    /// Matrix of d from degree k to degree k+1 (0 rows when k = n).
    const Mat<S>& differential_matrix(int k) const { return m_dk.at(static_cast<size_t>(k)); }

    template <Scalar T>
    LieAlgebra<T> cast() const;

private:
    int m_n = 0;
    std::vector<KForm<S>> m_d;
    std::vector<Mat<S>> m_dk;
    std::string m_name;
    Params m_params;
};

/// Chevalley-Eilenberg differential. A top-degree input yields the zero
/// n-form (there is nothing above it).
template <Scalar S>
KForm<S> ce_differential(const LieAlgebra<S>& l, const KForm<S>& g);

/// max_k max|coeff(d(de^k))|; zero exactly when Jacobi holds.
template <Scalar S>
S jacobi_residual(const LieAlgebra<S>& l);

template <Scalar S>
int betti(const LieAlgebra<S>& l, int k);

template <Scalar S>
std::vector<int> betti_numbers(const LieAlgebra<S>& l);

template <Scalar S>
bool is_unimodular(const LieAlgebra<S>& l);

template <Scalar S>
Mat<S> killing_form(const LieAlgebra<S>& l);

/// Spans are returned as column bases in the coordinates e_1..e_n.
template <Scalar S>
Mat<S> bracket_span(const LieAlgebra<S>& l, const Mat<S>& a, const Mat<S>& b);

enum class LeviType { None, SL2R, SU2, Other };

std::string to_string(LeviType t);

struct StructureFlags
{
    bool solvable = false;
    bool nilpotent = false;
    int nilpotency_step = 0;               ///< 0 unless nilpotent; 0 also for the zero algebra
    std::vector<int> derived_series;       ///< dims of g, [g,g], ... until it stabilises
    std::vector<int> lower_central_series; ///< dims of g, [g,g], [g,[g,g]], ...
    int radical_dim = 0;
    int semisimple_dim = 0;                ///< dim g / rad
    LeviType levi = LeviType::None;
    bool radical_abelian = false;
    std::vector<int> radical_derived_series;
};

template <Scalar S>
StructureFlags structure_flags(const LieAlgebra<S>& l);

template <Scalar S>
struct DerivationSpace
{
    std::vector<Mat<S>> basis;
    int dim() const { return static_cast<int>(basis.size()); }
};

/// Null space of D[x, y] = [Dx, y] + [x, Dy] over all basis pairs.
template <Scalar S>
DerivationSpace<S> derivation_space(const LieAlgebra<S>& l);

template <Scalar S>
bool is_derivation(const LieAlgebra<S>& l, const Mat<S>& d);

/// h x|_D R with eta = e^{n+1}: de^i gains D^* e^i ^ eta and d eta = 0.
template <Scalar S>
LieAlgebra<S> rank_one_extension(const LieAlgebra<S>& l, const Mat<S>& d, std::string name = {});

} // namespace g2lab
