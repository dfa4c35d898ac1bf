#pragma once

#include "g2lab/liealg.hpp"

#include <optional>
#include <string>
#include <vector>

namespace g2lab::catalog {

struct ParamSpec
{
    std::string name;
    std::string range;                 ///< human-readable validity range
    std::optional<Rational> fallback;  ///< used when the caller omits the parameter
};

struct Info
{
    std::string id;
    std::string description;
    std::vector<ParamSpec> params;
    bool ambiguous = false;
    bool user = false;                 ///< loaded from G2LAB_CATALOG_PATH
};

struct Expected
{
    std::optional<bool> unimodular;
    std::optional<bool> solvable;
    std::optional<bool> nilpotent;
    std::optional<int> nilpotency_step;
    std::optional<LeviType> levi;
    std::optional<int> radical_dim;
    std::optional<bool> radical_abelian;
    std::optional<Rational> coupled_c;     ///< for the attached SU(3) pair; 0 means half-flat
    std::optional<bool> phi_closed;
    std::optional<int> derivation_dim;
};

struct SU3Pair
{
    KForm<Rational> omega;
    KForm<Rational> psi;
};

struct Entry
{
    std::string id;
    Params params;
    std::string description;
    LieAlgebra<Rational> algebra;
    std::optional<SU3Pair> su3;
    std::optional<KForm<Rational>> phi;
    bool phi_search_derived = false;   ///< attached by a seeded search, not a closed formula
    std::optional<Mat<Rational>> extension_derivation;  ///< D for entries built as L x|_D R
    std::optional<std::string> extension_base;          ///< id of L
    bool ambiguous = false;
    std::string note;
    Expected expected;
};

/// Built-in entries followed by any user entries found on G2LAB_CATALOG_PATH.
std::vector<Info> list();

/// Instantiates an entry. Unknown ids and missing or unknown parameters are
/// Usage errors; out-of-range values are InvalidAlgebra.
Entry get(const std::string& id, const Params& params = {});

/// Re-derives every field of entry.expected; returns one message per mismatch.
std::vector<std::string> verify(const Entry& entry);

/// Fixed seeds tried in order when attaching search-derived closed forms.
inline constexpr std::uint64_t kSearchSeeds[] = {7, 11, 2024};
inline constexpr int kSearchAttempts = 10000;

Mat<Rational> d_a(const Rational& a);
Mat<Rational> d_ab(const Rational& a, const Rational& b);
Mat<Rational> d_k(const Rational& b, const Rational& k);

} // namespace g2lab::catalog
