#pragma once

#include <boost/multiprecision/eigen.hpp>
#include <boost/multiprecision/gmp.hpp>

#include <Eigen/Core>

#include <cmath>
#include <concepts>
#include <optional>
#include <string>
#include <string_view>

namespace g2lab {

/// Exact arbitrary-precision rational. Expression templates are disabled so
/// the type behaves as a plain value inside Eigen kernels.
using Rational = boost::multiprecision::number<boost::multiprecision::gmp_rational,
                                               boost::multiprecision::et_off>;

template <typename S>
concept Scalar = std::same_as<S, double> || std::same_as<S, Rational>;

template <typename S>
using Vec = Eigen::Matrix<S, Eigen::Dynamic, 1>;
template <typename S>
using Mat = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;

template <Scalar S>
struct ScalarTraits;

template <>
struct ScalarTraits<double>
{
    static constexpr bool exact = false;
    static constexpr const char* name = "float";
    /// Relative tolerance used for rank and zero decisions.
    static constexpr double eps = 1e-10;

    static double to_double(double x) { return x; }
    static double abs(double x) { return std::abs(x); }
    static std::optional<double> root(double x, int k)
    {
        if (k % 2 == 0 && x < 0) return std::nullopt;
        return x < 0 ? -std::pow(-x, 1.0 / k) : std::pow(x, 1.0 / k);
    }
    static bool is_zero(double x, double scale = 1.0) { return std::abs(x) <= eps * scale; }
};

template <>
struct ScalarTraits<Rational>
{
    static constexpr bool exact = true;
    static constexpr const char* name = "rational";
    static constexpr double eps = 0.0;

    static double to_double(const Rational& x) { return x.convert_to<double>(); }
    static Rational abs(const Rational& x) { return x < 0 ? Rational(-x) : x; }
    /// Exact k-th root when numerator and denominator are perfect k-th powers.
    static std::optional<Rational> root(const Rational& x, int k);
    static bool is_zero(const Rational& x, double = 1.0) { return x == 0; }
};

template <Scalar S>
double to_double(const S& x)
{
    return ScalarTraits<S>::to_double(x);
}

template <Scalar To, Scalar From>
To scalar_cast(const From& x)
{
    if constexpr (std::same_as<To, From>) {
        return x;
    } else if constexpr (std::same_as<To, double>) {
        return ScalarTraits<From>::to_double(x);
    } else {
        static_assert(std::same_as<To, double>, "float to rational conversion is not supported");
    }
}

/// Parses "p/q", "p" (optionally signed). Decimal notation is rejected.
Rational parse_rational(std::string_view text);

/// Parses a rational or a decimal float literal.
double parse_real(std::string_view text);

std::string to_string(const Rational& x);
/// Shortest round-trip representation (17 significant digits max).
std::string to_string(double x);

} // namespace g2lab
