#include "g2lab/scalar.hpp"
#include "g2lab/error.hpp"

#include <gmp.h>

#include <cctype>
#include <charconv>
#include <cstdio>

namespace g2lab {

namespace {

using boost::multiprecision::mpz_int;

std::optional<mpz_int> exact_integer_root(const mpz_int& x, int k)
{
    mpz_int r;
    if (mpz_root(r.backend().data(), x.backend().data(), static_cast<unsigned long>(k)) == 0) {
        return std::nullopt;
    }
    return r;
}

bool is_integer_literal(std::string_view s)
{
    if (!s.empty() && (s.front() == '-' || s.front() == '+')) s.remove_prefix(1);
    if (s.empty()) return false;
    for (char c : s) {
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    }
    return true;
}

std::string trimmed(std::string_view text)
{
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front())))
        text.remove_prefix(1);
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back())))
        text.remove_suffix(1);
    return std::string(text);
}

} // namespace

std::optional<Rational> ScalarTraits<Rational>::root(const Rational& x, int k)
{
    if (x == 0) return Rational(0);
    const bool negative = x < 0;
    if (negative && k % 2 == 0) return std::nullopt;
    const mpz_int num = boost::multiprecision::numerator(negative ? Rational(-x) : x);
    const mpz_int den = boost::multiprecision::denominator(x);
    auto rn = exact_integer_root(num, k);
    auto rd = exact_integer_root(den, k);
    if (!rn || !rd) return std::nullopt;
    Rational r(*rn, *rd);
    return negative ? Rational(-r) : r;
}

Rational parse_rational(std::string_view text)
{
    const std::string s = trimmed(text);
    const auto slash = s.find('/');
    const std::string num = s.substr(0, slash);
    const std::string den = slash == std::string::npos ? "1" : s.substr(slash + 1);
    if (!is_integer_literal(num) || !is_integer_literal(den) || den.front() == '-' ||
        den.front() == '+') {
        fail(ErrorKind::Parse, "not a rational literal: '" + s + "'");
    }
    const mpz_int d(den);
    if (d == 0) fail(ErrorKind::Parse, "zero denominator in '" + s + "'");
    const std::string n = num.front() == '+' ? num.substr(1) : num;
    return Rational(mpz_int(n), d);
}

double parse_real(std::string_view text)
{
    const std::string s = trimmed(text);
    if (s.find('/') != std::string::npos) return to_double(parse_rational(s));
    double value = 0.0;
    const char* first = s.data();
    if (!s.empty() && s.front() == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), value);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
        fail(ErrorKind::Parse, "not a number: '" + s + "'");
    }
    return value;
}

std::string to_string(const Rational& x)
{
    return x.str();
}

std::string to_string(double x)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

} // namespace g2lab
