#pragma once

#include "g2lab/exterior.hpp"
#include "g2lab/liealg.hpp"

#include <json.hpp>

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace g2lab::io {

using Json = nlohmann::ordered_json;

/// Coefficients serialise as "p/q" strings (rational) or numbers (float).
template <Scalar S>
Json to_json(const KForm<S>& a);

template <Scalar S>
Json to_json(const LieAlgebra<S>& l);

template <Scalar S>
Json to_json(const Mat<S>& m);

Json to_json(const Params& p);

/// {"n": int, "k": int, "terms": [{"idx": [1,2,7], "c": "1/2"}, ...]}.
/// Rational parsing accepts integers and "p/q" strings only.
template <Scalar S>
KForm<S> kform_from_json(const Json& j);

/// Text such as "e127 + e347 - 1/2 e^{146}" (labels are single digits 1..n).
/// The degree is read from the first term; an empty or "0" text needs `k`.
template <Scalar S>
KForm<S> parse_kform(std::string_view text, int n, int k = -1);

/// {"n": int, "d": [KForm, ...], "name": string, "params": {string: rational}}.
/// Entries of "d" may also be strings in the text notation above.
LieAlgebra<Rational> algebra_from_json(const Json& j);

/// "a=1/2" -> {"a", 1/2}
std::pair<std::string, Rational> parse_param(std::string_view text);

Json load_json_file(const std::string& path);

/// 64-bit FNV-1a, hex encoded.
std::string fnv1a_hex(std::string_view bytes);

/// Header "t,e123,e124,..." followed by one line per sample.
void write_trajectory_csv(std::ostream& os, const std::vector<double>& t,
                          const std::vector<KForm<double>>& phi);

/// Header "t,<name1>,<name2>,..." and the given columns.
void write_series_csv(std::ostream& os, const std::vector<std::string>& names,
                      const std::vector<double>& t, const std::vector<std::vector<double>>& columns);

std::string format_double(double x);

} // namespace g2lab::io
