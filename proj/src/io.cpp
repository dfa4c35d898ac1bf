#include "g2lab/io.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

namespace g2lab::io {

namespace {

template <Scalar S>
Json scalar_json(const S& x)
{
    if constexpr (ScalarTraits<S>::exact) return to_string(x);
    else return x;
}

template <Scalar S>
S scalar_from_json(const Json& j)
{
    if (j.is_number_integer()) return S(j.get<long long>());
    if (j.is_string()) {
        if constexpr (ScalarTraits<S>::exact) return parse_rational(j.get<std::string>());
        else return parse_real(j.get<std::string>());
    }
    if (j.is_number_float()) {
        if constexpr (ScalarTraits<S>::exact) {
            fail(ErrorKind::Parse, "float coefficient where an exact rational is required: " + j.dump());
        } else {
            return j.get<double>();
        }
    }
    fail(ErrorKind::Parse, "expected a coefficient, got " + j.dump());
}

const Json& field(const Json& j, const char* key)
{
    if (!j.is_object() || !j.contains(key)) fail(ErrorKind::Parse, std::string("missing field '") + key + "'");
    return j.at(key);
}

int int_field(const Json& j, const char* key)
{
    const Json& v = field(j, key);
    if (!v.is_number_integer()) fail(ErrorKind::Parse, std::string("field '") + key + "' must be an integer");
    return v.get<int>();
}

std::string column_name(Mask m)
{
    std::string s = "e";
    for (int l : basis::labels(m)) s += static_cast<char>('0' + l);
    return s;
}

} // namespace

template <Scalar S>
Json to_json(const KForm<S>& a)
{
    Json terms = Json::array();
    a.for_each_term([&](Mask m, const S& c) {
        terms.push_back({{"idx", basis::labels(m)}, {"c", scalar_json(c)}});
    });
    return {{"n", a.dim()}, {"k", a.degree()}, {"terms", terms}};
}

template <Scalar S>
Json to_json(const LieAlgebra<S>& l)
{
    Json d = Json::array();
    for (const auto& de : l.structure_equations()) d.push_back(to_json(de));
    return {{"n", l.dim()}, {"d", d}, {"name", l.name()}, {"params", to_json(l.params())}};
}

template <Scalar S>
Json to_json(const Mat<S>& m)
{
    Json rows = Json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(scalar_json(S(m(i, j))));
        rows.push_back(row);
    }
    return rows;
}

Json to_json(const Params& p)
{
    Json out = Json::object();
    for (const auto& [k, v] : p) out[k] = to_string(v);
    return out;
}

template <Scalar S>
KForm<S> kform_from_json(const Json& j)
{
    const int n = int_field(j, "n");
    const int k = int_field(j, "k");
    if (n < 1 || n > kMaxDim || k < 0 || k > n) fail(ErrorKind::Parse, "form shape out of range");
    KForm<S> out(n, k);
    const Json& terms = field(j, "terms");
    if (!terms.is_array()) fail(ErrorKind::Parse, "'terms' must be an array");
    for (const Json& t : terms) {
        const Json& idx = field(t, "idx");
        if (!idx.is_array() || static_cast<int>(idx.size()) != k)
            fail(ErrorKind::Parse, "term index list has the wrong length: " + idx.dump());
        std::vector<int> labels;
        for (const Json& l : idx) {
            if (!l.is_number_integer()) fail(ErrorKind::Parse, "term labels must be integers");
            labels.push_back(l.get<int>());
        }
        // accept unsorted labels; the sign of the sorting permutation applies
        int sign = 1;
        for (size_t a = 0; a < labels.size(); ++a)
            for (size_t b = a + 1; b < labels.size(); ++b) {
                if (labels[a] == labels[b]) fail(ErrorKind::Parse, "repeated label in " + idx.dump());
                if (labels[a] > labels[b]) sign = -sign;
            }
        for (int l : labels)
            if (l < 1 || l > n) fail(ErrorKind::Parse, "label out of range in " + idx.dump());
        const Mask m = basis::from_labels(labels);
        S c = scalar_from_json<S>(field(t, "c"));
        if (sign < 0) c = -c;
        out.set(m, out.coeff(m) + c);
    }
    return out;
}

template <Scalar S>
KForm<S> parse_kform(std::string_view text, int n, int k)
{
    std::string s;
    for (char ch : text)
        if (!std::isspace(static_cast<unsigned char>(ch))) s += ch;
    if (s.empty() || s == "0") {
        if (k < 0) fail(ErrorKind::Parse, "cannot infer the degree of an empty form");
        return KForm<S>(n, k);
    }
    std::optional<KForm<S>> out;
    size_t pos = 0;
    while (pos < s.size()) {
        bool negative = false;
        if (s[pos] == '+' || s[pos] == '-') {
            negative = s[pos] == '-';
            ++pos;
        } else if (out) {
            fail(ErrorKind::Parse, "expected '+' or '-' at '" + s.substr(pos) + "'");
        }
        const size_t e = s.find('e', pos);
        if (e == std::string::npos) fail(ErrorKind::Parse, "missing basis monomial in '" + s + "'");
        std::string coef = s.substr(pos, e - pos);
        if (!coef.empty() && coef.back() == '*') coef.pop_back();
        S c(1);
        if (!coef.empty()) {
            if constexpr (ScalarTraits<S>::exact) c = parse_rational(coef);
            else c = parse_real(coef);
        }
        if (negative) c = -c;
        pos = e + 1;
        bool braced = false;
        if (pos < s.size() && s[pos] == '^') ++pos;
        if (pos < s.size() && s[pos] == '{') {
            braced = true;
            ++pos;
        }
        std::vector<int> labels;
        while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos])))
            labels.push_back(s[pos++] - '0');
        if (braced) {
            if (pos >= s.size() || s[pos] != '}') fail(ErrorKind::Parse, "unbalanced brace in '" + s + "'");
            ++pos;
        }
        if (labels.empty()) fail(ErrorKind::Parse, "empty monomial in '" + s + "'");
        const int degree = static_cast<int>(labels.size());
        if (!out) out = KForm<S>(n, k < 0 ? degree : k);
        if (degree != out->degree()) fail(ErrorKind::Parse, "mixed degrees in '" + s + "'");
        const Json term = {{"idx", labels}, {"c", 1}};
        *out += kform_from_json<S>(Json{{"n", n}, {"k", degree}, {"terms", Json::array({term})}}) * c;
    }
    return *out;
}

LieAlgebra<Rational> algebra_from_json(const Json& j)
{
    const int n = int_field(j, "n");
    if (n < 1 || n > kMaxDim) fail(ErrorKind::InvalidAlgebra, "Lie algebra dimension must be in [1, 8]");
    const Json& d = field(j, "d");
    if (!d.is_array() || static_cast<int>(d.size()) != n)
        fail(ErrorKind::Parse, "'d' must list exactly n structure equations");
    std::vector<KForm<Rational>> eqs;
    for (const Json& de : d) {
        KForm<Rational> f = de.is_string() ? parse_kform<Rational>(de.get<std::string>(), n, 2)
                                           : kform_from_json<Rational>(de);
        if (f.dim() != n || f.degree() != 2) fail(ErrorKind::Parse, "structure equations must be 2-forms on R^n");
        eqs.push_back(std::move(f));
    }
    Params params;
    if (j.contains("params")) {
        for (const auto& [k, v] : j.at("params").items()) {
            params[k] = v.is_string() ? parse_rational(v.get<std::string>())
                                      : scalar_from_json<Rational>(v);
        }
    }
    return LieAlgebra<Rational>(std::move(eqs), j.value("name", std::string{}), std::move(params));
}

std::pair<std::string, Rational> parse_param(std::string_view text)
{
    const auto eq = text.find('=');
    if (eq == std::string_view::npos || eq == 0)
        fail(ErrorKind::Parse, "parameters look like name=value, got '" + std::string(text) + "'");
    return {std::string(text.substr(0, eq)), parse_rational(text.substr(eq + 1))};
}

Json load_json_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) fail(ErrorKind::Parse, "cannot open '" + path + "'");
    try {
        return Json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        fail(ErrorKind::Parse, path + ": " + e.what());
    }
}

std::string fnv1a_hex(std::string_view bytes)
{
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string format_double(double x)
{
    return to_string(x);
}

void write_trajectory_csv(std::ostream& os, const std::vector<double>& t,
                          const std::vector<KForm<double>>& phi)
{
    require(t.size() == phi.size(), "trajectory columns mismatch");
    os << "t";
    for (Mask m : basis::monomials(7, 3)) os << ',' << column_name(m);
    os << '\n';
    for (size_t i = 0; i < t.size(); ++i) {
        os << format_double(t[i]);
        for (Eigen::Index c = 0; c < phi[i].size(); ++c) os << ',' << format_double(phi[i].coeffs()(c));
        os << '\n';
    }
}

void write_series_csv(std::ostream& os, const std::vector<std::string>& names,
                      const std::vector<double>& t, const std::vector<std::vector<double>>& columns)
{
    require(names.size() == columns.size(), "series names mismatch");
    os << "t";
    for (const auto& n : names) os << ',' << n;
    os << '\n';
    for (size_t i = 0; i < t.size(); ++i) {
        os << format_double(t[i]);
        for (const auto& col : columns) os << ',' << format_double(col.at(i));
        os << '\n';
    }
}

#define G2LAB_INSTANTIATE(S)                                                                  \
    template Json to_json<S>(const KForm<S>&);                                                \
    template Json to_json<S>(const LieAlgebra<S>&);                                           \
    template Json to_json<S>(const Mat<S>&);                                                  \
    template KForm<S> kform_from_json<S>(const Json&);                                        \
    template KForm<S> parse_kform<S>(std::string_view, int, int);

G2LAB_INSTANTIATE(double)
G2LAB_INSTANTIATE(Rational)

#undef G2LAB_INSTANTIATE

} // namespace g2lab::io
