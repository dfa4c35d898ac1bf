#include "g2lab/catalog.hpp"
#include "g2lab/g2.hpp"
#include "g2lab/io.hpp"
#include "g2lab/su3.hpp"

#include <cstdlib>
#include <filesystem>
#include <map>
#include <mutex>
#include <tuple>

namespace g2lab::catalog {

namespace {

using R = Rational;
using F = KForm<R>;

struct Term
{
    R c;
    int i;
    int j;
};

F eq(int n, std::initializer_list<Term> terms)
{
    F f(n, 2);
    for (const auto& t : terms) f += F::monomial(n, {t.i, t.j}, t.c);
    return f;
}

F zero(int n)
{
    return F(n, 2);
}

LieAlgebra<R> n1_algebra()
{
    return LieAlgebra<R>({zero(6), zero(6), zero(6), eq(6, {{1, 1, 3}}), eq(6, {{1, 1, 4}, {1, 2, 3}}),
                          eq(6, {{1, 1, 3}, {-1, 1, 5}, {-1, 2, 4}})},
                         "n1");
}

LieAlgebra<R> n2_algebra()
{
    return LieAlgebra<R>(
        {zero(6), zero(6), zero(6), zero(6), eq(6, {{1, 1, 4}, {1, 2, 3}}), eq(6, {{1, 1, 3}, {-1, 2, 4}})},
        "n2");
}

LieAlgebra<R> s_ab_algebra(const R& a, const R& b)
{
    return LieAlgebra<R>({eq(6, {{-a, 2, 6}}), eq(6, {{a, 1, 6}}), eq(6, {{b, 1, 6}, {b, 2, 5}, {a, 4, 6}}),
                          eq(6, {{b, 1, 5}, {-b, 2, 6}, {-a, 3, 6}}), zero(6), zero(6)},
                         "s_ab", {{"a", a}, {"b", b}});
}

std::vector<F> sl2_part()
{
    return {eq(7, {{-1, 2, 3}}), eq(7, {{-2, 1, 2}}), eq(7, {{2, 1, 3}})};
}

LieAlgebra<R> nonsolv(std::vector<F> rest, const std::string& name, Params params)
{
    std::vector<F> d = sl2_part();
    for (auto& f : rest) d.push_back(std::move(f));
    return LieAlgebra<R>(std::move(d), name, std::move(params));
}

Expected nonsolv_expected()
{
    Expected e;
    e.unimodular = true;
    e.solvable = false;
    e.nilpotent = false;
    e.levi = LeviType::SL2R;
    e.radical_dim = 4;
    return e;
}

R param(const Params& p, const Info& info, const std::string& name)
{
    if (auto it = p.find(name); it != p.end()) return it->second;
    for (const auto& spec : info.params)
        if (spec.name == name && spec.fallback) return *spec.fallback;
    fail(ErrorKind::Usage, info.id + ": missing parameter '" + name + "'");
}

void check_range(bool ok, const Info& info, const std::string& name, const R& v)
{
    if (ok) return;
    std::string range;
    for (const auto& spec : info.params)
        if (spec.name == name) range = spec.range;
    fail(ErrorKind::InvalidAlgebra,
         info.id + ": parameter " + name + "=" + to_string(v) + " outside " + range);
}

const std::vector<Info>& builtin()
{
    static const std::vector<Info> infos = {
        {"abelian7", "R^7 with the flat G2-structure", {}, false, false},
        {"n1", "6-dim nilpotent (0,0,0,e13,e14+e23,e13-e15-e24), coupled SU(3)", {}, false, false},
        {"n2", "6-dim nilpotent (0,0,0,0,e14+e23,e13-e24), coupled SU(3)", {}, false, false},
        {"ffkm_n", "7-dim 3-step nilpotent: [e1,e2]=-e4, [e1,e3]=-e5, [e1,e4]=-e6, [e1,e5]=-e7", {}, false, false},
        {"s_ab", "6-dim unimodular solvable R^4 x| R^2 with the standard SU(3) pair",
         {{"a", "any", std::nullopt}, {"b", "any", std::nullopt}}, false, false},
        {"g_a", "n2 x|_{D_a} R, D_a = diag(a,a,1/2-a,1/2-a,1/2,1/2)",
         {{"a", "a >= 1/4", std::nullopt}}, false, false},
        {"g_ab", "n1 x|_{D_ab} R", {{"a", "any", std::nullopt}, {"b", "any", std::nullopt}}, false, false},
        {"g_abk", "s_ab x|_{D_k} R",
         {{"a", "any", std::nullopt}, {"b", "any", std::nullopt}, {"k", "any", std::nullopt}}, false, false},
        {"nonsolv_1",
         "sl(2,R) x| R^4 with a Jordan-type action; merge=1: de6 = 1/2 e46 - e47, de7 = 1/2 e47; "
         "merge=2: de6 = 1/2 e46, de7 = -1/2 e47",
         {{"merge", "1 or 2", R(1)}}, true, false},
        {"nonsolv_2", "(-e23, -2e12, 2e13, 0, -e45, -mu e46, (1+mu) e47)",
         {{"mu", "-1 < mu <= 1/2", std::nullopt}}, false, false},
        {"nonsolv_3", "(-e23, -2e12, 2e13, 0, -mu e45, mu/2 e46 - e47, e46 + mu/2 e47)",
         {{"mu", "mu > 0", std::nullopt}}, false, false},
        {"nonsolv_levi", "(-e23, -2e12, 2e13, -e14-e25-e47, e15-e34-e57, 2e67, 0), radical R x| R^3", {},
         false, false},
    };
    return infos;
}

struct UserEntry
{
    Info info;
    io::Json json;
};

std::vector<UserEntry> load_user_entries()
{
    std::vector<UserEntry> out;
    const char* env = std::getenv("G2LAB_CATALOG_PATH");
    if (!env || !*env) return out;
    std::vector<std::filesystem::path> files;
    std::string paths(env);
    size_t start = 0;
    while (start <= paths.size()) {
        const size_t colon = paths.find(':', start);
        const std::string item = paths.substr(start, colon == std::string::npos ? std::string::npos : colon - start);
        if (!item.empty()) {
            const std::filesystem::path p(item);
            if (std::filesystem::is_directory(p)) {
                std::vector<std::filesystem::path> found;
                for (const auto& de : std::filesystem::directory_iterator(p))
                    if (de.path().extension() == ".json") found.push_back(de.path());
                std::sort(found.begin(), found.end());
                files.insert(files.end(), found.begin(), found.end());
            } else if (std::filesystem::exists(p)) {
                files.push_back(p);
            }
        }
        if (colon == std::string::npos) break;
        start = colon + 1;
    }
    for (const auto& f : files) {
        const io::Json doc = io::load_json_file(f.string());
        const io::Json items = doc.is_array() ? doc : io::Json::array({doc});
        for (const auto& item : items) {
            if (!item.is_object() || !item.contains("id") || !item.contains("algebra"))
                fail(ErrorKind::Parse, f.string() + ": user entries need 'id' and 'algebra'");
            Info info;
            info.id = item.at("id").get<std::string>();
            info.description = item.value("description", std::string("user entry from ") + f.string());
            info.user = true;
            out.push_back({info, item});
        }
    }
    return out;
}

std::optional<KForm<R>> searched_phi(const LieAlgebra<R>& l)
{
    static std::mutex mu;
    static std::map<std::string, std::optional<KForm<R>>> cache;
    const std::string key = io::to_json(l).dump();
    {
        std::lock_guard lock(mu);
        if (auto it = cache.find(key); it != cache.end()) return it->second;
    }
    std::optional<KForm<R>> found;
    for (auto seed : kSearchSeeds) {
        auto res = search_closed_positive(l, kSearchAttempts, seed);
        if (res.phi) {
            found = res.phi;
            break;
        }
    }
    std::lock_guard lock(mu);
    cache.emplace(key, found);
    return found;
}

Entry extension_entry(const std::string& id, const LieAlgebra<R>& base, const std::string& base_id,
                      const Mat<R>& d, Params params)
{
    Entry e;
    e.id = id;
    e.params = params;
    e.algebra = rank_one_extension(base, d, id);
    e.algebra = LieAlgebra<R>(e.algebra.structure_equations(), id, std::move(params));
    e.phi = standard_phi<R>();
    e.extension_derivation = d;
    e.extension_base = base_id;
    e.expected.solvable = true;
    e.expected.phi_closed = true;
    return e;
}

} // namespace

Mat<Rational> d_a(const Rational& a)
{
    Mat<R> d = Mat<R>::Zero(6, 6);
    const R half(1, 2);
    d.diagonal() << a, a, half - a, half - a, half, half;
    return d;
}

Mat<Rational> d_ab(const Rational& a, const Rational& b)
{
    Mat<R> d = Mat<R>::Zero(6, 6);
    const R half(1, 2);
    d(2, 0) = a;
    d(2, 2) = half;
    d(3, 1) = a;
    d(3, 3) = half;
    d(4, 0) = b;
    d(4, 4) = half;
    d(5, 1) = b;
    d(5, 5) = half;
    return d;
}

Mat<Rational> d_k(const Rational& b, const Rational& k)
{
    Mat<R> d = Mat<R>::Zero(6, 6);
    const R mb = -b / 2;
    d(0, 0) = mb;
    d(0, 1) = k;
    d(1, 0) = -k;
    d(1, 1) = mb;
    d(2, 2) = mb;
    d(2, 3) = -k;
    d(3, 2) = k;
    d(3, 3) = mb;
    return d;
}

std::vector<Info> list()
{
    std::vector<Info> out = builtin();
    for (auto& u : load_user_entries()) out.push_back(u.info);
    return out;
}

Entry get(const std::string& id, const Params& params)
{
    const auto& infos = builtin();
    const auto it = std::find_if(infos.begin(), infos.end(), [&](const Info& i) { return i.id == id; });
    if (it == infos.end()) {
        for (auto& u : load_user_entries()) {
            if (u.info.id != id) continue;
            Entry e;
            e.id = id;
            e.description = u.info.description;
            e.algebra = io::algebra_from_json(u.json.at("algebra"));
            e.params = e.algebra.params();
            if (u.json.contains("phi")) e.phi = io::kform_from_json<R>(u.json.at("phi"));
            if (u.json.contains("su3")) {
                const auto& s = u.json.at("su3");
                e.su3 = SU3Pair{io::kform_from_json<R>(s.at("omega")), io::kform_from_json<R>(s.at("psi"))};
            }
            return e;
        }
        fail(ErrorKind::Usage, "unknown catalog id '" + id + "'");
    }
    const Info& info = *it;
    for (const auto& [name, value] : params) {
        const bool known = std::any_of(info.params.begin(), info.params.end(),
                                       [&](const ParamSpec& s) { return s.name == name; });
        if (!known) fail(ErrorKind::Usage, id + ": unknown parameter '" + name + "'");
    }

    const SU3Pair standard{standard_omega<R>(), standard_psi<R>()};
    Entry e;
    if (id == "abelian7") {
        e.algebra = LieAlgebra<R>::abelian(7);
        e.phi = standard_phi<R>();
        e.expected.unimodular = true;
        e.expected.nilpotent = true;
        e.expected.phi_closed = true;
        e.expected.derivation_dim = 49;
    } else if (id == "n1" || id == "n2") {
        e.algebra = id == "n1" ? n1_algebra() : n2_algebra();
        e.su3 = standard;
        e.expected.unimodular = true;
        e.expected.nilpotent = true;
        e.expected.coupled_c = R(-1);
    } else if (id == "ffkm_n") {
        e.algebra = LieAlgebra<R>({zero(7), zero(7), zero(7), eq(7, {{1, 1, 2}}), eq(7, {{1, 1, 3}}),
                                   eq(7, {{1, 1, 4}}), eq(7, {{1, 1, 5}})},
                                  "ffkm_n");
        e.expected.unimodular = true;
        e.expected.nilpotent = true;
        e.expected.nilpotency_step = 3;
    } else if (id == "s_ab") {
        const R a = param(params, info, "a");
        const R b = param(params, info, "b");
        e.algebra = s_ab_algebra(a, b);
        e.params = {{"a", a}, {"b", b}};
        e.su3 = standard;
        e.expected.unimodular = true;
        e.expected.solvable = true;
        e.expected.nilpotent = a == 0;
        e.expected.coupled_c = b;
    } else if (id == "g_a") {
        const R a = param(params, info, "a");
        check_range(a >= R(1, 4), info, "a", a);
        e = extension_entry(id, n2_algebra(), "n2", d_a(a), {{"a", a}});
        e.expected.nilpotent = false;
        e.expected.unimodular = false;
    } else if (id == "g_ab") {
        const R a = param(params, info, "a");
        const R b = param(params, info, "b");
        e = extension_entry(id, n1_algebra(), "n1", d_ab(a, b), {{"a", a}, {"b", b}});
        e.expected.nilpotent = false;
        e.expected.unimodular = false;
    } else if (id == "g_abk") {
        const R a = param(params, info, "a");
        const R b = param(params, info, "b");
        const R k = param(params, info, "k");
        e = extension_entry(id, s_ab_algebra(a, b), "s_ab", d_k(b, k), {{"a", a}, {"b", b}, {"k", k}});
        if (b != 0) e.expected.unimodular = false;
        if (a != 0 && b != 0) {
            e.expected.derivation_dim = 8;
            e.expected.nilpotent = false;
        }
    } else if (id == "nonsolv_1") {
        const R merge = param(params, info, "merge");
        check_range(merge == 1 || merge == 2, info, "merge", merge);
        const R half(1, 2);
        std::vector<F> rest = {zero(7), eq(7, {{-1, 4, 5}})};
        if (merge == 1) {
            rest.push_back(eq(7, {{half, 4, 6}, {-1, 4, 7}}));
            rest.push_back(eq(7, {{half, 4, 7}}));
        } else {
            rest.push_back(eq(7, {{half, 4, 6}}));
            rest.push_back(eq(7, {{-half, 4, 7}}));
        }
        e.algebra = nonsolv(std::move(rest), id, {{"merge", merge}});
        e.params = {{"merge", merge}};
        e.ambiguous = true;
        e.note = "eight components are given for seven differentials; both one-term merges are "
                 "offered and neither is asserted";
    } else if (id == "nonsolv_2") {
        const R mu = param(params, info, "mu");
        check_range(mu > -1 && mu <= R(1, 2), info, "mu", mu);
        e.algebra = nonsolv({zero(7), eq(7, {{-1, 4, 5}}), eq(7, {{-mu, 4, 6}}), eq(7, {{1 + mu, 4, 7}})},
                            id, {{"mu", mu}});
        e.params = {{"mu", mu}};
        e.expected = nonsolv_expected();
        e.expected.radical_abelian = false;
        if (mu == 0)
            e.note = "at mu = 0 the algebra splits off e6 as an abelian factor and the complement "
                     "sl(2,R) + e(1,1) carries no symplectic form, so no closed G2-structure exists";
    } else if (id == "nonsolv_3") {
        const R mu = param(params, info, "mu");
        check_range(mu > 0, info, "mu", mu);
        e.algebra = nonsolv({zero(7), eq(7, {{-mu, 4, 5}}), eq(7, {{mu / 2, 4, 6}, {-1, 4, 7}}),
                             eq(7, {{1, 4, 6}, {mu / 2, 4, 7}})},
                            id, {{"mu", mu}});
        e.params = {{"mu", mu}};
        e.expected = nonsolv_expected();
        e.expected.radical_abelian = false;
    } else if (id == "nonsolv_levi") {
        e.algebra = nonsolv({eq(7, {{-1, 1, 4}, {-1, 2, 5}, {-1, 4, 7}}),
                             eq(7, {{1, 1, 5}, {-1, 3, 4}, {-1, 5, 7}}), eq(7, {{2, 6, 7}}), zero(7)},
                            id, {});
        e.expected = nonsolv_expected();
        e.expected.radical_abelian = false;
    }
    e.id = id;
    e.description = info.description;
    if (e.params.empty()) e.params = params;
    if (id.rfind("nonsolv", 0) == 0) {
        e.phi = searched_phi(e.algebra);
        e.phi_search_derived = true;
        if (e.phi) e.expected.phi_closed = true;
    }
    return e;
}

std::vector<std::string> verify(const Entry& entry)
{
    std::vector<std::string> bad;
    const auto& l = entry.algebra;
    if (jacobi_residual(l) != 0) bad.push_back("Jacobi identity fails");
    const Expected& x = entry.expected;
    auto check = [&](const char* what, auto expected, auto actual) {
        if (expected && *expected != actual) bad.push_back(std::string(what) + " mismatch");
    };
    const StructureFlags f = structure_flags(l);
    check("unimodular", x.unimodular, is_unimodular(l));
    check("solvable", x.solvable, f.solvable);
    check("nilpotent", x.nilpotent, f.nilpotent);
    check("nilpotency step", x.nilpotency_step, f.nilpotency_step);
    check("Levi factor", x.levi, f.levi);
    check("radical dimension", x.radical_dim, f.radical_dim);
    check("radical abelian", x.radical_abelian, f.radical_abelian);
    if (x.derivation_dim) check("derivation dimension", x.derivation_dim, derivation_space(l).dim());
    if (x.coupled_c) {
        if (!entry.su3 || l.dim() != 6) {
            bad.push_back("coupled constant expected but no SU(3) pair on a 6-dim algebra");
        } else {
            const auto s = reconstruct_su3(l, entry.su3->omega, entry.su3->psi);
            const auto cls = su3_torsion_class(s);
            const R c = cls.kind == SU3TorsionKind::Coupled ? cls.c : R(0);
            if (cls.kind == SU3TorsionKind::Generic || c != *x.coupled_c) bad.push_back("coupled constant mismatch");
        }
    }
    if (x.phi_closed) {
        const bool closed = entry.phi && ce_differential(l, *entry.phi).is_zero();
        check("closedness of phi", x.phi_closed, closed);
        if (entry.phi && !is_positive(*entry.phi)) bad.push_back("attached phi is not positive");
    }
    return bad;
}

} // namespace g2lab::catalog
