#include "g2lab/catalog.hpp"
#include "g2lab/flow.hpp"
#include "g2lab/g2.hpp"
#include "g2lab/io.hpp"
#include "g2lab/linalg.hpp"
#include "g2lab/su3.hpp"

#include <CLI11.hpp>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

using namespace g2lab;
using io::Json;

namespace {

constexpr const char* kSchema = "g2lab.report/1";

enum class Backend { Auto, Rational, Float };

struct Options
{
    std::string format = "json";
    std::uint64_t seed = 7;
    std::string backend = "auto";
    int jobs = 1;

    std::string algebra;
    std::vector<std::string> params;

    std::string phi;
    std::string phi_file;
    bool use_default = false;
    bool erp = false;

    std::string omega;
    std::string psi;

    double t_end = 1.0;
    double dt = 1e-3;
    double tol = 1e-9;
    std::string out;
    std::string compare;

    int attempts = 10000;
};

Backend backend_of(const Options& o)
{
    if (o.backend == "rational") return Backend::Rational;
    if (o.backend == "float") return Backend::Float;
    return Backend::Auto;
}

int exit_code(ErrorKind k)
{
    switch (k) {
    case ErrorKind::Parse: return 2;
    case ErrorKind::Usage: return 2;
    case ErrorKind::InvalidAlgebra: return 3;
    case ErrorKind::InvalidStructure: return 4;
    case ErrorKind::Numerical: return 5;
    }
    return 1;
}

std::string kind_name(ErrorKind k)
{
    switch (k) {
    case ErrorKind::Parse: return "parse";
    case ErrorKind::Usage: return "usage";
    case ErrorKind::InvalidAlgebra: return "invalid-algebra";
    case ErrorKind::InvalidStructure: return "invalid-structure";
    case ErrorKind::Numerical: return "numerical";
    }
    return "unknown";
}

Json num(const Rational& x)
{
    return to_double(x);
}

Json num(double x)
{
    return x;
}

template <Scalar S>
Json exact(const S& x)
{
    if constexpr (ScalarTraits<S>::exact) return to_string(x);
    else return nullptr;
}

// ---- inputs -----------------------------------------------------------------

/// Cartesian product of "name=v1,v2,..." sweeps.
std::vector<Params> expand_params(const std::vector<std::string>& raw)
{
    std::vector<Params> combos = {Params{}};
    for (const auto& item : raw) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) fail(ErrorKind::Parse, "parameters look like name=value, got '" + item + "'");
        const std::string name = item.substr(0, eq);
        std::vector<Rational> values;
        std::stringstream ss(item.substr(eq + 1));
        for (std::string v; std::getline(ss, v, ',');) values.push_back(io::parse_param(name + "=" + v).second);
        if (values.empty()) fail(ErrorKind::Parse, "parameter '" + name + "' has no value");
        std::vector<Params> next;
        for (const auto& c : combos)
            for (const auto& v : values) {
                Params p = c;
                p[name] = v;
                next.push_back(std::move(p));
            }
        combos = std::move(next);
    }
    return combos;
}

catalog::Entry load_entry(const std::string& spec, const Params& params)
{
    if (std::filesystem::is_regular_file(spec)) {
        const Json j = io::load_json_file(spec);
        catalog::Entry e;
        e.id = spec;
        if (j.contains("algebra")) {
            e.algebra = io::algebra_from_json(j.at("algebra"));
            if (j.contains("phi")) e.phi = io::kform_from_json<Rational>(j.at("phi"));
            if (j.contains("su3"))
                e.su3 = catalog::SU3Pair{io::kform_from_json<Rational>(j.at("su3").at("omega")),
                                         io::kform_from_json<Rational>(j.at("su3").at("psi"))};
        } else {
            e.algebra = io::algebra_from_json(j);
        }
        e.params = e.algebra.params();
        return e;
    }
    return catalog::get(spec, params);
}

void require_jacobi(const LieAlgebra<Rational>& l)
{
    const Rational r = jacobi_residual(l);
    if (r != 0) fail(ErrorKind::InvalidAlgebra, "Jacobi identity fails (max |d(de^k)| = " + to_string(r) + ")");
}

template <Scalar S>
KForm<S> form_arg(const std::string& text, const std::string& file, int n, int k)
{
    if (!file.empty()) {
        KForm<S> f = io::kform_from_json<S>(io::load_json_file(file));
        if (f.dim() != n || f.degree() != k) fail(ErrorKind::Parse, "form in '" + file + "' has the wrong shape");
        return f;
    }
    return io::parse_kform<S>(text, n, k);
}

/// The 3-form to analyse: explicit --phi/--phi-file, else the entry's attached
/// form, else (with --default) the standard one.
std::optional<KForm<Rational>> chosen_phi_rational(const Options& o, const catalog::Entry& e)
{
    if (!o.phi.empty() || !o.phi_file.empty()) {
        if (backend_of(o) == Backend::Float) return std::nullopt;
        return form_arg<Rational>(o.phi, o.phi_file, 7, 3);
    }
    if (e.phi) return e.phi;
    if (o.use_default) return standard_phi<Rational>();
    fail(ErrorKind::Usage, e.id + " has no attached 3-form; pass --phi or --default");
}

KForm<double> chosen_phi_float(const Options& o, const catalog::Entry& e)
{
    if (!o.phi.empty() || !o.phi_file.empty()) return form_arg<double>(o.phi, o.phi_file, 7, 3);
    if (e.phi) return e.phi->cast<double>();
    if (o.use_default) return standard_phi<double>();
    fail(ErrorKind::Usage, e.id + " has no attached 3-form; pass --phi or --default");
}

/// Runs fn on the exact backend when the form allows it, on floats otherwise.
template <typename Fn>
Json with_backend(const Options& o, const catalog::Entry& e, Fn&& fn)
{
    if (e.algebra.dim() != 7) fail(ErrorKind::Usage, e.id + " is not 7-dimensional");
    const Backend b = backend_of(o);
    if (b != Backend::Float) {
        const auto phi = chosen_phi_rational(o, e);
        if (phi) {
            if (!is_positive(*phi)) fail(ErrorKind::InvalidStructure, "not a positive 3-form");
            if (has_exact_metric(*phi)) return fn(e.algebra, *phi);
            if (b == Backend::Rational)
                fail(ErrorKind::Numerical, "det(b)^(1/9) is irrational for this form; use --backend float");
        }
    }
    return fn(e.algebra.cast<double>(), chosen_phi_float(o, e));
}

// ---- commands -----------------------------------------------------------------

Json cmd_analyze(const Options& o, const catalog::Entry& e)
{
    require_jacobi(e.algebra);
    auto analyse = [&](const auto& l) {
        const StructureFlags f = structure_flags(l);
        Json r;
        r["n"] = l.dim();
        r["jacobi_residual"] = 0;
        r["unimodular"] = is_unimodular(l);
        r["solvability"] = f.nilpotent ? "nilpotent" : f.solvable ? "solvable" : "non-solvable";
        r["nilpotent"] = f.nilpotent;
        r["nilpotency_step"] = f.nilpotency_step;
        r["solvable"] = f.solvable;
        r["derived_series"] = f.derived_series;
        r["lower_central_series"] = f.lower_central_series;
        r["radical_dim"] = f.radical_dim;
        r["levi"] = to_string(f.levi);
        r["betti"] = betti_numbers(l);
        r["dim_der"] = derivation_space(l).dim();
        return r;
    };
    Json r = backend_of(o) == Backend::Float ? analyse(e.algebra.cast<double>()) : analyse(e.algebra);
    if (!e.expected.unimodular && !e.expected.solvable && !e.expected.levi) return r;
    const auto bad = catalog::verify(e);
    r["expected_properties_hold"] = bad.empty();
    if (!bad.empty()) r["expected_property_mismatches"] = bad;
    return r;
}

template <Scalar S>
Json g2_report(const LieAlgebra<S>& l, const KForm<S>& phi, bool erp)
{
    const G2Structure<S> g(l, phi);
    Json r;
    r["backend"] = ScalarTraits<S>::name;
    r["phi"] = io::to_json(phi);
    r["metric"] = io::to_json(g.metric().g);
    r["volume"] = num(g.metric().vol);
    r["closed"] = g.is_closed();
    r["closed_residual"] = num(g.closed_residual());
    if (!g.is_closed()) return r;
    const auto t = torsion_form(g);
    const auto c = curvature(g, t);
    r["tau"] = io::to_json(t.tau);
    r["tau_norm_sq"] = num(t.tau_norm_sq);
    r["tau_norm_sq_exact"] = exact(t.tau_norm_sq);
    r["scal"] = num(c.scal);
    r["scal_exact"] = exact(c.scal);
    r["ric_eigenvalues"] = c.ric_eigenvalues;
    r["ric_norm_sq"] = num(c.ric_norm_sq);
    r["parallel"] = t.tau.is_zero();
    r["erp_residual"] = erp_residual(g);
    r["laplacian"] = io::to_json(hodge_laplacian_closed(g));
    if (erp) {
        Json d;
        try {
            const ErpReport rep = erp_diagnostics(g);
            d["passed"] = rep.passed();
            d["residual"] = rep.residual;
            d["tau_cubed_zero"] = rep.tau_cubed_zero;
            d["tau_squared_closed"] = rep.tau_squared_closed;
            d["star_tau_squared_closed"] = rep.star_tau_squared_closed;
            d["tau_squared_annihilator_dim"] = rep.tau_squared_annihilator_dim;
            d["tau_squared_simple"] = rep.tau_squared_simple;
            d["ricci_formula_deviation"] = rep.ricci_formula_deviation;
            d["eigenvalues_match"] = rep.eigenvalues_match;
        } catch (const Error& err) {
            if (err.kind() != ErrorKind::InvalidStructure) throw;
            d["passed"] = false;
            d["error"] = err.what();
        }
        r["erp_diagnostics"] = d;
    }
    return r;
}

Json cmd_g2(const Options& o, const catalog::Entry& e)
{
    require_jacobi(e.algebra);
    return with_backend(o, e, [&](const auto& l, const auto& phi) { return g2_report(l, phi, o.erp); });
}

template <Scalar S>
Json su3_report(const LieAlgebra<S>& l, const KForm<S>& omega, const KForm<S>& psi)
{
    const auto s = reconstruct_su3(l, omega, psi);
    Json r;
    r["backend"] = ScalarTraits<S>::name;
    r["omega"] = io::to_json(s.omega);
    r["psi"] = io::to_json(s.psi);
    r["psi_hat"] = io::to_json(s.psi_hat);
    r["J"] = io::to_json(s.J);
    r["metric"] = io::to_json(s.metric.g);
    const auto cls = su3_torsion_class(s);
    r["class"] = to_string(cls.kind);
    r["c"] = num(cls.c);
    r["c_exact"] = exact(cls.c);
    if (cls.kind == SU3TorsionKind::Generic) return r;
    const auto w = w2_of(s, cls.c);
    r["w2"] = io::to_json(w.w2);
    const auto chk = check_dw2_prop_psi(s, w.w2);
    Json p;
    p["proportional"] = chk.proportional;
    p["mu"] = num(chk.mu);
    p["mu_exact"] = exact(chk.mu);
    p["w2_norm_sq"] = num(chk.w2_norm_sq);
    p["mu_equals_quarter_norm_sq"] = chk.mu_matches;
    r["dw2_proportional_to_psi"] = p;
    const auto fam = find_compatible_derivations(s, cls.c);
    Json d;
    d["feasible"] = fam.feasible;
    d["dim"] = fam.dim();
    if (fam.feasible) {
        d["particular"] = io::to_json(fam.particular);
        Json dirs = Json::array();
        for (const auto& m : fam.directions) dirs.push_back(io::to_json(m));
        d["directions"] = dirs;
    }
    r["compatible_derivations"] = d;
    return r;
}

Json cmd_su3(const Options& o, const catalog::Entry& e)
{
    require_jacobi(e.algebra);
    if (e.algebra.dim() != 6) fail(ErrorKind::Usage, e.id + " is not 6-dimensional");
    const bool explicit_pair = !o.omega.empty() || !o.psi.empty();
    if (!explicit_pair && !e.su3 && !o.use_default)
        fail(ErrorKind::Usage, e.id + " has no attached SU(3) pair; pass --omega/--psi or --default");
    if (backend_of(o) == Backend::Float) {
        const auto omega = explicit_pair ? io::parse_kform<double>(o.omega, 6, 2)
                           : e.su3       ? e.su3->omega.cast<double>()
                                         : standard_omega<double>();
        const auto psi = explicit_pair ? io::parse_kform<double>(o.psi, 6, 3)
                         : e.su3       ? e.su3->psi.cast<double>()
                                       : standard_psi<double>();
        return su3_report(e.algebra.cast<double>(), omega, psi);
    }
    const auto omega = explicit_pair ? io::parse_kform<Rational>(o.omega, 6, 2)
                       : e.su3       ? e.su3->omega
                                     : standard_omega<Rational>();
    const auto psi = explicit_pair ? io::parse_kform<Rational>(o.psi, 6, 3)
                     : e.su3       ? e.su3->psi
                                   : standard_psi<Rational>();
    return su3_report(e.algebra, omega, psi);
}

Json cmd_soliton(const Options& o, const catalog::Entry& e, bool& ambiguous)
{
    require_jacobi(e.algebra);
    return with_backend(o, e, [&](const auto& l, const auto& phi) {
        using S = typename std::decay_t<decltype(phi)>::scalar_type;
        const G2Structure<S> g(l, phi);
        const auto sol = algebraic_soliton_solve(g);
        Json r;
        r["backend"] = ScalarTraits<S>::name;
        r["status"] = to_string(sol.status);
        r["feasible"] = sol.feasible();
        r["residual"] = sol.residual;
        r["dtau_norm"] = sol.dtau_norm;
        r["relative_residual"] = sol.dtau_norm > 0 ? sol.residual / sol.dtau_norm : sol.residual;
        if (sol.status != SolitonStatus::Infeasible) {
            r["lambda"] = num(sol.lambda);
            r["lambda_exact"] = exact(sol.lambda);
            r["lambda_determined"] = sol.lambda_determined;
            r["character"] = sol.character;
            r["B"] = io::to_json(sol.B);
        }
        if (sol.status == SolitonStatus::Ambiguous) ambiguous = true;
        return r;
    });
}

Json cmd_flow(const Options& o, const catalog::Entry& e)
{
    require_jacobi(e.algebra);
    if (e.algebra.dim() != 7) fail(ErrorKind::Usage, e.id + " is not 7-dimensional");
    const LieAlgebra<double> l = e.algebra.cast<double>();
    FlowConfig cfg;
    cfg.t_end = o.t_end;
    cfg.dt0 = o.dt;
    cfg.tol = o.tol;
    const FlowTrajectory traj = laplacian_flow(l, chosen_phi_float(o, e), cfg);

    Json r;
    r["status"] = to_string(traj.status);
    if (!traj.message.empty()) r["message"] = traj.message;
    r["config"] = {{"t_end", cfg.t_end}, {"dt0", cfg.dt0}, {"tol", cfg.tol}, {"blowup", cfg.blowup}};
    r["samples"] = traj.samples.size();
    r["accepted_steps"] = traj.accepted;
    r["rejected_steps"] = traj.rejected;
    const auto& last = traj.samples.back();
    r["t_final"] = last.t;
    r["phi_final"] = io::to_json(last.phi);
    r["tau_norm_sq_initial"] = traj.samples.front().tau_norm_sq;
    r["tau_norm_sq_final"] = last.tau_norm_sq;
    double max_closed = 0;
    for (const auto& s : traj.samples) max_closed = std::max(max_closed, s.closed_residual);
    r["max_closed_residual"] = max_closed;

    if (!o.compare.empty()) {
        const auto get = [&](const char* name) {
            auto it = e.params.find(name);
            if (it == e.params.end()) fail(ErrorKind::Usage, std::string("--compare needs parameter ") + name);
            return to_double(it->second);
        };
        Json c;
        c["reference"] = o.compare;
        if (o.compare == "lauret") {
            if (e.id != "g_a") fail(ErrorKind::Usage, "--compare lauret applies to g_a");
            c["max_deviation"] = max_deviation_lauret(traj, get("a"));
        } else if (o.compare == "gabk") {
            if (e.id != "g_abk") fail(ErrorKind::Usage, "--compare gabk applies to g_abk");
            c["max_deviation"] = max_deviation_gabk(traj, get("b"));
        } else {
            fail(ErrorKind::Usage, "--compare expects lauret or gabk");
        }
        c["within_1e-6"] = c["max_deviation"].get<double>() < 1e-6;
        r["comparison"] = c;
    }

    if (!o.out.empty()) {
        std::ofstream csv(o.out, std::ios::binary);
        if (!csv) fail(ErrorKind::Usage, "cannot write '" + o.out + "'");
        std::vector<double> ts;
        std::vector<KForm<double>> phis;
        std::vector<double> tau2, scal;
        for (const auto& s : traj.samples) {
            ts.push_back(s.t);
            phis.push_back(s.phi);
            tau2.push_back(s.tau_norm_sq);
            scal.push_back(s.scal);
        }
        io::write_trajectory_csv(csv, ts, phis);
        std::filesystem::path side(o.out);
        side.replace_extension(".series.csv");
        std::ofstream series(side, std::ios::binary);
        if (!series) fail(ErrorKind::Usage, "cannot write '" + side.string() + "'");
        io::write_series_csv(series, {"tau_norm_sq", "scal"}, ts, {tau2, scal});
        r["csv"] = o.out;
        r["series_csv"] = side.string();
    }
    return r;
}

Json cmd_search(const Options& o, const catalog::Entry& e)
{
    require_jacobi(e.algebra);
    auto report = [&](const auto& res) {
        Json r;
        r["found"] = res.phi.has_value();
        if (e.algebra.dim() != 7) r["message"] = "G2-forms live on 7-dimensional algebras";
        r["attempts_used"] = res.attempts_used;
        r["closed_dim"] = res.closed_dim;
        r["seed"] = o.seed;
        if (res.phi) r["phi"] = io::to_json(*res.phi);
        return r;
    };
    if (backend_of(o) == Backend::Float)
        return report(search_closed_positive(e.algebra.cast<double>(), o.attempts, o.seed));
    return report(search_closed_positive(e.algebra, o.attempts, o.seed));
}

Json cmd_catalog_list()
{
    Json arr = Json::array();
    for (const auto& info : catalog::list()) {
        Json params = Json::array();
        for (const auto& p : info.params) {
            Json pj = {{"name", p.name}, {"range", p.range}};
            if (p.fallback) pj["default"] = to_string(*p.fallback);
            params.push_back(pj);
        }
        arr.push_back({{"id", info.id},
                       {"description", info.description},
                       {"params", params},
                       {"ambiguous", info.ambiguous},
                       {"user", info.user}});
    }
    return {{"entries", arr}};
}

// ---- output -------------------------------------------------------------------

void print_pretty(std::ostream& os, const Json& j, const std::string& prefix)
{
    if (j.is_object()) {
        if (j.contains("n") && j.contains("k") && j.contains("terms")) {
            std::string text;
            for (const auto& t : j.at("terms")) {
                std::string c = t.at("c").is_string() ? t.at("c").get<std::string>() : t.at("c").dump();
                std::string idx;
                for (const auto& l : t.at("idx")) idx += std::to_string(l.get<int>());
                const bool neg = !c.empty() && c[0] == '-';
                if (neg) c.erase(0, 1);
                if (text.empty()) text = neg ? "-" : "";
                else text += neg ? " - " : " + ";
                text += (c == "1" ? "" : c + " ") + "e" + idx;
            }
            os << prefix << ": " << (text.empty() ? "0" : text) << '\n';
            return;
        }
        for (const auto& [k, v] : j.items()) print_pretty(os, v, prefix.empty() ? k : prefix + "." + k);
        return;
    }
    os << prefix << ": " << (j.is_string() ? j.get<std::string>() : j.dump()) << '\n';
}

void emit(const Options& o, const Json& report)
{
    if (o.format == "pretty") print_pretty(std::cout, report, "");
    else std::cout << report.dump(2) << '\n';
}

} // namespace

int main(int argc, char** argv)
{
    Options o;
    CLI::App app{"g2lab: Lie-algebraic G2 and SU(3) structure toolkit"};
    app.require_subcommand(1);
    app.fallthrough();
    app.add_option("--format", o.format, "Output format")->check(CLI::IsMember({"json", "pretty"}));
    app.add_option("--seed", o.seed, "Random seed for searches");
    app.add_option("--backend", o.backend, "Scalar backend")->check(CLI::IsMember({"auto", "rational", "float"}));
    app.add_option("--jobs", o.jobs, "Parallel workers for parameter sweeps")->check(CLI::PositiveNumber);

    auto add_target = [&](CLI::App* sub) {
        sub->add_option("algebra", o.algebra, "Catalog id or Lie-algebra JSON file")->required();
        sub->add_option("--param", o.params, "name=value or name=v1,v2,... (rational)")->expected(1, -1);
    };
    auto add_phi = [&](CLI::App* sub) {
        sub->add_option("--phi", o.phi, "3-form, e.g. 'e127 + e347 - e146'");
        sub->add_option("--phi-file", o.phi_file, "3-form JSON file");
        sub->add_flag("--default", o.use_default, "Use the attached or standard structure");
    };

    auto* analyze = app.add_subcommand("analyze", "Structure, cohomology and derivations of an algebra");
    add_target(analyze);
    auto* g2 = app.add_subcommand("g2", "Torsion, curvature and ERP checks for a G2-structure");
    add_target(g2);
    add_phi(g2);
    g2->add_flag("--erp-diagnostics", o.erp, "Run the extremally Ricci-pinched checks");
    auto* su3 = app.add_subcommand("su3", "Reconstruct and classify an SU(3)-structure");
    add_target(su3);
    su3->add_option("--omega", o.omega, "2-form");
    su3->add_option("--psi", o.psi, "3-form");
    su3->add_flag("--default", o.use_default, "Use the attached or standard pair");
    auto* flow = app.add_subcommand("flow", "Integrate the Laplacian flow");
    add_target(flow);
    add_phi(flow);
    flow->add_option("--t-end", o.t_end, "Final time");
    flow->add_option("--dt", o.dt, "Initial step")->check(CLI::PositiveNumber);
    flow->add_option("--tol", o.tol, "Local error tolerance per unit time")->check(CLI::PositiveNumber);
    flow->add_option("--out", o.out, "Trajectory CSV path");
    flow->add_option("--compare", o.compare, "Closed-form reference")->check(CLI::IsMember({"lauret", "gabk"}));
    auto* soliton = app.add_subcommand("soliton", "Solve for an algebraic Laplacian soliton");
    add_target(soliton);
    add_phi(soliton);
    auto* search = app.add_subcommand("search-closed", "Sample closed positive 3-forms");
    add_target(search);
    search->add_option("--attempts", o.attempts, "Number of samples")->check(CLI::NonNegativeNumber);
    auto* cat = app.add_subcommand("catalog", "Catalog operations");
    auto* cat_list = cat->add_subcommand("list", "List catalog entries");
    cat->require_subcommand(1);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    CLI::App* used = app.get_subcommands().front();
    std::string command = used->get_name();
    if (used == cat) command = "catalog list";

    Json input = {{"command", command},
                  {"algebra", o.algebra},
                  {"params", o.params},
                  {"backend", o.backend},
                  {"seed", o.seed}};
    if (!o.phi.empty()) input["phi"] = o.phi;
    if (!o.phi_file.empty()) input["phi_file"] = o.phi_file;
    if (!o.omega.empty()) input["omega"] = o.omega;
    if (!o.psi.empty()) input["psi"] = o.psi;
    if (used == flow)
        input["flow"] = {{"t_end", o.t_end}, {"dt", o.dt}, {"tol", o.tol}, {"compare", o.compare}};
    if (used == search) input["attempts"] = o.attempts;
    if (used == g2) input["erp_diagnostics"] = o.erp;
    if (o.use_default) input["default"] = true;

    Json report = {{"schema", kSchema}, {"command", command}, {"input", input},
                   {"input_digest", io::fnv1a_hex(input.dump())}};
    int code = 0;
    try {
        (void)cat_list;
        if (used == cat) {
            report["status"] = "ok";
            report["result"] = cmd_catalog_list();
        } else {
            const std::vector<Params> sweep = expand_params(o.params);
            std::vector<Json> results(sweep.size());
            std::vector<std::optional<Error>> errors(sweep.size());
            std::vector<char> ambiguous(sweep.size(), 0);
            std::atomic<size_t> next{0};
            auto worker = [&] {
                for (size_t i = next++; i < sweep.size(); i = next++) {
                    try {
                        const catalog::Entry e = load_entry(o.algebra, sweep[i]);
                        bool amb = false;
                        if (used == analyze) results[i] = cmd_analyze(o, e);
                        else if (used == g2) results[i] = cmd_g2(o, e);
                        else if (used == su3) results[i] = cmd_su3(o, e);
                        else if (used == flow) results[i] = cmd_flow(o, e);
                        else if (used == soliton) results[i] = cmd_soliton(o, e, amb);
                        else results[i] = cmd_search(o, e);
                        ambiguous[i] = amb;
                        if (e.ambiguous) results[i]["ambiguous_entry"] = e.note;
                        if (e.phi_search_derived) results[i]["phi_search_derived"] = true;
                    } catch (const Error& err) {
                        errors[i] = err;
                    }
                }
            };
            const int workers = std::min<int>(o.jobs, static_cast<int>(sweep.size()));
            if (workers <= 1) {
                worker();
            } else {
                std::vector<std::thread> pool;
                for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
                for (auto& t : pool) t.join();
            }
            for (const auto& err : errors)
                if (err) throw *err;
            const bool any_ambiguous = std::any_of(ambiguous.begin(), ambiguous.end(), [](char c) { return c; });
            report["status"] = any_ambiguous ? "ambiguous" : "ok";
            if (sweep.size() == 1) {
                report["result"] = results.front();
            } else {
                Json arr = Json::array();
                for (size_t i = 0; i < sweep.size(); ++i)
                    arr.push_back({{"params", io::to_json(sweep[i])}, {"result", results[i]}});
                report["results"] = arr;
            }
            if (any_ambiguous) code = 5;
        }
    } catch (const Error& err) {
        report["status"] = "error";
        report["error"] = {{"kind", kind_name(err.kind())}, {"message", err.what()}};
        code = exit_code(err.kind());
    } catch (const std::exception& err) {
        report["status"] = "error";
        report["error"] = {{"kind", "internal"}, {"message", err.what()}};
        code = 1;
    }
    emit(o, report);
    return code;
}
