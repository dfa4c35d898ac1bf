#include "g2lab/flow.hpp"
#include "g2lab/linalg.hpp"

#include <cmath>
#include <limits>

namespace g2lab {

LaplacianEval evaluate_laplacian(const LieAlgebra<double>& l, const KForm<double>& phi)
{
    const MetricData<double> m = metric_from_phi(phi);
    const KForm<double> psi(7, 4, hodge_matrix(m, 3) * phi.coeffs());
    const KForm<double> dpsi = ce_differential(l, psi);
    LaplacianEval out;
    out.tau = KForm<double>(7, 2, -(hodge_matrix(m, 5) * dpsi.coeffs()));
    out.dtau = ce_differential(l, out.tau);
    out.tau_norm_sq = norm_sq(m, out.tau);
    out.vol = m.vol;
    return out;
}

std::string to_string(FlowStatus s)
{
    return s == FlowStatus::Completed ? "completed" : "blowup-approach";
}

namespace {

using State = Vec<double>;

struct Rk4
{
    const LieAlgebra<double>& l;

    State rhs(const State& y) const
    {
        return evaluate_laplacian(l, KForm<double>(7, 3, y)).dtau.coeffs();
    }

    State step(const State& y, const State& k1, double h) const
    {
        const State k2 = rhs(y + h / 2 * k1);
        const State k3 = rhs(y + h / 2 * k2);
        const State k4 = rhs(y + h * k3);
        return y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
    }
};

FlowSample sample_at(const LieAlgebra<double>& l, double t, const State& y)
{
    FlowSample s;
    s.t = t;
    s.phi = KForm<double>(7, 3, y);
    const LaplacianEval e = evaluate_laplacian(l, s.phi);
    s.tau_norm_sq = e.tau_norm_sq;
    s.scal = -e.tau_norm_sq / 2;
    s.vol = e.vol;
    s.closed_residual = ce_differential(l, s.phi).max_abs();
    return s;
}

} // namespace

FlowTrajectory laplacian_flow(const LieAlgebra<double>& l, const KForm<double>& phi0,
                              const FlowConfig& config)
{
    if (l.dim() != 7 || phi0.dim() != 7 || phi0.degree() != 3)
        fail(ErrorKind::Usage, "the Laplacian flow needs a 3-form on a 7-dimensional algebra");
    if (!(config.dt0 > 0) || !(config.tol > 0)) fail(ErrorKind::Usage, "dt and tol must be positive");
    if (!is_positive(phi0)) fail(ErrorKind::InvalidStructure, "not a positive 3-form");
    const double scale = std::max(1.0, phi0.max_abs());
    if (ce_differential(l, phi0).max_abs() > 1e-10 * scale) fail(ErrorKind::InvalidStructure, "not closed");

    FlowTrajectory traj;
    traj.config = config;
    const Rk4 rk{l};
    State y = phi0.coeffs();
    double t = 0.0;
    double h = config.dt0;
    traj.samples.push_back(sample_at(l, t, y));

    auto stop = [&](const std::string& why) {
        traj.status = FlowStatus::BlowupApproach;
        traj.message = why;
    };

    while (t < config.t_end) {
        if (traj.accepted + traj.rejected >= config.max_steps) {
            stop("step budget exhausted at t = " + to_string(t));
            break;
        }
        const bool last = t + h >= config.t_end;
        const double step = last ? config.t_end - t : h;
        State full, half;
        try {
            const State k1 = rk.rhs(y);
            full = rk.step(y, k1, step);
            const State mid = rk.step(y, k1, step / 2);
            half = rk.step(mid, rk.rhs(mid), step / 2);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::InvalidStructure) throw;
            ++traj.rejected;
            h = step / 2;
            if (h < 1e-14 * std::max(1.0, t)) {
                stop("positivity lost near t = " + to_string(t));
                break;
            }
            continue;
        }
        const double err = (half - full).cwiseAbs().maxCoeff() / 15;
        if (err > config.tol * step) {
            ++traj.rejected;
            h = step / 2;
            if (h < 1e-14 * std::max(1.0, t)) {
                stop("step size underflow near t = " + to_string(t));
                break;
            }
            continue;
        }
        ++traj.accepted;
        t = last ? config.t_end : t + step;
        y = half;
        FlowSample s;
        try {
            s = sample_at(l, t, y);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::InvalidStructure) throw;
            stop("positivity lost at t = " + to_string(t));
            break;
        }
        if (s.closed_residual > 1e-8 * std::max(1.0, s.phi.max_abs()))
            fail(ErrorKind::Numerical, "flow left the closed cone at t = " + to_string(t));
        traj.samples.push_back(std::move(s));
        if (traj.samples.back().tau_norm_sq > config.blowup) {
            stop("|tau|^2 exceeded " + to_string(config.blowup) + " at t = " + to_string(t));
            break;
        }
        if (!last && err < config.tol * step / 32) h = 2 * step;
        else if (!last) h = step;
    }
    return traj;
}

double lauret_lambda(double a)
{
    return 8 * a * a - 4 * a - 4;
}

KForm<double> lauret_solution(double a, double t)
{
    if (!(a >= 0.25)) fail(ErrorKind::InvalidAlgebra, "the closed-form solution needs a >= 1/4");
    if (a == 1.0) fail(ErrorKind::InvalidAlgebra, "the closed-form solution excludes a = 1");
    const double lambda = lauret_lambda(a);
    const double edge = -3 / (2 * lambda);
    if ((a < 1 && !(t < edge)) || (a > 1 && !(t > edge)))
        fail(ErrorKind::Usage, "t = " + to_string(t) + " is outside the maximal interval of existence");
    const double at = 2.0 / 3.0 * lambda * t + 1;
    const double q1 = 3 * a / (2 * (2 * a + 1));
    const double q2 = 3 * (2 * a - 1) / (8 * (a - 1));
    const double q3 = 9 / (8 * (2 * a + 1) * (a - 1));
    KForm<double> phi(7, 3);
    phi.set(basis::from_labels({1, 2, 7}), std::pow(at, q1));
    phi.set(basis::from_labels({3, 4, 7}), std::pow(at, q2));
    const double c3 = std::pow(at, q3);
    phi.set(basis::from_labels({5, 6, 7}), c3);
    phi.set(basis::from_labels({1, 3, 5}), c3);
    phi.set(basis::from_labels({1, 4, 6}), -c3);
    phi.set(basis::from_labels({2, 3, 6}), -c3);
    phi.set(basis::from_labels({2, 4, 5}), -c3);
    return phi;
}

std::array<double, 3> gabk_solution(double b, double t)
{
    if (b == 0) fail(ErrorKind::InvalidAlgebra, "the closed-form solution needs b != 0");
    if (!(t < 3 / (8 * b * b)))
        fail(ErrorKind::Usage, "t = " + to_string(t) + " is outside (-inf, 3/(8 b^2))");
    const double c2 = std::pow(1 - 8.0 / 3.0 * b * b * t, -9.0 / 8.0);
    return {std::pow(c2, -1.0 / 3.0), c2, 1.0};
}

KForm<double> gabk_form(double b, double t)
{
    const auto c = gabk_solution(b, t);
    KForm<double> phi(7, 3);
    phi.set(basis::from_labels({1, 2, 7}), c[0]);
    phi.set(basis::from_labels({3, 4, 7}), c[1]);
    phi.set(basis::from_labels({5, 6, 7}), c[2]);
    phi.set(basis::from_labels({1, 3, 5}), c[1]);
    phi.set(basis::from_labels({1, 4, 6}), -c[1]);
    phi.set(basis::from_labels({2, 3, 6}), -c[1]);
    phi.set(basis::from_labels({2, 4, 5}), -c[1]);
    return phi;
}

double max_deviation_lauret(const FlowTrajectory& traj, double a)
{
    double dev = 0.0;
    for (const auto& s : traj.samples) dev = std::max(dev, (s.phi - lauret_solution(a, s.t)).max_abs());
    return dev;
}

double max_deviation_gabk(const FlowTrajectory& traj, double b)
{
    double dev = 0.0;
    for (const auto& s : traj.samples) {
        const auto ansatz = ansatz_coefficients(s.phi, 1e-9);
        if (!ansatz) return std::numeric_limits<double>::infinity();
        const auto ref = gabk_solution(b, s.t);
        const std::array<double, 7> want = {ref[0], ref[1], ref[2], ref[1], ref[1], ref[1], ref[1]};
        for (size_t i = 0; i < 7; ++i) dev = std::max(dev, std::abs(ansatz->c[i] - want[i]));
    }
    return dev;
}

std::optional<AnsatzCoefficients> ansatz_coefficients(const KForm<double>& phi, double tol)
{
    if (phi.dim() != 7 || phi.degree() != 3) return std::nullopt;
    const std::array<std::pair<Mask, double>, 7> slots = {{
        {basis::from_labels({1, 2, 7}), 1},
        {basis::from_labels({3, 4, 7}), 1},
        {basis::from_labels({5, 6, 7}), 1},
        {basis::from_labels({1, 3, 5}), 1},
        {basis::from_labels({1, 4, 6}), -1},
        {basis::from_labels({2, 3, 6}), -1},
        {basis::from_labels({2, 4, 5}), -1},
    }};
    KForm<double> rest = phi;
    AnsatzCoefficients out;
    for (size_t i = 0; i < slots.size(); ++i) {
        out.c[i] = slots[i].second * phi.coeff(slots[i].first);
        rest.set(slots[i].first, 0.0);
    }
    if (rest.max_abs() > tol * std::max(1.0, phi.max_abs())) return std::nullopt;
    const double scale = std::max(1.0, phi.max_abs());
    out.closed_reduction = true;
    for (size_t i : {3u, 4u, 5u, 6u})
        if (std::abs(out.c[i] - out.c[1]) > tol * scale) out.closed_reduction = false;
    return out;
}

std::string to_string(SolitonStatus s)
{
    switch (s) {
    case SolitonStatus::Feasible: return "feasible";
    case SolitonStatus::Infeasible: return "infeasible";
    case SolitonStatus::Ambiguous: return "ambiguous";
    }
    return "ambiguous";
}

template <Scalar S>
SolitonSolution<S> algebraic_soliton_solve(const G2Structure<S>& g)
{
    const auto t = torsion_form(g);
    const auto der = derivation_space(g.algebra());
    const KForm<S>& phi = g.phi();
    Mat<S> a(35, 1 + der.dim());
    a.col(0) = phi.coeffs();
    for (int i = 0; i < der.dim(); ++i)
        a.col(1 + i) = endo_action(der.basis[static_cast<size_t>(i)], phi).coeffs();
    const auto ls = linalg::least_squares<S>(a, t.dtau.coeffs());

    SolitonSolution<S> out;
    out.lambda = ls.x(0);
    out.B = Mat<S>::Zero(7, 7);
    for (int i = 0; i < der.dim(); ++i) out.B += ls.x(1 + i) * der.basis[static_cast<size_t>(i)];
    out.residual = ls.residual();
    out.dtau_norm = std::sqrt(to_double(S(t.dtau.coeffs().squaredNorm())));
    out.lambda_determined = linalg::rank<S>(a) > linalg::rank<S>(Mat<S>(a.rightCols(der.dim())));

    const double rel = out.dtau_norm > 0 ? out.residual / out.dtau_norm : out.residual;
    if (rel < kSolitonFeasible) out.status = SolitonStatus::Feasible;
    else if (rel >= kSolitonInfeasible) out.status = SolitonStatus::Infeasible;
    else out.status = SolitonStatus::Ambiguous;

    const double lambda = to_double(out.lambda);
    const double zero = ScalarTraits<S>::exact ? 0.0 : 1e-9 * std::max(1.0, out.dtau_norm);
    out.character = lambda < -zero ? "shrinking" : lambda > zero ? "expanding" : "steady";
    return out;
}

SelfSimilarReport self_similar_check(const LieAlgebra<double>& l, const FlowTrajectory& traj,
                                     double lambda, const Mat<double>& b, double tol)
{
    if (traj.samples.empty()) fail(ErrorKind::Usage, "empty trajectory");
    if (b.rows() != 7 || b.cols() != 7) fail(ErrorKind::Usage, "B must be 7 x 7");
    SelfSimilarReport r;
    const double vol0 = traj.samples.front().vol;
    const double trace = b.trace();
    for (const auto& s : traj.samples) {
        const double sc = 1 + 2.0 / 3.0 * lambda * s.t;
        if (!(sc > 0)) fail(ErrorKind::Usage, "sample beyond the soliton's existence interval");
        const LaplacianEval e = evaluate_laplacian(l, s.phi);
        const KForm<double> defect = e.dtau - lambda / sc * s.phi - endo_action(b, s.phi) / sc;
        r.max_residual = std::max(r.max_residual, defect.max_abs());
        const double kappa = lambda == 0 ? s.t : 3 / (2 * lambda) * std::log(sc);
        const double predicted = std::pow(sc, 3.5) * std::exp(kappa * trace);
        r.max_volume_deviation =
            std::max(r.max_volume_deviation, std::abs(e.vol / vol0 - predicted) / predicted);
    }
    r.passed = r.max_residual < tol && r.max_volume_deviation < tol;
    return r;
}

template SolitonSolution<double> algebraic_soliton_solve<double>(const G2Structure<double>&);
template SolitonSolution<Rational> algebraic_soliton_solve<Rational>(const G2Structure<Rational>&);

} // namespace g2lab
