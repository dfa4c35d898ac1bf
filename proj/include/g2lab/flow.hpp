#pragma once

#include "g2lab/g2.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace g2lab {

/// Laplacian of a closed form through tau = -*d*phi (no least squares); the
/// flow right-hand side.
struct LaplacianEval
{
    KForm<double> tau;
    KForm<double> dtau;
    double tau_norm_sq = 0.0;
    double vol = 0.0;
};

LaplacianEval evaluate_laplacian(const LieAlgebra<double>& l, const KForm<double>& phi);

struct FlowConfig
{
    double t_end = 0.0;
    double dt0 = 1e-3;
    double tol = 1e-9;          ///< local error per unit time
    double blowup = 1e12;       ///< |tau|^2 threshold
    long max_steps = 2'000'000;
};

enum class FlowStatus { Completed, BlowupApproach };

std::string to_string(FlowStatus s);

struct FlowSample
{
    double t = 0.0;
    KForm<double> phi;
    double tau_norm_sq = 0.0;
    double scal = 0.0;
    double vol = 0.0;
    double closed_residual = 0.0;
};

struct FlowTrajectory
{
    std::vector<FlowSample> samples;
    FlowConfig config;
    FlowStatus status = FlowStatus::Completed;
    std::string message;
    long accepted = 0;
    long rejected = 0;
};

/// Integrates d/dt phi = d tau(phi) with classical RK4; the local error of a
/// step is |y_{h/2,h/2} - y_h|_inf / 15, accepted when below tol * h. Every
/// accepted step is recorded, including t_end. Throws if phi0 is not closed
/// or not positive.
FlowTrajectory laplacian_flow(const LieAlgebra<double>& l, const KForm<double>& phi0,
                              const FlowConfig& config);

/// 8a^2 - 4a - 4
double lauret_lambda(double a);

/// Closed-form flow on g_a from omega ^ eta + psi (a >= 1/4, a != 1).
KForm<double> lauret_solution(double a, double t);

/// (C1, C2, C3) = (C2^{-1/3}, (1 - 8/3 b^2 t)^{-9/8}, 1) for t < 3 / (8 b^2).
std::array<double, 3> gabk_solution(double b, double t);

/// Ansatz form C1 e127 + C2 e347 + C3 e567 + C2 (e135 - e146 - e236 - e245).
KForm<double> gabk_form(double b, double t);

double max_deviation_lauret(const FlowTrajectory& traj, double a);
double max_deviation_gabk(const FlowTrajectory& traj, double b);

struct AnsatzCoefficients
{
    std::array<double, 7> c{};
    bool closed_reduction = false;   ///< C7 = C6 = C5 = C4 = C2
};

/// Reads C1..C7 from C1 e127 + C2 e347 + C3 e567 + C4 e135 - C5 e146 - C6 e236 - C7 e245.
/// Empty when phi has support outside these monomials.
std::optional<AnsatzCoefficients> ansatz_coefficients(const KForm<double>& phi, double tol = 1e-12);

enum class SolitonStatus { Feasible, Infeasible, Ambiguous };

std::string to_string(SolitonStatus s);

template <Scalar S>
struct SolitonSolution
{
    SolitonStatus status = SolitonStatus::Infeasible;
    S lambda = S(0);
    Mat<S> B;
    double residual = 0.0;           ///< |d tau - lambda phi - B^* phi|
    double dtau_norm = 0.0;
    bool lambda_determined = true;   ///< false when phi lies in span{B^* phi}
    std::string character;           ///< shrinking | steady | expanding
    bool feasible() const { return status == SolitonStatus::Feasible; }
};

inline constexpr double kSolitonFeasible = 1e-8;
inline constexpr double kSolitonInfeasible = 1e-6;

/// Least squares of d tau = lambda phi + sum_i x_i B_i^* phi over lambda and a
/// basis B_i of derivations. Feasible below 1e-8 |d tau|, infeasible from
/// 1e-6 |d tau| on, ambiguous in between.
template <Scalar S>
SolitonSolution<S> algebraic_soliton_solve(const G2Structure<S>& g);

struct SelfSimilarReport
{
    double max_residual = 0.0;          ///< max_t |d tau(t) - lambda/s phi(t) - B^*phi(t)/s|
    double max_volume_deviation = 0.0;  ///< relative, against s^{7/2} exp(kappa tr B)
    bool passed = false;
};

/// s(t) = 1 + 2/3 lambda t and kappa(t) = int_0^t ds/s = 3/(2 lambda) ln s (t when lambda = 0).
SelfSimilarReport self_similar_check(const LieAlgebra<double>& l, const FlowTrajectory& traj,
                                     double lambda, const Mat<double>& b, double tol = 1e-6);

} // namespace g2lab
