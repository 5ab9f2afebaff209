#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "uranex/cascade.hpp"
#include "uranex/steady_state.hpp"

namespace uranex {

/// Box and rate limits on the feed flow, L/h and L/h per control step.
struct InputBounds {
    double u_min = 0.0;
    double u_max = 0.0;
    double du_min = 0.0;
    double du_max = 0.0;

    static InputBounds from(const FlowSheet& fs) { return {fs.u_min, fs.u_max, fs.du_min, fs.du_max}; }

    /// Box clamp followed by rate clamp against the previously applied input.
    [[nodiscard]] double clamp(double u, double u_prev) const;
};

/// Diagonal state weights and scalar input weights of the tracking cost.
struct MpcWeights {
    std::vector<double> Q;  // stage cost diagonal
    std::vector<double> P;  // terminal cost diagonal
    double R = 0.0;         // on (u - u_set)^2
    double S = 0.0;         // on successive input differences

    /// Q = P = I and R = S = 1 / u_set.
    static MpcWeights standard(int n_states, double u_set);

    /// Throws ConfigError unless every weight is finite and strictly positive.
    void validate(std::size_t n_states) const;
};

struct OcpSpec {
    CascadeState x_k;
    double u_prev = 0.0;  // input applied over the previous control interval
    SetPoint setpoint;
    double p_hat = 0.0;   // solvent flow held constant over the horizon
    int horizon = 10;
    double T_s = 0.5;
    double h_sub = 1e-3;  // prediction substep
    MpcWeights weights;
    InputBounds bounds;
    double raffinate_tol = 1e-3;
    double rho = 0.0;     // L1 slack weight; <= 0 selects 1e6 * max(Q)
};

enum class OcpStatus { Optimal, MaxIterations, LineSearchFailure };
std::string to_string(OcpStatus s);

struct OcpSolution {
    std::vector<double> u_star;
    std::vector<CascadeState> predicted;  // horizon + 1 states, predicted[0] = x_k
    double objective = 0.0;               // including the slack penalty
    std::vector<double> slacks;           // max(0, x_raffinate(i) - tol), i = 1..horizon
    int iterations = 0;
    double kkt_residual = 0.0;
    OcpStatus status = OcpStatus::MaxIterations;
};

/// Model evaluation along one input sequence.
struct ShootingEval {
    std::vector<CascadeState> states;  // horizon + 1
    double tracking = 0.0;             // cost without the slack penalty
    std::vector<double> raffinate;     // predicted x_17 at i = 1..horizon
    // With derivatives:
    Eigen::VectorXd gradient;          // d tracking / du
    Eigen::MatrixXd gauss_newton;      // Gauss-Newton Hessian of tracking
    Eigen::MatrixXd raffinate_jacobian;  // d raffinate_i / du_j
};

/**
 * Single-shooting transcription of the tracking problem. Decision variables
 * are the horizon inputs; the raffinate limit is softened with one L1 slack
 * per predicted step. Sensitivities come from forward-mode differentiation
 * of the Euler map, so they are exact for the discrete model.
 */
class OcpProblem {
public:
    OcpProblem(OcpSpec spec, const FlowSheet& fs);

    [[nodiscard]] int horizon() const { return spec_.horizon; }
    [[nodiscard]] const OcpSpec& spec() const { return spec_; }
    [[nodiscard]] double rho() const { return rho_; }

    [[nodiscard]] ShootingEval evaluate(std::span<const double> u, bool derivatives) const;
    /// Exact-penalty objective: tracking + rho * sum(max(0, raffinate_i - tol)).
    [[nodiscard]] double merit(const ShootingEval& e) const;
    [[nodiscard]] double objective(std::span<const double> u) const;

    /// Sequentially clamp a sequence into the box and rate limits.
    [[nodiscard]] std::vector<double> make_feasible(std::span<const double> u) const;
    [[nodiscard]] bool feasible(std::span<const double> u, double tol) const;

private:
    OcpSpec spec_;
    const FlowSheet* fs_;
    double rho_;
    int n_sub_;
    std::vector<double> x_set_;
};

OcpProblem build_ocp(const OcpSpec& spec, const FlowSheet& fs);

struct SolverOptions {
    double kkt_tolerance = 1e-6;
    int max_iterations = 200;
};

/// Sl1QP: sequential QPs on the slack-augmented problem with an exact-penalty
/// line search. warm_start is used as given after being made feasible; the
/// default start repeats u_prev.
OcpSolution solve_ocp(const OcpProblem& problem,
                      const std::optional<std::vector<double>>& warm_start = std::nullopt,
                      const SolverOptions& options = {});

/// Shift a previous solution by one step, repeating its last input.
std::vector<double> shift_warm_start(std::span<const double> previous);

struct MpcOptions {
    int horizon = 10;
    double T_s = 0.5;
    double h_sub_pred = 1e-3;
    double q_scale = 1.0;  // Q = q_scale * I
    double p_scale = 1.0;  // P = p_scale * I
    std::optional<double> R;  // default 1 / u_set
    std::optional<double> S;  // default 1 / u_set
    double rho = 0.0;         // <= 0 selects 1e6 * q_scale
    SolverOptions solver;

    [[nodiscard]] MpcWeights weights_for(int n_states, double u_set) const;
};

struct MpcStepResult {
    double u_applied = 0.0;
    OcpSolution solution;
};

/// Build and solve the horizon problem from x_k, then return the first input
/// clamped to the box and rate limits.
MpcStepResult mpc_step(const CascadeState& x_k, double u_prev, const SetPoint& setpoint,
                       double p_now, const FlowSheet& fs, const MpcOptions& options,
                       const std::optional<std::vector<double>>& warm_start = std::nullopt);

}  // namespace uranex
