#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "uranex/cascade.hpp"
#include "uranex/nmpc.hpp"
#include "uranex/pid.hpp"
#include "uranex/steady_state.hpp"

namespace uranex {

enum class ControllerKind { OpenLoop, Pid, Nmpc };
std::string to_string(ControllerKind c);
ControllerKind parse_controller(const std::string& name);  // throws ConfigError

/// Piecewise-constant solvent flow: value holds from time until the next entry.
struct ScheduleEntry {
    double time = 0.0;  // h
    double p = 0.0;     // L/h
};

enum class InitialRule {
    UraniumFreeSteady,  // steady state at u_set(p0) with no uranium in the feed
    SteadyAt,           // steady state at (u, p0)
    OverSaturated,      // steady state at factor * A_F*(p0)
    Explicit,
};

struct InitialCondition {
    InitialRule rule = InitialRule::UraniumFreeSteady;
    double u = 0.0;       // SteadyAt only
    double factor = 1.2;  // OverSaturated only
    std::optional<CascadeState> state;  // Explicit only
    std::optional<double> u_prev;       // input before t = 0; defaults to the initial feed
};

struct Scenario {
    std::string name;
    ControllerKind controller = ControllerKind::OpenLoop;
    InitialCondition initial;
    std::vector<ScheduleEntry> schedule;  // first entry at t = 0
    double duration = 30.0;               // h
    double T_s = 0.5;
    double h_sub = 1e-3;
    MpcOptions mpc;
    PidGains pid;
    SetPointOptions setpoint;

    /// Throws ConfigError on an empty or unordered schedule or a bad duration.
    void validate() const;
    [[nodiscard]] int steps() const;
    [[nodiscard]] double p_at(double t) const;
};

struct SetPointEvent {
    int step = 0;  // first control step using this set point
    double p = 0.0;
    double u_set = 0.0;
    double y_set = 0.0;
    double u_critical = 0.0;
};

struct NmpcDiagnostics {
    int solves = 0;
    int total_iterations = 0;
    int max_iterations = 0;
    int not_optimal = 0;
    double max_kkt = 0.0;
    double max_slack = 0.0;
    double total_seconds = 0.0;  // wall clock, not part of any reproducible output
    double max_seconds = 0.0;
};

struct RunResult {
    std::string scenario;
    ControllerKind controller = ControllerKind::OpenLoop;
    Trajectory trajectory;
    std::vector<SetPointEvent> setpoints;
    std::vector<double> y_set;   // active target per state sample
    std::vector<double> u_set;   // active u_set per state sample
    double extracted = 0.0;      // R over the full run
    double settling_time = 0.0;  // 2 % band around the final target; infinity if never
    double violation = 0.0;      // integral of max(0, x_17 - tol), mol h / L
    double max_raffinate = 0.0;
    double max_move = 0.0;       // max |u(k) - u(k-1)| including the first step
    NmpcDiagnostics nmpc;
};

/// Closed-loop run at the control rate. Throws NumericalError with the step index.
RunResult run_scenario(const Scenario& sc, const FlowSheet& fs);

/// T_s * sum_{k=0}^{k_f} O_E(k) y(k); the input of the last interval is held
/// for the final sample.
double extracted_uranium(const Trajectory& traj, int k_f);

/// First time after which |y - target| <= band * target for every later sample.
double settling_time(const Trajectory& traj, std::span<const double> target, double band,
                     int from_step = 0, int to_step = -1);

/// Trapezoidal integral of max(0, x_17 - tol).
double violation_integral(const Trajectory& traj, double tol);

struct ComparisonRow {
    std::string controller;
    double extracted = 0.0;
    double gain_vs_open_loop = 0.0;  // percent; NaN without an open-loop row
    double settling_time = 0.0;
    double violation = 0.0;
    double max_move = 0.0;
};

/// Rows ordered nmpc, pid, open-loop. Throws std::invalid_argument if durations differ.
std::vector<ComparisonRow> compare(const std::vector<RunResult>& results);
void write_comparison_csv(std::ostream& out, const std::vector<ComparisonRow>& rows);
void write_comparison_text(std::ostream& out, const std::vector<ComparisonRow>& rows);

void write_sweep_csv(std::ostream& out, const std::vector<SteadyPoint>& points);

/// Tuning settings for the PID baseline. When gains are present the tuner is skipped.
struct PidSettings {
    std::optional<PidGains> gains;
    PidGains initial{20.0, 5.0, 0.0};
    int steps = 30;
    double r = 0.0;  // <= 0 selects 1 / u_set^2
    double s = 0.0;
    TuneOptions tune;
};

/// Everything outside the flowsheet that a run depends on.
struct HarnessOptions {
    double T_s = 0.5;
    double h_sub = 1e-3;
    MpcOptions mpc;
    PidSettings pid;
    double oversaturation = 1.2;  // Case C initial feed, multiple of A_F*
    std::vector<double> disturbance_times{30.0, 60.0, 90.0};
    std::vector<double> disturbance_factors{1.5, 1.0, 0.5};  // multiples of O_E nominal
    double case_a_duration = 30.0;
    double case_b_duration = 120.0;
    double case_c_duration = 30.0;
    SetPointOptions setpoint;
};

void to_json(nlohmann::json& j, const HarnessOptions& o);
/// Strict about unknown keys; absent keys keep their defaults.
void from_json(const nlohmann::json& j, HarnessOptions& o);
HarnessOptions load_options(const std::filesystem::path& path);

void to_json(nlohmann::json& j, const PidGains& g);
void from_json(const nlohmann::json& j, PidGains& g);

/// Nominal tuning problem: Case A start, N_PID steps.
PidTuningProblem nominal_tuning_problem(const FlowSheet& fs, const HarnessOptions& o);
/// Gains from the options if present, otherwise tuned; tuning fills *report.
PidGains resolve_pid_gains(const FlowSheet& fs, const HarnessOptions& o,
                           std::optional<TuneResult>* report = nullptr);

/// Case 'A', 'B' or 'C' for one controller.
Scenario make_case(char which, ControllerKind controller, const FlowSheet& fs,
                   const HarnessOptions& o, const PidGains& gains);

/// Run manifest: resolved flowsheet, options (gains included), case,
/// controllers, set points and metrics.
nlohmann::json make_manifest(const FlowSheet& fs, const HarnessOptions& o, char which,
                             const std::vector<RunResult>& results,
                             const std::optional<TuneResult>& tuning);

}  // namespace uranex
