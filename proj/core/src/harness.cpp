#include "uranex/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>
#include <set>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace uranex {

using nlohmann::json;

std::string to_string(ControllerKind c)
{
    switch (c) {
    case ControllerKind::OpenLoop: return "openloop";
    case ControllerKind::Pid: return "pid";
    case ControllerKind::Nmpc: return "nmpc";
    }
    return "unknown";
}

ControllerKind parse_controller(const std::string& name)
{
    if (name == "openloop") {
        return ControllerKind::OpenLoop;
    }
    if (name == "pid") {
        return ControllerKind::Pid;
    }
    if (name == "nmpc") {
        return ControllerKind::Nmpc;
    }
    throw ConfigError("unknown controller '" + name + "' (expected openloop, pid or nmpc)");
}

void Scenario::validate() const
{
    if (schedule.empty() || schedule.front().time != 0.0) {
        throw ConfigError("scenario " + name + ": schedule must start at t = 0");
    }
    for (std::size_t i = 0; i < schedule.size(); ++i) {
        if (!(schedule[i].p > 0.0)) {
            throw ConfigError("scenario " + name + ": solvent flow must be > 0");
        }
        if (i > 0 && !(schedule[i].time > schedule[i - 1].time)) {
            throw ConfigError("scenario " + name + ": schedule times must increase strictly");
        }
    }
    if (!(duration > 0.0) || schedule.back().time >= duration) {
        throw ConfigError("scenario " + name + ": schedule must lie within the duration");
    }
    if (!(T_s > 0.0) || !(h_sub > 0.0)) {
        throw ConfigError("scenario " + name + ": T_s and h_sub must be > 0");
    }
    const double k = duration / T_s;
    if (std::abs(k - std::round(k)) > 1e-9 * k) {
        throw ConfigError("scenario " + name + ": duration must be a multiple of T_s");
    }
}

int Scenario::steps() const { return static_cast<int>(std::lround(duration / T_s)); }

double Scenario::p_at(double t) const
{
    double p = schedule.front().p;
    for (const auto& e : schedule) {
        // Tolerate round-off in k * T_s against schedule times.
        if (e.time <= t + 1e-9 * T_s) {
            p = e.p;
        }
    }
    return p;
}

namespace {

SetPointEvent event_from(int step, const SetPoint& sp)
{
    return {step, sp.p, sp.u_set, sp.y_set(), sp.u_critical};
}

}  // namespace

RunResult run_scenario(const Scenario& sc, const FlowSheet& fs)
{
    sc.validate();
    const int K = sc.steps();
    const auto bounds = InputBounds::from(fs);
    const double p0 = sc.p_at(0.0);

    RunResult res;
    res.scenario = sc.name;
    res.controller = sc.controller;

    SetPoint active = critical_setpoint(p0, fs, fs.u_min, fs.u_max, sc.setpoint);
    res.setpoints.push_back(event_from(0, active));

    CascadeState x;
    double u_prev = active.u_set;
    switch (sc.initial.rule) {
    case InitialRule::UraniumFreeSteady: {
        FlowSheet blank = fs;
        blank.U_feed = 0.0;
        x = steady_state(active.u_set, p0, blank, std::nullopt, sc.setpoint.steady).x_ss;
        break;
    }
    case InitialRule::SteadyAt:
        u_prev = sc.initial.u;
        x = steady_state(u_prev, p0, fs, std::nullopt, sc.setpoint.steady).x_ss;
        break;
    case InitialRule::OverSaturated:
        u_prev = std::clamp(sc.initial.factor * active.u_critical, fs.u_min, fs.u_max);
        x = steady_state(u_prev, p0, fs, std::nullopt, sc.setpoint.steady).x_ss;
        break;
    case InitialRule::Explicit:
        if (!sc.initial.state || sc.initial.state->n_stages() != fs.n_stages) {
            throw ConfigError("scenario " + sc.name + ": explicit initial state missing or wrong size");
        }
        x = *sc.initial.state;
        break;
    }
    if (sc.initial.u_prev) {
        u_prev = *sc.initial.u_prev;
    }

    auto& traj = res.trajectory;
    traj.T_s = sc.T_s;
    traj.time.push_back(0.0);
    traj.states.push_back(x);

    PidState pid;
    pid.u_prev = u_prev;
    pid.T = sc.T_s;
    MpcOptions mpc = sc.mpc;
    mpc.T_s = sc.T_s;
    std::optional<std::vector<double>> warm;

    for (int k = 0; k < K; ++k) {
        const double t = k * sc.T_s;
        const double p = sc.p_at(t);
        if (p != active.p) {
            active = critical_setpoint(p, fs, fs.u_min, fs.u_max, sc.setpoint);
            res.setpoints.push_back(event_from(k, active));
        }
        res.y_set.push_back(active.y_set());
        res.u_set.push_back(active.u_set);

        double u = 0.0;
        switch (sc.controller) {
        case ControllerKind::OpenLoop:
            u = bounds.clamp(active.u_set, u_prev);
            break;
        case ControllerKind::Pid: {
            const auto out = pid_step(pid, sc.pid, x.loaded(), active.y_set(), active.u_set, bounds);
            pid = out.state;
            u = out.u;
            break;
        }
        case ControllerKind::Nmpc: {
            const auto t0 = std::chrono::steady_clock::now();
            MpcStepResult step_result;
            try {
                step_result = mpc_step(x, u_prev, active, p, fs, mpc, warm);
            } catch (const NumericalError& e) {
                throw NumericalError(e.what(), k);
            }
            const double secs =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            const auto& s = step_result.solution;
            auto& d = res.nmpc;
            ++d.solves;
            d.total_iterations += s.iterations;
            d.max_iterations = std::max(d.max_iterations, s.iterations);
            d.not_optimal += s.status == OcpStatus::Optimal ? 0 : 1;
            d.max_kkt = std::max(d.max_kkt, s.kkt_residual);
            for (double v : s.slacks) {
                d.max_slack = std::max(d.max_slack, v);
            }
            d.total_seconds += secs;
            d.max_seconds = std::max(d.max_seconds, secs);
            warm = shift_warm_start(s.u_star);
            u = step_result.u_applied;
            break;
        }
        }

        res.max_move = std::max(res.max_move, std::abs(u - u_prev));
        auto out = step(x, {u, p}, fs, sc.T_s, sc.h_sub);
        if (out.diverged) {
            throw NumericalError("run_scenario: divergence guard tripped; reduce h_sub", k);
        }
        x = std::move(out.x);
        traj.states.push_back(x);
        traj.inputs.push_back(u);
        traj.parameters.push_back(p);
        traj.clamped.push_back(out.clamped);
        traj.time.push_back((k + 1) * sc.T_s);
        u_prev = u;
    }
    res.y_set.push_back(active.y_set());
    res.u_set.push_back(active.u_set);

    res.extracted = extracted_uranium(traj, K);
    res.settling_time = settling_time(traj, res.y_set, 0.02);
    res.violation = violation_integral(traj, fs.raffinate_tol);
    for (const auto& s : traj.states) {
        res.max_raffinate = std::max(res.max_raffinate, s.raffinate());
    }
    return res;
}

double extracted_uranium(const Trajectory& traj, int k_f)
{
    if (k_f < 0 || static_cast<std::size_t>(k_f) >= traj.states.size()) {
        throw std::invalid_argument("extracted_uranium: k_f outside the trajectory");
    }
    if (traj.parameters.empty()) {
        return 0.0;
    }
    double sum = 0.0;
    for (int k = 0; k <= k_f; ++k) {
        const auto kk = std::min(static_cast<std::size_t>(k), traj.parameters.size() - 1);
        sum += traj.parameters[kk] * traj.states[static_cast<std::size_t>(k)].loaded();
    }
    return traj.T_s * sum;
}

double settling_time(const Trajectory& traj, std::span<const double> target, double band,
                     int from_step, int to_step)
{
    const int last = to_step < 0 ? static_cast<int>(traj.states.size()) - 1 : to_step;
    if (from_step < 0 || last >= static_cast<int>(traj.states.size()) || from_step > last ||
        target.size() < traj.states.size()) {
        throw std::invalid_argument("settling_time: window outside the trajectory");
    }
    int outside = -1;
    for (int k = from_step; k <= last; ++k) {
        const auto kk = static_cast<std::size_t>(k);
        if (std::abs(traj.states[kk].loaded() - target[kk]) > band * target[kk]) {
            outside = k;
        }
    }
    if (outside == last) {
        return std::numeric_limits<double>::infinity();
    }
    const int settled = outside < 0 ? from_step : outside + 1;
    return traj.time[static_cast<std::size_t>(settled)] - traj.time[static_cast<std::size_t>(from_step)];
}

double violation_integral(const Trajectory& traj, double tol)
{
    double sum = 0.0;
    for (std::size_t k = 0; k + 1 < traj.states.size(); ++k) {
        const double a = std::max(0.0, traj.states[k].raffinate() - tol);
        const double b = std::max(0.0, traj.states[k + 1].raffinate() - tol);
        sum += 0.5 * traj.T_s * (a + b);
    }
    return sum;
}

std::vector<ComparisonRow> compare(const std::vector<RunResult>& results)
{
    std::vector<ComparisonRow> rows;
    if (results.empty()) {
        return rows;
    }
    const auto& ref = results.front().trajectory;
    for (const auto& r : results) {
        if (r.trajectory.steps() != ref.steps() || r.trajectory.T_s != ref.T_s) {
            throw std::invalid_argument("compare: runs have different durations");
        }
    }
    double open_loop = std::numeric_limits<double>::quiet_NaN();
    for (const auto& r : results) {
        if (r.controller == ControllerKind::OpenLoop) {
            open_loop = r.extracted;
        }
    }
    for (auto kind : {ControllerKind::Nmpc, ControllerKind::Pid, ControllerKind::OpenLoop}) {
        for (const auto& r : results) {
            if (r.controller != kind) {
                continue;
            }
            ComparisonRow row;
            row.controller = to_string(kind);
            row.extracted = r.extracted;
            row.gain_vs_open_loop = 100.0 * (r.extracted / open_loop - 1.0);
            row.settling_time = r.settling_time;
            row.violation = r.violation;
            row.max_move = r.max_move;
            rows.push_back(row);
        }
    }
    return rows;
}

void write_comparison_csv(std::ostream& out, const std::vector<ComparisonRow>& rows)
{
    out << "controller,R,gain_vs_openloop_percent,settling_time_h,violation_integral,max_du\n";
    for (const auto& r : rows) {
        out << r.controller << ',' << format_number(r.extracted) << ','
            << format_number(r.gain_vs_open_loop) << ',' << format_number(r.settling_time) << ','
            << format_number(r.violation) << ',' << format_number(r.max_move) << '\n';
    }
}

void write_comparison_text(std::ostream& out, const std::vector<ComparisonRow>& rows)
{
    char buf[160];
    std::snprintf(buf, sizeof buf, "%-10s %12s %10s %12s %14s %8s\n", "controller", "R [mol]",
                  "gain [%]", "settle [h]", "violation", "max|du|");
    out << buf;
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%-10s %12.4f %10.3f %12.2f %14.6g %8.3f\n",
                      r.controller.c_str(), r.extracted, r.gain_vs_open_loop, r.settling_time,
                      r.violation, r.max_move);
        out << buf;
    }
}

void write_sweep_csv(std::ostream& out, const std::vector<SteadyPoint>& points)
{
    out << "u,p,raffinate_U,loaded_U,residual,newton_iterations\n";
    for (const auto& sp : points) {
        out << format_number(sp.u) << ',' << format_number(sp.p) << ','
            << format_number(sp.raffinate_U) << ',' << format_number(sp.loaded_U) << ','
            << format_number(sp.residual) << ',' << sp.newton_iterations << '\n';
    }
}

// ---------------------------------------------------------------------------
// Options

void to_json(json& j, const PidGains& g) { j = json{{"K_P", g.K_P}, {"K_I", g.K_I}, {"K_D", g.K_D}}; }

namespace {

void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& where)
{
    if (!j.is_object()) {
        throw ConfigError(where + ": expected an object");
    }
    for (const auto& item : j.items()) {
        if (!allowed.contains(item.key())) {
            throw ConfigError(where + ": unknown key '" + item.key() + "'");
        }
    }
}

template <typename T>
void read(const json& j, const char* key, T& out, const std::string& where)
{
    if (!j.contains(key)) {
        return;
    }
    try {
        out = j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(where + "." + key + ": " + e.what());
    }
}

template <typename T>
void read_optional(const json& j, const char* key, std::optional<T>& out, const std::string& where)
{
    if (!j.contains(key)) {
        return;
    }
    if (j.at(key).is_null()) {
        out.reset();
        return;
    }
    T v{};
    read(j, key, v, where);
    out = v;
}

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

void from_json(const json& j, PidGains& g)
{
    reject_unknown(j, {"K_P", "K_I", "K_D"}, "gains");
    for (const char* key : {"K_P", "K_I", "K_D"}) {
        if (!j.contains(key)) {
            throw ConfigError(std::string("gains: missing key '") + key + "'");
        }
    }
    read(j, "K_P", g.K_P, "gains");
    read(j, "K_I", g.K_I, "gains");
    read(j, "K_D", g.K_D, "gains");
    if (!std::isfinite(g.K_P) || !std::isfinite(g.K_I) || !std::isfinite(g.K_D)) {
        throw ConfigError("gains must be finite");
    }
}

void to_json(json& j, const HarnessOptions& o)
{
    const auto& m = o.mpc;
    const auto& p = o.pid;
    j = json{
        {"T_s", o.T_s},
        {"h_sub", o.h_sub},
        {"mpc",
         {{"horizon", m.horizon},
          {"h_sub_pred", m.h_sub_pred},
          {"q_scale", m.q_scale},
          {"p_scale", m.p_scale},
          {"R", optional_json(m.R)},
          {"S", optional_json(m.S)},
          {"rho", m.rho},
          {"kkt_tolerance", m.solver.kkt_tolerance},
          {"max_iterations", m.solver.max_iterations}}},
        {"pid",
         {{"gains", p.gains ? json(*p.gains) : json(nullptr)},
          {"initial", p.initial},
          {"steps", p.steps},
          {"r", p.r},
          {"s", p.s},
          {"starts", p.tune.starts},
          {"seed", p.tune.seed},
          {"max_iterations", p.tune.max_iterations},
          {"size_tolerance", p.tune.size_tolerance},
          {"scale", p.tune.scale}}},
        {"oversaturation", o.oversaturation},
        {"disturbance_times", o.disturbance_times},
        {"disturbance_factors", o.disturbance_factors},
        {"case_a_duration", o.case_a_duration},
        {"case_b_duration", o.case_b_duration},
        {"case_c_duration", o.case_c_duration},
        {"setpoint", {{"margin", o.setpoint.margin}, {"relative_width", o.setpoint.relative_width}}},
    };
}

void from_json(const json& j, HarnessOptions& o)
{
    reject_unknown(j,
                   {"T_s", "h_sub", "mpc", "pid", "oversaturation", "disturbance_times",
                    "disturbance_factors", "case_a_duration", "case_b_duration", "case_c_duration",
                    "setpoint"},
                   "options");
    read(j, "T_s", o.T_s, "options");
    read(j, "h_sub", o.h_sub, "options");
    read(j, "oversaturation", o.oversaturation, "options");
    read(j, "disturbance_times", o.disturbance_times, "options");
    read(j, "disturbance_factors", o.disturbance_factors, "options");
    read(j, "case_a_duration", o.case_a_duration, "options");
    read(j, "case_b_duration", o.case_b_duration, "options");
    read(j, "case_c_duration", o.case_c_duration, "options");
    if (j.contains("mpc")) {
        const auto& m = j.at("mpc");
        reject_unknown(m,
                       {"horizon", "h_sub_pred", "q_scale", "p_scale", "R", "S", "rho",
                        "kkt_tolerance", "max_iterations"},
                       "options.mpc");
        read(m, "horizon", o.mpc.horizon, "options.mpc");
        read(m, "h_sub_pred", o.mpc.h_sub_pred, "options.mpc");
        read(m, "q_scale", o.mpc.q_scale, "options.mpc");
        read(m, "p_scale", o.mpc.p_scale, "options.mpc");
        read_optional(m, "R", o.mpc.R, "options.mpc");
        read_optional(m, "S", o.mpc.S, "options.mpc");
        read(m, "rho", o.mpc.rho, "options.mpc");
        read(m, "kkt_tolerance", o.mpc.solver.kkt_tolerance, "options.mpc");
        read(m, "max_iterations", o.mpc.solver.max_iterations, "options.mpc");
    }
    if (j.contains("pid")) {
        const auto& p = j.at("pid");
        reject_unknown(p,
                       {"gains", "initial", "steps", "r", "s", "starts", "seed", "max_iterations",
                        "size_tolerance", "scale"},
                       "options.pid");
        if (p.contains("gains")) {
            if (p.at("gains").is_null()) {
                o.pid.gains.reset();
            } else {
                o.pid.gains = p.at("gains").get<PidGains>();
            }
        }
        if (p.contains("initial")) {
            o.pid.initial = p.at("initial").get<PidGains>();
        }
        if (p.contains("scale")) {
            o.pid.tune.scale = p.at("scale").get<PidGains>();
        }
        read(p, "steps", o.pid.steps, "options.pid");
        read(p, "r", o.pid.r, "options.pid");
        read(p, "s", o.pid.s, "options.pid");
        read(p, "starts", o.pid.tune.starts, "options.pid");
        read(p, "seed", o.pid.tune.seed, "options.pid");
        read(p, "max_iterations", o.pid.tune.max_iterations, "options.pid");
        read(p, "size_tolerance", o.pid.tune.size_tolerance, "options.pid");
    }
    if (j.contains("setpoint")) {
        const auto& s = j.at("setpoint");
        reject_unknown(s, {"margin", "relative_width"}, "options.setpoint");
        read(s, "margin", o.setpoint.margin, "options.setpoint");
        read(s, "relative_width", o.setpoint.relative_width, "options.setpoint");
    }

    if (!(o.T_s > 0.0) || !(o.h_sub > 0.0) || !(o.mpc.h_sub_pred > 0.0)) {
        throw ConfigError("options: T_s, h_sub and h_sub_pred must be > 0");
    }
    if (o.mpc.horizon < 1 || o.mpc.solver.max_iterations < 1 || !(o.mpc.solver.kkt_tolerance > 0.0)) {
        throw ConfigError("options.mpc: horizon, max_iterations and kkt_tolerance must be positive");
    }
    if (!(o.mpc.q_scale > 0.0) || !(o.mpc.p_scale > 0.0) || (o.mpc.R && !(*o.mpc.R > 0.0)) ||
        (o.mpc.S && !(*o.mpc.S > 0.0))) {
        throw ConfigError("options.mpc: weights must be > 0");
    }
    if (o.pid.steps < 1 || o.pid.tune.starts < 5) {
        throw ConfigError("options.pid: need steps >= 1 and at least 5 starts");
    }
    if (o.disturbance_times.size() != o.disturbance_factors.size()) {
        throw ConfigError("options: disturbance_times and disturbance_factors differ in length");
    }
    if (!(o.oversaturation > 1.0)) {
        throw ConfigError("options: oversaturation must be > 1");
    }
    if (!(o.setpoint.margin > 0.0) || !(o.setpoint.margin <= 1.0)) {
        throw ConfigError("options.setpoint: margin must lie in (0, 1]");
    }
}

HarnessOptions load_options(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open options file " + path.string());
    }
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("options file " + path.string() + ": " + e.what());
    }
    return doc.get<HarnessOptions>();
}

// ---------------------------------------------------------------------------
// Cases

PidTuningProblem nominal_tuning_problem(const FlowSheet& fs, const HarnessOptions& o)
{
    const double p0 = fs.O_E_nominal;
    PidTuningProblem prob;
    prob.setpoint = critical_setpoint(p0, fs, fs.u_min, fs.u_max, o.setpoint);
    FlowSheet blank = fs;
    blank.U_feed = 0.0;
    prob.x0 = steady_state(prob.setpoint.u_set, p0, blank, std::nullopt, o.setpoint.steady).x_ss;
    prob.p = p0;
    prob.u_prev = prob.setpoint.u_set;
    prob.steps = o.pid.steps;
    prob.T_s = o.T_s;
    prob.h_sub = o.h_sub;
    prob.r = o.pid.r;
    prob.s = o.pid.s;
    return prob;
}

PidGains resolve_pid_gains(const FlowSheet& fs, const HarnessOptions& o,
                           std::optional<TuneResult>* report)
{
    if (o.pid.gains) {
        return *o.pid.gains;
    }
    auto result = tune_pid(fs, nominal_tuning_problem(fs, o), o.pid.initial, o.pid.tune);
    if (!result.improved) {
        throw NumericalError("tune_pid: no start improved on the zero-gain baseline");
    }
    const PidGains g = result.gains;
    if (report) {
        *report = std::move(result);
    }
    return g;
}

Scenario make_case(char which, ControllerKind controller, const FlowSheet& fs,
                   const HarnessOptions& o, const PidGains& gains)
{
    const double p0 = fs.O_E_nominal;
    Scenario sc;
    sc.controller = controller;
    sc.schedule.push_back({0.0, p0});
    sc.T_s = o.T_s;
    sc.h_sub = o.h_sub;
    sc.mpc = o.mpc;
    sc.mpc.T_s = o.T_s;
    sc.pid = gains;
    sc.setpoint = o.setpoint;
    switch (which) {
    case 'A':
        sc.name = "A";
        sc.duration = o.case_a_duration;
        break;
    case 'B':
        sc.name = "B";
        sc.duration = o.case_b_duration;
        for (std::size_t i = 0; i < o.disturbance_times.size(); ++i) {
            sc.schedule.push_back({o.disturbance_times[i], o.disturbance_factors[i] * p0});
        }
        break;
    case 'C':
        sc.name = "C";
        sc.duration = o.case_c_duration;
        sc.initial.rule = InitialRule::OverSaturated;
        sc.initial.factor = o.oversaturation;
        break;
    default:
        throw ConfigError(std::string("unknown case '") + which + "' (expected A, B or C)");
    }
    sc.validate();
    return sc;
}

namespace {

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

json make_manifest(const FlowSheet& fs, const HarnessOptions& o, char which,
                   const std::vector<RunResult>& results, const std::optional<TuneResult>& tuning)
{
    json runs = json::array();
    for (const auto& r : results) {
        json sps = json::array();
        for (const auto& e : r.setpoints) {
            sps.push_back({{"step", e.step},
                           {"p", e.p},
                           {"u_set", e.u_set},
                           {"y_set", e.y_set},
                           {"u_critical", e.u_critical}});
        }
        json run{{"controller", to_string(r.controller)},
                 {"setpoints", sps},
                 {"metrics",
                  {{"R", r.extracted},
                   {"settling_time", finite_or_null(r.settling_time)},
                   {"violation_integral", r.violation},
                   {"max_raffinate", r.max_raffinate},
                   {"max_du", r.max_move}}}};
        if (r.controller == ControllerKind::Nmpc) {
            run["nmpc"] = {{"solves", r.nmpc.solves},
                           {"total_iterations", r.nmpc.total_iterations},
                           {"max_iterations", r.nmpc.max_iterations},
                           {"not_optimal", r.nmpc.not_optimal},
                           {"max_kkt", r.nmpc.max_kkt},
                           {"max_slack", r.nmpc.max_slack}};
        }
        runs.push_back(std::move(run));
    }
    json doc{{"case", std::string(1, which)},
             {"flowsheet", fs},
             {"options", o},
             {"runs", runs}};
    if (tuning) {
        json starts = json::array();
        for (const auto& s : tuning->starts) {
            starts.push_back({{"initial", s.initial},
                              {"initial_objective", s.initial_objective},
                              {"tuned", s.tuned},
                              {"tuned_objective", s.tuned_objective},
                              {"iterations", s.iterations}});
        }
        doc["tuning"] = {{"seed", tuning->seed},
                         {"gains", tuning->gains},
                         {"objective", tuning->objective},
                         {"baseline_objective", tuning->baseline_objective},
                         {"starts", starts}};
    }
    return doc;
}

}  // namespace uranex
