// uranex: steady-state sweeps, set points and closed-loop case studies for the
// extraction cascade.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "uranex/harness.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace uranex;

namespace {

struct Common {
    std::string config;
    std::string options;
    std::string manifest;
    std::string out = ".";
    std::optional<int> horizon;
    std::optional<double> ts;
    std::optional<double> hsub;
};

struct Setup {
    FlowSheet flowsheet;
    HarnessOptions options;
    std::optional<char> manifest_case;
    std::vector<ControllerKind> manifest_controllers;
    json manifest_tuning;
};

json read_json(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open " + path);
    }
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

Setup load(const Common& c)
{
    Setup s;
    if (!c.manifest.empty()) {
        const json doc = read_json(c.manifest);
        try {
            s.flowsheet = parse_flowsheet(doc.at("flowsheet"));
            s.options = doc.at("options").get<HarnessOptions>();
            s.manifest_case = doc.at("case").get<std::string>().at(0);
            for (const auto& run : doc.at("runs")) {
                s.manifest_controllers.push_back(parse_controller(run.at("controller").get<std::string>()));
            }
            if (doc.contains("tuning")) {
                s.manifest_tuning = doc.at("tuning");
            }
        } catch (const json::exception& e) {
            throw ConfigError(c.manifest + ": " + e.what());
        }
    } else {
        if (c.config.empty()) {
            throw ConfigError("--config or --manifest is required");
        }
        s.flowsheet = load_flowsheet(c.config);
        if (!c.options.empty()) {
            s.options = load_options(c.options);
        }
    }
    if (c.horizon) {
        if (*c.horizon < 1) {
            throw ConfigError("--horizon must be >= 1");
        }
        s.options.mpc.horizon = *c.horizon;
    }
    if (c.ts) {
        if (!(*c.ts > 0.0)) {
            throw ConfigError("--ts must be > 0");
        }
        s.options.T_s = *c.ts;
        s.options.mpc.T_s = *c.ts;
    }
    if (c.hsub) {
        if (!(*c.hsub > 0.0)) {
            throw ConfigError("--hsub must be > 0");
        }
        s.options.h_sub = *c.hsub;
        s.options.mpc.h_sub_pred = *c.hsub;
    }
    return s;
}

std::ofstream open_out(const fs::path& dir, const std::string& name)
{
    fs::create_directories(dir);
    std::ofstream out(dir / name);
    if (!out) {
        throw ConfigError("cannot write " + (dir / name).string());
    }
    return out;
}

char pick_case(const std::string& flag, const Setup& s)
{
    if (!flag.empty()) {
        if (flag.size() != 1 || flag.find_first_of("ABC") != 0) {
            throw ConfigError("--case must be A, B or C");
        }
        return flag[0];
    }
    if (s.manifest_case) {
        return *s.manifest_case;
    }
    throw ConfigError("--case is required");
}

bool needs_gains(const std::vector<ControllerKind>& kinds)
{
    for (auto k : kinds) {
        if (k == ControllerKind::Pid) {
            return true;
        }
    }
    return false;
}

// Runs the controllers, writes one trajectory CSV each plus the comparison
// tables and the manifest.
int run_case(Setup& s, char which, const std::vector<ControllerKind>& kinds, const fs::path& out,
             bool parallel)
{
    std::optional<TuneResult> tuning;
    PidGains gains;
    if (needs_gains(kinds)) {
        gains = resolve_pid_gains(s.flowsheet, s.options, &tuning);
        s.options.pid.gains = gains;
    }

    std::vector<RunResult> results;
    if (parallel) {
        std::vector<std::future<RunResult>> jobs;
        for (auto k : kinds) {
            const Scenario sc = make_case(which, k, s.flowsheet, s.options, gains);
            jobs.push_back(std::async(std::launch::async,
                                      [sc, &s] { return run_scenario(sc, s.flowsheet); }));
        }
        for (auto& j : jobs) {
            results.push_back(j.get());
        }
    } else {
        for (auto k : kinds) {
            results.push_back(run_scenario(make_case(which, k, s.flowsheet, s.options, gains), s.flowsheet));
        }
    }

    for (const auto& r : results) {
        auto f = open_out(out, "trajectory_" + to_string(r.controller) + ".csv");
        write_trajectory_csv(f, r.trajectory, s.flowsheet);
    }
    const auto rows = compare(results);
    {
        auto f = open_out(out, "comparison.csv");
        write_comparison_csv(f, rows);
    }
    {
        auto f = open_out(out, "comparison.txt");
        write_comparison_text(f, rows);
    }
    {
        auto f = open_out(out, "manifest.json");
        json doc = make_manifest(s.flowsheet, s.options, which, results, tuning);
        if (!tuning && !s.manifest_tuning.is_null()) {
            doc["tuning"] = s.manifest_tuning;
        }
        f << doc.dump(2) << '\n';
    }
    std::cout << "case " << which << '\n';
    write_comparison_text(std::cout, rows);
    for (const auto& r : results) {
        if (r.controller == ControllerKind::Nmpc) {
            std::cout << "nmpc: " << r.nmpc.solves << " solves, " << r.nmpc.not_optimal
                      << " not optimal, max KKT " << r.nmpc.max_kkt << ", "
                      << r.nmpc.total_seconds / std::max(1, r.nmpc.solves) << " s per solve\n";
        }
    }
    return 0;
}

void add_common(CLI::App* cmd, Common& c)
{
    cmd->add_option("--config", c.config, "flowsheet JSON");
    cmd->add_option("--options", c.options, "harness options JSON (controller, tuning, case settings)");
    cmd->add_option("--out", c.out, "output directory");
    cmd->add_option("--horizon", c.horizon, "NMPC prediction horizon, steps");
    cmd->add_option("--ts", c.ts, "control sampling time, h");
    cmd->add_option("--hsub", c.hsub, "Euler substep, h (plant and prediction)");
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Uranium extraction cascade: steady states, set points and closed-loop control"};
    app.require_subcommand(1);
    Common c;

    double sweep_p = 0.0;
    double sweep_from = 0.0;
    double sweep_to = 0.0;
    double sweep_step = 1.0;
    auto* sweep = app.add_subcommand("sweep", "steady-state curves over the feed flow");
    add_common(sweep, c);
    sweep->add_option("--p", sweep_p, "solvent flow O_E, L/h (default: nominal)");
    sweep->add_option("--from", sweep_from, "first feed flow, L/h (default: u_min)");
    sweep->add_option("--to", sweep_to, "last feed flow, L/h (default: u_max)");
    sweep->add_option("--step", sweep_step, "grid spacing, L/h")->check(CLI::PositiveNumber);

    double sp_p = 0.0;
    auto* setpoint = app.add_subcommand("setpoint", "critical feed flow for a solvent flow");
    add_common(setpoint, c);
    setpoint->add_option("--p", sp_p, "solvent flow O_E, L/h (default: nominal)");

    std::string case_name;
    std::string controller = "nmpc";
    auto* simulate = app.add_subcommand("simulate", "one closed-loop case study");
    add_common(simulate, c);
    simulate->add_option("--case", case_name, "A, B or C");
    simulate->add_option("--controller", controller, "openloop, pid or nmpc");
    simulate->add_option("--manifest", c.manifest, "rerun from a manifest");

    auto* tune = app.add_subcommand("tune-pid", "offline PID gain tuning on the nominal start-up");
    add_common(tune, c);

    auto* cmp = app.add_subcommand("compare", "run all three controllers on one case");
    add_common(cmp, c);
    cmp->add_option("--case", case_name, "A, B or C");
    cmp->add_option("--manifest", c.manifest, "rerun from a manifest");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        Setup s = load(c);
        const FlowSheet& f = s.flowsheet;
        const fs::path out(c.out);

        if (*sweep) {
            const double p = sweep_p > 0.0 ? sweep_p : f.O_E_nominal;
            const double lo = sweep_from > 0.0 ? sweep_from : f.u_min;
            const double hi = sweep_to > 0.0 ? sweep_to : f.u_max;
            if (!(hi >= lo)) {
                throw ConfigError("sweep: --to must not be below --from");
            }
            std::vector<double> grid;
            for (int i = 0; lo + i * sweep_step <= hi + 1e-9 * sweep_step; ++i) {
                grid.push_back(lo + i * sweep_step);
            }
            const auto points = sweep_feed(grid, p, f, s.options.setpoint.steady);
            auto file = open_out(out, "sweep.csv");
            write_sweep_csv(file, points);
            write_sweep_csv(std::cout, points);
            return 0;
        }
        if (*setpoint) {
            const double p = sp_p > 0.0 ? sp_p : f.O_E_nominal;
            const SetPoint spt = critical_setpoint(p, f, f.u_min, f.u_max, s.options.setpoint);
            const json doc{{"p", spt.p},
                           {"u_critical", spt.u_critical},
                           {"u_set", spt.u_set},
                           {"margin", s.options.setpoint.margin},
                           {"y_set", spt.y_set()},
                           {"raffinate", spt.x_set.raffinate()}};
            std::cout << doc.dump(2) << '\n';
            return 0;
        }
        if (*tune) {
            s.options.pid.gains.reset();
            std::optional<TuneResult> report;
            const PidGains g = resolve_pid_gains(f, s.options, &report);
            json starts = json::array();
            for (const auto& st : report->starts) {
                starts.push_back({{"initial", st.initial},
                                  {"initial_objective", st.initial_objective},
                                  {"tuned", st.tuned},
                                  {"tuned_objective", st.tuned_objective},
                                  {"iterations", st.iterations}});
            }
            const json doc{{"gains", g},
                           {"objective", report->objective},
                           {"baseline_objective", report->baseline_objective},
                           {"seed", report->seed},
                           {"starts", starts},
                           {"trace", report->trace}};
            auto file = open_out(out, "pid_tuning.json");
            file << doc.dump(2) << '\n';
            std::cout << "K_P " << g.K_P << "  K_I " << g.K_I << "  K_D " << g.K_D
                      << "  objective " << report->objective << " (zero gains "
                      << report->baseline_objective << ")\n";
            return 0;
        }
        if (*simulate) {
            const char which = pick_case(case_name, s);
            ControllerKind kind = parse_controller(controller);
            if (!c.manifest.empty() && simulate->count("--controller") == 0 &&
                s.manifest_controllers.size() == 1) {
                kind = s.manifest_controllers.front();
            }
            return run_case(s, which, {kind}, out, false);
        }
        if (*cmp) {
            const char which = pick_case(case_name, s);
            return run_case(s, which,
                            {ControllerKind::Nmpc, ControllerKind::Pid, ControllerKind::OpenLoop},
                            out, true);
        }
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return 1;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure";
        if (e.step() >= 0) {
            std::cerr << " at step " << e.step();
        }
        std::cerr << ": " << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
