#pragma once

#include <filesystem>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "uranex/errors.hpp"

namespace uranex {

/**
 * Physical, chemical and topology parameters of a countercurrent
 * extraction-scrubbing cascade.
 *
 * Units: flows in L/h, volumes in L, concentrations in mol/L,
 * K_U in (L/mol)^4 and K_H in (L/mol)^2. Stages are numbered from 1.
 * The aqueous phase flows from stage n_stages down to stage 1 (raffinate);
 * the organic phase flows from stage 1 up to stage n_stages (loaded solvent).
 */
struct FlowSheet {
    int n_stages = 16;
    int feed_stage = 8;

    double A_E = 10.0;           // scrub acid flow, enters stage n_stages
    double O_E_nominal = 100.0;  // solvent flow, enters stage 1
    double A_F_nominal = 30.0;   // feed flow, enters feed_stage

    double U_feed = 1.0;
    double H_feed = 3.0;
    double H_scrub = 1.0;
    double U_solvent_in = 0.0;
    double H_solvent_in = 0.0;

    double TBP_total = 1.1;
    double K_U = 10.0;
    double K_H = 0.2;

    double V_mixer_total = 20.0;
    double V_settler_aq = 20.0;
    double V_settler_og = 20.0;

    double u_min = 5.0;
    double u_max = 80.0;
    double du_min = -5.0;
    double du_max = 5.0;

    double raffinate_tol = 1e-3;

    /// Throws ConfigError naming the first offending field.
    void validate() const;

    [[nodiscard]] int state_size() const { return 6 * n_stages; }
};

void to_json(nlohmann::json& j, const FlowSheet& fs);
/// Strict: unknown keys and missing keys are rejected. Does not validate.
void from_json(const nlohmann::json& j, FlowSheet& fs);

/// Parse and validate a flowsheet JSON document.
FlowSheet load_flowsheet(const std::filesystem::path& path);
FlowSheet parse_flowsheet(const nlohmann::json& doc);

/// Per-stage throughput and mixer volume split for fixed (A_F, O_E).
struct StageFlows {
    std::vector<double> aqueous;        // A_n
    std::vector<double> organic;        // O_n
    std::vector<double> mixer_aqueous;  // VM_n
    std::vector<double> mixer_organic;  // WM_n
    // Index (0-based) of the upstream stage feeding each phase, -1 for an
    // external inlet (scrub for aqueous, fresh solvent for organic).
    std::vector<int> aqueous_source;
    std::vector<int> organic_source;
    int feed_index = 0;  // 0-based stage receiving the feed
};

StageFlows stage_flows(const FlowSheet& fs, double A_F, double O_E);

}  // namespace uranex
