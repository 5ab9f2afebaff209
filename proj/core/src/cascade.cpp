#include "uranex/cascade.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace uranex {

const char* block_label(Block b)
{
    switch (b) {
    case Block::UaqMixer: return "U_aq_M";
    case Block::UaqSettler: return "U_aq_D";
    case Block::UogSettler: return "U_og_D";
    case Block::HaqMixer: return "H_aq_M";
    case Block::HaqSettler: return "H_aq_D";
    case Block::HogSettler: return "H_og_D";
    }
    return "?";
}

CascadeState::CascadeState(int n_stages)
    : n_stages_(n_stages), values_(static_cast<std::size_t>(kBlockCount * n_stages), 0.0)
{
    if (n_stages < 1) {
        throw std::invalid_argument("CascadeState: n_stages must be positive");
    }
}

CascadeState::CascadeState(int n_stages, std::vector<double> values)
    : n_stages_(n_stages), values_(std::move(values))
{
    if (n_stages < 1 || values_.size() != static_cast<std::size_t>(kBlockCount * n_stages)) {
        throw std::invalid_argument("CascadeState: expected 6 * n_stages values");
    }
}

std::vector<double> rhs(const CascadeState& x, Inputs inp, const FlowSheet& fs)
{
    if (x.n_stages() != fs.n_stages) {
        throw std::invalid_argument("rhs: state does not match flowsheet stage count");
    }
    std::vector<double> dx(x.size());
    detail::cascade_rhs<double>(x.values(), inp.feed, inp.solvent, fs, dx);
    return dx;
}

int substep_count(double T_s, double h_sub)
{
    if (!(T_s > 0.0) || !(h_sub > 0.0)) {
        throw std::invalid_argument("substep_count: T_s and h_sub must be positive");
    }
    const double ratio = T_s / h_sub;
    const double rounded = std::round(ratio);
    if (rounded < 1.0 || std::abs(ratio - rounded) > 1e-9 * ratio) {
        throw std::invalid_argument("substep_count: T_s / h_sub must be a positive integer");
    }
    return static_cast<int>(rounded);
}

StepOutcome step(const CascadeState& x, Inputs inp, const FlowSheet& fs, double T_s, double h_sub)
{
    const int n_sub = substep_count(T_s, h_sub);
    const double h = T_s / n_sub;
    std::vector<double> values = x.vector();
    std::vector<double> work;
    StepOutcome out;
    out.diverged = !detail::euler_advance<double>(values, inp.feed, inp.solvent, fs, n_sub, h,
                                                  work, out.clamped);
    out.x = CascadeState(x.n_stages(), std::move(values));
    return out;
}

Trajectory simulate(const CascadeState& x0, std::span<const double> u_seq,
                    std::span<const double> p_seq, const FlowSheet& fs, double T_s, double h_sub)
{
    if (u_seq.size() != p_seq.size()) {
        throw std::invalid_argument("simulate: input and parameter sequences differ in length");
    }
    Trajectory traj;
    traj.T_s = T_s;
    traj.time.push_back(0.0);
    traj.states.push_back(x0);
    for (std::size_t k = 0; k < u_seq.size(); ++k) {
        auto out = step(traj.states.back(), {u_seq[k], p_seq[k]}, fs, T_s, h_sub);
        if (out.diverged) {
            throw NumericalError("simulate: divergence guard tripped; reduce h_sub",
                                 static_cast<long>(k));
        }
        traj.states.push_back(std::move(out.x));
        traj.inputs.push_back(u_seq[k]);
        traj.parameters.push_back(p_seq[k]);
        traj.clamped.push_back(out.clamped);
        traj.time.push_back(static_cast<double>(k + 1) * T_s);
    }
    return traj;
}

double loaded_mixer_organic(const CascadeState& x, const FlowSheet& fs)
{
    const int n = fs.n_stages;
    return equilibrium_organic<double>(x.at(Block::UaqMixer, n), x.at(Block::HaqMixer, n),
                                       fs.TBP_total, fs.K_U, fs.K_H)
        .U_og;
}

std::string format_number(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj, const FlowSheet& fs)
{
    const int n = fs.n_stages;
    out << "t,u,p";
    for (int b = 0; b < kBlockCount; ++b) {
        for (int s = 1; s <= n; ++s) {
            out << ',' << block_label(static_cast<Block>(b)) << '_' << s;
        }
    }
    out << ",U_og_M_" << n << '\n';

    for (std::size_t k = 0; k < traj.states.size(); ++k) {
        // The terminal state has no input of its own; repeat the last one.
        const std::size_t ik = traj.inputs.empty() ? 0 : std::min(k, traj.inputs.size() - 1);
        const double u = traj.inputs.empty() ? 0.0 : traj.inputs[ik];
        const double p = traj.parameters.empty() ? 0.0 : traj.parameters[ik];
        out << format_number(traj.time[k]) << ',' << format_number(u) << ','
            << format_number(p);
        for (double v : traj.states[k].values()) {
            out << ',' << format_number(v);
        }
        out << ',' << format_number(loaded_mixer_organic(traj.states[k], fs)) << '\n';
    }
}

// The reduced dynamics hold the organic mixer phase at equilibrium without
// accumulation, so the quantity they conserve excludes WM * [S]og_M*. The
// full inventory (include_mixer_organic) is reported for comparison.
Holdup holdup(const CascadeState& x, Inputs inp, const FlowSheet& fs, bool include_mixer_organic)
{
    const auto sf = stage_flows(fs, inp.feed, inp.solvent);
    Holdup h;
    for (int s = 1; s <= fs.n_stages; ++s) {
        const auto j = static_cast<std::size_t>(s - 1);
        h.uranium += sf.mixer_aqueous[j] * x.at(Block::UaqMixer, s) +
                     fs.V_settler_aq * x.at(Block::UaqSettler, s) +
                     fs.V_settler_og * x.at(Block::UogSettler, s);
        h.acid += sf.mixer_aqueous[j] * x.at(Block::HaqMixer, s) +
                  fs.V_settler_aq * x.at(Block::HaqSettler, s) +
                  fs.V_settler_og * x.at(Block::HogSettler, s);
        if (include_mixer_organic) {
            const auto eq = equilibrium_organic<double>(x.at(Block::UaqMixer, s),
                                                        x.at(Block::HaqMixer, s), fs.TBP_total,
                                                        fs.K_U, fs.K_H);
            h.uranium += sf.mixer_organic[j] * eq.U_og;
            h.acid += sf.mixer_organic[j] * eq.H_og;
        }
    }
    return h;
}

}  // namespace uranex
