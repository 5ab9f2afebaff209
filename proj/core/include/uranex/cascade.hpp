#pragma once

#include <cmath>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "uranex/dual.hpp"
#include "uranex/equilibrium.hpp"
#include "uranex/errors.hpp"
#include "uranex/flowsheet.hpp"

namespace uranex {

/// State blocks in storage order. Each block holds one value per stage.
enum class Block : int {
    UaqMixer = 0,
    UaqSettler = 1,
    UogSettler = 2,
    HaqMixer = 3,
    HaqSettler = 4,
    HogSettler = 5,
};

inline constexpr int kBlockCount = 6;

/// Short column label of a block, e.g. "U_aq_D".
const char* block_label(Block b);

/**
 * Concentration state of the cascade: six blocks of n_stages values each.
 *
 * With 16 stages the 1-based entry 17 is the raffinate [U]aq_D,1 and entry
 * 48 is the loaded solvent [U]og_D,16.
 */
class CascadeState {
public:
    CascadeState() = default;
    explicit CascadeState(int n_stages);
    CascadeState(int n_stages, std::vector<double> values);

    [[nodiscard]] int n_stages() const { return n_stages_; }
    [[nodiscard]] std::size_t size() const { return values_.size(); }

    double& operator[](std::size_t i) { return values_[i]; }
    double operator[](std::size_t i) const { return values_[i]; }

    /// stage is 1-based.
    [[nodiscard]] double at(Block b, int stage) const { return values_[index(b, stage)]; }
    double& at(Block b, int stage) { return values_[index(b, stage)]; }
    [[nodiscard]] std::size_t index(Block b, int stage) const
    {
        return static_cast<std::size_t>(static_cast<int>(b) * n_stages_ + stage - 1);
    }

    [[nodiscard]] double raffinate() const { return at(Block::UaqSettler, 1); }
    [[nodiscard]] double loaded() const { return at(Block::UogSettler, n_stages_); }

    [[nodiscard]] std::span<const double> values() const { return values_; }
    std::span<double> values() { return values_; }
    [[nodiscard]] const std::vector<double>& vector() const { return values_; }

    friend bool operator==(const CascadeState&, const CascadeState&) = default;

private:
    int n_stages_ = 0;
    std::vector<double> values_;
};

/// 0-based offset of the raffinate entry in the flat state.
inline std::size_t raffinate_index(int n_stages) { return static_cast<std::size_t>(n_stages); }
/// 0-based offset of the loaded-solvent entry in the flat state.
inline std::size_t loaded_index(int n_stages) { return static_cast<std::size_t>(3 * n_stages - 1); }

/// Feed flow A_F (manipulated) and solvent flow O_E (measured parameter), L/h.
struct Inputs {
    double feed = 0.0;
    double solvent = 0.0;
};

namespace detail {

/**
 * Reduced cascade dynamics with the organic mixer phase at chemical
 * equilibrium. Generic over the scalar type so that the shooting map can be
 * differentiated with respect to the feed flow; the solvent flow is held as
 * a plain parameter.
 */
template <class T>
void cascade_rhs(std::span<const T> x, const T& feed, double solvent, const FlowSheet& fs,
                 std::span<T> dx)
{
    const int n = fs.n_stages;
    const int feed_index = fs.feed_stage - 1;
    auto X = [&](Block b, int j) -> const T& { return x[static_cast<int>(b) * n + j]; };
    auto D = [&](Block b, int j) -> T& { return dx[static_cast<int>(b) * n + j]; };

    const double O = solvent;
    const T A_extract = fs.A_E + feed;  // aqueous throughput of stages 1..feed_stage
    const T vm_extract = fs.V_mixer_total * A_extract / (A_extract + T(O));
    const double A_scrub = fs.A_E;
    const double vm_scrub = fs.V_mixer_total * A_scrub / (A_scrub + O);

    for (int j = 0; j < n; ++j) {
        const bool extract = j <= feed_index;
        const T A = extract ? A_extract : T(A_scrub);
        const T vm = extract ? vm_extract : T(vm_scrub);

        const T& u_mix = X(Block::UaqMixer, j);
        const T& h_mix = X(Block::HaqMixer, j);
        const auto eq = equilibrium_organic<T>(u_mix, h_mix, fs.TBP_total, fs.K_U, fs.K_H);

        // Aqueous inlet: settler of stage j+1, or the scrub stream at the top.
        T u_in;
        T h_in;
        if (j + 1 < n) {
            const T A_up = (j + 1 <= feed_index) ? A_extract : T(A_scrub);
            u_in = A_up * X(Block::UaqSettler, j + 1);
            h_in = A_up * X(Block::HaqSettler, j + 1);
        } else {
            u_in = T(0.0);
            h_in = T(A_scrub * fs.H_scrub);
        }
        if (j == feed_index) {
            u_in += feed * fs.U_feed;
            h_in += feed * fs.H_feed;
        }
        // Organic inlet: settler of stage j-1, or fresh solvent at stage 1.
        if (j > 0) {
            u_in += O * X(Block::UogSettler, j - 1);
            h_in += O * X(Block::HogSettler, j - 1);
        } else {
            u_in += T(O * fs.U_solvent_in);
            h_in += T(O * fs.H_solvent_in);
        }

        D(Block::UaqMixer, j) = (u_in - A * u_mix - O * eq.U_og) / vm;
        D(Block::HaqMixer, j) = (h_in - A * h_mix - O * eq.H_og) / vm;
        D(Block::UaqSettler, j) = A * (u_mix - X(Block::UaqSettler, j)) * (1.0 / fs.V_settler_aq);
        D(Block::HaqSettler, j) = A * (h_mix - X(Block::HaqSettler, j)) * (1.0 / fs.V_settler_aq);
        D(Block::UogSettler, j) = (O / fs.V_settler_og) * (eq.U_og - X(Block::UogSettler, j));
        D(Block::HogSettler, j) = (O / fs.V_settler_og) * (eq.H_og - X(Block::HogSettler, j));
    }
}

/// States above this magnitude (mol/L) indicate an unstable substep size.
inline constexpr double kDivergenceGuard = 1e6;

/**
 * Advance x in place by n_sub explicit Euler substeps of length h with the
 * inputs held constant. Negative entries are clamped to zero and the clamped
 * magnitude is accumulated in `clamped`. Returns false on divergence.
 */
template <class T>
bool euler_advance(std::vector<T>& x, const T& feed, double solvent, const FlowSheet& fs,
                   int n_sub, double h, std::vector<T>& work, double& clamped)
{
    work.resize(x.size());
    for (int s = 0; s < n_sub; ++s) {
        cascade_rhs<T>(std::span<const T>(x), feed, solvent, fs, std::span<T>(work));
        for (std::size_t i = 0; i < x.size(); ++i) {
            x[i] += h * work[i];
            const double v = value_of(x[i]);
            if (v < 0.0) {
                clamped += -v;
                x[i] = T(0.0);
            } else if (!(v < kDivergenceGuard)) {
                return false;
            }
        }
    }
    return true;
}

}  // namespace detail

/// Time derivative of the state, mol/L/h.
std::vector<double> rhs(const CascadeState& x, Inputs inp, const FlowSheet& fs);

/// Number of Euler substeps per control interval; throws std::invalid_argument
/// unless T_s / h_sub is a positive integer.
int substep_count(double T_s, double h_sub);

struct StepOutcome {
    CascadeState x;
    double clamped = 0.0;   // total magnitude removed by nonnegativity clamping
    bool diverged = false;  // divergence guard tripped; x is not meaningful
};

/// One control interval of length T_s with zero-order-hold inputs.
StepOutcome step(const CascadeState& x, Inputs inp, const FlowSheet& fs, double T_s, double h_sub);

struct Trajectory {
    double T_s = 0.0;
    std::vector<double> time;           // one entry per state
    std::vector<CascadeState> states;   // size = inputs + 1
    std::vector<double> inputs;         // applied A_F per control step
    std::vector<double> parameters;     // applied O_E per control step
    std::vector<double> clamped;        // clamp total per control step

    [[nodiscard]] std::size_t steps() const { return inputs.size(); }
};

/// Open-loop simulation; throws NumericalError with the step index on divergence.
Trajectory simulate(const CascadeState& x0, std::span<const double> u_seq,
                    std::span<const double> p_seq, const FlowSheet& fs, double T_s, double h_sub);

/// Equilibrium [U]og in the mixer of the last stage (derived output column).
double loaded_mixer_organic(const CascadeState& x, const FlowSheet& fs);

/**
 * Write a trajectory as CSV: t, u, p, the state blocks in storage order, then
 * U_og_M_<n>. The final state row repeats the last applied input so that
 * every row is complete. Numbers use round-trip precision.
 */
void write_trajectory_csv(std::ostream& out, const Trajectory& traj, const FlowSheet& fs);

/// Species holdup in mol with the reduced-model inventory (mixer aqueous and
/// both settler phases). See cascade.cpp for the split.
struct Holdup {
    double uranium = 0.0;
    double acid = 0.0;
};
Holdup holdup(const CascadeState& x, Inputs inp, const FlowSheet& fs, bool include_mixer_organic);

/// Round-trip formatting used by every CSV writer in the project.
std::string format_number(double v);

}  // namespace uranex
