#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "saccade/errors.hpp"
#include "saccade/grid.hpp"

namespace saccade {

/// Observation bins of one FOV cell.
enum class Bin : int { NoObject = 0, Object = 1, NotVisible = 2 };

/// Per-block Bernoulli beliefs Q(s=1) plus the proprioceptive fixation.
struct BeliefState {
    std::vector<double> q;          // K·L, row-major over (k, l)
    std::vector<bool> observed;     // set once a block has been inside an observed FOV
    Fixation fixation;

    friend bool operator==(const BeliefState&, const BeliefState&) = default;
};

/**
 * Likelihood A for a visible cell: P(o=1 | s=1) = p_hit, P(o=1 | s=0) = p_fa.
 * The deterministic model (every present object seen, nothing hallucinated) is p_hit=1, p_fa=0.
 */
struct SensorModel {
    double p_hit = 0.9;
    double p_fa = 0.02;

    void validate() const
    {
        if (!(p_hit > 0.0 && p_hit <= 1.0)) {
            throw ContractViolation("sensor p_hit must be in (0,1]");
        }
        if (!(p_fa >= 0.0 && p_fa < 1.0)) {
            throw ContractViolation("sensor p_fa must be in [0,1)");
        }
        if (!(p_hit > p_fa)) {
            throw ContractViolation("sensor must be informative (p_hit > p_fa)");
        }
    }

    /// A(o | s) for a visible cell, o in {0,1}.
    double a(int o, int s) const noexcept
    {
        const double p1 = s == 1 ? p_hit : p_fa;
        return o == 1 ? p1 : 1.0 - p1;
    }

    static SensorModel deterministic() { return {1.0, 0.0}; }
};

/// Soft evidence for one timestep: per FOV cell, the probability of bin "object". Empty = not visible.
struct ObservationFrame {
    long long t = 0;
    Fixation fixation;
    std::vector<std::optional<double>> evidence;  // W·H, row-major over (w, h)
    std::size_t rejected_detections = 0;

    friend bool operator==(const ObservationFrame&, const ObservationFrame&) = default;
};

enum class PreferenceMode { Explore, Seek, Track };

inline std::string_view to_string(PreferenceMode m)
{
    switch (m) {
    case PreferenceMode::Explore: return "explore";
    case PreferenceMode::Seek: return "seek";
    case PreferenceMode::Track: return "track";
    }
    return "explore";
}

inline std::optional<PreferenceMode> parse_preference_mode(std::string_view s)
{
    if (s == "explore") return PreferenceMode::Explore;
    if (s == "seek") return PreferenceMode::Seek;
    if (s == "track") return PreferenceMode::Track;
    return std::nullopt;
}

/// Prior preferences C as a log-preference for bin "object" per FOV cell.
struct Preferences {
    PreferenceMode mode = PreferenceMode::Explore;
    double c_value = 1.0;
    std::vector<double> compiled;  // W·H, row-major over (w, h)

    static Preferences make(PreferenceMode mode, const GridSpec& grid, double c_value = 1.0)
    {
        Preferences p{mode, c_value, std::vector<double>(grid.num_cells(), 0.0)};
        switch (mode) {
        case PreferenceMode::Explore:
            break;
        case PreferenceMode::Seek:
            std::fill(p.compiled.begin(), p.compiled.end(), c_value);
            break;
        case PreferenceMode::Track: {
            const CellIndex c = center_cell(grid);
            p.compiled[grid.cell_index(c.w, c.h)] = c_value;
            break;
        }
        }
        return p;
    }
};

inline void require_probability(double p, const char* what)
{
    if (!(p >= 0.0 && p <= 1.0)) {
        throw ContractViolation(std::string(what) + " must be in [0,1]");
    }
}

inline BeliefState init_belief(const GridSpec& grid, double prior, const Fixation& start)
{
    require_probability(prior, "prior");
    grid.require_contains(start);
    return {std::vector<double>(grid.num_blocks(), prior), std::vector<bool>(grid.num_blocks(), false),
            start};
}

/// Distribution over {no object, object, not visible} for one block/cell pairing.
inline std::array<double, 3> likelihood(const SensorModel& sensor, int s, bool visible)
{
    if (!visible) {
        return {0.0, 0.0, 1.0};
    }
    return {sensor.a(0, s), sensor.a(1, s), 0.0};
}

/// Carries the posterior forward as the next prior, optionally relaxing it toward 0.5.
inline BeliefState advance_prior(BeliefState belief, double leak)
{
    require_probability(leak, "leak");
    if (leak > 0.0) {
        for (double& q : belief.q) {
            q = (1.0 - leak) * q + leak * 0.5;
        }
    }
    return belief;
}

/// Bernoulli entropy in nats; 0·log 0 = 0.
inline double bernoulli_entropy(double q)
{
    double h = 0.0;
    if (q > 0.0) h -= q * std::log(q);
    if (q < 1.0) h -= (1.0 - q) * std::log1p(-q);
    return h;
}

inline double total_entropy(const BeliefState& belief)
{
    double sum = 0.0;
    for (double q : belief.q) sum += bernoulli_entropy(q);
    return sum;
}

inline double coverage(const BeliefState& belief)
{
    if (belief.observed.empty()) return 0.0;
    std::size_t n = 0;
    for (bool b : belief.observed) n += b ? 1 : 0;
    return static_cast<double>(n) / static_cast<double>(belief.observed.size());
}

} // namespace saccade
