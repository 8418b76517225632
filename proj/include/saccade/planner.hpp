#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "saccade/grid.hpp"
#include "saccade/model.hpp"
#include "saccade/random.hpp"

namespace saccade {

/// Score of the one-step policy "look at `fixation` next".
struct PolicyEvaluation {
    Fixation fixation;
    double info_gain = 0.0;  // nats, >= 0
    double utility = 0.0;    // nats
    double G = 0.0;          // -info_gain - utility

    friend bool operator==(const PolicyEvaluation&, const PolicyEvaluation&) = default;
};

struct SelectionPolicy {
    enum class Kind { Argmin, Softmax };
    Kind kind = Kind::Argmin;
    double temperature = 1.0;
};

/// Expected free energies closer than this are treated as ties.
inline constexpr double kTieTolerance = 1e-9;

/// Probability of bin "object" for a visible block with presence belief q.
inline double predicted_detection(double q, const SensorModel& sensor)
{
    return q * sensor.p_hit + (1.0 - q) * sensor.p_fa;
}

/**
 * Mutual information I(s; o) between one block's presence and its observation, in nats.
 * Enumerates o in {0,1}: I = Σ_o P(o) · KL[q(s|o) || q(s)].
 */
inline double block_info_gain(double q, const SensorModel& sensor)
{
    double gain = 0.0;
    for (int o = 0; o < 2; ++o) {
        const double joint1 = q * sensor.a(o, 1);
        const double joint0 = (1.0 - q) * sensor.a(o, 0);
        const double p_o = joint1 + joint0;
        if (p_o <= 0.0) continue;
        // P(o) · Σ_s q(s|o) log(q(s|o)/q(s)) = Σ_s joint(s,o) log(A(o|s)/P(o))
        if (joint1 > 0.0) gain += joint1 * std::log(sensor.a(o, 1) / p_o);
        if (joint0 > 0.0) gain += joint0 * std::log(sensor.a(o, 0) / p_o);
    }
    return std::max(gain, 0.0);
}

namespace detail {

struct BlockTables {
    std::vector<double> info_gain;
    std::vector<double> p_detect;
};

inline BlockTables block_tables(const BeliefState& belief, const SensorModel& sensor)
{
    BlockTables t;
    t.info_gain.reserve(belief.q.size());
    t.p_detect.reserve(belief.q.size());
    for (double q : belief.q) {
        t.info_gain.push_back(block_info_gain(q, sensor));
        t.p_detect.push_back(predicted_detection(q, sensor));
    }
    return t;
}

inline PolicyEvaluation evaluate(const BlockTables& tables, const Fixation& p, const Preferences& prefs,
                                 const GridSpec& grid)
{
    grid.require_contains(p);
    const CellIndex c = center_cell(grid);
    PolicyEvaluation ev{p, 0.0, 0.0, 0.0};
    for (int w = 0; w < grid.W(); ++w) {
        const int k = p.k - c.w + w;
        if (k < 0 || k >= grid.K()) continue;
        for (int h = 0; h < grid.H(); ++h) {
            const int l = p.l - c.h + h;
            if (l < 0 || l >= grid.L()) continue;
            const std::size_t b = grid.block_index({k, l});
            ev.info_gain += tables.info_gain[b];
            ev.utility += tables.p_detect[b] * prefs.compiled[grid.cell_index(w, h)];
        }
    }
    ev.G = -ev.info_gain - ev.utility;
    return ev;
}

inline void check_inputs(const BeliefState& belief, const Preferences& prefs, const GridSpec& grid)
{
    if (belief.q.size() != grid.num_blocks()) {
        throw ContractViolation("belief size does not match grid");
    }
    if (prefs.compiled.size() != grid.num_cells()) {
        throw ContractViolation("preferences size does not match field of view");
    }
}

} // namespace detail

/// Expected free energy of moving the fixation to p.
inline PolicyEvaluation evaluate_policy(const BeliefState& belief, const Fixation& p, const SensorModel& sensor,
                                        const Preferences& prefs, const GridSpec& grid)
{
    detail::check_inputs(belief, prefs, grid);
    grid.require_contains(p);
    PolicyEvaluation ev{p, 0.0, 0.0, 0.0};
    for (const FovCell& cell : visible_blocks(grid, p)) {
        if (!cell.in_grid()) continue;
        const double q = belief.q[grid.block_index(*cell.block)];
        ev.info_gain += block_info_gain(q, sensor);
        ev.utility += predicted_detection(q, sensor) * prefs.compiled[grid.cell_index(cell.w, cell.h)];
    }
    ev.G = -ev.info_gain - ev.utility;
    return ev;
}

struct ActionChoice {
    Fixation fixation;
    std::vector<PolicyEvaluation> evaluations;  // all K·L candidates, row-major
};

/**
 * Scores every fixation and picks the next one.
 *
 * Argmin: lowest G; candidates within kTieTolerance of the minimum are ties, resolved by the
 * smallest Chebyshev distance from the current fixation and then row-major order.
 * Softmax: samples with probability ∝ exp(-G / temperature) using `rng` (required).
 */
inline ActionChoice select_action(const BeliefState& belief, const SensorModel& sensor, const Preferences& prefs,
                                  const GridSpec& grid, const SelectionPolicy& selection = {}, Rng* rng = nullptr)
{
    detail::check_inputs(belief, prefs, grid);
    const detail::BlockTables tables = detail::block_tables(belief, sensor);

    ActionChoice choice;
    choice.evaluations.reserve(grid.num_blocks());
    double g_min = std::numeric_limits<double>::infinity();
    for (const Fixation& p : all_fixations(grid)) {
        choice.evaluations.push_back(detail::evaluate(tables, p, prefs, grid));
        g_min = std::min(g_min, choice.evaluations.back().G);
    }

    if (selection.kind == SelectionPolicy::Kind::Softmax) {
        if (rng == nullptr) {
            throw ContractViolation("softmax selection needs a random source");
        }
        if (!(selection.temperature > 0.0)) {
            throw ContractViolation("softmax temperature must be positive");
        }
        std::vector<double> weights;
        weights.reserve(choice.evaluations.size());
        double total = 0.0;
        for (const auto& ev : choice.evaluations) {
            weights.push_back(std::exp(-(ev.G - g_min) / selection.temperature));
            total += weights.back();
        }
        double u = rng->uniform() * total;
        for (std::size_t i = 0; i < weights.size(); ++i) {
            u -= weights[i];
            if (u < 0.0 || i + 1 == weights.size()) {
                choice.fixation = choice.evaluations[i].fixation;
                return choice;
            }
        }
    }

    const PolicyEvaluation* best = nullptr;
    int best_distance = 0;
    for (const auto& ev : choice.evaluations) {
        if (ev.G > g_min + kTieTolerance) continue;
        const int d = chebyshev(ev.fixation, belief.fixation);
        if (best == nullptr || d < best_distance) {
            best = &ev;
            best_distance = d;
        }
    }
    choice.fixation = best->fixation;
    return choice;
}

} // namespace saccade
