#pragma once

#include <algorithm>
#include <cmath>
#include <utility>
#include <string>

#include "saccade/errors.hpp"
#include "saccade/grid.hpp"
#include "saccade/model.hpp"

namespace saccade {

/// Smallest likelihood used when the exact update has no support (contradictory stream).
inline constexpr double kLikelihoodFloor = 1e-12;

namespace detail {

inline void check_frame(const ObservationFrame& obs, const GridSpec& grid)
{
    if (obs.evidence.size() != grid.num_cells()) {
        throw ContractViolation("evidence has " + std::to_string(obs.evidence.size()) +
                                " cells, expected " + std::to_string(grid.num_cells()));
    }
    for (const auto& e : obs.evidence) {
        if (e && !(*e >= 0.0 && *e <= 1.0)) {
            throw RejectedFrame("evidence value outside [0,1] in frame t=" + std::to_string(obs.t));
        }
    }
}

/// A(1|s)^ô · A(0|s)^(1-ô), i.e. exp of the expected log-likelihood under soft evidence ô.
inline double soft_likelihood(const SensorModel& sensor, int s, double evidence, double floor = 0.0)
{
    const double a1 = std::max(sensor.a(1, s), floor);
    const double a0 = std::max(sensor.a(0, s), floor);
    return std::pow(a1, evidence) * std::pow(a0, 1.0 - evidence);
}

} // namespace detail

/**
 * Posterior presence probability of one block after soft evidence `evidence` for bin "object".
 *
 * Minimizes the block's free energy exactly: q'(s) ∝ q(s)·exp(ô·log A(1|s) + (1-ô)·log A(0|s)).
 * When the evidence is impossible under the model (both weights zero) the likelihood is floored
 * at kLikelihoodFloor instead.
 */
inline double posterior_presence(double q, double evidence, const SensorModel& sensor)
{
    double u1 = q * detail::soft_likelihood(sensor, 1, evidence);
    double u0 = (1.0 - q) * detail::soft_likelihood(sensor, 0, evidence);
    if (!(u1 + u0 > 0.0)) {
        u1 = q * detail::soft_likelihood(sensor, 1, evidence, kLikelihoodFloor);
        u0 = (1.0 - q) * detail::soft_likelihood(sensor, 0, evidence, kLikelihoodFloor);
    }
    return u1 / (u1 + u0);
}

/// Free-energy-minimizing belief update for every visible in-grid block of the frame.
inline BeliefState update_beliefs(BeliefState belief, const ObservationFrame& obs, const SensorModel& sensor,
                                  const GridSpec& grid)
{
    if (obs.fixation != belief.fixation) {
        throw ContractViolation("frame fixation " + to_string(obs.fixation) + " differs from belief fixation " +
                                to_string(belief.fixation));
    }
    detail::check_frame(obs, grid);
    if (belief.q.size() != grid.num_blocks()) {
        throw ContractViolation("belief size does not match grid");
    }

    for (const FovCell& cell : visible_blocks(grid, obs.fixation)) {
        const auto& e = obs.evidence[grid.cell_index(cell.w, cell.h)];
        if (!cell.in_grid() || !e) continue;
        const std::size_t b = grid.block_index(*cell.block);
        belief.q[b] = posterior_presence(belief.q[b], *e, sensor);
        belief.observed[b] = true;
    }
    return belief;
}

/**
 * Variational free energy (complexity minus accuracy) of `post` against `prior` for the frame.
 * Not-visible cells contribute nothing. Throws ContradictionError when a term diverges.
 */
inline double free_energy(const BeliefState& prior, const BeliefState& post, const ObservationFrame& obs,
                          const SensorModel& sensor, const GridSpec& grid)
{
    detail::check_frame(obs, grid);
    if (prior.q.size() != grid.num_blocks() || post.q.size() != grid.num_blocks()) {
        throw ContractViolation("belief size does not match grid");
    }

    double total = 0.0;
    for (const FovCell& cell : visible_blocks(grid, obs.fixation)) {
        const auto& e = obs.evidence[grid.cell_index(cell.w, cell.h)];
        if (!cell.in_grid() || !e) continue;
        const std::size_t b = grid.block_index(*cell.block);
        const double o = *e;

        for (int s = 0; s < 2; ++s) {
            const double qq = s == 1 ? post.q[b] : 1.0 - post.q[b];
            const double qp = s == 1 ? prior.q[b] : 1.0 - prior.q[b];
            if (qq == 0.0) continue;
            if (qp == 0.0) {
                throw ContradictionError("posterior puts mass where the prior has none at block " +
                                         to_string(*cell.block));
            }
            double expected_ll = 0.0;
            for (const auto& [weight, a] : {std::pair{o, sensor.a(1, s)}, std::pair{1.0 - o, sensor.a(0, s)}}) {
                if (weight == 0.0) continue;
                if (a == 0.0) {
                    throw ContradictionError("evidence impossible under sensor at block " + to_string(*cell.block));
                }
                expected_ll += weight * std::log(a);
            }
            total += qq * (std::log(qq / qp) - expected_ll);
        }
    }
    return total;
}

} // namespace saccade
