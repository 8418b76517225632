#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <regex>
#include <string>
#include <vector>

#include "saccade/episode.hpp"
#include "saccade/inference.hpp"
#include "saccade/planner.hpp"
#include "saccade/random.hpp"

namespace saccade {

/// Parses "KxL/WxH", e.g. "16x16/5x5".
inline GridSpec parse_grid_label(const std::string& label)
{
    static const std::regex re(R"((\d+)x(\d+)/(\d+)x(\d+))");
    std::smatch m;
    if (!std::regex_match(label, m, re)) {
        throw ConfigError("grids", "expected KxL/WxH, got \"" + label + "\"");
    }
    try {
        return GridSpec(std::stoi(m[1]), std::stoi(m[2]), std::stoi(m[3]), std::stoi(m[4]));
    } catch (const std::exception& e) {
        throw ConfigError("grids", label + ": " + e.what());
    }
}

inline std::string grid_label(const GridSpec& g)
{
    return std::to_string(g.K()) + "x" + std::to_string(g.L()) + "/" + std::to_string(g.W()) + "x" +
           std::to_string(g.H());
}

/// Table sizes of the planner's model: beliefs, likelihood, preferences.
struct ParameterCount {
    std::size_t belief = 0;
    std::size_t likelihood = 0;
    std::size_t preferences = 0;

    std::size_t total() const noexcept { return belief + likelihood + preferences; }
};

inline ParameterCount parameter_count(const GridSpec& grid)
{
    // likelihood: 2 presence states x 3 observation bins, shared by every cell
    return {grid.num_blocks(), 6, grid.num_cells()};
}

struct BenchResult {
    GridSpec grid;
    std::vector<std::int64_t> samples_ns;  // one per timed repetition (warm-up excluded)
    std::int64_t min_ns = 0;
    std::int64_t median_ns = 0;
    std::int64_t p99_ns = 0;
    ParameterCount params;
};

/**
 * Times one belief update plus one action selection per repetition, after a single warm-up run.
 * The belief and the frame are random but fixed for all repetitions.
 */
inline BenchResult run_bench(const GridSpec& grid, int repetitions, std::uint64_t seed = 1)
{
    if (repetitions < 100) throw ContractViolation("bench needs at least 100 repetitions");

    Rng rng(seed);
    const Fixation start{grid.K() / 2, grid.L() / 2};
    BeliefState belief = init_belief(grid, 0.5, start);
    for (double& q : belief.q) q = rng.uniform();
    ObservationFrame frame{0, start, std::vector<std::optional<double>>(grid.num_cells()), 0};
    for (const FovCell& cell : visible_blocks(grid, start)) {
        if (cell.in_grid()) frame.evidence[grid.cell_index(cell.w, cell.h)] = rng.uniform();
    }
    const SensorModel sensor;
    const Preferences prefs = Preferences::make(PreferenceMode::Seek, grid);

    BenchResult result{grid, {}, 0, 0, 0, parameter_count(grid)};
    result.samples_ns.reserve(repetitions);
    volatile int sink = 0;
    for (int i = 0; i <= repetitions; ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        const BeliefState post = update_beliefs(belief, frame, sensor, grid);
        const ActionChoice choice = select_action(post, sensor, prefs, grid);
        const auto t1 = std::chrono::steady_clock::now();
        sink = sink + choice.fixation.k;
        if (i == 0) continue;  // warm-up
        result.samples_ns.push_back(std::chrono::duration_cast<std::chrono::nanoseconds>(t1 - t0).count());
    }
    result.min_ns = *std::min_element(result.samples_ns.begin(), result.samples_ns.end());
    result.median_ns = percentile(result.samples_ns, 50);
    result.p99_ns = percentile(result.samples_ns, 99);
    return result;
}

} // namespace saccade
