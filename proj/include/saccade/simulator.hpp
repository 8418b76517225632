#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "saccade/grid.hpp"
#include "saccade/ingest.hpp"
#include "saccade/random.hpp"

namespace saccade {

struct WorldObject {
    Fixation block;
    std::string class_name = "person";
    double move_prob = 0.0;

    friend bool operator==(const WorldObject&, const WorldObject&) = default;
};

/// Ground truth for the simulated scene. The generator is part of the state so step() is replayable.
struct WorldState {
    std::vector<WorldObject> objects;
    std::uint64_t rng_seed = 0;
    long long t = 0;
    Fixation camera;
    Rng rng{0};
};

inline WorldState make_world(std::vector<WorldObject> objects, std::uint64_t seed, const Fixation& camera,
                             const GridSpec& grid)
{
    for (const auto& o : objects) {
        if (!grid.contains(o.block)) {
            throw ContractViolation("object at " + to_string(o.block) + " outside grid");
        }
    }
    return {std::move(objects), seed, 0, camera, Rng{seed}};
}

struct ConfidenceRange {
    double lo = 0.0;
    double hi = 1.0;

    friend bool operator==(const ConfidenceRange&, const ConfidenceRange&) = default;
};

/// Generative stand-in for the object detector looking at one FOV.
struct DetectorSim {
    double p_hit = 0.9;
    double p_fa = 0.02;
    ConfidenceRange confidence_given_hit{0.6, 0.95};
    ConfidenceRange confidence_given_fa{0.25, 0.5};
    std::string false_alarm_class = "person";

    void validate() const
    {
        require_probability(p_hit, "detector p_hit");
        require_probability(p_fa, "detector p_fa");
        for (const auto& r : {confidence_given_hit, confidence_given_fa}) {
            if (!(r.lo > 0.0 && r.lo <= r.hi && r.hi <= 1.0)) {
                throw ContractViolation("detector confidence range must satisfy 0 < lo <= hi <= 1");
            }
        }
    }
};

/// Rectangle of FOV tile (w, h) in normalized image coordinates.
inline BBox tile_rect(const GridSpec& grid, int w, int h)
{
    return {double(w) / grid.W(), double(h) / grid.H(), 1.0 / grid.W(), 1.0 / grid.H()};
}

/// Where the camera ends up when commanded to `target`, moving at most max_move blocks per axis (0 = unlimited).
inline Fixation actuate(const Fixation& from, const Fixation& target, int max_move)
{
    if (max_move <= 0) return target;
    auto approach = [max_move](int a, int b) { return a + std::clamp(b - a, -max_move, max_move); };
    return {approach(from.k, target.k), approach(from.l, target.l)};
}

struct StepResult {
    WorldState world;
    std::vector<Detection> detections;
};

/**
 * Points the camera at `action`, simulates one detector pass over the FOV, then lets objects move.
 *
 * Tiles are visited in FOV row-major order. An occupied tile yields a detection with probability p_hit,
 * an empty one a false alarm with probability p_fa. A moving object jumps to a uniformly chosen in-grid
 * 8-neighbour.
 */
inline StepResult step(WorldState world, const Fixation& action, const DetectorSim& det, const GridSpec& grid,
                       int max_move = 0)
{
    grid.require_contains(action);
    world.camera = actuate(world.camera, action, max_move);

    std::vector<Detection> dets;
    for (const FovCell& cell : visible_blocks(grid, world.camera)) {
        if (!cell.in_grid()) continue;
        const WorldObject* occupant = nullptr;
        for (const auto& o : world.objects) {
            if (o.block == *cell.block) {
                occupant = &o;
                break;
            }
        }
        if (occupant != nullptr) {
            if (world.rng.bernoulli(det.p_hit)) {
                const double c = world.rng.uniform(det.confidence_given_hit.lo, det.confidence_given_hit.hi);
                dets.push_back({tile_rect(grid, cell.w, cell.h), c, occupant->class_name});
            }
        } else if (world.rng.bernoulli(det.p_fa)) {
            const double c = world.rng.uniform(det.confidence_given_fa.lo, det.confidence_given_fa.hi);
            dets.push_back({tile_rect(grid, cell.w, cell.h), c, det.false_alarm_class});
        }
    }

    for (auto& o : world.objects) {
        if (o.move_prob <= 0.0 || !world.rng.bernoulli(o.move_prob)) continue;
        std::vector<Fixation> neighbours;
        for (int dk = -1; dk <= 1; ++dk) {
            for (int dl = -1; dl <= 1; ++dl) {
                const Fixation n{o.block.k + dk, o.block.l + dl};
                if ((dk != 0 || dl != 0) && grid.contains(n)) neighbours.push_back(n);
            }
        }
        if (!neighbours.empty()) o.block = neighbours[world.rng.index(neighbours.size())];
    }

    ++world.t;
    return {std::move(world), std::move(dets)};
}

} // namespace saccade
