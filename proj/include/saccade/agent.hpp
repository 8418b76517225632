#pragma once

#include <cstdint>
#include <utility>

#include "saccade/inference.hpp"
#include "saccade/ingest.hpp"
#include "saccade/model.hpp"
#include "saccade/planner.hpp"

namespace saccade {

/// Everything the planner needs; shared by simulation, serve mode, and replay.
struct AgentConfig {
    GridSpec grid{9, 9, 3, 3};
    SensorModel sensor;
    PreferenceMode mode = PreferenceMode::Explore;
    double c_value = 1.0;
    SelectionPolicy selection;
    std::uint64_t seed = 0;
    double leak = 0.0;
    double prior = 0.5;
    Fixation start{0, 0};
    IngestConfig ingest;
};

/**
 * The perception-action loop of one saccade agent.
 *
 * absorb() carries the previous posterior forward (with optional leak), takes the frame's fixation as the
 * proprioceptive observation and runs the belief update. plan() picks the next fixation.
 */
class Agent {
public:
    explicit Agent(AgentConfig cfg)
        : cfg_(std::move(cfg)),
          prefs_(Preferences::make(cfg_.mode, cfg_.grid, cfg_.c_value)),
          belief_(init_belief(cfg_.grid, cfg_.prior, cfg_.start)),
          rng_(cfg_.seed)
    {
        cfg_.sensor.validate();
        cfg_.ingest.validate();
        require_probability(cfg_.leak, "leak");
    }

    const AgentConfig& config() const noexcept { return cfg_; }
    const BeliefState& belief() const noexcept { return belief_; }
    const Preferences& preferences() const noexcept { return prefs_; }

    ObservationFrame to_frame(const FrameMessage& msg) const
    {
        cfg_.grid.require_contains(msg.fixation);
        return detections_to_frame(msg.detections, msg.fixation, msg.t, cfg_.ingest, cfg_.grid);
    }

    void absorb(const ObservationFrame& frame)
    {
        cfg_.grid.require_contains(frame.fixation);
        BeliefState next = frames_seen_ > 0 ? advance_prior(belief_, cfg_.leak) : belief_;
        next.fixation = frame.fixation;
        belief_ = update_beliefs(std::move(next), frame, cfg_.sensor, cfg_.grid);
        ++frames_seen_;
    }

    ActionChoice plan()
    {
        return select_action(belief_, cfg_.sensor, prefs_, cfg_.grid, cfg_.selection, &rng_);
    }

    /// absorb + plan for one wire frame.
    Fixation respond(const FrameMessage& msg)
    {
        absorb(to_frame(msg));
        return plan().fixation;
    }

private:
    AgentConfig cfg_;
    Preferences prefs_;
    BeliefState belief_;
    Rng rng_;
    long long frames_seen_ = 0;
};

} // namespace saccade
