#pragma once

#include <algorithm>
#include <chrono>
#include <climits>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "saccade/agent.hpp"
#include "saccade/config.hpp"
#include "saccade/simulator.hpp"

namespace saccade {

/// One closed-loop round: what the camera looked at, what it saw, and where it goes next.
struct StepRecord {
    long long t = 0;
    Fixation fixation;  // where the camera was when the frame was taken
    Fixation action;    // planner's choice for the next frame
    int evidence_nonzero = 0;
    double entropy_total = 0.0;
    double coverage = 0.0;
    std::int64_t latency_us = 0;
    std::vector<int> grid;  // K, L, W, H
    std::vector<std::optional<double>> evidence;
    std::vector<Fixation> objects;  // ground truth at observation time
    bool detected = false;          // some object's block believed present (q > 0.5)
    std::vector<double> belief;     // only when beliefs are traced

    friend bool operator==(const StepRecord&, const StepRecord&) = default;
};

using EpisodeTrace = std::vector<StepRecord>;

namespace detail {

inline bool any_object_believed(const BeliefState& belief, const std::vector<Fixation>& objects,
                                const GridSpec& grid)
{
    return std::any_of(objects.begin(), objects.end(),
                       [&](const Fixation& o) { return belief.q[grid.block_index(o)] > 0.5; });
}

} // namespace detail

/**
 * Runs the simulator and the agent against each other for `steps` rounds.
 *
 * Round t: the camera moves to the previous action (the start fixation at t=0), the simulated detector
 * reports, the agent updates its beliefs and picks the next fixation. When `frames` is given, each
 * round's detector output is also appended as a wire-protocol frame message.
 */
inline EpisodeTrace run_episode(const Scenario& scenario, int steps, std::vector<std::string>* frames = nullptr)
{
    if (steps < 1) throw ContractViolation("steps must be >= 1");
    scenario.detector.validate();

    const GridSpec& grid = scenario.agent.grid;
    Agent agent(scenario.agent);
    WorldState world = make_world(scenario.objects, scenario.agent.seed, scenario.agent.start, grid);
    Fixation action = scenario.agent.start;

    EpisodeTrace trace;
    trace.reserve(steps);
    for (int i = 0; i < steps; ++i) {
        StepRecord rec;
        rec.t = world.t;
        rec.grid = {grid.K(), grid.L(), grid.W(), grid.H()};
        for (const auto& o : world.objects) rec.objects.push_back(o.block);

        auto [next_world, dets] = step(std::move(world), action, scenario.detector, grid, scenario.max_move);
        world = std::move(next_world);
        rec.fixation = world.camera;
        if (frames != nullptr) frames->push_back(encode_frame_message({rec.t, world.camera, dets}));

        const auto started = std::chrono::steady_clock::now();
        const ObservationFrame frame = detections_to_frame(dets, world.camera, rec.t, scenario.agent.ingest, grid);
        agent.absorb(frame);
        action = agent.plan().fixation;
        const auto elapsed = std::chrono::steady_clock::now() - started;

        rec.action = action;
        rec.latency_us = scenario.record_latency
                             ? std::chrono::duration_cast<std::chrono::microseconds>(elapsed).count()
                             : 0;
        rec.evidence = frame.evidence;
        rec.evidence_nonzero = int(std::count_if(frame.evidence.begin(), frame.evidence.end(),
                                                 [](const auto& e) { return e && *e > 0.0; }));
        rec.entropy_total = total_entropy(agent.belief());
        rec.coverage = coverage(agent.belief());
        rec.detected = detail::any_object_believed(agent.belief(), rec.objects, grid);
        if (scenario.trace_beliefs) rec.belief = agent.belief().q;
        trace.push_back(std::move(rec));
    }
    return trace;
}

// ---------------------------------------------------------------------------------------------
// NDJSON trace records

inline std::string encode_step_record(const StepRecord& r)
{
    using ojson = nlohmann::ordered_json;
    ojson evidence = ojson::array();
    for (const auto& e : r.evidence) evidence.push_back(e ? ojson(*e) : ojson(nullptr));
    ojson objects = ojson::array();
    for (const auto& o : r.objects) objects.push_back({o.k, o.l});

    ojson j{{"t", r.t},
            {"action", {r.action.k, r.action.l}},
            {"evidence_nonzero", r.evidence_nonzero},
            {"entropy_total", r.entropy_total},
            {"coverage", r.coverage},
            {"latency_us", r.latency_us},
            {"fixation", {r.fixation.k, r.fixation.l}},
            {"grid", r.grid},
            {"evidence", std::move(evidence)},
            {"objects", std::move(objects)},
            {"detected", r.detected}};
    if (!r.belief.empty()) j["belief"] = r.belief;
    return j.dump();
}

inline std::string encode_trace(const EpisodeTrace& trace)
{
    std::string out;
    for (const auto& r : trace) {
        out += encode_step_record(r);
        out += '\n';
    }
    return out;
}

/// Parses one trace line. Only the six core fields are required; the rest default to empty.
inline StepRecord parse_step_record(std::string_view line)
{
    using json = nlohmann::json;
    const json j = json::parse(line, nullptr, false);
    auto fail = [&](const std::string& what) { throw ParseError("trace record: " + what, std::string(line)); };
    if (j.is_discarded() || !j.is_object()) fail("not a JSON object");

    auto pair = [&](const char* key) -> Fixation {
        const auto it = j.find(key);
        if (it == j.end() || !it->is_array() || it->size() != 2 || !(*it)[0].is_number_integer() ||
            !(*it)[1].is_number_integer())
            fail(std::string(key) + " must be [k,l]");
        return {(*it)[0].get<int>(), (*it)[1].get<int>()};
    };
    auto number = [&](const char* key) -> const json& {
        const auto it = j.find(key);
        if (it == j.end() || !it->is_number()) fail(std::string(key) + " must be a number");
        return *it;
    };

    StepRecord r;
    r.t = number("t").get<long long>();
    r.action = pair("action");
    r.evidence_nonzero = number("evidence_nonzero").get<int>();
    r.entropy_total = number("entropy_total").get<double>();
    r.coverage = number("coverage").get<double>();
    r.latency_us = number("latency_us").get<std::int64_t>();
    r.fixation = j.contains("fixation") ? pair("fixation") : r.action;

    try {
        if (j.contains("grid")) r.grid = j.at("grid").get<std::vector<int>>();
        if (r.grid.size() != 0 && r.grid.size() != 4) fail("grid must be [K,L,W,H]");
        if (j.contains("evidence")) {
            for (const json& e : j.at("evidence")) {
                r.evidence.push_back(e.is_null() ? std::nullopt : std::optional<double>(e.get<double>()));
            }
        }
        if (j.contains("objects")) {
            for (const json& o : j.at("objects")) r.objects.push_back({o.at(0).get<int>(), o.at(1).get<int>()});
        }
        if (j.contains("detected")) r.detected = j.at("detected").get<bool>();
        if (j.contains("belief")) r.belief = j.at("belief").get<std::vector<double>>();
    } catch (const json::exception& e) {
        fail(e.what());
    }
    return r;
}

// ---------------------------------------------------------------------------------------------
// Episode metrics

struct EpisodeSummary {
    int steps = 0;
    std::optional<int> coverage_fixations;  // fixations taken until every block was observed
    std::optional<int> steps_to_detect;     // fixations taken until an object was believed present
    std::optional<double> mean_tracking_error;  // Chebyshev distance from camera to nearest object
    std::int64_t latency_p50_us = 0;
    std::int64_t latency_p99_us = 0;
    std::int64_t latency_max_us = 0;
};

/// Nearest-rank percentile of an unsorted sample, p in [0,100].
template <typename T>
T percentile(std::vector<T> sample, double p)
{
    if (sample.empty()) return T{};
    std::sort(sample.begin(), sample.end());
    const auto rank = static_cast<std::size_t>(std::ceil(p / 100.0 * double(sample.size())));
    return sample[std::clamp<std::size_t>(rank, 1, sample.size()) - 1];
}

inline EpisodeSummary summarize(const EpisodeTrace& trace)
{
    EpisodeSummary s;
    s.steps = int(trace.size());
    std::vector<std::int64_t> latencies;
    double err_sum = 0.0;
    int err_n = 0;
    for (std::size_t i = 0; i < trace.size(); ++i) {
        const StepRecord& r = trace[i];
        if (!s.coverage_fixations && r.coverage >= 1.0) s.coverage_fixations = int(i) + 1;
        if (!s.steps_to_detect && r.detected) s.steps_to_detect = int(i) + 1;
        if (!r.objects.empty()) {
            int best = INT_MAX;
            for (const auto& o : r.objects) best = std::min(best, chebyshev(o, r.fixation));
            err_sum += best;
            ++err_n;
        }
        latencies.push_back(r.latency_us);
    }
    if (err_n > 0) s.mean_tracking_error = err_sum / err_n;
    s.latency_p50_us = percentile(latencies, 50);
    s.latency_p99_us = percentile(latencies, 99);
    s.latency_max_us = percentile(latencies, 100);
    return s;
}

} // namespace saccade
