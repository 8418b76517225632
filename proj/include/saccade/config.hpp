#pragma once

#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "saccade/agent.hpp"
#include "saccade/errors.hpp"
#include "saccade/simulator.hpp"

namespace saccade {

/// A closed-loop simulation setup: the agent plus the world it looks at.
struct Scenario {
    AgentConfig agent;
    DetectorSim detector;
    std::vector<WorldObject> objects;
    int max_move = 0;            // per-axis actuation limit per step, 0 = instantaneous jumps
    bool record_latency = true;  // false writes latency_us = 0 so traces are byte-identical across runs
    bool trace_beliefs = false;
};

namespace detail {

using json = nlohmann::json;

/// Typed access to one JSON object with dotted field paths for error messages.
class Fields {
public:
    Fields(const json& j, std::string path) : j_(j), path_(std::move(path))
    {
        if (!j_.is_object()) throw ConfigError(path_.empty() ? "<root>" : path_, "must be an object");
    }

    std::string at(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    void allow_only(std::initializer_list<const char*> keys) const
    {
        for (const auto& [key, value] : j_.items()) {
            bool known = false;
            for (const char* k : keys) known = known || key == k;
            if (!known) throw ConfigError(at(key), "unknown field");
        }
    }

    const json* find(const std::string& key) const
    {
        const auto it = j_.find(key);
        return it == j_.end() ? nullptr : &*it;
    }

    double number(const std::string& key, double fallback) const
    {
        const json* v = find(key);
        if (v == nullptr) return fallback;
        if (!v->is_number()) throw ConfigError(at(key), "must be a number");
        return v->get<double>();
    }

    double probability(const std::string& key, double fallback) const
    {
        const double p = number(key, fallback);
        if (!(p >= 0.0 && p <= 1.0)) throw ConfigError(at(key), "must be in [0,1]");
        return p;
    }

    long long integer(const std::string& key, long long fallback) const
    {
        const json* v = find(key);
        if (v == nullptr) return fallback;
        if (!v->is_number_integer()) throw ConfigError(at(key), "must be an integer");
        return v->get<long long>();
    }

    bool boolean(const std::string& key, bool fallback) const
    {
        const json* v = find(key);
        if (v == nullptr) return fallback;
        if (!v->is_boolean()) throw ConfigError(at(key), "must be true or false");
        return v->get<bool>();
    }

    std::string string(const std::string& key, const std::string& fallback) const
    {
        const json* v = find(key);
        if (v == nullptr) return fallback;
        if (!v->is_string()) throw ConfigError(at(key), "must be a string");
        return v->get<std::string>();
    }

    Fixation pair(const std::string& key, const Fixation& fallback) const
    {
        const json* v = find(key);
        if (v == nullptr) return fallback;
        return as_pair(*v, at(key));
    }

    static Fixation as_pair(const json& v, const std::string& path)
    {
        if (!v.is_array() || v.size() != 2 || !v[0].is_number_integer() || !v[1].is_number_integer()) {
            throw ConfigError(path, "must be [k,l]");
        }
        return {v[0].get<int>(), v[1].get<int>()};
    }

    ConfidenceRange range(const std::string& key, const ConfidenceRange& fallback) const
    {
        const json* v = find(key);
        if (v == nullptr) return fallback;
        if (!v->is_array() || v->size() != 2 || !(*v)[0].is_number() || !(*v)[1].is_number()) {
            throw ConfigError(at(key), "must be [lo,hi]");
        }
        ConfidenceRange r{(*v)[0].get<double>(), (*v)[1].get<double>()};
        if (!(r.lo > 0.0 && r.lo <= r.hi && r.hi <= 1.0)) throw ConfigError(at(key), "must satisfy 0 < lo <= hi <= 1");
        return r;
    }

    Fields object(const std::string& key) const
    {
        static const json empty = json::object();
        const json* v = find(key);
        return Fields(v == nullptr ? empty : *v, at(key));
    }

private:
    const json& j_;
    std::string path_;
};

inline void parse_agent(const Fields& root, AgentConfig& a)
{
    const Fields grid = root.object("grid");
    grid.allow_only({"K", "L", "W", "H"});
    const auto K = grid.integer("K", 9), L = grid.integer("L", 9);
    const auto W = grid.integer("W", 3), H = grid.integer("H", 3);
    if (K < 1 || K > 4096) throw ConfigError(grid.at("K"), "must be in [1,4096]");
    if (L < 1 || L > 4096) throw ConfigError(grid.at("L"), "must be in [1,4096]");
    if (W < 1 || W > K) throw ConfigError(grid.at("W"), "must satisfy 1 <= W <= K");
    if (H < 1 || H > L) throw ConfigError(grid.at("H"), "must satisfy 1 <= H <= L");
    a.grid = GridSpec(int(K), int(L), int(W), int(H));

    const Fields sensor = root.object("sensor");
    sensor.allow_only({"p_hit", "p_fa"});
    a.sensor.p_hit = sensor.probability("p_hit", a.sensor.p_hit);
    a.sensor.p_fa = sensor.probability("p_fa", a.sensor.p_fa);
    try {
        a.sensor.validate();
    } catch (const ContractViolation& e) {
        throw ConfigError(root.at("sensor"), e.what());
    }

    const Fields prefs = root.object("preferences");
    prefs.allow_only({"mode", "c_value"});
    const std::string mode = prefs.string("mode", "explore");
    const auto parsed = parse_preference_mode(mode);
    if (!parsed) throw ConfigError(prefs.at("mode"), "must be explore, seek or track (got \"" + mode + "\")");
    a.mode = *parsed;
    a.c_value = prefs.number("c_value", 1.0);

    const Fields sel = root.object("selection");
    sel.allow_only({"policy", "temperature"});
    const std::string policy = sel.string("policy", "argmin");
    if (policy == "argmin") {
        a.selection.kind = SelectionPolicy::Kind::Argmin;
    } else if (policy == "softmax") {
        a.selection.kind = SelectionPolicy::Kind::Softmax;
    } else {
        throw ConfigError(sel.at("policy"), "must be argmin or softmax");
    }
    a.selection.temperature = sel.number("temperature", 1.0);
    if (!(a.selection.temperature > 0.0)) throw ConfigError(sel.at("temperature"), "must be positive");

    const long long seed = root.integer("seed", 0);
    if (seed < 0) throw ConfigError(root.at("seed"), "must be non-negative");
    a.seed = static_cast<std::uint64_t>(seed);
    a.leak = root.probability("leak", 0.0);
    a.prior = root.probability("prior", 0.5);
    a.start = root.pair("start", a.start);
    if (!a.grid.contains(a.start)) throw ConfigError(root.at("start"), "outside grid");

    const Fields ingest = root.object("ingest");
    ingest.allow_only({"target_classes", "assignment", "overlap_threshold", "confidence_floor"});
    if (const json* classes = ingest.find("target_classes")) {
        if (!classes->is_array()) throw ConfigError(ingest.at("target_classes"), "must be an array of strings");
        a.ingest.target_classes.clear();
        for (const json& c : *classes) {
            if (!c.is_string()) throw ConfigError(ingest.at("target_classes"), "must be an array of strings");
            a.ingest.target_classes.insert(c.get<std::string>());
        }
    }
    const std::string assignment = ingest.string("assignment", "center");
    if (assignment == "center") {
        a.ingest.assignment = Assignment::Center;
    } else if (assignment == "overlap") {
        a.ingest.assignment = Assignment::Overlap;
    } else {
        throw ConfigError(ingest.at("assignment"), "must be center or overlap");
    }
    a.ingest.overlap_threshold = ingest.probability("overlap_threshold", 0.2);
    a.ingest.confidence_floor = ingest.probability("confidence_floor", 0.25);
}

inline json parse_json_text(const std::string& text, const std::string& origin)
{
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) throw ConfigError(origin, "not valid JSON");
    return j;
}

inline std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError(path, "cannot open file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace detail

/// Planner configuration (serve/replay). Accepts scenario files too; world fields are ignored.
inline AgentConfig parse_agent_config(const nlohmann::json& j)
{
    AgentConfig a;
    detail::parse_agent(detail::Fields(j, ""), a);
    return a;
}

inline Scenario parse_scenario(const nlohmann::json& j)
{
    const detail::Fields root(j, "");
    root.allow_only({"grid", "sensor", "preferences", "selection", "seed", "leak", "prior", "start", "ingest",
                     "detector", "objects", "max_move", "record_latency", "trace_beliefs"});
    Scenario s;
    detail::parse_agent(root, s.agent);

    const detail::Fields det = root.object("detector");
    det.allow_only({"p_hit", "p_fa", "confidence_given_hit", "confidence_given_fa", "false_alarm_class"});
    s.detector.p_hit = det.probability("p_hit", s.agent.sensor.p_hit);
    s.detector.p_fa = det.probability("p_fa", s.agent.sensor.p_fa);
    s.detector.confidence_given_hit = det.range("confidence_given_hit", s.detector.confidence_given_hit);
    s.detector.confidence_given_fa = det.range("confidence_given_fa", s.detector.confidence_given_fa);
    s.detector.false_alarm_class = det.string("false_alarm_class", s.detector.false_alarm_class);

    if (const auto* objects = root.find("objects")) {
        if (!objects->is_array()) throw ConfigError("objects", "must be an array");
        for (std::size_t i = 0; i < objects->size(); ++i) {
            const detail::Fields o((*objects)[i], "objects[" + std::to_string(i) + "]");
            o.allow_only({"block", "class", "move_prob"});
            if (o.find("block") == nullptr) throw ConfigError(o.at("block"), "required");
            WorldObject obj{o.pair("block", {}), o.string("class", "person"), o.probability("move_prob", 0.0)};
            if (!s.agent.grid.contains(obj.block)) throw ConfigError(o.at("block"), "outside grid");
            s.objects.push_back(std::move(obj));
        }
    }
    const long long max_move = root.integer("max_move", 0);
    if (max_move < 0) throw ConfigError("max_move", "must be non-negative");
    s.max_move = int(max_move);
    s.record_latency = root.boolean("record_latency", true);
    s.trace_beliefs = root.boolean("trace_beliefs", false);
    return s;
}

inline Scenario load_scenario(const std::string& path)
{
    return parse_scenario(detail::parse_json_text(detail::read_file(path), path));
}

inline AgentConfig load_agent_config(const std::string& path)
{
    return parse_agent_config(detail::parse_json_text(detail::read_file(path), path));
}

} // namespace saccade
