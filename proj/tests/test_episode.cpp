#include <gtest/gtest.h>

#include "saccade/config.hpp"
#include "saccade/episode.hpp"
#include "saccade/render.hpp"

using namespace saccade;
using nlohmann::json;

namespace {

Scenario explore_scenario()
{
    return parse_scenario(json::parse(R"({
        "grid": {"K": 9, "L": 9, "W": 3, "H": 3},
        "sensor": {"p_hit": 1.0, "p_fa": 0.0},
        "detector": {"confidence_given_hit": [1.0, 1.0]},
        "preferences": {"mode": "explore"},
        "start": [4, 4],
        "record_latency": false
    })"));
}

std::string config_error_field(const char* text)
{
    try {
        parse_scenario(json::parse(text));
    } catch (const ConfigError& e) {
        return e.field();
    }
    return "<no error>";
}

} // namespace

TEST(ScenarioConfig, Defaults)
{
    const Scenario s = parse_scenario(json::object());
    EXPECT_EQ(s.agent.grid, GridSpec(9, 9, 3, 3));
    EXPECT_EQ(s.agent.sensor.p_hit, 0.9);
    EXPECT_EQ(s.agent.sensor.p_fa, 0.02);
    EXPECT_EQ(s.agent.prior, 0.5);
    EXPECT_EQ(s.agent.leak, 0.0);
    EXPECT_EQ(s.agent.mode, PreferenceMode::Explore);
    EXPECT_EQ(s.agent.c_value, 1.0);
    EXPECT_EQ(s.agent.ingest.confidence_floor, 0.25);
    EXPECT_EQ(s.agent.ingest.overlap_threshold, 0.2);
    EXPECT_EQ(s.detector.p_hit, 0.9);
    EXPECT_TRUE(s.objects.empty());
}

TEST(ScenarioConfig, ErrorsNameTheField)
{
    EXPECT_EQ(config_error_field(R"({"grid": {"K": 3, "W": 4}})"), "grid.W");
    EXPECT_EQ(config_error_field(R"({"sensor": {"p_hit": 0.1, "p_fa": 0.5}})"), "sensor");
    EXPECT_EQ(config_error_field(R"({"sensor": {"p_hit": 2}})"), "sensor.p_hit");
    EXPECT_EQ(config_error_field(R"({"preferences": {"mode": "hunt"}})"), "preferences.mode");
    EXPECT_EQ(config_error_field(R"({"objects": [{"block": [1, 1]}, {"block": [20, 1]}]})"), "objects[1].block");
    EXPECT_EQ(config_error_field(R"({"objects": [{"class": "person"}]})"), "objects[0].block");
    EXPECT_EQ(config_error_field(R"({"start": [9, 0]})"), "start");
    EXPECT_EQ(config_error_field(R"({"leak": -0.5})"), "leak");
    EXPECT_EQ(config_error_field(R"({"gird": {}})"), "gird");
    EXPECT_EQ(config_error_field(R"({"detector": {"confidence_given_hit": [0.9, 0.1]}})"),
              "detector.confidence_given_hit");
    EXPECT_EQ(config_error_field(R"({"selection": {"policy": "softmax", "temperature": 0}})"),
              "selection.temperature");
    EXPECT_THROW(load_scenario("/nonexistent/scenario.json"), ConfigError);
}

TEST(RunEpisode, ProducesOneRecordPerStep)
{
    const EpisodeTrace trace = run_episode(explore_scenario(), 20);
    ASSERT_EQ(trace.size(), 20u);
    for (std::size_t i = 0; i < trace.size(); ++i) {
        EXPECT_EQ(trace[i].t, static_cast<long long>(i));
        EXPECT_EQ(trace[i].evidence.size(), 9u);
        if (i > 0) {
            EXPECT_EQ(trace[i].fixation, trace[i - 1].action);  // actuation follows the planner
        }
    }
    EXPECT_EQ(trace[0].fixation, (Fixation{4, 4}));
    EXPECT_THROW(run_episode(explore_scenario(), 0), ContractViolation);
}

TEST(RunEpisode, DeterministicTraceBytes)
{
    Scenario s = explore_scenario();
    s.agent.sensor = {0.85, 0.05};
    s.detector.p_hit = 0.8;
    s.detector.p_fa = 0.05;
    s.detector.confidence_given_hit = {0.5, 0.99};
    s.objects = {{{2, 2}, "person", 0.3}, {{7, 6}, "person", 0.0}};
    s.agent.mode = PreferenceMode::Seek;
    s.agent.leak = 0.02;
    s.trace_beliefs = true;
    s.agent.seed = 1234;
    EXPECT_EQ(encode_trace(run_episode(s, 40)), encode_trace(run_episode(s, 40)));
    s.agent.selection = {SelectionPolicy::Kind::Softmax, 0.3};
    EXPECT_EQ(encode_trace(run_episode(s, 40)), encode_trace(run_episode(s, 40)));
    Scenario other = s;
    other.agent.seed = 1235;
    EXPECT_NE(encode_trace(run_episode(s, 40)), encode_trace(run_episode(other, 40)));
}

TEST(Trace, RecordRoundTrip)
{
    Scenario s = explore_scenario();
    s.trace_beliefs = true;
    s.objects = {{{1, 7}, "person", 0.0}};
    for (const StepRecord& r : run_episode(s, 12)) {
        EXPECT_EQ(parse_step_record(encode_step_record(r)), r);
    }
    EXPECT_THROW(parse_step_record(R"({"t":1,"action":[0,0]})"), ParseError);
    EXPECT_THROW(parse_step_record("{\"t\":1,"), ParseError);
}

TEST(Trace, CoreFieldsPresent)
{
    const auto line = encode_step_record(run_episode(explore_scenario(), 1)[0]);
    const json j = json::parse(line);
    for (const char* key : {"t", "action", "evidence_nonzero", "entropy_total", "coverage", "latency_us"}) {
        EXPECT_TRUE(j.contains(key)) << key;
    }
}

TEST(Summary, CoverageAndTracking)
{
    Scenario s = explore_scenario();
    const auto summary = summarize(run_episode(s, 20));
    ASSERT_TRUE(summary.coverage_fixations.has_value());
    EXPECT_EQ(*summary.coverage_fixations, 9);
    EXPECT_FALSE(summary.mean_tracking_error.has_value());

    s.agent.mode = PreferenceMode::Track;
    s.objects = {{{6, 2}, "person", 0.0}};
    const auto tracked = summarize(run_episode(s, 30));
    ASSERT_TRUE(tracked.steps_to_detect.has_value());
    ASSERT_TRUE(tracked.mean_tracking_error.has_value());
    EXPECT_LT(*tracked.mean_tracking_error, 3.0);
}

TEST(Percentile, NearestRank)
{
    EXPECT_EQ(percentile(std::vector<int>{5, 1, 4, 2, 3}, 50), 3);
    EXPECT_EQ(percentile(std::vector<int>{5, 1, 4, 2, 3}, 100), 5);
    EXPECT_EQ(percentile(std::vector<int>{5, 1, 4, 2, 3}, 0), 1);
    std::vector<int> hundred(100);
    for (int i = 0; i < 100; ++i) hundred[i] = i + 1;
    EXPECT_EQ(percentile(hundred, 99), 99);
}

TEST(Render, AsciiOneFramePerStepWithFullFovPanel)
{
    Scenario s = explore_scenario();
    s.trace_beliefs = true;
    s.objects = {{{0, 0}, "person", 0.0}};
    const EpisodeTrace trace = run_episode(s, 1);
    const std::string text = render_ascii_step(trace[0]);
    EXPECT_EQ(text.find("t=0"), 0u);
    const auto panel = text.substr(text.find("fov:\n") + 5);
    int glyphs = 0;
    for (char c : panel) glyphs += (c == kBinGlyphs[0] || c == kBinGlyphs[1] || c == kBinGlyphs[2]) ? 1 : 0;
    EXPECT_EQ(glyphs, 9);

    // a corner fixation still shows W*H cells, the clipped ones as not visible
    StepRecord corner = trace[0];
    corner.fixation = {0, 0};
    corner.evidence = {std::nullopt, std::nullopt, std::nullopt, std::nullopt, 1.0, 0.0, std::nullopt, 0.0, 0.0};
    const auto corner_panel = render_ascii_step(corner).substr(render_ascii_step(corner).find("fov:\n") + 5);
    EXPECT_EQ(std::count(corner_panel.begin(), corner_panel.end(), kBinGlyphs[2]), 5);
    EXPECT_EQ(std::count(corner_panel.begin(), corner_panel.end(), kBinGlyphs[1]), 1);
    EXPECT_EQ(std::count(corner_panel.begin(), corner_panel.end(), kBinGlyphs[0]), 3);

    // grid section: L rows of K cells, 9 bracketed FOV cells
    const std::string grid_part = text.substr(0, text.find("fov:"));
    EXPECT_EQ(std::count(grid_part.begin(), grid_part.end(), '['), 9);
}

TEST(Render, CsvRows)
{
    const EpisodeTrace trace = run_episode(explore_scenario(), 20);
    const std::string header = csv_header();
    EXPECT_EQ(header.substr(0, 2), "t,");
    for (const auto& r : trace) {
        const std::string row = render_csv_row(r);
        EXPECT_EQ(std::count(row.begin(), row.end(), ','), std::count(header.begin(), header.end(), ','));
    }
}
