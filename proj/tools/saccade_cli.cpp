// saccade: command-line front end for the active-inference saccade planner.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "saccade/saccade.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

void setup_logging()
{
    auto logger = spdlog::stderr_color_mt("saccade");
    spdlog::set_default_logger(logger);
    spdlog::set_pattern("[%l] %v");
    if (const char* level = std::getenv("SACCADE_LOG_LEVEL")) {
        spdlog::set_level(spdlog::level::from_str(level));
    } else {
        spdlog::set_level(spdlog::level::info);
    }
}

std::string format_optional(const std::optional<int>& v)
{
    return v ? std::to_string(*v) : "never";
}

int cmd_simulate(const std::string& scenario_path, int steps, const std::string& trace_path, bool no_latency)
{
    saccade::Scenario scenario = saccade::load_scenario(scenario_path);
    if (no_latency) scenario.record_latency = false;
    const saccade::EpisodeTrace trace = saccade::run_episode(scenario, steps);

    std::ofstream out(trace_path, std::ios::binary);
    if (!out) throw saccade::ConfigError(trace_path, "cannot write trace");
    out << saccade::encode_trace(trace);

    const saccade::EpisodeSummary s = saccade::summarize(trace);
    std::cout << "steps: " << s.steps << '\n'
              << "coverage_fixations: " << format_optional(s.coverage_fixations) << '\n'
              << "final_coverage: " << trace.back().coverage << '\n'
              << "final_entropy: " << trace.back().entropy_total << '\n';
    if (!scenario.objects.empty()) {
        std::cout << "steps_to_detect: " << format_optional(s.steps_to_detect) << '\n'
                  << "mean_tracking_error: " << *s.mean_tracking_error << '\n';
    }
    std::cout << "latency_p50_us: " << s.latency_p50_us << '\n'
              << "latency_p99_us: " << s.latency_p99_us << '\n'
              << "latency_max_us: " << s.latency_max_us << '\n';
    return kExitOk;
}

saccade::ServeOptions serve_options(const std::string& lag, std::size_t queue)
{
    saccade::ServeOptions opts;
    opts.lag_policy = lag == "latest" ? saccade::LagPolicy::LatestFrame : saccade::LagPolicy::EveryFrame;
    opts.queue_capacity = queue;
    return opts;
}

int cmd_serve(const std::string& transport, int port, const std::string& config_path, const std::string& lag,
              std::size_t queue, std::size_t max_connections)
{
    const saccade::AgentConfig cfg = config_path.empty() ? saccade::AgentConfig{}
                                                         : saccade::load_agent_config(config_path);
    const auto opts = serve_options(lag, queue);
    auto warn = [](const std::string& msg) { spdlog::warn("{}", msg); };

    if (transport == "stdio") {
        std::ios::sync_with_stdio(false);
        const auto stats = saccade::serve_stream(std::cin, std::cout, cfg, opts, warn);
        spdlog::info("served {} frames, {} actions, {} skipped", stats.frames, stats.actions, stats.malformed);
        return kExitOk;
    }
    saccade::Socket listener;
    try {
        listener = saccade::listen_tcp(port);
    } catch (const std::exception& e) {
        spdlog::error("{}", e.what());
        return kExitRuntime;
    }
    spdlog::info("listening on port {}", saccade::bound_port(listener));
    const auto stats = saccade::serve_tcp(std::move(listener), cfg, opts, warn, max_connections);
    spdlog::info("served {} frames, {} actions, {} skipped", stats.frames, stats.actions, stats.malformed);
    return kExitOk;
}

int cmd_replay(const std::string& config_path, const std::string& frames_path)
{
    const saccade::AgentConfig cfg = config_path.empty() ? saccade::AgentConfig{}
                                                         : saccade::load_agent_config(config_path);
    std::ifstream in(frames_path);
    if (!in) throw saccade::ConfigError(frames_path, "cannot open file");
    std::vector<std::string> lines;
    for (std::string line; std::getline(in, line);) lines.push_back(line);
    for (const auto& action :
         saccade::replay_frames(lines, cfg, [](const std::string& msg) { spdlog::warn("{}", msg); })) {
        std::cout << action << '\n';
    }
    return kExitOk;
}

int cmd_bench(const std::string& grids, int reps)
{
    std::vector<saccade::GridSpec> cases;
    std::stringstream ss(grids);
    for (std::string label; std::getline(ss, label, ',');) cases.push_back(saccade::parse_grid_label(label));

    for (const auto& grid : cases) {
        const saccade::BenchResult r = saccade::run_bench(grid, reps);
        std::printf("grid=%s reps=%zu min_us=%.2f median_us=%.2f p99_us=%.2f\n", saccade::grid_label(grid).c_str(),
                    r.samples_ns.size(), r.min_ns / 1e3, r.median_ns / 1e3, r.p99_ns / 1e3);
        std::printf("params grid=%s belief=%zu likelihood=%zu preferences=%zu total=%zu\n",
                    saccade::grid_label(grid).c_str(), r.params.belief, r.params.likelihood, r.params.preferences,
                    r.params.total());
    }
    return kExitOk;
}

int cmd_render(const std::string& trace_path, const std::string& mode)
{
    std::ifstream in(trace_path);
    if (!in) throw saccade::ConfigError(trace_path, "cannot open file");
    if (mode == "csv") std::cout << saccade::csv_header() << '\n';
    std::size_t lineno = 0;
    for (std::string line; std::getline(in, line);) {
        ++lineno;
        if (line.empty()) continue;
        try {
            const saccade::StepRecord r = saccade::parse_step_record(line);
            std::cout << (mode == "csv" ? saccade::render_csv_row(r) + "\n" : saccade::render_ascii_step(r) + "\n");
        } catch (const saccade::ParseError& e) {
            spdlog::warn("{}:{}: skipping corrupt record: {}", trace_path, lineno, e.what());
        }
    }
    return kExitOk;
}

} // namespace

int main(int argc, char** argv)
{
    setup_logging();
    CLI::App app{"Active-inference saccade planner"};
    app.require_subcommand(1);

    std::string scenario_path, trace_path, config_path, frames_path, transport = "stdio", lag = "every";
    std::string grids = "9x9/3x3,16x16/5x5", mode = "ascii";
    int steps = 20, port = 7878, reps = 1000;
    std::size_t queue = 64, max_connections = 0;
    bool no_latency = false;

    auto* sim = app.add_subcommand("simulate", "Run a closed-loop episode against the world simulator");
    sim->add_option("--scenario", scenario_path, "Scenario JSON")->required();
    sim->add_option("--steps", steps, "Number of steps")->check(CLI::PositiveNumber);
    sim->add_option("--trace", trace_path, "NDJSON trace output")->required();
    sim->add_flag("--no-latency", no_latency, "Write latency_us = 0 for byte-identical traces");

    auto* serve = app.add_subcommand("serve", "Answer frame messages with action messages");
    serve->add_option("--transport", transport)->check(CLI::IsMember({"stdio", "tcp"}));
    serve->add_option("--port", port)->check(CLI::Range(0, 65535));
    serve->add_option("--config", config_path, "Model config JSON (scenario files work too)");
    serve->add_option("--lag", lag, "every: answer each frame; latest: answer only the newest queued frame")
        ->check(CLI::IsMember({"every", "latest"}));
    serve->add_option("--queue", queue, "Frame queue capacity")->check(CLI::PositiveNumber);
    serve->add_option("--max-connections", max_connections, "tcp: exit after this many sessions (0 = never)");

    auto* replay = app.add_subcommand("replay", "Run recorded frame messages through an in-process agent");
    replay->add_option("--config", config_path, "Model config JSON");
    replay->add_option("--frames", frames_path, "NDJSON frame messages")->required();

    auto* bench = app.add_subcommand("bench", "Measure update + plan latency");
    bench->add_option("--grids", grids, "Comma-separated KxL/WxH list");
    bench->add_option("--reps", reps, "Timed repetitions (>= 100)")->check(CLI::Range(100, 100000000));

    auto* render = app.add_subcommand("render", "Render a trace as ASCII grids or CSV");
    render->add_option("--trace", trace_path)->required();
    render->add_option("--mode", mode)->check(CLI::IsMember({"ascii", "csv"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (*sim) return cmd_simulate(scenario_path, steps, trace_path, no_latency);
        if (*serve) return cmd_serve(transport, port, config_path, lag, queue, max_connections);
        if (*replay) return cmd_replay(config_path, frames_path);
        if (*bench) return cmd_bench(grids, reps);
        if (*render) return cmd_render(trace_path, mode);
    } catch (const saccade::ConfigError& e) {
        spdlog::error("config error: {}", e.what());
        return kExitConfig;
    } catch (const std::exception& e) {
        spdlog::error("{}", e.what());
        return kExitRuntime;
    }
    return kExitOk;
}
