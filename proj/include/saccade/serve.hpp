#pragma once

#include <condition_variable>
#include <cstddef>
#include <deque>
#include <functional>
#include <istream>
#include <mutex>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "saccade/agent.hpp"
#include "saccade/ingest.hpp"

namespace saccade {

/// What the planner does when frames queue up faster than it can answer.
enum class LagPolicy {
    EveryFrame,   // answer each frame in order (back-pressure on the reader)
    LatestFrame,  // fold every queued frame into the beliefs, answer only the newest
};

struct ServeOptions {
    LagPolicy lag_policy = LagPolicy::EveryFrame;
    std::size_t queue_capacity = 64;
};

struct ServeStats {
    std::size_t frames = 0;     // well-formed frames absorbed
    std::size_t actions = 0;    // action messages emitted
    std::size_t malformed = 0;  // lines skipped
};

using LineSource = std::function<std::optional<std::string>()>;
using LineSink = std::function<void(const std::string&)>;
using WarningSink = std::function<void(const std::string&)>;

/// Blocking FIFO with a capacity bound; close() wakes everyone and lets consumers drain.
template <typename T>
class BoundedQueue {
public:
    explicit BoundedQueue(std::size_t capacity) : capacity_(capacity == 0 ? 1 : capacity) {}

    void push(T value)
    {
        std::unique_lock lock(mutex_);
        not_full_.wait(lock, [&] { return items_.size() < capacity_ || closed_; });
        if (closed_) return;
        items_.push_back(std::move(value));
        not_empty_.notify_one();
    }

    /// Blocks until an item is available; empty once closed and drained.
    std::optional<T> pop()
    {
        std::unique_lock lock(mutex_);
        not_empty_.wait(lock, [&] { return !items_.empty() || closed_; });
        return take(lock);
    }

    std::optional<T> try_pop()
    {
        std::unique_lock lock(mutex_);
        return take(lock);
    }

    void close()
    {
        std::lock_guard lock(mutex_);
        closed_ = true;
        not_empty_.notify_all();
        not_full_.notify_all();
    }

private:
    std::optional<T> take(std::unique_lock<std::mutex>&)
    {
        if (items_.empty()) return std::nullopt;
        T value = std::move(items_.front());
        items_.pop_front();
        not_full_.notify_one();
        return value;
    }

    std::size_t capacity_;
    std::deque<T> items_;
    bool closed_ = false;
    std::mutex mutex_;
    std::condition_variable not_empty_;
    std::condition_variable not_full_;
};

/**
 * Runs one planner session over a line transport: frame messages in, action messages out.
 *
 * A reader thread parses lines into a bounded queue; the calling thread plans. Malformed lines and
 * frames the agent rejects are reported through `warn` and skipped. Returns after the source is
 * exhausted and the queue drained.
 */
inline ServeStats serve_lines(const LineSource& next_line, const LineSink& emit, const AgentConfig& cfg,
                              const ServeOptions& opts = {}, const WarningSink& warn = {})
{
    Agent agent(cfg);
    BoundedQueue<FrameMessage> queue(opts.queue_capacity);
    ServeStats stats;
    std::mutex warn_mutex;
    auto report = [&](const std::string& msg) {
        std::lock_guard lock(warn_mutex);
        ++stats.malformed;
        if (warn) warn(msg);
    };

    std::thread reader([&] {
        while (auto line = next_line()) {
            if (line->find_first_not_of(" \t\r\n") == std::string::npos) continue;
            try {
                queue.push(parse_frame_message(*line));
            } catch (const ParseError& e) {
                report(std::string("skipping malformed line: ") + e.what() + ": " + e.line());
            }
        }
        queue.close();
    });

    auto absorb = [&](const FrameMessage& msg) {
        try {
            agent.absorb(agent.to_frame(msg));
            std::lock_guard lock(warn_mutex);
            ++stats.frames;
            return true;
        } catch (const std::exception& e) {
            report("skipping frame t=" + std::to_string(msg.t) + ": " + e.what());
            return false;
        }
    };

    while (auto msg = queue.pop()) {
        bool ok = absorb(*msg);
        long long t = msg->t;
        if (opts.lag_policy == LagPolicy::LatestFrame) {
            while (auto later = queue.try_pop()) {
                if (absorb(*later)) {
                    ok = true;
                    t = later->t;
                }
            }
        }
        if (!ok) continue;
        emit(encode_action_message(t, agent.plan().fixation));
        ++stats.actions;
    }
    reader.join();
    return stats;
}

inline ServeStats serve_stream(std::istream& in, std::ostream& out, const AgentConfig& cfg,
                               const ServeOptions& opts = {}, const WarningSink& warn = {})
{
    return serve_lines(
        [&in]() -> std::optional<std::string> {
            std::string line;
            if (!std::getline(in, line)) return std::nullopt;
            return line;
        },
        [&out](const std::string& action) { out << action << '\n' << std::flush; }, cfg, opts, warn);
}

/// Single-threaded reference: the actions an in-process agent gives for a recorded frame stream.
inline std::vector<std::string> replay_frames(const std::vector<std::string>& lines, const AgentConfig& cfg,
                                              const WarningSink& warn = {})
{
    Agent agent(cfg);
    std::vector<std::string> actions;
    for (const auto& line : lines) {
        if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
        try {
            const FrameMessage msg = parse_frame_message(line);
            actions.push_back(encode_action_message(msg.t, agent.respond(msg)));
        } catch (const std::exception& e) {
            if (warn) warn(std::string("skipping line: ") + e.what());
        }
    }
    return actions;
}

} // namespace saccade
