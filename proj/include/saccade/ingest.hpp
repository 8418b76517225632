#pragma once

#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "saccade/errors.hpp"
#include "saccade/grid.hpp"
#include "saccade/model.hpp"

namespace saccade {

/// Axis-aligned box in normalized image coordinates; x grows with pan, y with tilt.
struct BBox {
    double x = 0.0;
    double y = 0.0;
    double width = 0.0;
    double height = 0.0;

    friend bool operator==(const BBox&, const BBox&) = default;
};

struct Detection {
    BBox bbox;
    double confidence = 0.0;
    std::string class_name;

    friend bool operator==(const Detection&, const Detection&) = default;
};

enum class Assignment { Center, Overlap };

struct IngestConfig {
    std::set<std::string> target_classes{"person"};
    Assignment assignment = Assignment::Center;
    double overlap_threshold = 0.2;
    double confidence_floor = 0.25;

    void validate() const
    {
        require_probability(overlap_threshold, "overlap_threshold");
        require_probability(confidence_floor, "confidence_floor");
    }
};

namespace detail {

inline bool finite(double v) { return std::isfinite(v); }

/// Clips the box to the unit square; false when nothing sensible remains.
inline bool clamp_bbox(BBox& b)
{
    if (!finite(b.x) || !finite(b.y) || !finite(b.width) || !finite(b.height)) return false;
    if (b.width <= 0.0 || b.height <= 0.0) return false;
    const double x0 = std::clamp(b.x, 0.0, 1.0);
    const double y0 = std::clamp(b.y, 0.0, 1.0);
    const double x1 = std::clamp(b.x + b.width, 0.0, 1.0);
    const double y1 = std::clamp(b.y + b.height, 0.0, 1.0);
    if (x1 <= x0 || y1 <= y0) return false;
    b = {x0, y0, x1 - x0, y1 - y0};
    return true;
}

inline int tile_of(double v, int n)
{
    return std::clamp(static_cast<int>(std::floor(v * n)), 0, n - 1);
}

} // namespace detail

/**
 * Turns detector output for one camera frame into per-cell soft evidence.
 *
 * The image is split into W×H uniform tiles matching the FOV cells. A kept detection (target class,
 * confidence >= floor) lends its confidence to the tile holding its center, or in overlap mode to
 * every tile covering at least overlap_threshold of the box. Cells take the max lent confidence.
 * Cells that fall outside the grid are not visible.
 */
inline ObservationFrame detections_to_frame(const std::vector<Detection>& dets, const Fixation& fixation, long long t,
                                            const IngestConfig& cfg, const GridSpec& grid)
{
    if (t < 0) {
        throw ContractViolation("timestep must be non-negative");
    }
    ObservationFrame frame{t, fixation, std::vector<std::optional<double>>(grid.num_cells()), 0};
    for (const FovCell& cell : visible_blocks(grid, fixation)) {
        if (cell.in_grid()) frame.evidence[grid.cell_index(cell.w, cell.h)] = 0.0;
    }

    auto lend = [&](int w, int h, double confidence) {
        auto& e = frame.evidence[grid.cell_index(w, h)];
        if (e) e = std::max(*e, confidence);
    };

    const int W = grid.W();
    const int H = grid.H();
    for (const Detection& d : dets) {
        if (!cfg.target_classes.contains(d.class_name)) continue;
        BBox box = d.bbox;
        if (!detail::clamp_bbox(box) || !detail::finite(d.confidence) || d.confidence < 0.0 || d.confidence > 1.0) {
            ++frame.rejected_detections;
            continue;
        }
        if (d.confidence < cfg.confidence_floor) continue;

        if (cfg.assignment == Assignment::Center) {
            lend(detail::tile_of(box.x + box.width / 2, W), detail::tile_of(box.y + box.height / 2, H), d.confidence);
            continue;
        }
        const double area = box.width * box.height;
        for (int w = 0; w < W; ++w) {
            const double ox = std::min(box.x + box.width, double(w + 1) / W) - std::max(box.x, double(w) / W);
            if (ox <= 0.0) continue;
            for (int h = 0; h < H; ++h) {
                const double oy = std::min(box.y + box.height, double(h + 1) / H) - std::max(box.y, double(h) / H);
                if (oy <= 0.0) continue;
                if (ox * oy >= cfg.overlap_threshold * area) lend(w, h, d.confidence);
            }
        }
    }
    return frame;
}

// ---------------------------------------------------------------------------------------------
// Wire protocol: newline-delimited JSON, one message per line.

struct FrameMessage {
    long long t = 0;
    Fixation fixation;
    std::vector<Detection> detections;

    friend bool operator==(const FrameMessage&, const FrameMessage&) = default;
};

struct ActionMessage {
    long long t = 0;
    Fixation fixation;

    friend bool operator==(const ActionMessage&, const ActionMessage&) = default;
};

namespace detail {

using ojson = nlohmann::ordered_json;

inline std::string_view trim_newline(std::string_view line)
{
    while (!line.empty() && (line.back() == '\n' || line.back() == '\r')) line.remove_suffix(1);
    return line;
}

inline ojson parse_object(std::string_view line, std::string_view expected_type)
{
    line = trim_newline(line);
    ojson j = ojson::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
        throw ParseError("not a JSON object", std::string(line));
    }
    const auto type = j.find("type");
    if (type == j.end() || !type->is_string() || type->get<std::string>() != expected_type) {
        throw ParseError("expected message type \"" + std::string(expected_type) + "\"", std::string(line));
    }
    return j;
}

inline long long parse_timestep(const ojson& j, std::string_view line)
{
    const auto it = j.find("t");
    if (it == j.end() || !it->is_number_integer() || it->get<long long>() < 0) {
        throw ParseError("field \"t\" must be a non-negative integer", std::string(line));
    }
    return it->get<long long>();
}

inline Fixation parse_fixation(const ojson& j, std::string_view line)
{
    const auto it = j.find("fixation");
    if (it == j.end() || !it->is_array() || it->size() != 2 || !(*it)[0].is_number_integer() ||
        !(*it)[1].is_number_integer()) {
        throw ParseError("field \"fixation\" must be [k,l]", std::string(line));
    }
    return {(*it)[0].get<int>(), (*it)[1].get<int>()};
}

} // namespace detail

inline FrameMessage parse_frame_message(std::string_view line)
{
    using detail::ojson;
    const ojson j = detail::parse_object(line, "frame");
    FrameMessage msg{detail::parse_timestep(j, line), detail::parse_fixation(j, line), {}};

    const auto dets = j.find("detections");
    if (dets == j.end() || !dets->is_array()) {
        throw ParseError("field \"detections\" must be an array", std::string(line));
    }
    for (const ojson& d : *dets) {
        const auto bbox = d.find("bbox");
        const auto conf = d.find("confidence");
        const auto cls = d.find("class");
        if (!d.is_object() || bbox == d.end() || !bbox->is_array() || bbox->size() != 4 || conf == d.end() ||
            !conf->is_number() || cls == d.end() || !cls->is_string()) {
            throw ParseError("malformed detection", std::string(line));
        }
        Detection det;
        for (const ojson& v : *bbox) {
            if (!v.is_number()) throw ParseError("bbox entries must be numbers", std::string(line));
        }
        det.bbox = {(*bbox)[0].get<double>(), (*bbox)[1].get<double>(), (*bbox)[2].get<double>(),
                    (*bbox)[3].get<double>()};
        det.confidence = conf->get<double>();
        if (!(det.confidence >= 0.0 && det.confidence <= 1.0)) {
            throw ParseError("confidence must be in [0,1]", std::string(line));
        }
        det.class_name = cls->get<std::string>();
        msg.detections.push_back(std::move(det));
    }
    return msg;
}

/// Frame record without the trailing newline.
inline std::string encode_frame_message(const FrameMessage& msg)
{
    detail::ojson dets = detail::ojson::array();
    for (const Detection& d : msg.detections) {
        dets.push_back({{"bbox", {d.bbox.x, d.bbox.y, d.bbox.width, d.bbox.height}},
                        {"confidence", d.confidence},
                        {"class", d.class_name}});
    }
    detail::ojson j{{"type", "frame"},
                    {"t", msg.t},
                    {"fixation", {msg.fixation.k, msg.fixation.l}},
                    {"detections", std::move(dets)}};
    return j.dump();
}

/// Action record without the trailing newline.
inline std::string encode_action_message(long long t, const Fixation& p)
{
    detail::ojson j{{"type", "action"}, {"t", t}, {"fixation", {p.k, p.l}}};
    return j.dump();
}

inline ActionMessage parse_action_message(std::string_view line)
{
    const auto j = detail::parse_object(line, "action");
    return {detail::parse_timestep(j, line), detail::parse_fixation(j, line)};
}

} // namespace saccade
