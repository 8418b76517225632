#pragma once

#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "saccade/episode.hpp"

namespace saccade {

// Belief glyphs per block; the current FOV is drawn with the bracketed variants.
inline constexpr char kGlyphUnknown = '?';
inline constexpr char kGlyphPresent = 'X';
inline constexpr char kGlyphAbsent = '.';
// Observation bins of the FOV panel: no object, object, not visible.
inline constexpr char kBinGlyphs[3] = {'o', 'X', '#'};

inline char belief_glyph(double q)
{
    if (q >= 0.7) return kGlyphPresent;
    if (q <= 0.3) return kGlyphAbsent;
    return kGlyphUnknown;
}

inline char bin_glyph(const std::optional<double>& evidence)
{
    if (!evidence) return kBinGlyphs[2];
    return *evidence >= 0.5 ? kBinGlyphs[1] : kBinGlyphs[0];
}

/**
 * ASCII view of one step: a header, the K×L grid (rows = tilt l, columns = pan k) with belief glyphs
 * and the FOV in brackets, then the W×H observation panel.
 * Blocks never observed are '?' when beliefs are not traced.
 */
inline std::string render_ascii_step(const StepRecord& r)
{
    std::ostringstream out;
    char head[160];
    std::snprintf(head, sizeof head, "t=%lld fixation=(%d,%d) action=(%d,%d) coverage=%.3f entropy=%.4f\n", r.t,
                  r.fixation.k, r.fixation.l, r.action.k, r.action.l, r.coverage, r.entropy_total);
    out << head;
    if (r.grid.size() != 4) {
        out << "(no grid geometry in record)\n";
        return out.str();
    }
    const GridSpec grid(r.grid[0], r.grid[1], r.grid[2], r.grid[3]);
    const CellIndex c = center_cell(grid);
    const int k0 = r.fixation.k - c.w;
    const int l0 = r.fixation.l - c.h;

    for (int l = 0; l < grid.L(); ++l) {
        for (int k = 0; k < grid.K(); ++k) {
            const bool in_fov = k >= k0 && k < k0 + grid.W() && l >= l0 && l < l0 + grid.H();
            const char g = r.belief.size() == grid.num_blocks() ? belief_glyph(r.belief[grid.block_index({k, l})])
                                                                 : kGlyphUnknown;
            out << (in_fov ? '[' : ' ') << g << (in_fov ? ']' : ' ');
        }
        out << '\n';
    }
    out << "fov:\n";
    for (int h = 0; h < grid.H(); ++h) {
        out << "  ";
        for (int w = 0; w < grid.W(); ++w) {
            const std::size_t i = grid.cell_index(w, h);
            out << bin_glyph(i < r.evidence.size() ? r.evidence[i] : std::nullopt);
        }
        out << '\n';
    }
    return out.str();
}

inline std::string csv_header()
{
    return "t,fixation_k,fixation_l,action_k,action_l,evidence_nonzero,entropy_total,coverage,latency_us,detected";
}

inline std::string render_csv_row(const StepRecord& r)
{
    char row[256];
    std::snprintf(row, sizeof row, "%lld,%d,%d,%d,%d,%d,%.17g,%.17g,%lld,%d", r.t, r.fixation.k, r.fixation.l,
                  r.action.k, r.action.l, r.evidence_nonzero, r.entropy_total, r.coverage,
                  static_cast<long long>(r.latency_us), r.detected ? 1 : 0);
    return row;
}

} // namespace saccade
