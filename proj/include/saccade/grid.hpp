#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <optional>
#include <string>
#include <vector>

#include "saccade/errors.hpp"

namespace saccade {

/// A discrete pan/tilt target: block k on the pan axis, block l on the tilt axis.
struct Fixation {
    int k = 0;
    int l = 0;

    friend bool operator==(const Fixation&, const Fixation&) = default;
};

inline std::string to_string(const Fixation& p)
{
    return "(" + std::to_string(p.k) + "," + std::to_string(p.l) + ")";
}

/// Max of the per-axis distances; the number of "moves" a pan/tilt head needs.
inline int chebyshev(const Fixation& a, const Fixation& b)
{
    return std::max(std::abs(a.k - b.k), std::abs(a.l - b.l));
}

/// Index of a cell inside the W×H field of view. w runs along the pan axis.
struct CellIndex {
    int w = 0;
    int h = 0;

    friend bool operator==(const CellIndex&, const CellIndex&) = default;
};

/// One FOV cell and the block it lands on; `block` is empty for cells that fall off the grid.
struct FovCell {
    int w = 0;
    int h = 0;
    std::optional<Fixation> block;

    bool in_grid() const noexcept { return block.has_value(); }
};

/**
 * Geometry of a K×L block grid observed through a W×H field of view.
 *
 * Every block is also a fixation point, so the action space has K·L entries.
 * Block-indexed arrays are stored row-major over (k, l): index = k·L + l.
 * FOV-indexed arrays are stored row-major over (w, h): index = w·H + h.
 */
class GridSpec {
public:
    GridSpec(int K, int L, int W, int H) : K_(K), L_(L), W_(W), H_(H)
    {
        if (K < 1 || L < 1) {
            throw ContractViolation("grid must have K >= 1 and L >= 1");
        }
        if (W < 1 || W > K || H < 1 || H > L) {
            throw ContractViolation("field of view must satisfy 1 <= W <= K and 1 <= H <= L");
        }
    }

    int K() const noexcept { return K_; }
    int L() const noexcept { return L_; }
    int W() const noexcept { return W_; }
    int H() const noexcept { return H_; }

    std::size_t num_blocks() const noexcept { return static_cast<std::size_t>(K_) * L_; }
    std::size_t num_cells() const noexcept { return static_cast<std::size_t>(W_) * H_; }

    bool contains(const Fixation& p) const noexcept
    {
        return p.k >= 0 && p.k < K_ && p.l >= 0 && p.l < L_;
    }

    std::size_t block_index(const Fixation& p) const noexcept
    {
        return static_cast<std::size_t>(p.k) * L_ + p.l;
    }

    Fixation block_at(std::size_t index) const noexcept
    {
        return {static_cast<int>(index / L_), static_cast<int>(index % L_)};
    }

    std::size_t cell_index(int w, int h) const noexcept
    {
        return static_cast<std::size_t>(w) * H_ + h;
    }

    void require_contains(const Fixation& p) const
    {
        if (!contains(p)) {
            throw ContractViolation("fixation " + to_string(p) + " outside " + std::to_string(K_) +
                                    "x" + std::to_string(L_) + " grid");
        }
    }

    friend bool operator==(const GridSpec&, const GridSpec&) = default;

private:
    int K_;
    int L_;
    int W_;
    int H_;
};

/// The FOV cell sitting on the optical axis. Biased to the top-left for even sizes.
inline CellIndex center_cell(const GridSpec& grid) noexcept
{
    return {(grid.W() - 1) / 2, (grid.H() - 1) / 2};
}

/// All K·L fixation points in row-major order.
inline std::vector<Fixation> all_fixations(const GridSpec& grid)
{
    std::vector<Fixation> out;
    out.reserve(grid.num_blocks());
    for (int k = 0; k < grid.K(); ++k) {
        for (int l = 0; l < grid.L(); ++l) {
            out.push_back({k, l});
        }
    }
    return out;
}

/// The W·H cells seen from fixation p (centered on p, clipped at the grid border), in FOV row-major order.
inline std::vector<FovCell> visible_blocks(const GridSpec& grid, const Fixation& p)
{
    grid.require_contains(p);
    const CellIndex c = center_cell(grid);
    const int k0 = p.k - c.w;
    const int l0 = p.l - c.h;

    std::vector<FovCell> cells;
    cells.reserve(grid.num_cells());
    for (int w = 0; w < grid.W(); ++w) {
        for (int h = 0; h < grid.H(); ++h) {
            FovCell cell{w, h, std::nullopt};
            const Fixation b{k0 + w, l0 + h};
            if (grid.contains(b)) {
                cell.block = b;
            }
            cells.push_back(cell);
        }
    }
    return cells;
}

} // namespace saccade
