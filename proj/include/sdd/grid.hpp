#pragma once

#include <cstdlib>

namespace sdd {

struct GridCoord {
    int x = 0;
    int y = 0;

    friend bool operator==(const GridCoord&, const GridCoord&) = default;
};

inline int manhattan(GridCoord a, GridCoord b) {
    return std::abs(a.x - b.x) + std::abs(a.y - b.y);
}

/// One 4-neighbourhood step from `from` toward `to`. Steps along the axis
/// with the larger remaining gap, x first on ties; returns `from` unchanged
/// when the two cells coincide.
inline GridCoord move_toward(GridCoord from, GridCoord to) {
    const int dx = to.x - from.x;
    const int dy = to.y - from.y;
    if (dx == 0 && dy == 0) return from;
    if (std::abs(dx) >= std::abs(dy) && dx != 0) {
        return {from.x + (dx > 0 ? 1 : -1), from.y};
    }
    return {from.x, from.y + (dy > 0 ? 1 : -1)};
}

/// Depot cell for a g x g grid: the lower of the center candidates,
/// e.g. (2,2) for g=5 and (4,4) for g=10 (0-based).
inline GridCoord depot_cell(int grid_size) {
    const int c = (grid_size - 1) / 2;
    return {c, c};
}

}  // namespace sdd
