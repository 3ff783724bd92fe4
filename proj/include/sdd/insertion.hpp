#pragma once

#include <cstddef>
#include <span>

#include "sdd/grid.hpp"

namespace sdd {

struct InsertionResult {
    int added_cost = 0;   // cells added to the route length
    std::size_t position = 0;  // index into `stops` where the new stop goes
};

/// Minimum increase in route length when `new_stop` is inserted anywhere
/// into the route start -> stops[0] -> ... -> stops[k-1] -> depot.
/// Ties break toward the earliest position. An empty stop list is the
/// start -> depot route.
InsertionResult insertion_cost(GridCoord start, std::span<const GridCoord> stops,
                               GridCoord depot, GridCoord new_stop);

}  // namespace sdd
