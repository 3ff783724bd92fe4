#include "sdd/insertion.hpp"

namespace sdd {

InsertionResult insertion_cost(GridCoord start, std::span<const GridCoord> stops,
                               GridCoord depot, GridCoord new_stop) {
    InsertionResult best{0, 0};
    bool have = false;
    for (std::size_t p = 0; p <= stops.size(); ++p) {
        const GridCoord prev = p == 0 ? start : stops[p - 1];
        const GridCoord next = p == stops.size() ? depot : stops[p];
        const int added =
            manhattan(prev, new_stop) + manhattan(new_stop, next) - manhattan(prev, next);
        if (!have || added < best.added_cost) {
            best = {added, p};
            have = true;
        }
    }
    return best;
}

}  // namespace sdd
