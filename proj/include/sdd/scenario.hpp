#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sdd/grid.hpp"

namespace sdd {

/// Axis-aligned rectangle of cells, bounds inclusive.
struct CellRect {
    int x_min = 0;
    int y_min = 0;
    int x_max = 0;
    int y_max = 0;

    bool contains(GridCoord c) const {
        return c.x >= x_min && c.x <= x_max && c.y >= y_min && c.y <= y_max;
    }
    friend bool operator==(const CellRect&, const CellRect&) = default;
};

struct ZoneSpec {
    CellRect region;
    double probability_share = 0.0;
    int reward_max = 0;
    int reward_min = 0;

    friend bool operator==(const ZoneSpec&, const ZoneSpec&) = default;
};

/// The single source of experiment truth: world geometry, fleet, order
/// process, penalties and horizon.
struct ScenarioConfig {
    int grid_size = 5;
    int fleet_size = 1;
    double expected_orders = 5.0;
    int n_slots = 5;
    int t_e = 144;
    int t_c = 144;       // order cut-off step
    int delta = 48;      // deadline length
    int t_p = 1;         // pickup service time
    int t_d = 1;         // delivery service time
    int t_a = 1;         // accept service time
    int r = 3;           // homogeneous order reward
    double pi1 = 5.0;    // invalid action penalty
    double pi2 = 5.0;    // missed deadline penalty
    double pi3 = 5.0;    // failure to return penalty
    std::vector<ZoneSpec> zones;  // empty = homogeneous
    std::uint64_t seed = 0;

    bool heterogeneous() const { return !zones.empty(); }

    /// Throws std::invalid_argument on any violated invariant.
    void validate() const;

    friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

std::string to_json(const ScenarioConfig& cfg);
ScenarioConfig scenario_from_json(const std::string& text);

/// Four-quadrant zone layout in row-major order (top-left, top-right,
/// bottom-left, bottom-right) with the given shares and [max,min] reward
/// pairs per zone.
std::vector<ZoneSpec> quadrant_zones(int grid_size,
                                     const std::vector<double>& shares,
                                     const std::vector<std::pair<int, int>>& reward_max_min);

}  // namespace sdd
