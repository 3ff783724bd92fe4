#include "sdd/scenario.hpp"

#include <cmath>
#include <stdexcept>

#include <json.hpp>

namespace sdd {

void ScenarioConfig::validate() const {
    if (grid_size < 2) throw std::invalid_argument("grid_size must be at least 2");
    if (fleet_size < 1) throw std::invalid_argument("fleet_size must be at least 1");
    if (n_slots < 1) throw std::invalid_argument("n_slots must be at least 1");
    if (t_e < 1) throw std::invalid_argument("t_e must be positive");
    if (t_c < 1 || t_c > t_e) throw std::invalid_argument("t_c must lie in [1, t_e]");
    if (delta < 1) throw std::invalid_argument("delta must be positive");
    if (t_p < 0 || t_d < 0 || t_a < 0) throw std::invalid_argument("service times must be >= 0");
    if (expected_orders < 0.0) throw std::invalid_argument("expected_orders must be >= 0");
    if (expected_orders > static_cast<double>(t_c))
        throw std::invalid_argument("expected_orders cannot exceed t_c (one arrival per step)");
    if (r <= 0) throw std::invalid_argument("r must be positive");
    if (pi1 < 0.0 || pi2 < 0.0 || pi3 < 0.0) throw std::invalid_argument("penalties must be >= 0");

    if (zones.empty()) return;
    double share_sum = 0.0;
    for (const ZoneSpec& z : zones) {
        if (z.probability_share <= 0.0 || z.probability_share > 1.0)
            throw std::invalid_argument("zone probability_share must lie in (0,1]");
        if (z.reward_min > z.reward_max)
            throw std::invalid_argument("zone reward_min exceeds reward_max");
        if (z.reward_min <= 0) throw std::invalid_argument("zone rewards must be positive");
        share_sum += z.probability_share;
    }
    if (std::abs(share_sum - 1.0) > 1e-9)
        throw std::invalid_argument("zone probability shares must sum to 1");
    for (int y = 0; y < grid_size; ++y)
        for (int x = 0; x < grid_size; ++x) {
            int hits = 0;
            for (const ZoneSpec& z : zones)
                if (z.region.contains({x, y})) ++hits;
            if (hits != 1) throw std::invalid_argument("zone regions must partition the grid");
        }
}

std::string to_json(const ScenarioConfig& cfg) {
    nlohmann::json j{
        {"grid_size", cfg.grid_size},
        {"fleet_size", cfg.fleet_size},
        {"expected_orders", cfg.expected_orders},
        {"n_slots", cfg.n_slots},
        {"t_e", cfg.t_e},
        {"t_c", cfg.t_c},
        {"delta", cfg.delta},
        {"t_p", cfg.t_p},
        {"t_d", cfg.t_d},
        {"t_a", cfg.t_a},
        {"r", cfg.r},
        {"pi1", cfg.pi1},
        {"pi2", cfg.pi2},
        {"pi3", cfg.pi3},
        {"seed", cfg.seed},
    };
    j["zones"] = nlohmann::json::array();
    for (const ZoneSpec& z : cfg.zones)
        j["zones"].push_back({
            {"x_min", z.region.x_min},
            {"y_min", z.region.y_min},
            {"x_max", z.region.x_max},
            {"y_max", z.region.y_max},
            {"probability_share", z.probability_share},
            {"reward_max", z.reward_max},
            {"reward_min", z.reward_min},
        });
    return j.dump();
}

ScenarioConfig scenario_from_json(const std::string& text) {
    const nlohmann::json j = nlohmann::json::parse(text);
    ScenarioConfig cfg;
    cfg.grid_size = j.at("grid_size").get<int>();
    cfg.fleet_size = j.at("fleet_size").get<int>();
    cfg.expected_orders = j.at("expected_orders").get<double>();
    cfg.n_slots = j.at("n_slots").get<int>();
    cfg.t_e = j.at("t_e").get<int>();
    cfg.t_c = j.at("t_c").get<int>();
    cfg.delta = j.at("delta").get<int>();
    cfg.t_p = j.at("t_p").get<int>();
    cfg.t_d = j.at("t_d").get<int>();
    cfg.t_a = j.at("t_a").get<int>();
    cfg.r = j.at("r").get<int>();
    cfg.pi1 = j.at("pi1").get<double>();
    cfg.pi2 = j.at("pi2").get<double>();
    cfg.pi3 = j.at("pi3").get<double>();
    cfg.seed = j.at("seed").get<std::uint64_t>();
    for (const auto& zj : j.value("zones", nlohmann::json::array())) {
        ZoneSpec z;
        z.region = {zj.at("x_min").get<int>(), zj.at("y_min").get<int>(),
                    zj.at("x_max").get<int>(), zj.at("y_max").get<int>()};
        z.probability_share = zj.at("probability_share").get<double>();
        z.reward_max = zj.at("reward_max").get<int>();
        z.reward_min = zj.at("reward_min").get<int>();
        cfg.zones.push_back(z);
    }
    return cfg;
}

std::vector<ZoneSpec> quadrant_zones(int grid_size, const std::vector<double>& shares,
                                     const std::vector<std::pair<int, int>>& reward_max_min) {
    if (shares.size() != 4 || reward_max_min.size() != 4)
        throw std::invalid_argument("quadrant_zones needs exactly four shares and reward pairs");
    const int mid = (grid_size + 1) / 2;  // left/top halves take the extra cells on odd grids
    const CellRect quads[4] = {
        {0, 0, mid - 1, mid - 1},
        {mid, 0, grid_size - 1, mid - 1},
        {0, mid, mid - 1, grid_size - 1},
        {mid, mid, grid_size - 1, grid_size - 1},
    };
    std::vector<ZoneSpec> zones;
    for (int q = 0; q < 4; ++q)
        zones.push_back({quads[q], shares[q], reward_max_min[q].first, reward_max_min[q].second});
    return zones;
}

}  // namespace sdd
