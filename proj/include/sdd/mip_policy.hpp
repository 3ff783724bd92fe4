#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "sdd/policy.hpp"
#include "sdd/routing.hpp"

namespace sdd {

/// Deterministic accept-and-route baseline. Each vehicle re-solves its own
/// exact routing problem whenever its view of the slots changes (an arrival,
/// an assignment gained or lost, a pickup, a delivery, a swept deadline) and
/// then walks the cached route: accept when the fresh solve takes the open
/// order, otherwise move toward the next pending stop, wait when idle.
class MipFleetPolicy : public Policy {
public:
    explicit MipFleetPolicy(SolverConfig solver = {});

    std::string name() const override { return "mip"; }
    void begin_episode(const Environment& env, std::uint64_t seed) override;
    std::vector<int> act(const Environment& env) override;

    long long solve_count() const { return solve_count_; }
    long long near_optimal_count() const { return near_optimal_count_; }

private:
    struct VehiclePlan {
        RoutingInstance instance;
        RoutingSolution solution;
        // one entry per slot this vehicle sees as Open, assigned, or onboard:
        // (slot, relative status, request time); any change forces a re-solve
        std::vector<std::array<int, 3>> signature;
        bool valid = false;
    };

    int vehicle_action(const Environment& env, int vehicle_id);

    SolverConfig solver_;
    std::vector<VehiclePlan> plans_;
    long long solve_count_ = 0;
    long long near_optimal_count_ = 0;
};

}  // namespace sdd
