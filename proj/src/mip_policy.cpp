#include "sdd/mip_policy.hpp"

#include <array>

namespace sdd {

namespace {

/// Orders the plan depends on, as (slot, status, request_time) triples.
/// request_time disambiguates a slot that was cleared and refilled between
/// two decision points.
std::vector<std::array<int, 3>> state_signature(const WorldState& state, int vehicle_id) {
    std::vector<std::array<int, 3>> sig;
    for (std::size_t s = 0; s < state.slots.size(); ++s) {
        const OrderStatus rs = relative_status(state.slots[s], vehicle_id);
        if (rs == OrderStatus::Open || rs == OrderStatus::AssignedSelfUnpicked ||
            rs == OrderStatus::Onboard)
            sig.push_back({static_cast<int>(s), static_cast<int>(rs),
                           state.slots[s].request_time});
    }
    return sig;
}

}  // namespace

MipFleetPolicy::MipFleetPolicy(SolverConfig config) : solver_(config) {}

void MipFleetPolicy::begin_episode(const Environment& env, std::uint64_t) {
    plans_.assign(static_cast<std::size_t>(env.config().fleet_size), VehiclePlan{});
    solve_count_ = 0;
    near_optimal_count_ = 0;
}

std::vector<int> MipFleetPolicy::act(const Environment& env) {
    const int fleet = env.config().fleet_size;
    if (plans_.size() != static_cast<std::size_t>(fleet))
        plans_.assign(static_cast<std::size_t>(fleet), VehiclePlan{});
    std::vector<int> actions(static_cast<std::size_t>(fleet), kActionWait);
    for (int v = 0; v < fleet; ++v)
        actions[static_cast<std::size_t>(v)] = vehicle_action(env, v);
    return actions;
}

int MipFleetPolicy::vehicle_action(const Environment& env, int vehicle_id) {
    const WorldState& state = env.state();
    VehiclePlan& plan = plans_[static_cast<std::size_t>(vehicle_id)];

    auto signature = state_signature(state, vehicle_id);
    if (!plan.valid || signature != plan.signature) {
        plan.instance = build_instance(state, vehicle_id, env.config(), solver_);
        plan.solution = solve_exact(plan.instance, solver_);
        plan.signature = std::move(signature);
        plan.valid = true;
        ++solve_count_;
        if (plan.solution.near_optimal) ++near_optimal_count_;
        // a fresh plan that serves the open order must claim it now; the
        // order is gone by the next decision point
        for (int i = plan.instance.order_begin(); i < plan.instance.order_end(); ++i) {
            const RoutingNode& node = plan.instance.nodes[i];
            if (!node.committed && !node.onboard && plan.solution.accept[i])
                return kActionAccept;
        }
    }

    // drive toward the first stop of the plan that is still outstanding
    for (const int route_node : plan.solution.route) {
        const RoutingNode& node = plan.instance.nodes[route_node];
        switch (node.kind) {
            case NodeKind::Vehicle:
                continue;
            case NodeKind::Pickup: {
                for (const OrderSlot& slot : state.slots)
                    if (relative_status(slot, vehicle_id) ==
                        OrderStatus::AssignedSelfUnpicked)
                        return kActionDepot;
                continue;
            }
            case NodeKind::Order: {
                if (!plan.solution.accept[route_node]) continue;
                const OrderStatus rs =
                    relative_status(state.slots[node.slot], vehicle_id);
                if (rs == OrderStatus::Onboard) return slot_action(node.slot);
                if (rs == OrderStatus::AssignedSelfUnpicked) return kActionDepot;
                continue;
            }
            case NodeKind::Return:
                if (state.vehicles[vehicle_id].position != state.depot)
                    return kActionDepot;
                continue;
        }
    }
    return kActionWait;
}

}  // namespace sdd
