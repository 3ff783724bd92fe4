#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "sdd/events.hpp"
#include "sdd/grid.hpp"
#include "sdd/order.hpp"
#include "sdd/scenario.hpp"

namespace sdd {

// Action encoding. The action space is fixed for a whole episode:
// 0 = wait, 1 = accept the open order, 2 = move toward the depot,
// 3 + s = move toward slot s's customer.
inline constexpr int kActionWait = 0;
inline constexpr int kActionAccept = 1;
inline constexpr int kActionDepot = 2;
inline constexpr int kFirstSlotAction = 3;

inline int action_count(int n_slots) { return n_slots + kFirstSlotAction; }
inline int slot_action(int slot) { return slot + kFirstSlotAction; }

/// Slot index for a move-toward-customer action, or none for 0..2.
inline std::optional<int> action_slot(int action) {
    if (action < kFirstSlotAction) return std::nullopt;
    return action - kFirstSlotAction;
}

// An in-progress pickup or delivery. Effects apply when remaining hits 0;
// with 1-step service times that is the step the job starts.
struct ServiceJob {
    int slot = -1;
    bool is_delivery = false;
    int remaining = 0;
};

struct VehicleState {
    int id = 0;
    GridCoord position;
    int busy_until = 0;  // next step at which the vehicle is free again
    std::optional<ServiceJob> service;
};

struct WorldState {
    int t = 0;
    std::vector<VehicleState> vehicles;
    std::vector<OrderSlot> slots;
    std::mt19937_64 rng;
    GridCoord depot;
    bool done = false;
};

struct StepOutcome {
    std::vector<double> rewards;  // one entry per vehicle
    std::vector<Event> events;
    bool done = false;
};

/// Winner of an acceptance conflict: the candidate with the minimum
/// insertion cost over its pending route (a vehicle at the depot routes all
/// its assigned orders, an en-route vehicle only the unpicked ones), ties to
/// the lowest vehicle id. Requires exactly one Open slot.
int resolve_acceptance(const WorldState& state, const std::vector<int>& accepting_vehicles,
                       const ScenarioConfig& config);

/// Length of the observation vector. Constant in fleet size for m <= 5 so
/// one network serves any of those fleets: the other-vehicle block is padded
/// to max(4, m-1) coordinate pairs.
int obs_dim(const ScenarioConfig& config);

class Environment {
public:
    explicit Environment(ScenarioConfig config);

    /// Fresh episode: t = 0, fleet at the depot, all slots Inactive,
    /// rng seeded from `seed` (or config.seed when omitted).
    void reset();
    void reset(std::uint64_t seed);

    /// Advance one decision point with one action per vehicle.
    /// Phase 1 applies the actions deterministically (accepts, movement,
    /// automatic services, open-order expiry); phase 2 advances time,
    /// sweeps missed deadlines, draws a possible new order, and closes the
    /// episode at t_e.
    StepOutcome step(const std::vector<int>& actions);

    /// Egocentric observation: [t/t_e; own (x,y)/grid; other vehicles'
    /// (x,y)/grid in id order (padded with -1 sentinels); per slot (x,y)/grid,
    /// 6-way one-hot of the observer-relative status, remaining-deadline
    /// fraction].
    std::vector<float> observe(int vehicle_id) const;

    const WorldState& state() const { return state_; }
    const ScenarioConfig& config() const { return config_; }
    int obs_dim() const { return sdd::obs_dim(config_); }
    int action_count() const { return sdd::action_count(config_.n_slots); }

    /// FNV-1a digest over every order draw (t, location, reward) this
    /// episode, taken before slot-availability suppression, so it depends
    /// only on the seed and never on the policy.
    std::uint64_t exogenous_digest() const { return digest_; }

    /// Orders drawn this episode, again pre-suppression.
    int orders_drawn() const { return orders_drawn_; }

private:
    void generate_order(std::vector<Event>& events);
    void finish_service(int vehicle_id, StepOutcome& out);

    ScenarioConfig config_;
    WorldState state_;
    std::uint64_t digest_ = 0;
    int orders_drawn_ = 0;
};

}  // namespace sdd
