#include "sdd/env.hpp"

#include <algorithm>
#include <stdexcept>

#include "sdd/hash.hpp"
#include "sdd/insertion.hpp"

namespace sdd {
namespace {

double u01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t raw;
    do { raw = rng(); } while (raw >= limit);
    return raw % n;
}

/// Uniform cell of `rect` excluding `exclude` (which may lie outside it).
GridCoord sample_cell(std::mt19937_64& rng, const CellRect& rect, GridCoord exclude) {
    const int w = rect.x_max - rect.x_min + 1;
    const int h = rect.y_max - rect.y_min + 1;
    const bool skip = rect.contains(exclude);
    const std::uint64_t n = static_cast<std::uint64_t>(w) * h - (skip ? 1 : 0);
    std::uint64_t k = bounded(rng, n);
    if (skip) {
        const std::uint64_t excl =
            static_cast<std::uint64_t>(exclude.y - rect.y_min) * w + (exclude.x - rect.x_min);
        if (k >= excl) ++k;
    }
    return {rect.x_min + static_cast<int>(k % w), rect.y_min + static_cast<int>(k / w)};
}

int find_open_slot(const std::vector<OrderSlot>& slots) {
    for (std::size_t s = 0; s < slots.size(); ++s)
        if (slots[s].status == OrderStatus::Open) return static_cast<int>(s);
    return -1;
}

}  // namespace

int resolve_acceptance(const WorldState& state, const std::vector<int>& accepting_vehicles,
                       const ScenarioConfig& config) {
    (void)config;
    const int open = find_open_slot(state.slots);
    if (open < 0) throw std::logic_error("resolve_acceptance: no open order");
    if (accepting_vehicles.empty())
        throw std::logic_error("resolve_acceptance: no accepting vehicles");

    int best_vehicle = -1;
    int best_cost = 0;
    for (const int v : accepting_vehicles) {
        const VehicleState& vehicle = state.vehicles[v];
        const bool at_depot = vehicle.position == state.depot;
        std::vector<GridCoord> stops;
        for (const OrderSlot& slot : state.slots) {
            if (!slot.assignee || *slot.assignee != v) continue;
            if (slot.status == OrderStatus::AssignedSelfUnpicked ||
                (at_depot && slot.status == OrderStatus::Onboard))
                stops.push_back(slot.location);
        }
        const int cost =
            insertion_cost(vehicle.position, stops, state.depot, state.slots[open].location)
                .added_cost;
        if (best_vehicle < 0 || cost < best_cost) {
            best_vehicle = v;
            best_cost = cost;
        }
    }
    return best_vehicle;
}

int obs_dim(const ScenarioConfig& config) {
    const int pad = std::max(4, config.fleet_size - 1);
    return 3 + 2 * pad + 9 * config.n_slots;
}

Environment::Environment(ScenarioConfig config) : config_(std::move(config)) {
    config_.validate();
    reset();
}

void Environment::reset() { reset(config_.seed); }

void Environment::reset(std::uint64_t seed) {
    state_.t = 0;
    state_.depot = depot_cell(config_.grid_size);
    state_.vehicles.assign(static_cast<std::size_t>(config_.fleet_size), VehicleState{});
    for (int v = 0; v < config_.fleet_size; ++v) {
        state_.vehicles[v].id = v;
        state_.vehicles[v].position = state_.depot;
    }
    state_.slots.assign(static_cast<std::size_t>(config_.n_slots), OrderSlot{});
    state_.rng.seed(seed);
    state_.done = false;
    digest_ = kFnvOffset;
    orders_drawn_ = 0;
}

void Environment::generate_order(std::vector<Event>& events) {
    // Every draw is consumed whether or not a slot is free, so the random
    // stream (and the exogenous digest) never depends on fleet behaviour.
    const double p = config_.expected_orders / static_cast<double>(config_.t_c);
    if (u01(state_.rng) >= p) return;

    GridCoord location;
    int reward;
    std::optional<int> zone;
    if (config_.heterogeneous()) {
        const double u = u01(state_.rng);
        double cum = 0.0;
        std::size_t z = 0;
        for (; z + 1 < config_.zones.size(); ++z) {
            cum += config_.zones[z].probability_share;
            if (u < cum) break;
        }
        const ZoneSpec& spec = config_.zones[z];
        zone = static_cast<int>(z);
        location = sample_cell(state_.rng, spec.region, state_.depot);
        reward = spec.reward_min +
                 static_cast<int>(bounded(
                     state_.rng, static_cast<std::uint64_t>(spec.reward_max - spec.reward_min) + 1));
    } else {
        location = sample_cell(state_.rng, {0, 0, config_.grid_size - 1, config_.grid_size - 1},
                               state_.depot);
        reward = config_.r;
    }

    ++orders_drawn_;
    digest_ = fnv1a64(digest_, static_cast<std::uint64_t>(state_.t));
    digest_ = fnv1a64(digest_, (static_cast<std::uint64_t>(static_cast<std::uint32_t>(location.x))
                                << 32) |
                                   static_cast<std::uint32_t>(location.y));
    digest_ = fnv1a64(digest_, static_cast<std::uint64_t>(reward));

    int free_slot = -1;
    for (std::size_t s = 0; s < state_.slots.size(); ++s)
        if (!state_.slots[s].active()) {
            free_slot = static_cast<int>(s);
            break;
        }
    if (free_slot < 0) return;  // arrival suppressed, no penalty

    OrderSlot& slot = state_.slots[free_slot];
    slot.location = location;
    slot.request_time = state_.t;
    slot.deadline = std::min(state_.t + config_.delta, config_.t_e);
    slot.reward = reward;
    slot.status = OrderStatus::Open;
    slot.assignee.reset();
    slot.zone = zone;
    events.push_back({state_.t, EventType::OrderGenerated, std::nullopt, free_slot,
                      static_cast<double>(reward)});
}

void Environment::finish_service(int vehicle_id, StepOutcome& out) {
    VehicleState& vehicle = state_.vehicles[vehicle_id];
    const ServiceJob job = *vehicle.service;
    vehicle.service.reset();
    OrderSlot& slot = state_.slots[job.slot];
    if (job.is_delivery) {
        // paid as r - r/3 so the acceptance and delivery parts sum to r exactly
        const double gain = slot.reward - slot.reward / 3.0;
        out.rewards[vehicle_id] += gain;
        out.events.push_back({state_.t, EventType::Delivery, vehicle_id, job.slot, gain});
        slot.status = OrderStatus::Delivered;
        slot.clear();  // recycle immediately
    } else {
        slot.status = OrderStatus::Onboard;
        out.events.push_back({state_.t, EventType::Pickup, vehicle_id, job.slot, 0.0});
    }
}

StepOutcome Environment::step(const std::vector<int>& actions) {
    if (state_.done) throw std::logic_error("step: episode already finished");
    if (static_cast<int>(actions.size()) != config_.fleet_size)
        throw std::invalid_argument("step: one action per vehicle required");
    for (const int a : actions)
        if (a < 0 || a >= action_count()) throw std::out_of_range("step: action outside space");

    StepOutcome out;
    out.rewards.assign(static_cast<std::size_t>(config_.fleet_size), 0.0);

    // Phase 1a: acceptance. The winner is the minimum-insertion-cost
    // candidate; losers acted validly and get nothing. Accepting with no
    // open order is an invalid action.
    std::vector<int> accepting;
    for (int v = 0; v < config_.fleet_size; ++v)
        if (actions[v] == kActionAccept) accepting.push_back(v);
    if (!accepting.empty()) {
        const int open = find_open_slot(state_.slots);
        if (open < 0) {
            for (const int v : accepting) {
                out.rewards[v] -= config_.pi1;
                out.events.push_back(
                    {state_.t, EventType::InvalidAction, v, std::nullopt, -config_.pi1});
            }
        } else {
            const int winner = resolve_acceptance(state_, accepting, config_);
            OrderSlot& slot = state_.slots[open];
            slot.status = OrderStatus::AssignedSelfUnpicked;
            slot.assignee = winner;
            const double gain = slot.reward / 3.0;
            out.rewards[winner] += gain;
            state_.vehicles[winner].busy_until =
                std::max(state_.vehicles[winner].busy_until, state_.t + config_.t_a);
            out.events.push_back({state_.t, EventType::OrderAccepted, winner, open, gain});
        }
    }

    // Phase 1b: movement. A running service or accept timer pins the
    // vehicle; moving toward a slot the vehicle does not own is invalid and
    // the vehicle stays put.
    for (int v = 0; v < config_.fleet_size; ++v) {
        const int a = actions[v];
        if (a == kActionWait || a == kActionAccept) continue;
        VehicleState& vehicle = state_.vehicles[v];
        GridCoord target;
        if (a == kActionDepot) {
            target = state_.depot;
        } else {
            const int s = *action_slot(a);
            const OrderStatus rs = relative_status(state_.slots[s], v);
            if (rs != OrderStatus::AssignedSelfUnpicked && rs != OrderStatus::Onboard) {
                out.rewards[v] -= config_.pi1;
                out.events.push_back({state_.t, EventType::InvalidAction, v, s, -config_.pi1});
                continue;
            }
            target = state_.slots[s].location;
        }
        const bool pinned =
            (vehicle.service && vehicle.service->remaining > 0) || vehicle.busy_until > state_.t;
        if (!pinned) vehicle.position = move_toward(vehicle.position, target);
    }

    // Phase 1c: automatic services, at most one per vehicle per step.
    // A just-started job ticks immediately, so 1-step services finish the
    // step they trigger. Deliveries take precedence; pickups need the depot.
    for (int v = 0; v < config_.fleet_size; ++v) {
        VehicleState& vehicle = state_.vehicles[v];
        if (vehicle.service && vehicle.service->remaining > 0) {
            if (--vehicle.service->remaining == 0) {
                finish_service(v, out);
            }
            continue;
        }
        if (vehicle.busy_until > state_.t) continue;

        int slot = -1;
        bool is_delivery = false;
        for (std::size_t s = 0; s < state_.slots.size(); ++s) {
            const OrderSlot& o = state_.slots[s];
            if (o.status == OrderStatus::Onboard && o.assignee && *o.assignee == v &&
                o.location == vehicle.position) {
                slot = static_cast<int>(s);
                is_delivery = true;
                break;
            }
        }
        if (slot < 0 && vehicle.position == state_.depot) {
            for (std::size_t s = 0; s < state_.slots.size(); ++s) {
                const OrderSlot& o = state_.slots[s];
                if (o.status == OrderStatus::AssignedSelfUnpicked && o.assignee &&
                    *o.assignee == v) {
                    slot = static_cast<int>(s);
                    break;
                }
            }
        }
        if (slot < 0) continue;

        const int duration = is_delivery ? config_.t_d : config_.t_p;
        vehicle.service = ServiceJob{slot, is_delivery, duration};
        vehicle.busy_until = std::max(vehicle.busy_until, state_.t + duration);
        if (vehicle.service->remaining == 0 || --vehicle.service->remaining == 0) {
            finish_service(v, out);
        }
    }

    // Phase 1d: an open order not accepted this step expires silently.
    for (std::size_t s = 0; s < state_.slots.size(); ++s)
        if (state_.slots[s].status == OrderStatus::Open) {
            state_.slots[s].clear();
            out.events.push_back(
                {state_.t, EventType::OrderExpired, std::nullopt, static_cast<int>(s), 0.0});
        }

    // Phase 2: exogenous transition.
    state_.t += 1;
    for (std::size_t s = 0; s < state_.slots.size(); ++s) {
        OrderSlot& slot = state_.slots[s];
        if ((slot.status == OrderStatus::AssignedSelfUnpicked ||
             slot.status == OrderStatus::Onboard) &&
            slot.deadline < state_.t) {
            const int assignee = *slot.assignee;
            out.rewards[assignee] -= config_.pi2;
            out.events.push_back({state_.t, EventType::DeadlineMissed, assignee,
                                  static_cast<int>(s), -config_.pi2});
            slot.clear();
            // the assignee may be mid-service on this very order
            VehicleState& vehicle = state_.vehicles[assignee];
            if (vehicle.service && vehicle.service->slot == static_cast<int>(s))
                vehicle.service.reset();
        }
    }
    if (state_.t <= config_.t_c) generate_order(out.events);
    if (state_.t >= config_.t_e) {
        double end_penalty = 0.0;
        for (int v = 0; v < config_.fleet_size; ++v)
            if (state_.vehicles[v].position != state_.depot) {
                out.rewards[v] -= config_.pi3;
                end_penalty -= config_.pi3;
            }
        state_.done = true;
        out.events.push_back({state_.t, EventType::EpisodeEnd, std::nullopt, std::nullopt,
                              end_penalty});
    }
    out.done = state_.done;
    return out;
}

std::vector<float> Environment::observe(int vehicle_id) const {
    if (vehicle_id < 0 || vehicle_id >= config_.fleet_size)
        throw std::out_of_range("observe: bad vehicle id");
    const float g = static_cast<float>(config_.grid_size);
    std::vector<float> obs;
    obs.reserve(static_cast<std::size_t>(obs_dim()));

    obs.push_back(static_cast<float>(state_.t) / static_cast<float>(config_.t_e));
    const GridCoord own = state_.vehicles[vehicle_id].position;
    obs.push_back(static_cast<float>(own.x) / g);
    obs.push_back(static_cast<float>(own.y) / g);

    const int pad = std::max(4, config_.fleet_size - 1);
    int written = 0;
    for (int v = 0; v < config_.fleet_size; ++v) {
        if (v == vehicle_id) continue;
        obs.push_back(static_cast<float>(state_.vehicles[v].position.x) / g);
        obs.push_back(static_cast<float>(state_.vehicles[v].position.y) / g);
        ++written;
    }
    for (; written < pad; ++written) {
        obs.push_back(-1.0f);
        obs.push_back(-1.0f);
    }

    for (const OrderSlot& slot : state_.slots) {
        const OrderStatus rs = relative_status(slot, vehicle_id);
        obs.push_back(static_cast<float>(slot.location.x) / g);
        obs.push_back(static_cast<float>(slot.location.y) / g);
        for (int code = -1; code <= 4; ++code)
            obs.push_back(static_cast<int>(rs) == code ? 1.0f : 0.0f);
        if (rs == OrderStatus::Inactive) {
            obs.push_back(0.0f);
        } else {
            const int remaining = std::max(slot.deadline - state_.t, 0);
            obs.push_back(static_cast<float>(remaining) / static_cast<float>(config_.delta));
        }
    }
    return obs;
}

}  // namespace sdd
