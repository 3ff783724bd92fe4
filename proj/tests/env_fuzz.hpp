#pragma once

#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "sdd/env.hpp"
#include "sdd/rng.hpp"

namespace sdd_test {

/// One-step reachability of stored slot statuses across a decision point.
inline bool legal_transition(sdd::OrderStatus from, sdd::OrderStatus to) {
    using S = sdd::OrderStatus;
    switch (from) {
        case S::Inactive:
            return to == S::Inactive || to == S::Open;
        case S::Open:
            return to == S::Inactive || to == S::Open || to == S::AssignedSelfUnpicked;
        case S::AssignedSelfUnpicked:
            return to == S::AssignedSelfUnpicked || to == S::Onboard || to == S::Inactive ||
                   to == S::Open;
        case S::Onboard:
            return to == S::Onboard || to == S::Inactive || to == S::Open;
        default:
            return false;  // Delivered is ephemeral, never stored across steps
    }
}

struct FuzzTotals {
    long long steps = 0;
    long long deliveries = 0;
    long long deadline_misses = 0;
    long long drawn = 0;
};

/// Random-action episodes checked against every simulator invariant. Returns
/// false with a description on the first violation.
inline bool fuzz_episodes(const sdd::ScenarioConfig& cfg, int episodes, std::uint64_t seed,
                          FuzzTotals& totals, std::string& error) {
    using namespace sdd;
    Environment env(cfg);
    std::mt19937_64 actions(seed ^ 0x5eedULL);
    const int m = cfg.fleet_size;
    std::ostringstream why;

    for (int ep = 0; ep < episodes; ++ep) {
        env.reset(episode_seed(seed, SeedStream::Train, static_cast<std::uint64_t>(ep)));
        std::vector<OrderSlot> prev = env.state().slots;
        std::vector<GridCoord> prev_pos;
        for (const VehicleState& v : env.state().vehicles) prev_pos.push_back(v.position);

        double generated = 0.0, positive = 0.0;
        std::vector<double> gen_reward(static_cast<std::size_t>(cfg.n_slots), 0.0);
        std::vector<double> accept_gain(static_cast<std::size_t>(cfg.n_slots), 0.0);
        int steps = 0;
        const int drawn_before = env.orders_drawn();

        while (!env.state().done) {
            std::vector<int> act(static_cast<std::size_t>(m));
            for (int v = 0; v < m; ++v)
                act[static_cast<std::size_t>(v)] =
                    static_cast<int>(actions() % static_cast<std::uint64_t>(env.action_count()));
            const StepOutcome out = env.step(act);
            ++steps;
            ++totals.steps;

            for (int v = 0; v < m; ++v) {
                const GridCoord pos = env.state().vehicles[static_cast<std::size_t>(v)].position;
                if (manhattan(pos, prev_pos[static_cast<std::size_t>(v)]) > 1) {
                    error = "vehicle moved more than one cell";
                    return false;
                }
                if (pos.x < 0 || pos.y < 0 || pos.x >= cfg.grid_size || pos.y >= cfg.grid_size) {
                    error = "vehicle left the grid";
                    return false;
                }
                prev_pos[static_cast<std::size_t>(v)] = pos;
            }

            int open_count = 0;
            for (int s = 0; s < cfg.n_slots; ++s) {
                const OrderSlot& now = env.state().slots[static_cast<std::size_t>(s)];
                const OrderSlot& was = prev[static_cast<std::size_t>(s)];
                if (now.status == OrderStatus::Open) ++open_count;
                if (!legal_transition(was.status, now.status)) {
                    why << "illegal status transition on slot " << s << ": "
                        << static_cast<int>(was.status) << " -> " << static_cast<int>(now.status);
                    error = why.str();
                    return false;
                }
                if (was.status == OrderStatus::Open && now.status == OrderStatus::Open &&
                    was.request_time == now.request_time) {
                    error = "an open order survived its decision point";
                    return false;
                }
                if (now.status == OrderStatus::AssignedSelfUnpicked ||
                    now.status == OrderStatus::Onboard) {
                    if (!now.assignee) {
                        error = "assigned order without assignee";
                        return false;
                    }
                    if (was.status == now.status && was.request_time == now.request_time &&
                        *was.assignee != *now.assignee) {
                        error = "assignee changed mid-flight";
                        return false;
                    }
                }
            }
            if (open_count > 1) {
                error = "more than one open order at a decision point";
                return false;
            }

            for (const Event& e : out.events) {
                switch (e.type) {
                    case EventType::OrderGenerated:
                        generated += e.reward;
                        gen_reward[static_cast<std::size_t>(*e.slot)] = e.reward;
                        accept_gain[static_cast<std::size_t>(*e.slot)] = 0.0;
                        break;
                    case EventType::OrderAccepted:
                        positive += e.reward;
                        accept_gain[static_cast<std::size_t>(*e.slot)] = e.reward;
                        break;
                    case EventType::Delivery: {
                        positive += e.reward;
                        ++totals.deliveries;
                        const double total =
                            accept_gain[static_cast<std::size_t>(*e.slot)] + e.reward;
                        if (total != gen_reward[static_cast<std::size_t>(*e.slot)]) {
                            why << "reward split does not reassemble the order reward: " << total
                                << " vs " << gen_reward[static_cast<std::size_t>(*e.slot)];
                            error = why.str();
                            return false;
                        }
                        break;
                    }
                    case EventType::DeadlineMissed: {
                        ++totals.deadline_misses;
                        const OrderSlot& before = prev[static_cast<std::size_t>(*e.slot)];
                        if (before.status != OrderStatus::AssignedSelfUnpicked &&
                            before.status != OrderStatus::Onboard) {
                            error = "deadline miss on an unassigned order";
                            return false;
                        }
                        if (before.deadline != env.state().t - 1) {
                            error = "deadline sweep fired at the wrong step";
                            return false;
                        }
                        break;
                    }
                    default:
                        break;
                }
            }

            prev = env.state().slots;
        }

        if (positive > generated + 1e-9) {
            error = "episode earned more than the orders were worth";
            return false;
        }
        if (steps != cfg.t_e || env.state().t != cfg.t_e) {
            why << "episode ran " << steps << " steps ending at t=" << env.state().t
                << ", expected t_e=" << cfg.t_e;
            error = why.str();
            return false;
        }
        const int drawn = env.orders_drawn() - drawn_before;
        if (drawn < 0) {
            error = "orders_drawn went backwards";
            return false;
        }
        totals.drawn += drawn;
    }
    return true;
}

/// Replays random action streams through twin environments with equal seeds;
/// returns false if any observable output diverges.
inline bool determinism_episodes(const sdd::ScenarioConfig& cfg, int rounds, std::uint64_t seed,
                                 std::string& error) {
    using namespace sdd;
    for (int round = 0; round < rounds; ++round) {
        Environment a(cfg), b(cfg);
        const std::uint64_t ep_seed =
            episode_seed(seed, SeedStream::Train, static_cast<std::uint64_t>(round));
        a.reset(ep_seed);
        b.reset(ep_seed);
        std::mt19937_64 actions(seed + static_cast<std::uint64_t>(round) + 1);
        while (!a.state().done) {
            std::vector<int> act(static_cast<std::size_t>(cfg.fleet_size));
            for (int& x : act)
                x = static_cast<int>(actions() % static_cast<std::uint64_t>(a.action_count()));
            const StepOutcome oa = a.step(act);
            const StepOutcome ob = b.step(act);
            if (oa.rewards != ob.rewards || !(oa.events == ob.events) || oa.done != ob.done) {
                error = "twin environments diverged in step outcome";
                return false;
            }
            for (int v = 0; v < cfg.fleet_size; ++v)
                if (a.observe(v) != b.observe(v)) {
                    error = "twin environments diverged in observations";
                    return false;
                }
        }
        if (a.exogenous_digest() != b.exogenous_digest() ||
            a.orders_drawn() != b.orders_drawn()) {
            error = "twin environments diverged in the exogenous stream";
            return false;
        }
    }
    return true;
}

}  // namespace sdd_test
