#include <doctest.h>

#include <cmath>
#include <map>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "env_fuzz.hpp"
#include "sdd/env.hpp"
#include "sdd/rng.hpp"

using namespace sdd;

namespace {

ScenarioConfig small_hom(int grid = 5, int fleet = 1, int n_slots = 5) {
    ScenarioConfig cfg;
    cfg.grid_size = grid;
    cfg.fleet_size = fleet;
    cfg.n_slots = n_slots;
    cfg.expected_orders = 5.0;
    return cfg;
}

/// Saturated arrivals: one order is drawn at every step.
ScenarioConfig saturated(int grid = 5, int fleet = 1, int n_slots = 5) {
    ScenarioConfig cfg = small_hom(grid, fleet, n_slots);
    cfg.expected_orders = static_cast<double>(cfg.t_c);
    return cfg;
}

int status_offset(const ScenarioConfig& cfg, int slot, OrderStatus status) {
    const int pad = std::max(4, cfg.fleet_size - 1);
    return 3 + 2 * pad + 9 * slot + 2 + (static_cast<int>(status) + 1);
}

}  // namespace

TEST_CASE("reset puts the fleet at the center depot with clear slots") {
    Environment env5(small_hom(5, 3));
    CHECK(env5.state().depot == GridCoord{2, 2});
    CHECK(env5.state().t == 0);
    REQUIRE(env5.state().vehicles.size() == 3);
    for (const VehicleState& v : env5.state().vehicles) CHECK(v.position == GridCoord{2, 2});
    for (const OrderSlot& s : env5.state().slots) CHECK_FALSE(s.active());

    Environment env10(small_hom(10));
    CHECK(env10.state().depot == GridCoord{4, 4});
}

TEST_CASE("observation length is fleet-size independent up to five vehicles") {
    // one time entry, two own coordinates, four padded partner pairs, nine
    // entries per slot
    for (int m : {1, 2, 3, 5}) {
        ScenarioConfig cfg = small_hom(5, m, 10);
        CHECK(obs_dim(cfg) == 3 + 8 + 90);
        Environment env(cfg);
        CHECK(static_cast<int>(env.observe(0).size()) == obs_dim(cfg));
    }
    CHECK(action_count(10) == 13);
    CHECK(slot_action(0) == 3);
    CHECK(action_slot(2) == std::nullopt);
    CHECK(action_slot(3) == 0);
}

TEST_CASE("observation of an empty world") {
    ScenarioConfig cfg = small_hom(5, 2, 3);
    Environment env(cfg);
    const std::vector<float> obs = env.observe(0);
    CHECK(obs[0] == 0.0f);             // t / t_e
    CHECK(obs[1] == doctest::Approx(2.0f / 5.0f));
    CHECK(obs[2] == doctest::Approx(2.0f / 5.0f));
    CHECK(obs[3] == doctest::Approx(2.0f / 5.0f));  // the one fleet mate
    CHECK(obs[4] == doctest::Approx(2.0f / 5.0f));
    for (int k = 5; k < 11; ++k) CHECK(obs[k] == -1.0f);  // padding
    for (int s = 0; s < 3; ++s) {
        const int base = 11 + 9 * s;
        CHECK(obs[base] == 0.0f);
        CHECK(obs[base + 1] == 0.0f);
        CHECK(obs[status_offset(cfg, s, OrderStatus::Inactive)] == 1.0f);
        CHECK(obs[base + 8] == 0.0f);  // no deadline fraction
    }
}

TEST_CASE("accept with no open order is an invalid action") {
    Environment env(small_hom());
    const StepOutcome out = env.step({kActionAccept});
    CHECK(out.rewards[0] == -5.0);
    REQUIRE(out.events.size() >= 1);
    CHECK(out.events[0].type == EventType::InvalidAction);
}

TEST_CASE("moving toward a slot the vehicle does not own is invalid") {
    Environment env(small_hom());
    const StepOutcome out = env.step({slot_action(0)});
    CHECK(out.rewards[0] == -5.0);
    CHECK(env.state().vehicles[0].position == env.state().depot);
}

TEST_CASE("full order lifecycle pays the reward in thirds") {
    Environment env(saturated());
    double accept_gain = 0.0, delivery_gain = 0.0;
    bool delivered = false;

    // first step: the world is still empty, wait
    env.step({kActionWait});
    for (int t = 1; t < 60 && !delivered; ++t) {
        const OrderStatus rs = relative_status(env.state().slots[0], 0);
        int action = kActionWait;
        if (rs == OrderStatus::Open)
            action = kActionAccept;
        else if (rs == OrderStatus::AssignedSelfUnpicked)
            action = kActionDepot;
        else if (rs == OrderStatus::Onboard)
            action = slot_action(0);
        const StepOutcome out = env.step({action});
        for (const Event& e : out.events) {
            if (e.type == EventType::OrderAccepted && e.slot == 0) accept_gain = e.reward;
            if (e.type == EventType::Delivery && e.slot == 0) {
                delivery_gain = e.reward;
                delivered = true;
            }
            if (e.type == EventType::InvalidAction) FAIL("lifecycle hit an invalid action");
        }
    }
    REQUIRE(delivered);
    CHECK(accept_gain == doctest::Approx(1.0));
    CHECK(delivery_gain == doctest::Approx(2.0));
    CHECK(accept_gain + delivery_gain == 3.0);
}

TEST_CASE("events serialize as one JSON record per line") {
    Event e;
    e.t = 17;
    e.type = EventType::Delivery;
    e.vehicle = 2;
    e.slot = 4;
    e.reward = 2.0;
    const nlohmann::json j = nlohmann::json::parse(to_jsonl(e));
    CHECK(j.at("t") == 17);
    CHECK(j.at("event") == "Delivery");
    CHECK(j.at("vehicle") == 2);
    CHECK(j.at("slot") == 4);
    CHECK(j.at("reward") == 2.0);

    Event end;
    end.t = 144;
    end.type = EventType::EpisodeEnd;
    end.reward = -5.0;
    const nlohmann::json k = nlohmann::json::parse(to_jsonl(end));
    CHECK(k.at("vehicle").is_null());
    CHECK(k.at("slot").is_null());
    CHECK(to_jsonl(end).find('\n') == std::string::npos);
}

TEST_CASE("deadlines clip at the episode horizon") {
    ScenarioConfig cfg = saturated();
    Environment env(cfg);
    while (env.state().t < 50) env.step({kActionWait});
    CHECK(env.state().slots[0].status == OrderStatus::Open);
    CHECK(env.state().slots[0].deadline == 50 + cfg.delta);  // unclipped early on

    while (env.state().t < 120) env.step({kActionWait});
    CHECK(env.state().slots[0].deadline == cfg.t_e);  // 120 + 48 clips to 144
}

TEST_CASE("step rejects bad inputs") {
    Environment env(small_hom(5, 2));
    const std::vector<int> short_fleet{kActionWait};
    const std::vector<int> high{kActionWait, 99};
    const std::vector<int> negative{kActionWait, -1};
    const std::vector<int> waits{kActionWait, kActionWait};
    CHECK_THROWS_AS(env.step(short_fleet), std::invalid_argument);
    CHECK_THROWS_AS(env.step(high), std::out_of_range);
    CHECK_THROWS_AS(env.step(negative), std::out_of_range);
    while (!env.state().done) env.step(waits);
    CHECK_THROWS_AS(env.step(waits), std::logic_error);
}

TEST_CASE("episodes run exactly t_e decision points") {
    ScenarioConfig cfg = small_hom();
    cfg.t_e = 30;
    cfg.t_c = 30;
    Environment env(cfg);
    int steps = 0;
    while (!env.state().done) {
        const StepOutcome out = env.step({kActionWait});
        ++steps;
        CHECK(out.done == (env.state().t == cfg.t_e));
    }
    CHECK(steps == 30);
}

TEST_CASE("vehicles off depot at the horizon are penalized") {
    ScenarioConfig cfg = small_hom();
    cfg.t_e = 4;
    cfg.t_c = 4;
    cfg.expected_orders = 4.0;
    Environment env(cfg);
    // drive away from the depot: move toward slot targets is invalid, so use
    // a manual trick: accept the first order and walk toward it, never finish
    double final_reward = 0.0;
    StepOutcome out;
    for (int k = 0; k < 4; ++k) {
        const OrderStatus rs = relative_status(env.state().slots[0], 0);
        int action = kActionWait;
        if (rs == OrderStatus::Open) action = kActionAccept;
        if (rs == OrderStatus::AssignedSelfUnpicked) action = kActionDepot;
        if (rs == OrderStatus::Onboard) action = slot_action(0);
        out = env.step({action});
    }
    CHECK(env.state().done);
    bool saw_end = false;
    for (const Event& e : out.events)
        if (e.type == EventType::EpisodeEnd) saw_end = true;
    CHECK(saw_end);
    (void)final_reward;
}

TEST_CASE("observer-relative status one-hots") {
    ScenarioConfig cfg = saturated(5, 2);
    Environment env(cfg);
    env.step({kActionWait, kActionWait});
    REQUIRE(env.state().slots[0].status == OrderStatus::Open);
    // only vehicle 1 accepts
    env.step({kActionWait, kActionAccept});
    REQUIRE(env.state().slots[0].status == OrderStatus::AssignedSelfUnpicked);
    REQUIRE(env.state().slots[0].assignee == 1);

    const std::vector<float> o0 = env.observe(0);
    const std::vector<float> o1 = env.observe(1);
    CHECK(o0[status_offset(cfg, 0, OrderStatus::AssignedOther)] == 1.0f);
    CHECK(o1[status_offset(cfg, 0, OrderStatus::AssignedSelfUnpicked)] == 1.0f);
}

TEST_CASE("acceptance conflicts resolve by insertion cost then lowest id") {
    SUBCASE("two idle vehicles at the depot tie toward vehicle 0") {
        Environment env(saturated(5, 2));
        env.step({kActionWait, kActionWait});
        REQUIRE(env.state().slots[0].status == OrderStatus::Open);
        env.step({kActionAccept, kActionAccept});
        CHECK(env.state().slots[0].assignee == 0);
    }
    SUBCASE("the closer route wins") {
        ScenarioConfig cfg = small_hom(5, 2, 4);
        WorldState state;
        state.t = 3;
        state.depot = depot_cell(5);
        state.vehicles.assign(2, VehicleState{});
        state.vehicles[0].id = 0;
        state.vehicles[0].position = {0, 0};
        state.vehicles[1].id = 1;
        state.vehicles[1].position = {4, 3};
        state.slots.assign(4, OrderSlot{});
        state.slots[2].location = {4, 4};
        state.slots[2].status = OrderStatus::Open;
        state.slots[2].deadline = 40;
        state.slots[2].reward = 3;
        CHECK(resolve_acceptance(state, {0, 1}, cfg) == 1);
        CHECK(resolve_acceptance(state, {0}, cfg) == 0);
    }
}

TEST_CASE("identical seeds and actions reproduce episodes exactly") {
    const ScenarioConfig cfg = small_hom(5, 2, 5);
    for (int round = 0; round < 10; ++round) {
        Environment a(cfg), b(cfg);
        const std::uint64_t seed = episode_seed(77, SeedStream::Train, round);
        a.reset(seed);
        b.reset(seed);
        std::mt19937_64 actions(round + 1);
        while (!a.state().done) {
            std::vector<int> act(2);
            for (int v = 0; v < 2; ++v)
                act[v] = static_cast<int>(actions() % static_cast<std::uint64_t>(a.action_count()));
            const StepOutcome oa = a.step(act);
            const StepOutcome ob = b.step(act);
            REQUIRE(oa.rewards == ob.rewards);
            REQUIRE(oa.events == ob.events);
            REQUIRE(oa.done == ob.done);
            REQUIRE(a.observe(0) == b.observe(0));
            REQUIRE(a.observe(1) == b.observe(1));
        }
        CHECK(a.exogenous_digest() == b.exogenous_digest());
        CHECK(a.orders_drawn() == b.orders_drawn());
    }
}

TEST_CASE("the exogenous stream does not depend on actions") {
    const ScenarioConfig cfg = saturated(5, 1, 2);  // tight slots force suppression
    Environment idle(cfg), busy(cfg);
    idle.reset(42);
    busy.reset(42);
    std::mt19937_64 actions(9);
    while (!idle.state().done) {
        idle.step({kActionWait});
        // the busy twin plays arbitrary (often invalid) actions
        busy.step({static_cast<int>(actions() % static_cast<std::uint64_t>(busy.action_count()))});
    }
    CHECK(idle.exogenous_digest() == busy.exogenous_digest());
    CHECK(idle.orders_drawn() == busy.orders_drawn());
}

TEST_CASE("fuzzed episodes hold every environment invariant") {
    sdd_test::FuzzTotals totals;
    std::string error;
    CHECK_MESSAGE(sdd_test::fuzz_episodes(small_hom(5, 1, 5), 20, 1, totals, error), error);
    CHECK_MESSAGE(sdd_test::fuzz_episodes(saturated(5, 2, 3), 20, 2, totals, error), error);
    CHECK_MESSAGE(sdd_test::fuzz_episodes(saturated(10, 3, 8), 15, 3, totals, error), error);
    ScenarioConfig het = saturated(5, 2, 6);
    het.zones = quadrant_zones(5, {0.3, 0.4, 0.2, 0.1}, {{12, 8}, {8, 6}, {5, 3}, {3, 1}});
    CHECK_MESSAGE(sdd_test::fuzz_episodes(het, 20, 4, totals, error), error);
    ScenarioConfig het10 = saturated(10, 1, 6);
    het10.zones = quadrant_zones(10, {0.3, 0.4, 0.2, 0.1}, {{12, 8}, {8, 6}, {5, 3}, {3, 1}});
    CHECK_MESSAGE(sdd_test::fuzz_episodes(het10, 15, 5, totals, error), error);

    CHECK(totals.steps > 10000);
    // random play under saturated arrivals must exercise the interesting paths
    CHECK(totals.deliveries > 0);
    CHECK(totals.deadline_misses > 0);
}
