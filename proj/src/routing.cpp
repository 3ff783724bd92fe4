#include "sdd/routing.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <unordered_map>

#include <json.hpp>

namespace sdd {

namespace {

using Clock = std::chrono::steady_clock;

/// Steps spent at a node before departing: the depot pickup stop loads one
/// package per service period, every other stop takes one period. This is
/// at least the model's uniform d, so propagated times stay valid for the
/// big-M inequalities while matching what the fleet actually does.
int dwell(const RoutingInstance& inst, int node, int loads) {
    if (inst.nodes[node].kind == NodeKind::Pickup)
        return inst.service_time * std::max(loads, 1);
    return inst.service_time;
}

struct SeqBest {
    bool found = false;
    long long lateness = 0;
    int cells = 0;
    std::vector<int> route;  // node ids, V first, R last
    std::vector<int> times;
};

struct ParetoEntry {
    int time;
    int cells;
    long long lateness;
};

/// Min-cost sequencing of a fixed node set. In strict mode deadline or
/// horizon violations prune and the result minimizes route cells; in
/// lateness mode nothing prunes and the result minimizes (total lateness,
/// cells). Dominated (time, cells, lateness) states are cut via a
/// (visited-mask, last-node) Pareto memo.
class SequenceSearch {
public:
    SequenceSearch(const RoutingInstance& inst, std::vector<int> todo, int loads, int start_time,
                   bool lateness_mode, Clock::time_point deadline, bool& timed_out,
                   long long& expanded)
        : inst_(inst), todo_(std::move(todo)), loads_(loads), start_time_(start_time),
          lateness_mode_(lateness_mode), deadline_(deadline), timed_out_(timed_out),
          expanded_(expanded) {}

    SeqBest run() {
        route_.clear();
        times_.clear();
        route_.push_back(0);
        times_.push_back(start_time_);
        extend(0, 0, start_time_, 0, 0);
        return best_;
    }

private:
    bool better(long long lateness, int cells) const {
        if (!best_.found) return true;
        if (lateness != best_.lateness) return lateness < best_.lateness;
        return cells < best_.cells;
    }

    void extend(std::uint32_t mask, int last, int time, int cells, long long lateness) {
        if (timed_out_) return;
        if ((++expanded_ & 1023) == 0 && Clock::now() > deadline_) {
            timed_out_ = true;
            return;
        }
        const std::size_t full = (std::size_t(1) << todo_.size()) - 1;
        if (mask == full) {
            const int r = inst_.node_count() - 1;
            const int arrival = time + dwell(inst_, last, loads_) +
                                inst_.distance(last, r) * inst_.travel_time;
            const int total_cells = cells + inst_.distance(last, r);
            long long total_late = lateness;
            if (arrival > inst_.horizon_remaining) {
                if (!lateness_mode_) return;
                total_late += arrival - inst_.horizon_remaining;
            }
            if (better(total_late, total_cells)) {
                best_.found = true;
                best_.lateness = total_late;
                best_.cells = total_cells;
                best_.route = route_;
                best_.route.push_back(r);
                best_.times = times_;
                best_.times.push_back(arrival);
            }
            return;
        }

        // dominance memo
        const std::uint64_t key = (std::uint64_t(mask) << 6) | std::uint64_t(last & 63);
        auto& entries = memo_[key];
        for (const ParetoEntry& e : entries)
            if (e.time <= time && e.cells <= cells && e.lateness <= lateness) return;
        std::erase_if(entries, [&](const ParetoEntry& e) {
            return time <= e.time && cells <= e.cells && lateness <= e.lateness;
        });
        entries.push_back({time, cells, lateness});

        const int depart = time + dwell(inst_, last, loads_);
        if (!lateness_mode_) {
            // a node whose best-case arrival already misses its deadline
            // can never be served from here
            for (std::size_t i = 0; i < todo_.size(); ++i) {
                if (mask & (std::uint32_t(1) << i)) continue;
                const RoutingNode& node = inst_.nodes[todo_[i]];
                if (node.kind != NodeKind::Order) continue;
                if (depart + inst_.distance(last, todo_[i]) * inst_.travel_time > node.deadline)
                    return;
            }
        }

        for (std::size_t i = 0; i < todo_.size(); ++i) {
            if (mask & (std::uint32_t(1) << i)) continue;
            const int next = todo_[i];
            const RoutingNode& node = inst_.nodes[next];
            if (node.kind == NodeKind::Order && !node.onboard && p_index_ >= 0 &&
                !(mask & (std::uint32_t(1) << p_index_)))
                continue;  // pickup at the depot must come first
            const int arrival = depart + inst_.distance(last, next) * inst_.travel_time;
            long long next_late = lateness;
            if (node.kind == NodeKind::Order && arrival > node.deadline) {
                if (!lateness_mode_) continue;
                next_late += arrival - node.deadline;
            }
            route_.push_back(next);
            times_.push_back(arrival);
            extend(mask | (std::uint32_t(1) << i), next, arrival,
                   cells + inst_.distance(last, next), next_late);
            route_.pop_back();
            times_.pop_back();
            if (timed_out_) return;
        }
    }

public:
    int p_index_ = -1;  // position of P within todo_, -1 when P is skipped

private:
    const RoutingInstance& inst_;
    std::vector<int> todo_;
    int loads_;
    int start_time_;
    bool lateness_mode_;
    Clock::time_point deadline_;
    bool& timed_out_;
    long long& expanded_;
    std::unordered_map<std::uint64_t, std::vector<ParetoEntry>> memo_;
    std::vector<int> route_;
    std::vector<int> times_;
    SeqBest best_;
};

SeqBest sequence_nodes(const RoutingInstance& inst, const std::vector<int>& served,
                       int new_accepts, bool lateness_mode, Clock::time_point deadline,
                       bool& timed_out, long long& expanded) {
    std::vector<int> todo;
    int loads = 0;
    for (const int id : served)
        if (!inst.nodes[id].onboard) ++loads;
    int p_index = -1;
    if (loads > 0) {
        p_index = 0;
        todo.push_back(1);  // P
    }
    for (const int id : served) todo.push_back(id);
    if (todo.size() > 32) throw std::invalid_argument("solve_exact: too many nodes");

    SequenceSearch search(inst, todo, loads, inst.service_time * new_accepts, lateness_mode,
                          deadline, timed_out, expanded);
    search.p_index_ = p_index;
    return search.run();
}

void check_instance(const RoutingInstance& inst) {
    const int n = inst.node_count();
    if (n < 3) throw std::invalid_argument("instance needs V, P and R nodes");
    if (inst.nodes.front().kind != NodeKind::Vehicle || inst.nodes[1].kind != NodeKind::Pickup ||
        inst.nodes.back().kind != NodeKind::Return)
        throw std::invalid_argument("instance node layout must be [V, P, orders..., R]");
    if (inst.dist.size() != static_cast<std::size_t>(n) * n)
        throw std::invalid_argument("distance matrix size mismatch");
    for (int i = inst.order_begin(); i < inst.order_end(); ++i)
        if (inst.nodes[i].kind != NodeKind::Order)
            throw std::invalid_argument("interior nodes must be orders");
}

}  // namespace

double route_objective(const RoutingInstance& instance, const std::vector<int>& accept,
                       int route_cells) {
    double reward = 0.0;
    for (int i = 0; i < instance.node_count(); ++i)
        if (accept[i] && instance.nodes[i].kind == NodeKind::Order && !instance.nodes[i].onboard)
            reward += instance.nodes[i].reward;
    return reward - instance.travel_cost * route_cells;
}

RoutingInstance build_instance(const WorldState& state, int vehicle_id,
                               const ScenarioConfig& config, const SolverConfig& solver) {
    RoutingInstance inst;
    inst.travel_cost = solver.travel_cost;
    inst.travel_time = 1;
    inst.service_time = std::max({config.t_p, config.t_d, config.t_a, 1});
    inst.horizon_remaining = config.t_e - state.t;

    inst.nodes.push_back({NodeKind::Vehicle, -1, state.vehicles[vehicle_id].position, 0.0, 0,
                          false, false});
    inst.nodes.push_back({NodeKind::Pickup, -1, state.depot, 0.0, 0, false, false});
    for (std::size_t s = 0; s < state.slots.size(); ++s) {
        const OrderSlot& slot = state.slots[s];
        const OrderStatus rs = relative_status(slot, vehicle_id);
        if (rs != OrderStatus::Open && rs != OrderStatus::AssignedSelfUnpicked &&
            rs != OrderStatus::Onboard)
            continue;
        RoutingNode node;
        node.kind = NodeKind::Order;
        node.slot = static_cast<int>(s);
        node.location = slot.location;
        node.deadline = slot.deadline - state.t;
        node.onboard = rs == OrderStatus::Onboard;
        node.committed = rs != OrderStatus::Open;
        node.reward = node.onboard ? 0.0 : static_cast<double>(slot.reward);
        inst.nodes.push_back(node);
    }
    inst.nodes.push_back({NodeKind::Return, -1, state.depot, 0.0, 0, false, false});

    const int n = inst.node_count();
    inst.dist.assign(static_cast<std::size_t>(n) * n, 0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            inst.dist[static_cast<std::size_t>(i) * n + j] =
                manhattan(inst.nodes[i].location, inst.nodes[j].location);
    return inst;
}

RoutingSolution solve_exact(const RoutingInstance& instance, const SolverConfig& config,
                            SolveStats* stats) {
    check_instance(instance);
    const auto t0 = Clock::now();
    const auto deadline =
        t0 + std::chrono::duration_cast<Clock::duration>(
                 std::chrono::duration<double>(config.time_limit_seconds));
    bool timed_out = false;
    long long expanded = 0;

    std::vector<int> committed, optional;
    for (int i = instance.order_begin(); i < instance.order_end(); ++i) {
        if (instance.nodes[i].committed || instance.nodes[i].onboard)
            committed.push_back(i);
        else
            optional.push_back(i);
    }
    std::sort(optional.begin(), optional.end(), [&](int a, int b) {
        if (instance.nodes[a].reward != instance.nodes[b].reward)
            return instance.nodes[a].reward > instance.nodes[b].reward;
        return a < b;
    });
    std::vector<double> suffix(optional.size() + 1, 0.0);
    for (std::size_t i = optional.size(); i-- > 0;)
        suffix[i] = suffix[i + 1] + instance.nodes[optional[i]].reward;

    double committed_reward = 0.0;
    for (const int id : committed)
        if (!instance.nodes[id].onboard) committed_reward += instance.nodes[id].reward;

    struct Best {
        bool found = false;
        double objective = 0.0;
        int cells = 0;
        std::vector<char> accept;
        SeqBest seq;
    } best;

    std::vector<char> accept_mask(static_cast<std::size_t>(instance.node_count()), 0);
    for (const int id : committed) accept_mask[id] = 1;

    const auto try_leaf = [&](double fixed_reward) {
        std::vector<int> served = committed;
        int new_accepts = 0;
        for (const int id : optional)
            if (accept_mask[id]) {
                served.push_back(id);
                ++new_accepts;
            }
        std::sort(served.begin(), served.end());
        SeqBest seq = sequence_nodes(instance, served, new_accepts, false, deadline, timed_out,
                                     expanded);
        if (!seq.found) return;
        const double objective = fixed_reward - instance.travel_cost * seq.cells;
        if (!best.found || objective > best.objective ||
            (objective == best.objective && seq.cells < best.cells)) {
            best.found = true;
            best.objective = objective;
            best.cells = seq.cells;
            best.accept.assign(accept_mask.begin(), accept_mask.end());
            best.seq = std::move(seq);
        }
    };

    // Prove or refute the committed set first so a time limit can never
    // leave the incumbent empty while a feasible base plan exists.
    try_leaf(committed_reward);
    const bool committed_infeasible = !best.found && !timed_out;

    if (!committed_infeasible) {
        std::function<void(std::size_t, double)> branch = [&](std::size_t depth,
                                                              double fixed_reward) {
            if (timed_out) return;
            if (best.found && fixed_reward + suffix[depth] <= best.objective) return;
            if (depth == optional.size()) {
                try_leaf(fixed_reward);
                return;
            }
            const int id = optional[depth];
            accept_mask[id] = 1;
            branch(depth + 1, fixed_reward + instance.nodes[id].reward);
            accept_mask[id] = 0;
            branch(depth + 1, fixed_reward);
        };
        if (!optional.empty()) branch(0, committed_reward);
    }

    RoutingSolution sol;
    sol.near_optimal = timed_out;
    if (best.found) {
        sol.accept.assign(best.accept.begin(), best.accept.end());
        sol.route = best.seq.route;
        sol.visit_times = best.seq.times;
        sol.route_cells = best.cells;
        std::vector<int> accept_int(best.accept.begin(), best.accept.end());
        sol.objective = route_objective(instance, accept_int, best.cells);
    } else {
        // least-lateness fallback over the orders already committed
        bool lateness_timed_out = false;
        SeqBest seq = sequence_nodes(instance, committed, 0, true, deadline, lateness_timed_out,
                                     expanded);
        sol.infeasible = true;
        sol.near_optimal = sol.near_optimal || lateness_timed_out;
        sol.accept.assign(static_cast<std::size_t>(instance.node_count()), 0);
        for (const int id : committed) sol.accept[id] = 1;
        if (seq.found) {
            sol.route = seq.route;
            sol.visit_times = seq.times;
            sol.route_cells = seq.cells;
        } else {
            // even the fallback ran out of budget: serve in index order
            sol.route.push_back(0);
            sol.visit_times.push_back(0);
            int time = 0, cells = 0, last = 0;
            std::vector<int> todo;
            int loads = 0;
            for (const int id : committed)
                if (!instance.nodes[id].onboard) ++loads;
            if (loads > 0) todo.push_back(1);
            todo.insert(todo.end(), committed.begin(), committed.end());
            todo.push_back(instance.node_count() - 1);
            for (const int next : todo) {
                time += dwell(instance, last, loads) +
                        instance.distance(last, next) * instance.travel_time;
                cells += instance.distance(last, next);
                sol.route.push_back(next);
                sol.visit_times.push_back(time);
                last = next;
            }
            sol.route_cells = cells;
        }
        sol.objective = route_objective(instance, sol.accept, sol.route_cells);
    }

    if (stats) {
        stats->nodes_expanded = expanded;
        stats->seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    }
    return sol;
}

ValidationReport validate_solution(const RoutingInstance& instance,
                                   const RoutingSolution& solution) {
    ValidationReport report;
    const auto add = [&](int constraint, std::string msg) {
        if (std::find(report.violated.begin(), report.violated.end(), constraint) ==
            report.violated.end())
            report.violated.push_back(constraint);
        report.messages.push_back(std::move(msg));
    };

    const int n = instance.node_count();
    if (static_cast<int>(solution.accept.size()) != n) {
        add(15, "accept vector size mismatch");
        std::sort(report.violated.begin(), report.violated.end());
        return report;
    }
    for (const int y : solution.accept)
        if (y != 0 && y != 1) add(15, "accept entries must be binary");
    if (solution.route.empty() || solution.visit_times.size() != solution.route.size()) {
        add(15, "route and visit_times must be parallel and non-empty");
        std::sort(report.violated.begin(), report.violated.end());
        return report;
    }
    for (const int node : solution.route)
        if (node < 0 || node >= n) {
            add(15, "route references an unknown node");
            std::sort(report.violated.begin(), report.violated.end());
            return report;
        }

    std::vector<int> visits(static_cast<std::size_t>(n), 0);
    for (const int node : solution.route) ++visits[node];

    if (solution.route.front() != 0 || visits[0] != 1)
        add(4, "vehicle must leave its current location exactly once");
    if (solution.route.back() != n - 1 || visits[n - 1] != 1)
        add(8, "route must end with a single return to the depot");
    if (visits[1] > 1) add(5, "depot pickup stop visited more than once");

    bool any_pickup_needed = false;
    for (int i = instance.order_begin(); i < instance.order_end(); ++i) {
        const RoutingNode& node = instance.nodes[i];
        if (node.onboard) {
            if (!solution.accept[i] || visits[i] != 1)
                add(7, "onboard order must be delivered exactly once");
            continue;
        }
        if (node.committed && !solution.accept[i])
            add(10, "previously accepted order must stay accepted");
        if (solution.accept[i]) {
            any_pickup_needed = true;
            if (visits[i] != 1) add(6, "accepted order must be visited exactly once");
        } else if (visits[i] != 0) {
            add(6, "rejected order must not be visited");
        }
    }
    if (any_pickup_needed && visits[1] == 0)
        add(5, "accepted orders require a pickup visit to the depot");

    for (std::size_t k = 0; k + 1 < solution.route.size(); ++k)
        if (solution.route[k] == solution.route[k + 1])
            add(9, "self-arc breaks flow conservation");

    // 12: pickup precedes every accepted (not onboard) delivery
    int p_position = -1;
    for (std::size_t k = 0; k < solution.route.size(); ++k)
        if (solution.route[k] == 1) p_position = static_cast<int>(k);
    for (std::size_t k = 0; k < solution.route.size(); ++k) {
        const RoutingNode& node = instance.nodes[solution.route[k]];
        if (node.kind == NodeKind::Order && !node.onboard &&
            (p_position < 0 || static_cast<int>(k) < p_position))
            add(12, "delivery scheduled before the depot pickup");
    }

    // 13: start time covers the newly accepted orders' accept service
    int new_accepts = 0;
    for (int i = instance.order_begin(); i < instance.order_end(); ++i)
        if (solution.accept[i] && !instance.nodes[i].committed && !instance.nodes[i].onboard)
            ++new_accepts;
    if (solution.visit_times.front() != instance.service_time * new_accepts)
        add(13, "start time must equal d times the newly accepted count");

    // 11: propagation along the route, plus the big-M form across all pairs
    for (std::size_t k = 0; k + 1 < solution.route.size(); ++k) {
        const int i = solution.route[k];
        const int j = solution.route[k + 1];
        if (solution.visit_times[k + 1] <
            solution.visit_times[k] + instance.service_time +
                instance.distance(i, j) * instance.travel_time)
            add(11, "visit times violate service plus travel propagation");
    }
    int max_dist = 0;
    for (const int d : instance.dist) max_dist = std::max(max_dist, d);
    int max_deadline = 0;
    for (const RoutingNode& node : instance.nodes)
        max_deadline = std::max(max_deadline, node.deadline);
    const long long big_m = static_cast<long long>(instance.horizon_remaining) +
                            static_cast<long long>(instance.service_time) * n +
                            static_cast<long long>(max_dist) * instance.travel_time +
                            max_deadline;
    if (!solution.infeasible) {
        for (std::size_t a = 0; a < solution.route.size(); ++a)
            for (std::size_t c = 0; c < solution.route.size(); ++c) {
                if (a == c) continue;
                const bool consecutive = c == a + 1;
                const long long lhs =
                    static_cast<long long>(solution.visit_times[a]) + instance.service_time +
                    static_cast<long long>(
                        instance.distance(solution.route[a], solution.route[c])) *
                        instance.travel_time -
                    solution.visit_times[c];
                if (lhs > (consecutive ? 0 : big_m))
                    add(11, "big-M linearization violated");
            }
    }

    // 14: every visited order met its deadline; the return met the horizon
    for (std::size_t k = 0; k < solution.route.size(); ++k) {
        const RoutingNode& node = instance.nodes[solution.route[k]];
        if (node.kind == NodeKind::Order && !solution.infeasible &&
            solution.visit_times[k] > node.deadline)
            add(14, "order visited after its deadline");
    }
    if (!solution.infeasible && solution.visit_times.back() > instance.horizon_remaining)
        add(8, "return to depot after the episode horizon");

    // 3: objective arithmetic
    int cells = 0;
    for (std::size_t k = 0; k + 1 < solution.route.size(); ++k)
        cells += instance.distance(solution.route[k], solution.route[k + 1]);
    std::vector<int> accept_int(solution.accept.begin(), solution.accept.end());
    if (cells != solution.route_cells ||
        solution.objective != route_objective(instance, accept_int, cells))
        add(3, "objective does not match rewards minus travel cost");

    std::sort(report.violated.begin(), report.violated.end());
    return report;
}

std::string instance_to_json(const RoutingInstance& instance) {
    nlohmann::json j;
    j["travel_cost"] = instance.travel_cost;
    j["travel_time"] = instance.travel_time;
    j["service_time"] = instance.service_time;
    j["horizon_remaining"] = instance.horizon_remaining;
    j["nodes"] = nlohmann::json::array();
    for (const RoutingNode& node : instance.nodes) {
        const char* kind = node.kind == NodeKind::Vehicle   ? "vehicle"
                           : node.kind == NodeKind::Pickup  ? "pickup"
                           : node.kind == NodeKind::Return ? "return"
                                                            : "order";
        j["nodes"].push_back({{"kind", kind},
                              {"slot", node.slot},
                              {"x", node.location.x},
                              {"y", node.location.y},
                              {"reward", node.reward},
                              {"deadline", node.deadline},
                              {"committed", node.committed},
                              {"onboard", node.onboard}});
    }
    return j.dump(2);
}

RoutingInstance instance_from_json(const std::string& text) {
    const nlohmann::json j = nlohmann::json::parse(text);
    RoutingInstance inst;
    inst.travel_cost = j.at("travel_cost").get<double>();
    inst.travel_time = j.at("travel_time").get<int>();
    inst.service_time = j.at("service_time").get<int>();
    inst.horizon_remaining = j.at("horizon_remaining").get<int>();
    for (const auto& nj : j.at("nodes")) {
        RoutingNode node;
        const std::string kind = nj.at("kind").get<std::string>();
        node.kind = kind == "vehicle" ? NodeKind::Vehicle
                    : kind == "pickup" ? NodeKind::Pickup
                    : kind == "return" ? NodeKind::Return
                                       : NodeKind::Order;
        node.slot = nj.at("slot").get<int>();
        node.location = {nj.at("x").get<int>(), nj.at("y").get<int>()};
        node.reward = nj.at("reward").get<double>();
        node.deadline = nj.at("deadline").get<int>();
        node.committed = nj.at("committed").get<bool>();
        node.onboard = nj.at("onboard").get<bool>();
        inst.nodes.push_back(node);
    }
    const int n = inst.node_count();
    inst.dist.assign(static_cast<std::size_t>(n) * n, 0);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            inst.dist[static_cast<std::size_t>(a) * n + b] =
                manhattan(inst.nodes[a].location, inst.nodes[b].location);
    check_instance(inst);
    return inst;
}

std::string solution_to_json(const RoutingSolution& solution) {
    nlohmann::json j;
    j["accept"] = solution.accept;
    j["route"] = solution.route;
    j["visit_times"] = solution.visit_times;
    j["objective"] = solution.objective;
    j["route_cells"] = solution.route_cells;
    j["near_optimal"] = solution.near_optimal;
    j["infeasible"] = solution.infeasible;
    return j.dump(2);
}

}  // namespace sdd
