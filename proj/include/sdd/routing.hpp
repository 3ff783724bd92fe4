#pragma once

#include <string>
#include <vector>

#include "sdd/env.hpp"
#include "sdd/grid.hpp"
#include "sdd/scenario.hpp"

namespace sdd {

// Node roles in the single-vehicle accept-and-route model. The node list is
// laid out as [V, P, orders..., R]: V is the vehicle's current location, P
// the depot pickup stop, R the depot return stop.
enum class NodeKind { Vehicle, Pickup, Order, Return };

struct RoutingNode {
    NodeKind kind = NodeKind::Order;
    int slot = -1;          // environment slot id for order nodes
    GridCoord location;
    double reward = 0.0;    // only undelivered, not-onboard orders carry reward
    int deadline = 0;       // remaining steps l_i, relative to now
    bool committed = false; // already accepted (must be served)
    bool onboard = false;   // picked up, delivery pending (must be served)
};

struct RoutingInstance {
    std::vector<RoutingNode> nodes;  // [0]=V, [1]=P, [2..]=orders, [last]=R
    std::vector<int> dist;           // flattened symmetric Manhattan matrix
    double travel_cost = 0.001;      // m, objective cost per cell
    int travel_time = 1;             // t, steps per cell
    int service_time = 1;            // d, steps per stop
    int horizon_remaining = 144;     // steps until the episode ends

    int node_count() const { return static_cast<int>(nodes.size()); }
    int distance(int i, int j) const { return dist[static_cast<std::size_t>(i) * nodes.size() + j]; }
    int order_begin() const { return 2; }
    int order_end() const { return node_count() - 1; }
};

struct RoutingSolution {
    std::vector<int> accept;       // y_i per node index (1 for onboard and committed)
    std::vector<int> route;        // node indices, starts at V, ends at R
    std::vector<int> visit_times;  // B_i per route entry
    double objective = 0.0;
    int route_cells = 0;
    bool near_optimal = false;     // time limit cut the search short
    bool infeasible = false;       // committed orders cannot all meet deadlines
};

struct SolverConfig {
    double travel_cost = 0.001;
    double time_limit_seconds = 10.0;
};

struct SolveStats {
    long long nodes_expanded = 0;
    double seconds = 0.0;
};

/// Snapshot of one vehicle's routing problem. D = slots the vehicle sees as
/// Open or assigned-to-self unpicked, A = the committed subset, T = onboard.
RoutingInstance build_instance(const WorldState& state, int vehicle_id,
                               const ScenarioConfig& config,
                               const SolverConfig& solver = {});

/// Exact optimum of: maximize sum of accepted rewards - m * route cells,
/// subject to serving all committed and onboard orders, pickup at P before
/// any accepted delivery, visit times meeting every deadline and the
/// horizon. Branch-and-bound over accept subsets and visit orders with
/// direct time propagation. If the time budget runs out the incumbent is
/// returned flagged near_optimal; if the committed set itself cannot meet
/// its deadlines the least-lateness route is returned flagged infeasible.
RoutingSolution solve_exact(const RoutingInstance& instance, const SolverConfig& config,
                            SolveStats* stats = nullptr);

/// Canonical objective arithmetic shared by solver, validator and tests:
/// rewards summed in ascending node order, then the travel term subtracted.
double route_objective(const RoutingInstance& instance, const std::vector<int>& accept,
                       int route_cells);

struct ValidationReport {
    std::vector<int> violated;  // constraint numbers, deduplicated, ascending
    std::vector<std::string> messages;
    bool ok() const { return violated.empty(); }
};

/// Independent algebraic check of a solution against the model's
/// constraints (4..15), big-M style, without re-running the search.
ValidationReport validate_solution(const RoutingInstance& instance,
                                   const RoutingSolution& solution);

std::string instance_to_json(const RoutingInstance& instance);
RoutingInstance instance_from_json(const std::string& text);
std::string solution_to_json(const RoutingSolution& solution);

}  // namespace sdd
