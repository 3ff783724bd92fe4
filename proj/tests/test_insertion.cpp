#include <doctest.h>

#include <random>
#include <span>
#include <vector>

#include "oracles.hpp"
#include "sdd/insertion.hpp"

using namespace sdd;

TEST_CASE("insertion cost on the worked examples") {
    const GridCoord depot{2, 2};

    SUBCASE("detour to a far corner") {
        const std::vector<GridCoord> stops{{0, 0}};
        const InsertionResult r = insertion_cost(depot, stops, depot, {4, 4});
        CHECK(r.added_cost == 8);
    }
    SUBCASE("collinear stop is free") {
        const std::vector<GridCoord> stops{{4, 2}};
        const InsertionResult r = insertion_cost(depot, stops, depot, {3, 2});
        CHECK(r.added_cost == 0);
        CHECK(r.position == 0);  // earliest position on ties
    }
    SUBCASE("empty route is out-and-back") {
        const InsertionResult r = insertion_cost(depot, {}, depot, {0, 0});
        CHECK(r.added_cost == 8);
        CHECK(r.position == 0);
    }
}

TEST_CASE("insertion cost matches brute force on random routes") {
    std::mt19937_64 rng(123);
    const auto cell = [&rng](int grid) {
        return GridCoord{static_cast<int>(rng() % static_cast<std::uint64_t>(grid)),
                         static_cast<int>(rng() % static_cast<std::uint64_t>(grid))};
    };
    for (int trial = 0; trial < 1000; ++trial) {
        const int grid = trial % 2 == 0 ? 5 : 10;
        const GridCoord depot = depot_cell(grid);
        const GridCoord start = cell(grid);
        std::vector<GridCoord> stops(rng() % 9);
        for (GridCoord& s : stops) s = cell(grid);
        const GridCoord new_stop = cell(grid);

        const InsertionResult got = insertion_cost(start, stops, depot, new_stop);
        const auto [want_cost, want_pos] =
            sdd::test::brute_force_insertion(start, stops, depot, new_stop);
        CHECK(got.added_cost == want_cost);
        CHECK(got.position == want_pos);
    }
}
