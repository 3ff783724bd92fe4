#include <doctest.h>

#include <cmath>
#include <random>
#include <set>
#include <vector>

#include "sdd/replay.hpp"

using namespace sdd;

namespace {

Transition marked(float reward) {
    Transition t;
    t.obs = {reward};
    t.reward = reward;
    t.next_obs = {reward};
    return t;
}

}  // namespace

TEST_CASE("the buffer is a ring that overwrites oldest-first") {
    ReplayBuffer buf(4);
    CHECK(buf.capacity() == 4);
    for (int i = 0; i < 6; ++i) buf.push(marked(static_cast<float>(i)));
    CHECK(buf.size() == 4);
    CHECK(buf.at(0).reward == 4.0f);
    CHECK(buf.at(1).reward == 5.0f);
    CHECK(buf.at(2).reward == 2.0f);
    CHECK(buf.at(3).reward == 3.0f);
}

TEST_CASE("zero capacity and oversized batches are rejected") {
    CHECK_THROWS_AS(ReplayBuffer(0), std::invalid_argument);
    ReplayBuffer buf(8);
    buf.push(marked(1.0f));
    std::mt19937_64 rng(1);
    CHECK_THROWS_AS(buf.sample_indices(2, rng), std::invalid_argument);
}

TEST_CASE("samples are distinct and in range") {
    ReplayBuffer buf(100);
    for (int i = 0; i < 100; ++i) buf.push(marked(static_cast<float>(i)));
    std::mt19937_64 rng(7);
    for (int round = 0; round < 200; ++round) {
        const std::vector<std::size_t> idx = buf.sample_indices(64, rng);
        REQUIRE(idx.size() == 64);
        std::set<std::size_t> seen(idx.begin(), idx.end());
        REQUIRE(seen.size() == 64);
        REQUIRE(*seen.rbegin() < 100);
    }
    // a batch the size of the buffer is a permutation
    const std::vector<std::size_t> all = buf.sample_indices(100, rng);
    CHECK(std::set<std::size_t>(all.begin(), all.end()).size() == 100);
}

TEST_CASE("sampling is uniform over the buffer") {
    ReplayBuffer buf(10);
    for (int i = 0; i < 10; ++i) buf.push(marked(static_cast<float>(i)));
    std::mt19937_64 rng(13);
    std::vector<long long> counts(10, 0);
    const int rounds = 100000;
    for (int round = 0; round < rounds; ++round)
        for (const std::size_t i : buf.sample_indices(3, rng)) ++counts[i];
    // each index lands in a batch with probability 3/10
    for (const long long c : counts) CHECK(std::abs(c - 30000) < 600);
}
