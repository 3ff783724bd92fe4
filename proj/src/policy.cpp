#include "sdd/policy.hpp"

namespace sdd {

void RandomPolicy::begin_episode(const Environment&, std::uint64_t seed) { rng_.seed(seed); }

std::vector<int> RandomPolicy::act(const Environment& env) {
    const auto n = static_cast<std::uint64_t>(env.action_count());
    const std::uint64_t bound = UINT64_MAX - UINT64_MAX % n;
    std::vector<int> actions(env.config().fleet_size);
    for (int& a : actions) {
        std::uint64_t raw;
        do { raw = rng_(); } while (raw >= bound);
        a = static_cast<int>(raw % n);
    }
    return actions;
}

std::vector<int> WaitPolicy::act(const Environment& env) {
    return std::vector<int>(env.config().fleet_size, kActionWait);
}

}  // namespace sdd
