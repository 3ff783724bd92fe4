#pragma once

#include <cstdint>

namespace sdd {

/// splitmix64 step, used to decorrelate seeds derived from a common base.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Deterministic per-episode seed. `stream` separates independent uses of
/// the same base seed (training episodes, evaluation episodes, ...) so that
/// consuming one stream never perturbs another.
inline std::uint64_t episode_seed(std::uint64_t base, std::uint64_t stream,
                                  std::uint64_t index) {
    std::uint64_t s = base;
    std::uint64_t a = splitmix64(s);
    s = a ^ (stream * 0x9e3779b97f4a7c15ULL + 0x85ebca6bULL);
    std::uint64_t b = splitmix64(s);
    s = b ^ (index * 0xc2b2ae3d27d4eb4fULL + 0x27d4eb2fULL);
    return splitmix64(s);
}

enum class SeedStream : std::uint64_t {
    Train = 1,
    Eval = 2,
    Policy = 3,
    Init = 4,
};

inline std::uint64_t episode_seed(std::uint64_t base, SeedStream stream,
                                  std::uint64_t index) {
    return episode_seed(base, static_cast<std::uint64_t>(stream), index);
}

}  // namespace sdd
