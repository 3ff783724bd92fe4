#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace sdd {

inline constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;

/// Incremental FNV-1a, used for the exogenous order-stream digest.
inline std::uint64_t fnv1a64(std::uint64_t h, std::uint64_t value) {
    for (int i = 0; i < 8; ++i) {
        h ^= (value >> (8 * i)) & 0xffULL;
        h *= 0x100000001b3ULL;
    }
    return h;
}

/// Hex SHA-256 of `data`, used as the run-manifest content hash.
std::string sha256_hex(std::string_view data);

}  // namespace sdd
