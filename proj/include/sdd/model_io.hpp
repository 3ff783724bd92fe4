#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sdd/qnet.hpp"
#include "sdd/scenario.hpp"

namespace sdd {

struct ModelMeta {
    std::vector<int> widths;
    std::uint64_t seed = 0;
    std::string config_hash;     // sha256 of the scenario JSON
    std::string scenario_json;   // full scenario, so eval can rebuild the env
};

struct ModelFile {
    QNetwork<float> net;
    ModelMeta meta;
};

/// Flat binary tensor file with a JSON header: [u32 header bytes][header]
/// [float32 W0,b0,W1,b1,...]. Weights round-trip bit exactly.
void save_model(const std::string& path, const QNetwork<float>& net, const ModelMeta& meta);
ModelFile load_model(const std::string& path);

}  // namespace sdd
