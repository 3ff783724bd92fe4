#pragma once

#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "sdd/env.hpp"

namespace sdd {

/// A fleet decision rule: one action per vehicle per decision point.
/// Policies are reseeded per episode so evaluation runs are reproducible.
class Policy {
public:
    virtual ~Policy() = default;
    virtual std::string name() const = 0;
    virtual void begin_episode(const Environment& env, std::uint64_t seed) = 0;
    virtual std::vector<int> act(const Environment& env) = 0;
};

/// Uniform over the whole action space, invalid actions included.
class RandomPolicy : public Policy {
public:
    std::string name() const override { return "random"; }
    void begin_episode(const Environment& env, std::uint64_t seed) override;
    std::vector<int> act(const Environment& env) override;

private:
    std::mt19937_64 rng_;
};

/// Always waits. Used for order-process calibration where the fleet must
/// not disturb slot occupancy.
class WaitPolicy : public Policy {
public:
    std::string name() const override { return "wait"; }
    void begin_episode(const Environment&, std::uint64_t) override {}
    std::vector<int> act(const Environment& env) override;
};

}  // namespace sdd
