#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "sdd/env.hpp"
#include "sdd/policy.hpp"
#include "sdd/qnet.hpp"
#include "sdd/replay.hpp"
#include "sdd/scenario.hpp"

namespace sdd {

struct TrainerConfig {
    double gamma = 0.99;
    double learning_rate = 1e-4;
    int batch_size = 64;
    std::size_t buffer_capacity = 100000;
    int target_sync_interval = 2000;  // environment steps between theta' copies
    double epsilon_start = 1.0;
    double epsilon_end = 0.05;
    int epsilon_decay_episodes = 0;   // 0 = first half of `episodes`
    int episodes = 20000;
    int eval_episodes = 100;
    int warmup_transitions = 1000;
    std::uint64_t seed = 1;
};

struct CurvePoint {
    int episode = 0;
    double total_reward = 0.0;
    double epsilon = 0.0;
    double mean_loss = 0.0;
};

struct TrainResult {
    QNetwork<float> net;
    std::vector<CurvePoint> curve;
    long long env_steps = 0;
    long long transitions = 0;  // stored experiences, fleet_size per env step
};

/// Exploration rate for a given episode under the linear schedule.
double epsilon_for(int episode, const TrainerConfig& config);

/// r when done, else r + gamma * max_a Q_target(next_obs, a).
template <typename T>
double td_target(const Transition& tr, const QNetwork<T>& target, double gamma) {
    if (tr.done) return tr.reward;
    std::vector<T> next(tr.next_obs.begin(), tr.next_obs.end());
    const std::vector<T> q = target.forward_one(next);
    double best = q[0];
    for (std::size_t a = 1; a < q.size(); ++a) best = std::max(best, static_cast<double>(q[a]));
    return tr.reward + gamma * best;
}

/// Reusable buffers for train_step; one per training loop keeps the batch
/// math allocation-free.
struct TrainScratch {
    QNetwork<float>::Cache cache;         // forward pass of the online net
    QNetwork<float>::Cache target_cache;  // forward pass of the target net
    QNetwork<float>::Gradients grads;
    QNetwork<float>::Matrix dout;
};

/// One gradient descent update on the mean squared temporal-difference
/// error; only the taken action's value enters each sample's error. Returns
/// the batch loss. Throws on a non-finite loss.
double train_step(QNetwork<float>& net, const QNetwork<float>& target, Adam<float>& optimizer,
                  std::span<const Transition* const> batch, const TrainerConfig& config,
                  TrainScratch& scratch);

double train_step(QNetwork<float>& net, const QNetwork<float>& target, Adam<float>& optimizer,
                  std::span<const Transition* const> batch, const TrainerConfig& config);

/// Parameter-sharing deep Q-learning: every vehicle queries the one shared
/// network with its own observation and stores its own transition; one
/// gradient step per environment step once the buffer is warm; the target
/// network is refreshed by copying. Returns the trained network and the
/// per-episode reward curve.
TrainResult train(const ScenarioConfig& scenario, const TrainerConfig& config,
                  const std::function<void(const CurvePoint&)>& on_episode = nullptr);

/// Greedy fleet policy over a trained network (epsilon = 0 by default).
class DqnPolicy : public Policy {
public:
    explicit DqnPolicy(const QNetwork<float>* net, double epsilon = 0.0)
        : net_(net), epsilon_(epsilon) {}

    std::string name() const override { return "dqn"; }
    void begin_episode(const Environment& env, std::uint64_t seed) override;
    std::vector<int> act(const Environment& env) override;

private:
    const QNetwork<float>* net_;
    double epsilon_;
    std::mt19937_64 rng_;
    QNetwork<float>::Cache scratch_;
};

}  // namespace sdd
