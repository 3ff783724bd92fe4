#include "sdd/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

#include "sdd/rng.hpp"

namespace sdd {

double epsilon_for(int episode, const TrainerConfig& config) {
    const int decay = config.epsilon_decay_episodes > 0 ? config.epsilon_decay_episodes
                                                        : config.episodes / 2;
    if (decay <= 0) return config.epsilon_end;
    const double frac = std::min(1.0, static_cast<double>(episode) / decay);
    return config.epsilon_start + frac * (config.epsilon_end - config.epsilon_start);
}

double train_step(QNetwork<float>& net, const QNetwork<float>& target, Adam<float>& optimizer,
                  std::span<const Transition* const> batch, const TrainerConfig& config,
                  TrainScratch& scratch) {
    if (batch.empty()) throw std::invalid_argument("train_step: empty batch");
    const Eigen::Index rows = static_cast<Eigen::Index>(batch.size());
    const Eigen::Index in = net.input_dim();
    const Eigen::Index out = net.output_dim();
    using Matrix = QNetwork<float>::Matrix;

    if (scratch.cache.acts.empty()) scratch.cache.acts.resize(1);
    if (scratch.target_cache.acts.empty()) scratch.target_cache.acts.resize(1);
    Matrix& x = scratch.cache.acts[0];
    Matrix& xn = scratch.target_cache.acts[0];
    x.resize(rows, in);
    xn.resize(rows, in);
    for (Eigen::Index k = 0; k < rows; ++k) {
        const Transition& tr = *batch[static_cast<std::size_t>(k)];
        if (static_cast<Eigen::Index>(tr.obs.size()) != in ||
            static_cast<Eigen::Index>(tr.next_obs.size()) != in)
            throw std::invalid_argument("train_step: observation width mismatch");
        for (Eigen::Index c = 0; c < in; ++c) {
            x(k, c) = tr.obs[static_cast<std::size_t>(c)];
            xn(k, c) = tr.next_obs[static_cast<std::size_t>(c)];
        }
    }

    const Matrix& qn = target.forward_prepared(scratch.target_cache);
    const Matrix& q = net.forward_prepared(scratch.cache);

    Matrix& dout = scratch.dout;
    dout.resize(rows, out);
    dout.setZero();
    double loss = 0.0;
    for (Eigen::Index k = 0; k < rows; ++k) {
        const Transition& tr = *batch[static_cast<std::size_t>(k)];
        if (tr.action < 0 || tr.action >= out)
            throw std::out_of_range("train_step: action outside the network's output");
        double y = tr.reward;
        if (!tr.done) y += config.gamma * static_cast<double>(qn.row(k).maxCoeff());
        const double diff = static_cast<double>(q(k, tr.action)) - y;
        loss += diff * diff;
        dout(k, tr.action) = static_cast<float>(2.0 * diff / static_cast<double>(rows));
    }
    loss /= static_cast<double>(rows);
    if (!std::isfinite(loss)) throw std::runtime_error("train_step: non-finite loss");

    net.backward(scratch.cache, dout, scratch.grads);
    optimizer.step(net, scratch.grads);
    return loss;
}

double train_step(QNetwork<float>& net, const QNetwork<float>& target, Adam<float>& optimizer,
                  std::span<const Transition* const> batch, const TrainerConfig& config) {
    TrainScratch scratch;
    return train_step(net, target, optimizer, batch, config, scratch);
}

TrainResult train(const ScenarioConfig& scenario, const TrainerConfig& config,
                  const std::function<void(const CurvePoint&)>& on_episode) {
    scenario.validate();
    Environment env(scenario);
    const int m = scenario.fleet_size;
    const std::vector<int> widths = {env.obs_dim(), 256, 256, 128, env.action_count()};

    TrainResult result;
    result.net = QNetwork<float>(widths, episode_seed(config.seed, SeedStream::Init, 0));
    QNetwork<float> target = result.net;
    Adam<float> optimizer(result.net, config.learning_rate);
    ReplayBuffer buffer(config.buffer_capacity);
    std::mt19937_64 policy_rng(episode_seed(config.seed, SeedStream::Policy, 0));
    TrainScratch scratch;
    QNetwork<float>::Cache select_scratch;

    std::vector<std::vector<float>> obs(static_cast<std::size_t>(m));
    std::vector<std::vector<float>> next(static_cast<std::size_t>(m));
    std::vector<int> actions(static_cast<std::size_t>(m));
    std::vector<const Transition*> batch;

    for (int episode = 0; episode < config.episodes; ++episode) {
        env.reset(episode_seed(config.seed, SeedStream::Train,
                               static_cast<std::uint64_t>(episode)));
        const double epsilon = epsilon_for(episode, config);
        double total_reward = 0.0;
        double loss_sum = 0.0;
        long long loss_count = 0;

        for (int v = 0; v < m; ++v) obs[static_cast<std::size_t>(v)] = env.observe(v);
        while (!env.state().done) {
            for (int v = 0; v < m; ++v)
                actions[static_cast<std::size_t>(v)] =
                    select_action(result.net, obs[static_cast<std::size_t>(v)], epsilon,
                                  policy_rng, select_scratch);
            const StepOutcome outcome = env.step(actions);
            ++result.env_steps;
            for (int v = 0; v < m; ++v) next[static_cast<std::size_t>(v)] = env.observe(v);
            for (int v = 0; v < m; ++v) {
                const auto i = static_cast<std::size_t>(v);
                total_reward += outcome.rewards[i];
                buffer.push({obs[i], actions[i], static_cast<float>(outcome.rewards[i]),
                             next[i], outcome.done});
                ++result.transitions;
            }
            std::swap(obs, next);

            if (buffer.size() >= static_cast<std::size_t>(config.warmup_transitions) &&
                buffer.size() >= static_cast<std::size_t>(config.batch_size)) {
                const auto indices =
                    buffer.sample_indices(static_cast<std::size_t>(config.batch_size),
                                          policy_rng);
                batch.clear();
                for (const std::size_t i : indices) batch.push_back(&buffer.at(i));
                loss_sum += train_step(result.net, target, optimizer,
                                       std::span<const Transition* const>(batch), config,
                                       scratch);
                ++loss_count;
            }
            if (config.target_sync_interval > 0 &&
                result.env_steps % config.target_sync_interval == 0)
                sync_target(result.net, target);
        }

        const CurvePoint point{episode, total_reward, epsilon,
                               loss_count > 0 ? loss_sum / static_cast<double>(loss_count)
                                              : 0.0};
        result.curve.push_back(point);
        if (on_episode) on_episode(point);
    }
    return result;
}

void DqnPolicy::begin_episode(const Environment&, std::uint64_t seed) { rng_.seed(seed); }

std::vector<int> DqnPolicy::act(const Environment& env) {
    const int m = env.config().fleet_size;
    std::vector<int> actions(static_cast<std::size_t>(m));
    for (int v = 0; v < m; ++v)
        actions[static_cast<std::size_t>(v)] =
            select_action(*net_, env.observe(v), epsilon_, rng_, scratch_);
    return actions;
}

}  // namespace sdd
