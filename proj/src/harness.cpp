#include "sdd/harness.hpp"

#include <chrono>
#include <iomanip>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "sdd/env.hpp"
#include "sdd/hash.hpp"
#include "sdd/mip_policy.hpp"
#include "sdd/rng.hpp"

namespace sdd {

namespace {

ScenarioConfig base_scenario(int grid, double expected, int n_slots, int fleet) {
    ScenarioConfig cfg;
    cfg.grid_size = grid;
    cfg.expected_orders = expected;
    cfg.n_slots = n_slots;
    cfg.fleet_size = fleet;
    cfg.seed = 1;
    return cfg;
}

std::vector<ZoneSpec> benchmark_zones(int grid) {
    return quadrant_zones(grid, {0.3, 0.4, 0.2, 0.1}, {{12, 8}, {8, 6}, {5, 3}, {3, 1}});
}

void write_double(std::ostream& out, double v) {
    out << std::setprecision(12) << v;
}

}  // namespace

ExperimentSpec preset(const std::string& name) {
    ExperimentSpec spec;
    spec.preset_name = name;
    if (name == "hom-5x5-5") {
        spec.scenario = base_scenario(5, 5.0, 5, 1);
    } else if (name == "hom-5x5-30") {
        spec.scenario = base_scenario(5, 30.0, 15, 1);
    } else if (name == "hom-10x10-5") {
        spec.scenario = base_scenario(10, 5.0, 5, 1);
    } else if (name == "hom-10x10-30") {
        spec.scenario = base_scenario(10, 30.0, 15, 1);
    } else if (name == "het-5x5-30") {
        spec.scenario = base_scenario(5, 30.0, 15, 1);
        spec.scenario.zones = benchmark_zones(5);
    } else if (name == "het-10x10-30") {
        spec.scenario = base_scenario(10, 30.0, 15, 1);
        spec.scenario.zones = benchmark_zones(10);
    } else if (name == "hom-10x10-30-m2") {
        spec.scenario = base_scenario(10, 30.0, 15, 2);
    } else if (name == "hom-10x10-30-m3") {
        spec.scenario = base_scenario(10, 30.0, 15, 3);
    } else if (name == "hom-10x10-30-m4") {
        spec.scenario = base_scenario(10, 30.0, 15, 4);
    } else if (name == "hom-10x10-30-m5") {
        spec.scenario = base_scenario(10, 30.0, 15, 5);
    } else {
        throw std::invalid_argument("unknown preset: " + name);
    }
    spec.scenario.validate();
    return spec;
}

std::vector<std::string> preset_names() {
    return {"hom-5x5-5",      "hom-5x5-30",     "hom-10x10-5",    "hom-10x10-30",
            "het-5x5-30",     "het-10x10-30",   "hom-10x10-30-m2", "hom-10x10-30-m3",
            "hom-10x10-30-m4", "hom-10x10-30-m5"};
}

double EvalResult::mean_reward() const {
    if (episode_rewards.empty()) return 0.0;
    return std::accumulate(episode_rewards.begin(), episode_rewards.end(), 0.0) /
           static_cast<double>(episode_rewards.size());
}

double EvalResult::mean_decision_seconds() const {
    if (decision_seconds.empty()) return 0.0;
    return std::accumulate(decision_seconds.begin(), decision_seconds.end(), 0.0) /
           static_cast<double>(decision_seconds.size());
}

EvalResult run_evaluation(const ScenarioConfig& scenario, Policy& policy, int episodes) {
    scenario.validate();
    Environment env(scenario);
    EvalResult result;
    result.policy = policy.name();
    auto* mip = dynamic_cast<MipFleetPolicy*>(&policy);
    int flagged_episodes = 0;
    std::uint64_t hash = kFnvOffset;

    for (int i = 0; i < episodes; ++i) {
        const std::uint64_t seed =
            episode_seed(scenario.seed, SeedStream::Eval, static_cast<std::uint64_t>(i));
        env.reset(seed);
        policy.begin_episode(env, seed);
        double total = 0.0;
        double seconds = 0.0;
        while (!env.state().done) {
            const auto t0 = std::chrono::steady_clock::now();
            const std::vector<int> actions = policy.act(env);
            seconds +=
                std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            const StepOutcome outcome = env.step(actions);
            for (const double r : outcome.rewards) total += r;
        }
        result.episode_rewards.push_back(total);
        result.decision_seconds.push_back(seconds);
        hash = fnv1a64(hash, env.exogenous_digest());
        if (mip) {
            result.solve_count += mip->solve_count();
            if (mip->near_optimal_count() > 0) ++flagged_episodes;
        }
    }
    result.exogenous_hash = hash;
    result.near_optimal_rate =
        episodes > 0 ? static_cast<double>(flagged_episodes) / episodes : 0.0;
    return result;
}

ComparisonReport compare(const EvalResult& dqn, const EvalResult& mip,
                         const EvalResult* random_baseline) {
    if (dqn.exogenous_hash != mip.exogenous_hash)
        throw std::invalid_argument("compare: evaluations saw different order streams");
    if (random_baseline && random_baseline->exogenous_hash != mip.exogenous_hash)
        throw std::invalid_argument("compare: baseline saw a different order stream");

    ComparisonReport report;
    report.dqn_mean_reward = dqn.mean_reward();
    report.mip_mean_reward = mip.mean_reward();
    if (random_baseline) report.random_mean_reward = random_baseline->mean_reward();
    report.difference_pct =
        report.mip_mean_reward != 0.0
            ? (report.dqn_mean_reward - report.mip_mean_reward) / report.mip_mean_reward * 100.0
            : 0.0;
    report.dqn_mean_seconds = dqn.mean_decision_seconds();
    report.mip_mean_seconds = mip.mean_decision_seconds();
    report.time_ratio = report.dqn_mean_seconds > 0.0
                            ? report.mip_mean_seconds / report.dqn_mean_seconds
                            : 0.0;
    report.near_optimal_rate = mip.near_optimal_rate;
    return report;
}

std::string comparison_csv(const ComparisonReport& report) {
    std::ostringstream out;
    out << "metric,dqn,mip,comparison\n";
    out << "reward,";
    write_double(out, report.dqn_mean_reward);
    out << ',';
    write_double(out, report.mip_mean_reward);
    out << ',';
    write_double(out, report.difference_pct);
    out << "\ntime_seconds,";
    write_double(out, report.dqn_mean_seconds);
    out << ',';
    write_double(out, report.mip_mean_seconds);
    out << ',';
    write_double(out, report.time_ratio);
    out << '\n';
    if (report.random_mean_reward) {
        out << "random_reward,,";
        write_double(out, *report.random_mean_reward);
        out << ",\n";
    }
    out << "near_optimal_rate,,";
    write_double(out, report.near_optimal_rate);
    out << ",\n";
    return out.str();
}

std::string results_csv(const std::vector<EvalResult>& results) {
    std::ostringstream out;
    out << "policy,episode,reward,decision_seconds\n";
    for (const EvalResult& r : results)
        for (std::size_t i = 0; i < r.episode_rewards.size(); ++i) {
            out << r.policy << ',' << i << ',';
            write_double(out, r.episode_rewards[i]);
            out << ',';
            write_double(out, r.decision_seconds[i]);
            out << '\n';
        }
    return out.str();
}

std::string curve_csv(const std::vector<CurvePoint>& curve) {
    std::ostringstream out;
    out << "episode,total_reward,epsilon,loss\n";
    for (const CurvePoint& p : curve) {
        out << p.episode << ',';
        write_double(out, p.total_reward);
        out << ',';
        write_double(out, p.epsilon);
        out << ',';
        write_double(out, p.mean_loss);
        out << '\n';
    }
    return out.str();
}

std::string run_manifest_json(const ExperimentSpec& spec) {
    nlohmann::json j;
    j["preset"] = spec.preset_name;
    j["scenario"] = nlohmann::json::parse(to_json(spec.scenario));
    j["policy"] = spec.policy;
    j["repetitions"] = spec.repetitions;
    j["eval_episodes"] = spec.eval_episodes;
    j["model_path"] = spec.model_path;
    if (spec.trainer) {
        const TrainerConfig& t = *spec.trainer;
        j["trainer"] = {{"gamma", t.gamma},
                        {"learning_rate", t.learning_rate},
                        {"batch_size", t.batch_size},
                        {"buffer_capacity", t.buffer_capacity},
                        {"target_sync_interval", t.target_sync_interval},
                        {"epsilon_start", t.epsilon_start},
                        {"epsilon_end", t.epsilon_end},
                        {"epsilon_decay_episodes", t.epsilon_decay_episodes},
                        {"episodes", t.episodes},
                        {"eval_episodes", t.eval_episodes},
                        {"warmup_transitions", t.warmup_transitions},
                        {"seed", t.seed}};
    }
    j["content_hash"] = sha256_hex(j.dump());
    return j.dump(2);
}

}  // namespace sdd
