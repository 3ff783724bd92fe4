#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sdd/policy.hpp"
#include "sdd/scenario.hpp"
#include "sdd/trainer.hpp"

namespace sdd {

struct ExperimentSpec {
    std::string preset_name;
    ScenarioConfig scenario;
    std::string policy = "mip";  // dqn | mip | random
    std::optional<TrainerConfig> trainer;
    int repetitions = 3;         // independent training rounds
    int eval_episodes = 100;
    std::string model_path;      // saved network for policy = dqn
};

/// Named scenarios mirroring the benchmark grid: hom-{5x5,10x10}-{5,30},
/// het-{5x5,10x10}-30, and hom-10x10-30-m{2..5} fleet variants.
ExperimentSpec preset(const std::string& name);
std::vector<std::string> preset_names();

struct EvalResult {
    std::string policy;
    std::vector<double> episode_rewards;
    std::vector<double> decision_seconds;  // wall time inside policy calls, per episode
    std::uint64_t exogenous_hash = 0;      // digest of the order stream, all episodes
    double near_optimal_rate = 0.0;        // fraction of episodes with a cut-short solve
    long long solve_count = 0;

    double mean_reward() const;
    double mean_decision_seconds() const;
};

/// Runs `episodes` greedy evaluation episodes. Episode i is seeded from
/// (scenario.seed, eval stream, i) so every policy sees the same order
/// streams. Decision time covers policy calls only, not environment
/// stepping or I/O.
EvalResult run_evaluation(const ScenarioConfig& scenario, Policy& policy, int episodes);

struct ComparisonReport {
    double dqn_mean_reward = 0.0;
    double mip_mean_reward = 0.0;
    std::optional<double> random_mean_reward;
    double difference_pct = 0.0;  // (dqn - mip) / mip * 100
    double dqn_mean_seconds = 0.0;
    double mip_mean_seconds = 0.0;
    double time_ratio = 0.0;      // mip / dqn
    double near_optimal_rate = 0.0;
};

/// Builds the report from two evaluations of the same scenario. Refuses
/// runs whose exogenous order streams differ.
ComparisonReport compare(const EvalResult& dqn, const EvalResult& mip,
                         const EvalResult* random_baseline = nullptr);

std::string comparison_csv(const ComparisonReport& report);
std::string results_csv(const std::vector<EvalResult>& results);
std::string curve_csv(const std::vector<CurvePoint>& curve);

/// Run manifest: preset, scenario JSON, trainer settings if any, seeds, and
/// a sha256 content hash over all of it.
std::string run_manifest_json(const ExperimentSpec& spec);

}  // namespace sdd
