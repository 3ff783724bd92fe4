#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "sdd/env.hpp"
#include "sdd/harness.hpp"
#include "sdd/hash.hpp"
#include "sdd/mip_policy.hpp"
#include "sdd/model_io.hpp"
#include "sdd/rng.hpp"
#include "sdd/routing.hpp"
#include "sdd/trainer.hpp"

namespace fs = std::filesystem;

namespace {

void write_file(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path.string());
    out << text;
    if (!out.flush()) throw std::runtime_error("write failed: " + path.string());
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

sdd::QNetwork<float> load_checked_model(const std::string& path,
                                        const sdd::ScenarioConfig& scenario) {
    sdd::ModelFile file = sdd::load_model(path);
    sdd::Environment env(scenario);
    if (file.net.input_dim() != env.obs_dim() || file.net.output_dim() != env.action_count())
        throw std::runtime_error("model dimensions do not match the scenario");
    if (file.meta.config_hash != sdd::sha256_hex(sdd::to_json(scenario)))
        std::cerr << "warning: model was trained on a different scenario config\n";
    return std::move(file.net);
}

void dump_events(const fs::path& path, const sdd::ScenarioConfig& scenario, sdd::Policy& policy,
                 int episodes) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path.string());
    sdd::Environment env(scenario);
    for (int i = 0; i < episodes; ++i) {
        const std::uint64_t seed =
            sdd::episode_seed(scenario.seed, sdd::SeedStream::Eval, static_cast<std::uint64_t>(i));
        env.reset(seed);
        policy.begin_episode(env, seed);
        while (!env.state().done) {
            const sdd::StepOutcome outcome = env.step(policy.act(env));
            for (const sdd::Event& e : outcome.events) {
                nlohmann::json j = nlohmann::json::parse(sdd::to_jsonl(e));
                j["episode"] = i;
                out << j.dump() << '\n';
            }
        }
    }
}

int run_train(const std::string& preset_name, int episodes, std::uint64_t seed,
              const fs::path& out_dir) {
    sdd::ExperimentSpec spec = sdd::preset(preset_name);
    spec.policy = "dqn";
    sdd::TrainerConfig trainer;
    trainer.episodes = episodes;
    trainer.seed = seed;
    spec.trainer = trainer;
    spec.model_path = (out_dir / "model.bin").string();

    std::cout << "training " << preset_name << " for " << episodes << " episodes (seed " << seed
              << ")\n";
    const sdd::TrainResult result =
        sdd::train(spec.scenario, trainer, [&](const sdd::CurvePoint& p) {
            if (p.episode % 500 == 0)
                std::cout << "episode " << p.episode << "  reward " << p.total_reward
                          << "  epsilon " << p.epsilon << "  loss " << p.mean_loss << '\n';
        });

    sdd::ModelMeta meta;
    meta.widths = result.net.widths();
    meta.seed = seed;
    meta.scenario_json = sdd::to_json(spec.scenario);
    meta.config_hash = sdd::sha256_hex(meta.scenario_json);
    fs::create_directories(out_dir);
    sdd::save_model(spec.model_path, result.net, meta);
    write_file(out_dir / "curve.csv", sdd::curve_csv(result.curve));
    write_file(out_dir / "manifest.json", sdd::run_manifest_json(spec));
    std::cout << "saved " << spec.model_path << " after " << result.env_steps << " env steps\n";
    return 0;
}

int run_eval(const std::string& preset_name, const std::string& policy_name,
             const std::string& model_path, int episodes, double time_limit,
             const fs::path& out_dir, const std::string& events_path) {
    sdd::ExperimentSpec spec = sdd::preset(preset_name);
    spec.policy = policy_name;
    spec.eval_episodes = episodes;
    spec.model_path = model_path;

    std::unique_ptr<sdd::Policy> policy;
    sdd::QNetwork<float> net;
    if (policy_name == "dqn") {
        if (model_path.empty()) throw std::runtime_error("--model is required for policy dqn");
        net = load_checked_model(model_path, spec.scenario);
        policy = std::make_unique<sdd::DqnPolicy>(&net);
    } else if (policy_name == "mip") {
        sdd::SolverConfig solver;
        solver.time_limit_seconds = time_limit;
        policy = std::make_unique<sdd::MipFleetPolicy>(solver);
    } else if (policy_name == "random") {
        policy = std::make_unique<sdd::RandomPolicy>();
    } else {
        throw std::runtime_error("unknown policy: " + policy_name);
    }

    const sdd::EvalResult result = sdd::run_evaluation(spec.scenario, *policy, episodes);
    fs::create_directories(out_dir);
    write_file(out_dir / "results.csv", sdd::results_csv({result}));
    write_file(out_dir / "manifest.json", sdd::run_manifest_json(spec));
    if (!events_path.empty()) dump_events(events_path, spec.scenario, *policy, 1);

    std::cout << policy_name << " on " << preset_name << ": mean reward "
              << result.mean_reward() << ", mean decision time "
              << result.mean_decision_seconds() << " s/episode";
    if (policy_name == "mip")
        std::cout << ", near-optimal flag rate " << result.near_optimal_rate;
    std::cout << '\n';
    return 0;
}

int run_compare(const std::string& preset_name, const std::string& model_path, int episodes,
                double time_limit, const fs::path& out_dir, bool skip_random) {
    sdd::ExperimentSpec spec = sdd::preset(preset_name);
    spec.policy = "dqn";
    spec.eval_episodes = episodes;
    spec.model_path = model_path;

    sdd::QNetwork<float> net = load_checked_model(model_path, spec.scenario);
    sdd::DqnPolicy dqn(&net);
    sdd::SolverConfig solver;
    solver.time_limit_seconds = time_limit;
    sdd::MipFleetPolicy mip(solver);
    sdd::RandomPolicy random_policy;

    std::cout << "evaluating dqn\n";
    const sdd::EvalResult dqn_result = sdd::run_evaluation(spec.scenario, dqn, episodes);
    std::cout << "evaluating mip\n";
    const sdd::EvalResult mip_result = sdd::run_evaluation(spec.scenario, mip, episodes);
    std::vector<sdd::EvalResult> all = {dqn_result, mip_result};

    sdd::ComparisonReport report;
    if (skip_random) {
        report = sdd::compare(dqn_result, mip_result);
    } else {
        std::cout << "evaluating random\n";
        const sdd::EvalResult random_result =
            sdd::run_evaluation(spec.scenario, random_policy, episodes);
        all.push_back(random_result);
        report = sdd::compare(dqn_result, mip_result, &all.back());
    }

    fs::create_directories(out_dir);
    write_file(out_dir / "comparison.csv", sdd::comparison_csv(report));
    write_file(out_dir / "results.csv", sdd::results_csv(all));
    write_file(out_dir / "manifest.json", sdd::run_manifest_json(spec));

    std::cout << "dqn " << report.dqn_mean_reward << " vs mip " << report.mip_mean_reward
              << " (" << report.difference_pct << "%), time ratio mip/dqn "
              << report.time_ratio << ", near-optimal rate " << report.near_optimal_rate
              << '\n';
    return 0;
}

int run_solve(const std::string& instance_path, double time_limit) {
    const sdd::RoutingInstance instance = sdd::instance_from_json(read_file(instance_path));
    sdd::SolverConfig config;
    config.time_limit_seconds = time_limit;
    config.travel_cost = instance.travel_cost;
    sdd::SolveStats stats;
    const sdd::RoutingSolution solution = sdd::solve_exact(instance, config, &stats);
    std::cout << sdd::solution_to_json(solution) << '\n';
    const sdd::ValidationReport report = sdd::validate_solution(instance, solution);
    if (report.ok()) {
        std::cerr << "valid (" << stats.nodes_expanded << " nodes, " << stats.seconds << " s)\n";
        return 0;
    }
    for (const std::string& msg : report.messages) std::cerr << "violation: " << msg << '\n';
    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"same-day delivery optimization laboratory"};
    app.require_subcommand(1);

    std::string preset_name;
    std::string policy_name = "mip";
    std::string model_path;
    std::string instance_path;
    std::string out_dir = ".";
    std::string events_path;
    int episodes = 100;
    int train_episodes = sdd::TrainerConfig{}.episodes;
    std::uint64_t seed = 1;
    double time_limit = sdd::SolverConfig{}.time_limit_seconds;
    bool skip_random = false;

    CLI::App* train = app.add_subcommand("train", "train a DQN policy on a preset");
    train->add_option("--preset", preset_name, "scenario preset name")->required();
    train->add_option("--episodes", train_episodes, "training episodes");
    train->add_option("--seed", seed, "training seed");
    train->add_option("--out", out_dir, "output directory");

    CLI::App* eval = app.add_subcommand("eval", "evaluate a policy on a preset");
    eval->add_option("--preset", preset_name, "scenario preset name")->required();
    eval->add_option("--policy", policy_name, "dqn | mip | random");
    eval->add_option("--model", model_path, "saved network (required for dqn)");
    eval->add_option("--episodes", episodes, "evaluation episodes");
    eval->add_option("--time-limit", time_limit, "solver time limit in seconds");
    eval->add_option("--out", out_dir, "output directory");
    eval->add_option("--events", events_path,
                     "write the first evaluation episode's event log (JSONL) here");

    CLI::App* cmp = app.add_subcommand("compare", "evaluate DQN against the exact baseline");
    cmp->add_option("--preset", preset_name, "scenario preset name")->required();
    cmp->add_option("--model", model_path, "saved network")->required();
    cmp->add_option("--episodes", episodes, "evaluation episodes");
    cmp->add_option("--time-limit", time_limit, "solver time limit in seconds");
    cmp->add_option("--out", out_dir, "output directory");
    cmp->add_flag("--skip-random", skip_random, "skip the random floor baseline");

    CLI::App* solve = app.add_subcommand("solve", "solve one routing instance from JSON");
    solve->add_option("--instance", instance_path, "instance JSON file")->required();
    solve->add_option("--time-limit", time_limit, "solver time limit in seconds");

    CLI::App* presets = app.add_subcommand("presets", "list scenario presets");

    CLI11_PARSE(app, argc, argv);

    try {
        if (train->parsed()) return run_train(preset_name, train_episodes, seed, out_dir);
        if (eval->parsed())
            return run_eval(preset_name, policy_name, model_path, episodes, time_limit, out_dir,
                            events_path);
        if (cmp->parsed())
            return run_compare(preset_name, model_path, episodes, time_limit, out_dir,
                               skip_random);
        if (solve->parsed()) return run_solve(instance_path, time_limit);
        if (presets->parsed()) {
            for (const std::string& name : sdd::preset_names()) std::cout << name << '\n';
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
