#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "sarp/experiment.hpp"

namespace {

sarp::ExperimentConfig load_with_overrides(const std::string& path,
                                           std::optional<uint64_t> seed,
                                           std::optional<int> trials) {
    sarp::ExperimentConfig cfg = sarp::load_experiment_config(path);
    if (seed) {
        cfg.base_seed = *seed;
    }
    if (trials) {
        cfg.trials = *trials;
    }
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"sarp: target search with scene-graph belief biasing"};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<uint64_t> seed_override;
    std::optional<int> trials_override;

    auto* run = app.add_subcommand("run", "run a batch experiment from a config file");
    run->add_option("config", config_path, "experiment config JSON")->required();
    run->add_option("--seed", seed_override, "override the base seed");
    run->add_option("--trials", trials_override, "override the trial count");

    auto* sweep =
        app.add_subcommand("sweep", "distractor-count sweep against the joint model");
    std::vector<int> distractor_counts = {0, 1, 2, 3, 4, 5, 6};
    sweep->add_option("config", config_path, "experiment config JSON")->required();
    sweep->add_option("--distractors", distractor_counts,
                      "distractor counts to evaluate");
    sweep->add_option("--seed", seed_override, "override the base seed");
    sweep->add_option("--trials", trials_override, "override the trial count");

    auto* demo = app.add_subcommand("demo", "trace a single episode step by step");
    uint64_t demo_seed = 0;
    demo->add_option("config", config_path, "experiment config JSON")->required();
    demo->add_option("--seed", demo_seed, "episode seed");

    auto* gen = app.add_subcommand("gen-corpus", "generate a synthetic corpus");
    std::string gen_spec;
    std::string gen_out;
    uint64_t gen_seed = 0;
    gen->add_option("spec", gen_spec, "generator config JSON")->required();
    gen->add_option("out", gen_out, "output NDJSON path")->required();
    gen->add_option("--seed", gen_seed, "generator seed");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) {
            auto cfg = load_with_overrides(config_path, seed_override, trials_override);
            auto report = sarp::run_experiment(cfg);
            std::cout << report.table();
            if (!cfg.output_csv.empty()) {
                std::cout << "per-trial records: " << cfg.output_csv << "\n";
            }
        } else if (*sweep) {
            auto cfg = load_with_overrides(config_path, seed_override, trials_override);
            auto rows = sarp::run_scalability_sweep(cfg, distractor_counts);
            std::cout << sarp::sweep_table(rows);
        } else if (*demo) {
            auto cfg = load_with_overrides(config_path, std::nullopt, std::nullopt);
            auto result = sarp::run_demo(cfg, demo_seed);
            std::cout << result.rendering;
        } else if (*gen) {
            auto spec = sarp::load_generator_config(gen_spec);
            auto corpus = sarp::generate_synthetic_corpus(spec, gen_seed);
            sarp::write_corpus(corpus, gen_out);
            std::cout << "wrote " << corpus.images().size() << " images to " << gen_out
                      << "\n";
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
