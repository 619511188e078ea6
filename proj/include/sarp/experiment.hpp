#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sarp/agent.hpp"
#include "sarp/corpus.hpp"
#include "sarp/environment.hpp"
#include "sarp/pomdp.hpp"
#include "sarp/sim_world.hpp"

namespace sarp {

enum class AgentKind { kSarp, kUniform, kPredefined, kCorpp };

std::string agent_name(AgentKind kind);
AgentKind agent_from_name(const std::string& name);

struct ExperimentConfig {
    EnvironmentFile environment;
    std::string environment_name;  // for the CSV
    SceneGraphCorpus corpus;
    std::vector<AgentKind> agents = {AgentKind::kSarp, AgentKind::kUniform,
                                     AgentKind::kPredefined, AgentKind::kCorpp};
    int trials = 1;
    uint64_t base_seed = 0;
    SolverConfig solver;
    DetectorStats detector;
    PerceptionModel perception;
    PomdpOptions pomdp;
    WorldOptions world;
    AgentConfig agent;
    CorppRules corpp_rules;
    std::string output_csv;  // empty = no file
};

// Loads the JSON experiment description (paths resolved relative to the
// config file's directory) and materializes environment, corpus and rules.
ExperimentConfig load_experiment_config(const std::string& path);

struct AgentAggregate {
    std::string agent;
    int trials = 0;
    double mean_cost = 0.0;
    double cost_std = 0.0;
    double success_rate = 0.0;
    double mean_steps = 0.0;
};

struct TrialRecord {
    int trial_id = 0;
    std::string agent;
    uint64_t seed = 0;
    double action_cost = 0.0;
    bool success = false;
    int steps = 0;
    int biased_steps = 0;
};

struct AggregateReport {
    std::vector<AgentAggregate> agents;
    std::vector<TrialRecord> trials;

    const AgentAggregate& for_agent(const std::string& name) const;
    std::string table() const;  // human-readable aggregate table
};

// Runs every configured agent over the same seed sequence (paired trials);
// trial i of each agent starts from an identical world.
AggregateReport run_experiment(const ExperimentConfig& config);

void write_trials_csv(const AggregateReport& report, const ExperimentConfig& config,
                      const std::string& path);

struct SweepRow {
    int distractors = 0;
    AgentAggregate sarp;
    double sarp_solve_seconds = 0.0;
    std::optional<AgentAggregate> joint;
    double joint_solve_seconds = 0.0;
};

// Distractor-count sweep comparing SARP (objects live only in its graph)
// against the joint-state baseline (objects enter the POMDP state space).
// Counts above 3 run SARP only.
std::vector<SweepRow> run_scalability_sweep(const ExperimentConfig& config,
                                            const std::vector<int>& distractor_counts);

std::string sweep_table(const std::vector<SweepRow>& rows);

struct DemoResult {
    EpisodeResult episode;
    std::string rendering;  // per-step table of action, observation, b, b'
};

DemoResult run_demo(const ExperimentConfig& config, uint64_t seed);

}  // namespace sarp
