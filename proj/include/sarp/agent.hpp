#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sarp/corpus.hpp"
#include "sarp/markov_net.hpp"
#include "sarp/pomdp.hpp"
#include "sarp/sim_world.hpp"

namespace sarp {

struct TraceStep {
    int action = -1;
    int observation = -1;
    int robot_location = -1;  // after executing the action
    Belief b;
    Belief b_prime;
    bool biased = false;
    double reward = 0.0;
};

struct EpisodeResult {
    double total_reward = 0.0;
    double action_cost = 0.0;  // positive magnitude of navigation costs
    bool success = false;
    bool terminated = false;   // false when the step cap was hit
    int steps = 0;
    int biased_steps = 0;
    int reported_location = -1;
    int true_location = -1;
    std::vector<TraceStep> trace;

    nlohmann::json to_json() const;
};

struct AgentConfig {
    double association_radius = 0.5;
    int step_cap = 50;
    BpConfig bp;
    PhiOptions phi;
};

// b'(l) proportional to bias(l) * b(l); b itself is never modified.
Belief bias_belief(const Belief& b, const std::vector<double>& bias);

// Prior rules for the CORPP baseline: a rule contributes `probability`
// weight to `location` when its condition matches the query label ("*"
// matches everything). Locations without matching rules get default_weight.
struct CorppRule {
    std::string condition;
    int location = -1;
    double probability = 0.0;
};

struct CorppRules {
    std::vector<CorppRule> rules;
    double default_weight = 0.0;
};

CorppRules load_corpp_rules(const std::string& path);
Belief corpp_prior(const CorppRules& rules, const std::string& query_label,
                   int location_count);

// Full control loop: perceive, grow the global scene graph, plan on the
// biased belief b', Bayes-update b, and bias b' through belief propagation
// whenever the target is detected.
EpisodeResult run_sarp_episode(WorldState& world, const TargetSearchPomdp& model,
                               const Policy& policy, const SceneGraphCorpus& corpus,
                               const PerceptionModel& perception,
                               const AgentConfig& config = {});

// Same loop with biasing disabled (b' == b throughout).
EpisodeResult run_baseline_uniform(WorldState& world, const TargetSearchPomdp& model,
                                   const Policy& policy,
                                   const PerceptionModel& perception,
                                   const AgentConfig& config = {});

// Fixed route that visits every location in index order, then reports the
// belief argmax. Action cost is independent of the seed.
EpisodeResult run_baseline_predefined(WorldState& world, const TargetSearchPomdp& model,
                                      const PerceptionModel& perception,
                                      const AgentConfig& config = {});

// Uniform baseline with both initial beliefs set from prior rules.
EpisodeResult run_baseline_corpp(WorldState& world, const TargetSearchPomdp& model,
                                 const Policy& policy, const CorppRules& rules,
                                 const PerceptionModel& perception,
                                 const AgentConfig& config = {});

// Episode driven by a joint-state model (scalability baseline): the belief
// ranges over joint object locations and observations are detection masks.
EpisodeResult run_joint_episode(WorldState& world, const TargetSearchPomdp& model,
                                const Policy& policy,
                                const PerceptionModel& perception,
                                const AgentConfig& config = {});

}  // namespace sarp
