#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sarp/environment.hpp"

namespace sarp {

// Simple-model observation indices; the joint model uses detection bitmasks
// (see TargetSearchPomdp::observation_count).
enum Observation : int {
    kDetected = 0,
    kNotDetected = 1,
    kNotApplicable = 2,
};

struct DetectorStats {
    double true_positive = 0.8;
    double false_positive = 0.05;
};

struct RewardModel {
    double go_cost = -10.0;          // per navigation action (fixed mode)
    double success_bonus = 100.0;
    double failure_penalty = -100.0;
    bool distance_proportional = false;
    double cost_per_meter = -5.0;    // used by the distance-proportional mode
    // when set, the realized terminate bonus keys on the reported
    // (belief-argmax) location instead of robot-target co-location
    bool success_on_belief_argmax = false;
};

struct PomdpOptions {
    RewardModel rewards;
    double sensing_radius = 0.0;  // meters; 0 = current location only
    double discount = 0.99;
};

// Belief over the hidden state (target location for the simple model,
// joint object locations for the joint model). Robot location is observed.
struct Belief {
    std::vector<double> p;

    void normalize();
    int argmax() const;
    double sum() const;
};

Belief uniform_belief(int n);

// Mixed-observability target-search model: hidden target location(s),
// fully observable robot location, actions {go_i} + terminate.
class TargetSearchPomdp {
public:
    static TargetSearchPomdp simple(const EnvironmentMap& env, std::string query_label,
                                    const DetectorStats& detector,
                                    const PomdpOptions& options = {});
    // Hidden state = joint locations of the target and `distractors` extra
    // objects; observations are detection bitmasks. distractors <= 3.
    static TargetSearchPomdp joint(const EnvironmentMap& env, std::string query_label,
                                   int distractors, const DetectorStats& detector,
                                   const PomdpOptions& options = {});

    const EnvironmentMap& env() const { return env_; }
    const std::string& query_label() const { return query_label_; }
    const DetectorStats& detector() const { return detector_; }
    const RewardModel& rewards() const { return options_.rewards; }
    const PomdpOptions& options() const { return options_; }
    double discount() const { return options_.discount; }
    int distractor_count() const { return distractors_; }

    int location_count() const { return env_.location_count(); }
    int hidden_state_count() const { return hidden_states_; }
    int target_location(int hidden) const;
    int object_location(int hidden, int object) const;  // object 0 = target

    // actions: 0..L-1 = go_i, L = terminate
    int action_count() const { return location_count() + 1; }
    int terminate_action() const { return location_count(); }
    bool is_go(int action) const { return action >= 0 && action < location_count(); }
    bool action_legal(int action, int robot_location) const;

    double go_reward(int from, int to) const;
    double terminate_reward(int hidden, int robot_location) const;

    // observations: simple model {Detected, NotDetected, NotApplicable};
    // joint model bitmask over k+1 objects plus NotApplicable at the end.
    int observation_count() const;
    int not_applicable_observation() const { return observation_count() - 1; }
    double obs_prob(int hidden, int robot_location, int action, int obs) const;
    // true iff `location` is within sensing range of a robot at `from`
    bool senses(int from, int location) const;

    // index of the bitmask observation for the given per-object detections
    int observation_index(const std::vector<bool>& detected) const;

    uint64_t model_hash() const;

private:
    TargetSearchPomdp(EnvironmentMap env, std::string query_label, int distractors,
                      const DetectorStats& detector, const PomdpOptions& options);

    EnvironmentMap env_;
    std::string query_label_;
    int distractors_ = 0;
    int hidden_states_ = 0;
    DetectorStats detector_;
    PomdpOptions options_;
};

TargetSearchPomdp build_pomdp(const EnvironmentMap& env, const std::string& query_label,
                              const DetectorStats& detector,
                              const PomdpOptions& options = {});
TargetSearchPomdp build_joint_pomdp(const EnvironmentMap& env,
                                    const std::string& query_label, int distractors,
                                    const DetectorStats& detector,
                                    const PomdpOptions& options = {});

// Eq.-style Bayes update for a static target: b'(h) proportional to
// O(h, robot_location, a, z) * b(h). Throws on a zero normalizer.
Belief belief_update(const Belief& b, int action, int observation,
                     const TargetSearchPomdp& model, int robot_location);

struct AlphaVector {
    std::vector<double> value;  // over hidden states
    int robot_location = -1;
    int action = -1;
};

struct Policy {
    std::vector<std::vector<AlphaVector>> per_location;
    uint64_t model_hash = 0;

    int action(const Belief& b, int robot_location) const;
    double value(const Belief& b, int robot_location) const;
};

int policy_action(const Policy& policy, const Belief& b, int robot_location);

struct SolverConfig {
    int belief_points = 200;
    int max_backups = 60;
    double epsilon = 1e-3;  // convergence threshold on point-value change
    uint64_t seed = 0;
};

// Point-based value iteration over the mixed-observability model: alpha
// vectors live on the hidden-state simplex and are tagged per robot location.
Policy solve(const TargetSearchPomdp& model, const SolverConfig& config = {});

void save_policy(const Policy& policy, const std::string& path);
// Refuses to load a policy whose model hash does not match `model`.
Policy load_policy(const std::string& path, const TargetSearchPomdp& model);

}  // namespace sarp
