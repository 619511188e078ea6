#pragma once

#include <random>
#include <string>
#include <vector>

#include "sarp/environment.hpp"
#include "sarp/pomdp.hpp"
#include "sarp/scene_graph.hpp"

namespace sarp {

// Simulated perception, standing in for a learned scene-graph generator.
struct PerceptionModel {
    double true_positive = 0.8;
    double false_positive = 0.05;  // target-label hallucinations only
    double sensing_radius = 0.0;   // meters; 0 = current location only
    double relation_probability = 0.9;
    std::vector<std::string> predicates = {"in", "on", "belongs"};
    double position_noise_sigma = 0.1;
};

struct PlacedObject {
    std::string label;
    int location = -1;
    Vec2 position;
};

// Ground-truth episode state. Owned by exactly one episode.
struct WorldState {
    int robot_location = 0;
    PlacedObject target;
    std::vector<PlacedObject> objects;  // evidence and clutter, target excluded
    double move_success_prob = 0.95;
    bool terminal = false;
    int timestep = 0;
    std::mt19937_64 rng;
};

struct WorldOptions {
    double move_success_prob = 0.95;
    double placement_jitter_sigma = 0.1;  // object offset around its location
};

// Draws the target location from the environment's placement distribution
// and instantiates the object layout. Deterministic for a fixed seed.
WorldState sample_world(const EnvironmentFile& env, uint64_t seed,
                        const WorldOptions& options = {});

// Extra uniquely labeled objects, placed uniformly at random (used by the
// scalability sweep).
WorldState sample_world_with_distractors(const EnvironmentFile& env, int distractors,
                                         uint64_t seed, const WorldOptions& options = {});

// Executes one action; returns the realized reward. `reported_location` is
// consulted only when the reward model keys terminate success on the
// reported belief argmax.
double step_world(WorldState& world, int action, const TargetSearchPomdp& model,
                  int reported_location = -1);

struct Percept {
    LocalSceneGraph local;
    int observation = kNotDetected;           // simple-model observation on Q
    std::vector<bool> detected_labels;        // target first, then world.objects order
};

// Samples a local scene graph at the robot's location: in-range objects are
// detected with TP, target hallucinations appear with FP, and co-located
// detected pairs emit relations. z = Detected iff the target label is seen.
Percept perceive(WorldState& world, const PerceptionModel& perception,
                 const EnvironmentMap& map, const std::string& query_label);

}  // namespace sarp
