#include "sarp/sim_world.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace sarp {

namespace {

int nearest_location(const EnvironmentMap& map, Vec2 position) {
    int best = 0;
    double best_dist = std::numeric_limits<double>::infinity();
    for (int i = 0; i < map.location_count(); ++i) {
        double d = distance(map.locations[static_cast<size_t>(i)], position);
        if (d < best_dist) {
            best_dist = d;
            best = i;
        }
    }
    return best;
}

Vec2 jittered(Vec2 base, double sigma, std::mt19937_64& rng) {
    if (sigma <= 0.0) {
        return base;
    }
    std::normal_distribution<double> noise(0.0, sigma);
    return {base.x + noise(rng), base.y + noise(rng)};
}

}  // namespace

WorldState sample_world(const EnvironmentFile& env, uint64_t seed,
                        const WorldOptions& options) {
    std::mt19937_64 rng(seed);
    std::discrete_distribution<int> placement(env.target_distribution.begin(),
                                              env.target_distribution.end());
    WorldState world;
    world.robot_location = env.robot_start;
    world.move_success_prob = options.move_success_prob;

    int target_loc = placement(rng);
    world.target.label = env.target_label;
    world.target.location = target_loc;
    world.target.position =
        jittered(env.map.locations[static_cast<size_t>(target_loc)],
                 options.placement_jitter_sigma, rng);

    for (const auto& spec : env.objects) {
        PlacedObject obj;
        obj.label = spec.label;
        obj.location = spec.with_target ? target_loc : spec.location;
        obj.position = jittered(env.map.locations[static_cast<size_t>(obj.location)],
                                options.placement_jitter_sigma, rng);
        world.objects.push_back(std::move(obj));
    }

    // episode stream decoupled from placement draws so that all agents of a
    // paired trial start from the identical stream
    world.rng.seed(seed ^ 0x9e3779b97f4a7c15ull);
    return world;
}

WorldState sample_world_with_distractors(const EnvironmentFile& env, int distractors,
                                         uint64_t seed, const WorldOptions& options) {
    WorldState world = sample_world(env, seed, options);
    std::mt19937_64 rng(seed ^ 0xd1b54a32d192ed03ull);
    std::uniform_int_distribution<int> pick_loc(0, env.map.location_count() - 1);
    for (int i = 0; i < distractors; ++i) {
        PlacedObject obj;
        obj.label = "distractor_" + std::to_string(i);
        obj.location = pick_loc(rng);
        obj.position = jittered(env.map.locations[static_cast<size_t>(obj.location)],
                                options.placement_jitter_sigma, rng);
        world.objects.push_back(std::move(obj));
    }
    return world;
}

double step_world(WorldState& world, int action, const TargetSearchPomdp& model,
                  int reported_location) {
    if (world.terminal) {
        throw std::logic_error("episode already terminated");
    }
    ++world.timestep;
    if (action == model.terminate_action()) {
        world.terminal = true;
        int hit = model.rewards().success_on_belief_argmax ? reported_location
                                                           : world.robot_location;
        return hit == world.target.location ? model.rewards().success_bonus
                                            : model.rewards().failure_penalty;
    }
    if (!model.action_legal(action, world.robot_location)) {
        throw std::invalid_argument("action is not legal at the current location");
    }
    double reward = model.go_reward(world.robot_location, action);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    if (unit(world.rng) < world.move_success_prob) {
        world.robot_location = action;
    }
    return reward;
}

Percept perceive(WorldState& world, const PerceptionModel& perception,
                 const EnvironmentMap& map, const std::string& query_label) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    auto in_range = [&](int location) {
        if (location == world.robot_location) {
            return true;
        }
        return map.distance_between(world.robot_location, location) <=
               perception.sensing_radius;
    };

    Percept percept;
    percept.local.timestep = world.timestep;
    percept.local.robot_location = world.robot_location;
    percept.detected_labels.assign(world.objects.size() + 1, false);

    // true location of each detection, for co-location checks below
    std::vector<int> true_locations;

    auto add_detection = [&](const std::string& label, Vec2 true_position,
                             int true_location) {
        Vec2 noisy = jittered(true_position, perception.position_noise_sigma, world.rng);
        percept.local.objects.push_back({label, noisy, nearest_location(map, noisy)});
        true_locations.push_back(true_location);
    };

    // target first, then the remaining objects in their stored order
    if (in_range(world.target.location)) {
        if (unit(world.rng) < perception.true_positive) {
            percept.detected_labels[0] = true;
            add_detection(world.target.label, world.target.position,
                          world.target.location);
        }
    } else if (unit(world.rng) < perception.false_positive) {
        // hallucinated target at the robot's own location
        percept.detected_labels[0] = true;
        add_detection(query_label,
                      map.locations[static_cast<size_t>(world.robot_location)],
                      world.robot_location);
    }
    bool target_hallucinated =
        percept.detected_labels[0] && !in_range(world.target.location);

    for (size_t i = 0; i < world.objects.size(); ++i) {
        const auto& obj = world.objects[i];
        if (in_range(obj.location) && unit(world.rng) < perception.true_positive) {
            percept.detected_labels[i + 1] = true;
            add_detection(obj.label, obj.position, obj.location);
        }
    }

    // co-located detected pairs emit a relation; subject is the
    // lexicographically smaller label, hallucinations emit none
    size_t n = percept.local.objects.size();
    for (size_t a = 0; a < n; ++a) {
        for (size_t b = a + 1; b < n; ++b) {
            if (true_locations[a] != true_locations[b]) {
                continue;
            }
            if (target_hallucinated && (a == 0 || b == 0)) {
                continue;
            }
            if (unit(world.rng) >= perception.relation_probability) {
                continue;
            }
            size_t subj = a;
            size_t obj = b;
            if (percept.local.objects[obj].label < percept.local.objects[subj].label) {
                std::swap(subj, obj);
            }
            const auto& preds = perception.predicates;
            std::string predicate =
                preds[std::uniform_int_distribution<size_t>(0, preds.size() - 1)(
                    world.rng)];
            percept.local.relations.push_back({static_cast<int>(subj), predicate,
                                               static_cast<int>(obj)});
        }
    }

    percept.observation = percept.detected_labels[0] ? kDetected : kNotDetected;
    return percept;
}

}  // namespace sarp
