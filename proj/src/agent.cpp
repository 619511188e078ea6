#include "sarp/agent.hpp"

#include <algorithm>
#include <cassert>
#include <fstream>
#include <stdexcept>

namespace sarp {

nlohmann::json EpisodeResult::to_json() const {
    nlohmann::json steps_json = nlohmann::json::array();
    for (const auto& s : trace) {
        steps_json.push_back({{"action", s.action},
                              {"observation", s.observation},
                              {"robot_location", s.robot_location},
                              {"b", s.b.p},
                              {"b_prime", s.b_prime.p},
                              {"biased", s.biased},
                              {"reward", s.reward}});
    }
    return {{"total_reward", total_reward},
            {"action_cost", action_cost},
            {"success", success},
            {"terminated", terminated},
            {"steps", steps},
            {"biased_steps", biased_steps},
            {"reported_location", reported_location},
            {"true_location", true_location},
            {"trace", std::move(steps_json)}};
}

Belief bias_belief(const Belief& b, const std::vector<double>& bias) {
    if (bias.size() != b.p.size()) {
        throw std::invalid_argument("bias vector size does not match belief");
    }
    Belief out;
    out.p.resize(b.p.size());
    double norm = 0.0;
    for (size_t i = 0; i < b.p.size(); ++i) {
        if (bias[i] < 0.0) {
            throw std::invalid_argument("bias entries must be non-negative");
        }
        out.p[i] = bias[i] * b.p[i];
        norm += out.p[i];
    }
    if (norm <= 0.0) {
        throw std::runtime_error("bias annihilates the belief");
    }
    for (double& v : out.p) {
        v /= norm;
    }
    return out;
}

CorppRules load_corpp_rules(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open rules file: " + path);
    }
    nlohmann::json j;
    in >> j;
    CorppRules rules;
    const nlohmann::json* list = &j;
    if (j.is_object()) {
        rules.default_weight = j.value("default_weight", 0.0);
        list = &j.at("rules");
    }
    for (const auto& rj : *list) {
        CorppRule rule;
        rule.condition = rj.at("condition").get<std::string>();
        rule.location = rj.at("location").get<int>();
        rule.probability = rj.at("probability").get<double>();
        if (rule.probability < 0.0 || rule.probability > 1.0) {
            throw std::invalid_argument("rule probability outside [0,1]");
        }
        rules.rules.push_back(std::move(rule));
    }
    return rules;
}

Belief corpp_prior(const CorppRules& rules, const std::string& query_label,
                   int location_count) {
    Belief prior;
    prior.p.assign(static_cast<size_t>(location_count), -1.0);
    for (const auto& rule : rules.rules) {
        if (rule.condition != "*" && rule.condition != query_label) {
            continue;
        }
        if (rule.location < 0 || rule.location >= location_count) {
            throw std::invalid_argument("rule location out of range");
        }
        auto& entry = prior.p[static_cast<size_t>(rule.location)];
        if (entry < 0.0) {
            entry = 0.0;
        }
        entry += rule.probability;
    }
    for (double& v : prior.p) {
        if (v < 0.0) {
            v = rules.default_weight;
        }
    }
    if (prior.sum() <= 0.0) {
        throw std::invalid_argument("rules induce an all-zero prior");
    }
    prior.normalize();
    return prior;
}

namespace {

// Shared engine for SARP and the policy-driven baselines. With biasing off
// the scene-graph machinery is skipped entirely; perception still runs every
// step so identical seeds consume identical random draws across agents.
EpisodeResult run_policy_episode(WorldState& world, const TargetSearchPomdp& model,
                                 const Policy& policy, const SceneGraphCorpus* corpus,
                                 const PerceptionModel& perception,
                                 const AgentConfig& config, const Belief& initial,
                                 bool biasing) {
    EpisodeResult result;
    result.true_location = world.target.location;

    Belief b = initial;
    Belief b_prime = initial;

    GlobalSceneGraph graph = init_graph(model.query_label());
    std::vector<PotentialTable> tables{query_anchor_table()};  // slot for the Q-Q' edge

    auto absorb = [&](const Percept& percept) {
        if (!biasing) {
            return;
        }
        auto outcome = graph.merge_local(percept.local, config.association_radius);
        auto phis = calc_phi(percept.local, *corpus, config.phi);
        for (size_t i = 0; i < percept.local.relations.size(); ++i) {
            if (outcome.relation_inserted[i]) {
                tables.push_back(phis[i]);
            }
        }
        assert(tables.size() == graph.relations().size());
    };

    // view from the starting location, before any action
    absorb(perceive(world, perception, model.env(), model.query_label()));

    while (result.steps < config.step_cap) {
        int action = policy.action(b_prime, world.robot_location);
        double reward = step_world(world, action, model, b_prime.argmax());
        result.total_reward += reward;
        ++result.steps;

        if (action == model.terminate_action()) {
            result.terminated = true;
            result.trace.push_back({action, kNotApplicable, world.robot_location, b,
                                    b_prime, false, reward});
            break;
        }
        result.action_cost += -reward;

        Percept percept = perceive(world, perception, model.env(), model.query_label());
        absorb(percept);

        b = belief_update(b, action, percept.observation, model, world.robot_location);
        bool biased = false;
        if (biasing && percept.observation == kDetected) {
            auto net = build_network(graph, tables);
            auto bias =
                target_bias_vector(net, graph, model.location_count(), config.bp);
            b_prime = bias_belief(b, bias);
            biased = true;
            ++result.biased_steps;
        } else {
            b_prime = b;
        }
        result.trace.push_back({action, percept.observation, world.robot_location, b,
                                b_prime, biased, reward});
    }

    result.reported_location = b_prime.argmax();
    result.success = result.terminated && result.reported_location == result.true_location;
    return result;
}

}  // namespace

EpisodeResult run_sarp_episode(WorldState& world, const TargetSearchPomdp& model,
                               const Policy& policy, const SceneGraphCorpus& corpus,
                               const PerceptionModel& perception,
                               const AgentConfig& config) {
    return run_policy_episode(world, model, policy, &corpus, perception, config,
                              uniform_belief(model.location_count()), true);
}

EpisodeResult run_baseline_uniform(WorldState& world, const TargetSearchPomdp& model,
                                   const Policy& policy,
                                   const PerceptionModel& perception,
                                   const AgentConfig& config) {
    return run_policy_episode(world, model, policy, nullptr, perception, config,
                              uniform_belief(model.location_count()), false);
}

EpisodeResult run_baseline_corpp(WorldState& world, const TargetSearchPomdp& model,
                                 const Policy& policy, const CorppRules& rules,
                                 const PerceptionModel& perception,
                                 const AgentConfig& config) {
    Belief prior = corpp_prior(rules, model.query_label(), model.location_count());
    return run_policy_episode(world, model, policy, nullptr, perception, config, prior,
                              false);
}

EpisodeResult run_baseline_predefined(WorldState& world, const TargetSearchPomdp& model,
                                      const PerceptionModel& perception,
                                      const AgentConfig& config) {
    (void)config;
    EpisodeResult result;
    result.true_location = world.target.location;

    // fixed visitation route, planned on the map alone: one sensing action
    // per location in index order, connected by shortest paths
    std::vector<int> route;
    int planned = world.robot_location;
    for (int loc = 0; loc < model.location_count(); ++loc) {
        if (loc == planned) {
            route.push_back(loc);
            continue;
        }
        auto path = model.env().shortest_path(planned, loc);
        route.insert(route.end(), path.begin() + 1, path.end());
        planned = loc;
    }

    // the tour is driven deterministically (no actuation noise): the route is
    // scripted, so the navigation cost is identical across seeds
    Belief b = uniform_belief(model.location_count());
    for (int action : route) {
        double reward = model.go_reward(world.robot_location, action);
        world.robot_location = action;
        ++world.timestep;
        result.total_reward += reward;
        result.action_cost += -reward;
        ++result.steps;

        Percept percept = perceive(world, perception, model.env(), model.query_label());
        b = belief_update(b, action, percept.observation, model, world.robot_location);
        result.trace.push_back({action, percept.observation, world.robot_location, b, b,
                                false, reward});
    }

    // report the belief argmax and collect the terminal reward for it
    result.reported_location = b.argmax();
    double reward = result.reported_location == result.true_location
                        ? model.rewards().success_bonus
                        : model.rewards().failure_penalty;
    world.terminal = true;
    ++world.timestep;
    result.total_reward += reward;
    ++result.steps;
    result.terminated = true;
    result.trace.push_back({model.terminate_action(), kNotApplicable,
                            world.robot_location, b, b, false, reward});
    result.success = result.reported_location == result.true_location;
    return result;
}

EpisodeResult run_joint_episode(WorldState& world, const TargetSearchPomdp& model,
                                const Policy& policy,
                                const PerceptionModel& perception,
                                const AgentConfig& config) {
    EpisodeResult result;
    result.true_location = world.target.location;

    int k = model.distractor_count();
    if (static_cast<int>(world.objects.size()) < k) {
        throw std::invalid_argument("world has fewer objects than the joint model");
    }
    Belief b = uniform_belief(model.hidden_state_count());

    auto target_marginal = [&](const Belief& joint) {
        Belief marginal;
        marginal.p.assign(static_cast<size_t>(model.location_count()), 0.0);
        for (int h = 0; h < model.hidden_state_count(); ++h) {
            marginal.p[static_cast<size_t>(model.target_location(h))] +=
                joint.p[static_cast<size_t>(h)];
        }
        return marginal;
    };

    while (result.steps < config.step_cap) {
        int action = policy.action(b, world.robot_location);
        int reported = target_marginal(b).argmax();
        double reward = step_world(world, action, model, reported);
        result.total_reward += reward;
        ++result.steps;

        if (action == model.terminate_action()) {
            result.terminated = true;
            result.trace.push_back({action, model.not_applicable_observation(),
                                    world.robot_location, b, b, false, reward});
            break;
        }
        result.action_cost += -reward;

        Percept percept = perceive(world, perception, model.env(), model.query_label());
        // the k modeled distractors are the last k world objects; earlier
        // entries are scene objects the joint model does not represent
        std::vector<bool> flags(static_cast<size_t>(k) + 1);
        flags[0] = percept.detected_labels[0];
        size_t first = world.objects.size() - static_cast<size_t>(k);
        for (int i = 0; i < k; ++i) {
            flags[static_cast<size_t>(i) + 1] =
                percept.detected_labels[first + static_cast<size_t>(i) + 1];
        }
        int obs = model.observation_index(flags);
        b = belief_update(b, action, obs, model, world.robot_location);
        result.trace.push_back({action, obs, world.robot_location, b, b, false, reward});
    }

    result.reported_location = target_marginal(b).argmax();
    result.success = result.terminated && result.reported_location == result.true_location;
    return result;
}

}  // namespace sarp
