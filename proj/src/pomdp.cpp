#include "sarp/pomdp.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <random>
#include <stdexcept>

namespace sarp {

void Belief::normalize() {
    double s = sum();
    if (s <= 0.0) {
        throw std::runtime_error("belief normalizer is zero");
    }
    for (double& v : p) {
        v /= s;
    }
}

double Belief::sum() const {
    double s = 0.0;
    for (double v : p) {
        s += v;
    }
    return s;
}

int Belief::argmax() const {
    int best = 0;
    for (int i = 1; i < static_cast<int>(p.size()); ++i) {
        if (p[static_cast<size_t>(i)] > p[static_cast<size_t>(best)]) {
            best = i;
        }
    }
    return best;
}

Belief uniform_belief(int n) {
    if (n <= 0) {
        throw std::invalid_argument("belief dimension must be positive");
    }
    Belief b;
    b.p.assign(static_cast<size_t>(n), 1.0 / n);
    return b;
}

TargetSearchPomdp::TargetSearchPomdp(EnvironmentMap env, std::string query_label,
                                     int distractors, const DetectorStats& detector,
                                     const PomdpOptions& options)
    : env_(std::move(env)),
      query_label_(std::move(query_label)),
      distractors_(distractors),
      detector_(detector),
      options_(options) {
    env_.validate();
    if (query_label_.empty()) {
        throw std::invalid_argument("query label must be non-empty");
    }
    if (distractors_ < 0 || distractors_ > 3) {
        throw std::invalid_argument(
            "joint model supports at most 3 distractors; the state space grows as "
            "|locations|^(k+1)");
    }
    if (options_.discount <= 0.0 || options_.discount >= 1.0) {
        throw std::invalid_argument("discount must lie in (0,1)");
    }
    hidden_states_ = 1;
    for (int i = 0; i <= distractors_; ++i) {
        hidden_states_ *= location_count();
    }
}

TargetSearchPomdp TargetSearchPomdp::simple(const EnvironmentMap& env,
                                            std::string query_label,
                                            const DetectorStats& detector,
                                            const PomdpOptions& options) {
    return TargetSearchPomdp(env, std::move(query_label), 0, detector, options);
}

TargetSearchPomdp TargetSearchPomdp::joint(const EnvironmentMap& env,
                                           std::string query_label, int distractors,
                                           const DetectorStats& detector,
                                           const PomdpOptions& options) {
    return TargetSearchPomdp(env, std::move(query_label), distractors, detector,
                             options);
}

TargetSearchPomdp build_pomdp(const EnvironmentMap& env, const std::string& query_label,
                              const DetectorStats& detector,
                              const PomdpOptions& options) {
    return TargetSearchPomdp::simple(env, query_label, detector, options);
}

TargetSearchPomdp build_joint_pomdp(const EnvironmentMap& env,
                                    const std::string& query_label, int distractors,
                                    const DetectorStats& detector,
                                    const PomdpOptions& options) {
    return TargetSearchPomdp::joint(env, query_label, distractors, detector, options);
}

int TargetSearchPomdp::object_location(int hidden, int object) const {
    int l = location_count();
    for (int i = 0; i < object; ++i) {
        hidden /= l;
    }
    return hidden % l;
}

int TargetSearchPomdp::target_location(int hidden) const {
    return object_location(hidden, 0);
}

bool TargetSearchPomdp::action_legal(int action, int robot_location) const {
    if (action == terminate_action()) {
        return true;
    }
    if (!is_go(action)) {
        return false;
    }
    // re-observing the current location is always allowed
    return action == robot_location || env_.are_adjacent(robot_location, action);
}

double TargetSearchPomdp::go_reward(int from, int to) const {
    const RewardModel& r = options_.rewards;
    if (!r.distance_proportional || from == to) {
        return r.go_cost;
    }
    return r.cost_per_meter * env_.distance_between(from, to);
}

double TargetSearchPomdp::terminate_reward(int hidden, int robot_location) const {
    return target_location(hidden) == robot_location ? options_.rewards.success_bonus
                                                     : options_.rewards.failure_penalty;
}

bool TargetSearchPomdp::senses(int from, int location) const {
    if (from == location) {
        return true;
    }
    return env_.distance_between(from, location) <= options_.sensing_radius;
}

int TargetSearchPomdp::observation_count() const {
    if (distractors_ == 0) {
        return 3;  // Detected, NotDetected, NotApplicable
    }
    return (1 << (distractors_ + 1)) + 1;
}

int TargetSearchPomdp::observation_index(const std::vector<bool>& detected) const {
    if (static_cast<int>(detected.size()) != distractors_ + 1) {
        throw std::invalid_argument("detection vector size mismatch");
    }
    if (distractors_ == 0) {
        return detected[0] ? kDetected : kNotDetected;
    }
    int mask = 0;
    for (int i = 0; i <= distractors_; ++i) {
        if (detected[static_cast<size_t>(i)]) {
            mask |= 1 << i;
        }
    }
    return mask;
}

double TargetSearchPomdp::obs_prob(int hidden, int robot_location, int action,
                                   int obs) const {
    if (action == terminate_action()) {
        return obs == not_applicable_observation() ? 1.0 : 0.0;
    }
    if (obs == not_applicable_observation()) {
        return 0.0;
    }
    if (distractors_ == 0) {
        double p_detect = senses(robot_location, target_location(hidden))
                              ? detector_.true_positive
                              : detector_.false_positive;
        return obs == kDetected ? p_detect : 1.0 - p_detect;
    }
    // bitmask over independent per-object detections; distractors have no
    // false positives
    double prob = 1.0;
    for (int i = 0; i <= distractors_; ++i) {
        bool in_range = senses(robot_location, object_location(hidden, i));
        double p_detect;
        if (i == 0) {
            p_detect = in_range ? detector_.true_positive : detector_.false_positive;
        } else {
            p_detect = in_range ? detector_.true_positive : 0.0;
        }
        prob *= (obs >> i) & 1 ? p_detect : 1.0 - p_detect;
    }
    return prob;
}

uint64_t TargetSearchPomdp::model_hash() const {
    uint64_t h = 1469598103934665603ull;  // FNV-1a
    auto mix = [&h](uint64_t v) {
        for (int i = 0; i < 8; ++i) {
            h ^= (v >> (8 * i)) & 0xffu;
            h *= 1099511628211ull;
        }
    };
    auto mix_double = [&](double d) {
        uint64_t bits;
        std::memcpy(&bits, &d, sizeof(bits));
        mix(bits);
    };
    mix(static_cast<uint64_t>(location_count()));
    mix(static_cast<uint64_t>(distractors_));
    for (const auto& nbrs : env_.adjacency) {
        mix(static_cast<uint64_t>(nbrs.size()));
        for (int nb : nbrs) {
            mix(static_cast<uint64_t>(nb));
        }
    }
    for (const auto& loc : env_.locations) {
        mix_double(loc.x);
        mix_double(loc.y);
    }
    for (char c : query_label_) {
        mix(static_cast<uint64_t>(static_cast<unsigned char>(c)));
    }
    mix_double(detector_.true_positive);
    mix_double(detector_.false_positive);
    mix_double(options_.rewards.go_cost);
    mix_double(options_.rewards.success_bonus);
    mix_double(options_.rewards.failure_penalty);
    mix_double(options_.rewards.cost_per_meter);
    mix(options_.rewards.distance_proportional ? 1 : 0);
    mix(options_.rewards.success_on_belief_argmax ? 1 : 0);
    mix_double(options_.sensing_radius);
    mix_double(options_.discount);
    return h;
}

Belief belief_update(const Belief& b, int action, int observation,
                     const TargetSearchPomdp& model, int robot_location) {
    if (static_cast<int>(b.p.size()) != model.hidden_state_count()) {
        throw std::invalid_argument("belief dimension does not match model");
    }
    if (observation == model.not_applicable_observation() &&
        action != model.terminate_action()) {
        throw std::invalid_argument("NotApplicable is only observed on terminate");
    }
    Belief out;
    out.p.resize(b.p.size());
    double z = 0.0;
    for (int h = 0; h < model.hidden_state_count(); ++h) {
        // hidden objects are static: T over the hidden dimension is identity
        double v = model.obs_prob(h, robot_location, action, observation) *
                   b.p[static_cast<size_t>(h)];
        out.p[static_cast<size_t>(h)] = v;
        z += v;
    }
    if (z <= 0.0) {
        throw std::runtime_error(
            "belief update: observation has zero probability under the model");
    }
    for (double& v : out.p) {
        v /= z;
    }
    return out;
}

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        s += a[i] * b[i];
    }
    return s;
}

}  // namespace

int Policy::action(const Belief& b, int robot_location) const {
    const auto& alphas = per_location.at(static_cast<size_t>(robot_location));
    if (alphas.empty()) {
        throw std::runtime_error("policy has no alpha-vectors at this location");
    }
    double best_value = -std::numeric_limits<double>::infinity();
    int best_action = std::numeric_limits<int>::max();
    for (const auto& alpha : alphas) {
        double v = dot(alpha.value, b.p);
        if (v > best_value + 1e-12 ||
            (std::abs(v - best_value) <= 1e-12 && alpha.action < best_action)) {
            best_value = v;
            best_action = alpha.action;
        }
    }
    return best_action;
}

double Policy::value(const Belief& b, int robot_location) const {
    const auto& alphas = per_location.at(static_cast<size_t>(robot_location));
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& alpha : alphas) {
        best = std::max(best, dot(alpha.value, b.p));
    }
    return best;
}

int policy_action(const Policy& policy, const Belief& b, int robot_location) {
    return policy.action(b, robot_location);
}

namespace {

struct BeliefPoint {
    int robot_location;
    Belief belief;
};

std::vector<int> legal_go_actions(const TargetSearchPomdp& model, int robot_location) {
    std::vector<int> actions;
    for (int a = 0; a < model.location_count(); ++a) {
        if (model.action_legal(a, robot_location)) {
            actions.push_back(a);
        }
    }
    return actions;
}

std::vector<BeliefPoint> sample_belief_points(const TargetSearchPomdp& model,
                                              const SolverConfig& config,
                                              std::mt19937_64& rng) {
    int locations = model.location_count();
    int hidden = model.hidden_state_count();
    std::vector<BeliefPoint> points;

    for (int r = 0; r < locations; ++r) {
        points.push_back({r, uniform_belief(hidden)});
    }
    // corner beliefs only when they fit in half the budget; reachable-belief
    // walks below must always get room, or the policy has holes at the
    // intermediate beliefs episodes actually visit
    if (locations * hidden <= config.belief_points / 2) {
        for (int r = 0; r < locations; ++r) {
            for (int h = 0; h < hidden; ++h) {
                Belief b;
                b.p.assign(static_cast<size_t>(hidden), 0.0);
                b.p[static_cast<size_t>(h)] = 1.0;
                points.push_back({r, b});
            }
        }
    }

    std::uniform_real_distribution<double> unit(0.0, 1.0);
    int start = 0;
    int non_na_obs = model.observation_count() - 1;
    while (static_cast<int>(points.size()) < config.belief_points) {
        int r = start % locations;
        ++start;
        Belief b = uniform_belief(hidden);
        int depth = 2 * locations;
        for (int d = 0; d < depth; ++d) {
            auto gos = legal_go_actions(model, r);
            int a = gos[static_cast<size_t>(
                std::uniform_int_distribution<int>(0, static_cast<int>(gos.size()) - 1)(
                    rng))];
            // sample z from pr(z | b, a) at the intended destination
            std::vector<double> pz(static_cast<size_t>(non_na_obs), 0.0);
            for (int h = 0; h < hidden; ++h) {
                for (int z = 0; z < non_na_obs; ++z) {
                    pz[static_cast<size_t>(z)] +=
                        model.obs_prob(h, a, a, z) * b.p[static_cast<size_t>(h)];
                }
            }
            double u = unit(rng);
            int z = 0;
            double acc = 0.0;
            for (; z < non_na_obs - 1; ++z) {
                acc += pz[static_cast<size_t>(z)];
                if (u < acc) {
                    break;
                }
            }
            if (pz[static_cast<size_t>(z)] <= 0.0) {
                continue;
            }
            b = belief_update(b, a, z, model, a);
            r = a;
            points.push_back({r, b});
            if (static_cast<int>(points.size()) >= config.belief_points) {
                break;
            }
        }
    }
    return points;
}

AlphaVector terminate_alpha(const TargetSearchPomdp& model, int robot_location) {
    AlphaVector alpha;
    alpha.robot_location = robot_location;
    alpha.action = model.terminate_action();
    alpha.value.resize(static_cast<size_t>(model.hidden_state_count()));
    for (int h = 0; h < model.hidden_state_count(); ++h) {
        alpha.value[static_cast<size_t>(h)] = model.terminate_reward(h, robot_location);
    }
    return alpha;
}

}  // namespace

Policy solve(const TargetSearchPomdp& model, const SolverConfig& config) {
    if (config.belief_points < 1 || config.max_backups < 1 || config.epsilon <= 0.0) {
        throw std::invalid_argument("solver configuration values must be positive");
    }
    std::mt19937_64 rng(config.seed);
    auto points = sample_belief_points(model, config, rng);

    int locations = model.location_count();
    int hidden = model.hidden_state_count();
    int non_na_obs = model.observation_count() - 1;
    double gamma = model.discount();

    Policy policy;
    policy.model_hash = model.model_hash();
    policy.per_location.resize(static_cast<size_t>(locations));
    for (int r = 0; r < locations; ++r) {
        policy.per_location[static_cast<size_t>(r)].push_back(terminate_alpha(model, r));
    }

    std::vector<double> point_values(points.size(),
                                     -std::numeric_limits<double>::infinity());
    for (size_t i = 0; i < points.size(); ++i) {
        point_values[i] = policy.value(points[i].belief, points[i].robot_location);
    }

    for (int sweep = 0; sweep < config.max_backups; ++sweep) {
        double max_improvement = 0.0;
        for (size_t pi = 0; pi < points.size(); ++pi) {
            const auto& point = points[pi];
            int r = point.robot_location;
            const Belief& b = point.belief;

            AlphaVector best;
            double best_value = -std::numeric_limits<double>::infinity();

            // terminate
            {
                AlphaVector alpha = terminate_alpha(model, r);
                double v = dot(alpha.value, b.p);
                best = std::move(alpha);
                best_value = v;
            }
            // navigation actions
            for (int a : legal_go_actions(model, r)) {
                AlphaVector alpha;
                alpha.robot_location = r;
                alpha.action = a;
                alpha.value.assign(static_cast<size_t>(hidden), model.go_reward(r, a));
                const auto& next_set = policy.per_location[static_cast<size_t>(a)];
                for (int z = 0; z < non_na_obs; ++z) {
                    // best successor alpha for this observation branch
                    const AlphaVector* best_next = nullptr;
                    double best_score = -std::numeric_limits<double>::infinity();
                    for (const auto& cand : next_set) {
                        double score = 0.0;
                        for (int h = 0; h < hidden; ++h) {
                            score += model.obs_prob(h, a, a, z) *
                                     b.p[static_cast<size_t>(h)] *
                                     cand.value[static_cast<size_t>(h)];
                        }
                        if (score > best_score) {
                            best_score = score;
                            best_next = &cand;
                        }
                    }
                    for (int h = 0; h < hidden; ++h) {
                        alpha.value[static_cast<size_t>(h)] +=
                            gamma * model.obs_prob(h, a, a, z) *
                            best_next->value[static_cast<size_t>(h)];
                    }
                }
                double v = dot(alpha.value, b.p);
                if (v > best_value) {
                    best_value = v;
                    best = std::move(alpha);
                }
            }

            if (best_value > point_values[pi] + 1e-12) {
                max_improvement = std::max(max_improvement, best_value - point_values[pi]);
                point_values[pi] = best_value;
                policy.per_location[static_cast<size_t>(r)].push_back(std::move(best));
            }
        }

        // prune alphas that are not maximal at any point
        std::vector<std::vector<bool>> keep(static_cast<size_t>(locations));
        for (int r = 0; r < locations; ++r) {
            keep[static_cast<size_t>(r)].assign(
                policy.per_location[static_cast<size_t>(r)].size(), false);
        }
        for (const auto& point : points) {
            const auto& alphas = policy.per_location[static_cast<size_t>(point.robot_location)];
            size_t best_idx = 0;
            double best_v = -std::numeric_limits<double>::infinity();
            for (size_t i = 0; i < alphas.size(); ++i) {
                double v = dot(alphas[i].value, point.belief.p);
                if (v > best_v) {
                    best_v = v;
                    best_idx = i;
                }
            }
            keep[static_cast<size_t>(point.robot_location)][best_idx] = true;
        }
        for (int r = 0; r < locations; ++r) {
            auto& alphas = policy.per_location[static_cast<size_t>(r)];
            std::vector<AlphaVector> kept;
            for (size_t i = 0; i < alphas.size(); ++i) {
                if (keep[static_cast<size_t>(r)][i]) {
                    kept.push_back(std::move(alphas[i]));
                }
            }
            // the terminate alpha is exact everywhere; pruning it leaves the
            // policy unable to stop at beliefs the point set never sampled
            bool has_terminate = false;
            for (const auto& a : kept) {
                has_terminate = has_terminate || a.action == model.terminate_action();
            }
            if (!has_terminate) {
                kept.push_back(terminate_alpha(model, r));
            }
            alphas = std::move(kept);
        }

        if (max_improvement < config.epsilon) {
            break;
        }
    }
    return policy;
}

void save_policy(const Policy& policy, const std::string& path) {
    nlohmann::json alphas = nlohmann::json::array();
    for (const auto& per_loc : policy.per_location) {
        nlohmann::json loc = nlohmann::json::array();
        for (const auto& a : per_loc) {
            loc.push_back({{"action", a.action},
                           {"robot_location", a.robot_location},
                           {"value", a.value}});
        }
        alphas.push_back(std::move(loc));
    }
    nlohmann::json j{{"format_version", 1},
                     {"model_hash", policy.model_hash},
                     {"alpha_vectors", std::move(alphas)}};
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot open policy file for writing: " + path);
    }
    out << j.dump(2) << "\n";
}

Policy load_policy(const std::string& path, const TargetSearchPomdp& model) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open policy file: " + path);
    }
    nlohmann::json j;
    in >> j;
    if (j.at("format_version").get<int>() != 1) {
        throw std::runtime_error("unsupported policy format version");
    }
    Policy policy;
    policy.model_hash = j.at("model_hash").get<uint64_t>();
    if (policy.model_hash != model.model_hash()) {
        throw std::runtime_error("policy was solved for a different model");
    }
    for (const auto& loc : j.at("alpha_vectors")) {
        std::vector<AlphaVector> alphas;
        for (const auto& aj : loc) {
            AlphaVector a;
            a.action = aj.at("action").get<int>();
            a.robot_location = aj.at("robot_location").get<int>();
            a.value = aj.at("value").get<std::vector<double>>();
            alphas.push_back(std::move(a));
        }
        policy.per_location.push_back(std::move(alphas));
    }
    if (static_cast<int>(policy.per_location.size()) != model.location_count()) {
        throw std::runtime_error("policy location count does not match model");
    }
    return policy;
}

}  // namespace sarp
