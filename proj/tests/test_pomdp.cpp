#include <doctest.h>

#include <cstdio>
#include <random>

#include "helpers.hpp"
#include "sarp/pomdp.hpp"

using namespace sarp;

namespace {

EnvironmentMap line_map(int n, double spacing = 2.0) {
    EnvironmentMap map;
    map.name = "line" + std::to_string(n);
    for (int i = 0; i < n; ++i) {
        map.locations.push_back({spacing * i, 0.0});
        std::vector<int> nbrs;
        if (i > 0) {
            nbrs.push_back(i - 1);
        }
        if (i + 1 < n) {
            nbrs.push_back(i + 1);
        }
        map.adjacency.push_back(nbrs);
    }
    return map;
}

Belief make_belief(std::vector<double> p) {
    Belief b;
    b.p = std::move(p);
    b.normalize();
    return b;
}

}  // namespace

TEST_CASE("model defaults match the published parameters") {
    auto model = build_pomdp(line_map(6), "banana", {});
    CHECK(model.discount() == doctest::Approx(0.99));
    CHECK(model.rewards().go_cost == doctest::Approx(-10.0));
    CHECK(model.rewards().success_bonus == doctest::Approx(100.0));
    CHECK(model.rewards().failure_penalty == doctest::Approx(-100.0));
    CHECK(model.action_count() == 7);
    CHECK(model.terminate_action() == 6);
}

TEST_CASE("navigation legality follows adjacency plus self-re-observation") {
    auto model = build_pomdp(line_map(4), "banana", {});
    CHECK(model.action_legal(0, 0));  // stay and re-observe
    CHECK(model.action_legal(1, 0));
    CHECK_FALSE(model.action_legal(2, 0));
    CHECK(model.action_legal(model.terminate_action(), 0));
}

TEST_CASE("single-location environment degenerates correctly") {
    auto model = build_pomdp(line_map(1), "banana", {1.0, 0.0});
    CHECK(model.action_count() == 2);
    CHECK(model.terminate_reward(0, 0) == doctest::Approx(100.0));
}

TEST_CASE("observation rows sum to one over Z") {
    DetectorStats det{0.7, 0.1};
    auto model = build_pomdp(line_map(5), "banana", det);
    for (int h = 0; h < 5; ++h) {
        for (int r = 0; r < 5; ++r) {
            for (int a = 0; a < model.action_count(); ++a) {
                double sum = 0.0;
                for (int z = 0; z < model.observation_count(); ++z) {
                    sum += model.obs_prob(h, r, a, z);
                }
                CHECK(sum == doctest::Approx(1.0));
            }
        }
    }
}

TEST_CASE("belief_update reproduces the hand-derived NotDetected case") {
    DetectorStats det{0.8, 0.05};
    auto model = build_pomdp(line_map(6), "banana", det);
    Belief b = uniform_belief(6);
    Belief out = belief_update(b, 1, kNotDetected, model, 1);
    CHECK(out.p[1] == doctest::Approx(0.2 / 4.95).epsilon(1e-9));
    for (int l : {0, 2, 3, 4, 5}) {
        CHECK(out.p[static_cast<size_t>(l)] == doctest::Approx(0.95 / 4.95).epsilon(1e-9));
    }
    // 4-decimal statement of the same case
    CHECK(std::abs(out.p[1] - 0.0404) < 5e-5);
    CHECK(std::abs(out.p[0] - 0.1919) < 5e-5);
}

TEST_CASE("perfect sensor collapses the belief on detection") {
    auto model = build_pomdp(line_map(6), "banana", {1.0, 0.0});
    Belief out = belief_update(uniform_belief(6), 2, kDetected, model, 2);
    CHECK(out.p[2] == doctest::Approx(1.0));
    CHECK(out.sum() == doctest::Approx(1.0));
}

TEST_CASE("uninformative sensors leave the belief unchanged") {
    auto model = build_pomdp(line_map(6), "banana", {0.5, 0.5});
    Belief b = make_belief({0.1, 0.3, 0.05, 0.25, 0.2, 0.1});
    Belief out = belief_update(b, 3, kDetected, model, 3);
    for (size_t i = 0; i < 6; ++i) {
        CHECK(out.p[i] == doctest::Approx(b.p[i]).epsilon(1e-9));
    }
}

TEST_CASE("NotDetected never raises the sensed location when TP > FP") {
    auto model = build_pomdp(line_map(6), "banana", {0.8, 0.05});
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(0.01, 1.0);
    for (int round = 0; round < 200; ++round) {
        std::vector<double> p(6);
        for (double& v : p) {
            v = u(rng);
        }
        Belief b = make_belief(p);
        int loc = static_cast<int>(rng() % 6);
        Belief out = belief_update(b, loc, kNotDetected, model, loc);
        CHECK(out.p[static_cast<size_t>(loc)] <= b.p[static_cast<size_t>(loc)] + 1e-12);
        CHECK(out.sum() == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("impossible observations raise a model-inconsistency error") {
    auto model = build_pomdp(line_map(3), "banana", {1.0, 0.0});
    Belief b = make_belief({0.0, 1.0, 0.0});
    CHECK_THROWS(belief_update(b, 0, kDetected, model, 0));
    CHECK_THROWS(belief_update(uniform_belief(3), 0, kNotApplicable, model, 0));
}

TEST_CASE("joint model sizes and the k limit") {
    auto map = line_map(3);
    CHECK(build_joint_pomdp(map, "banana", 0, {}).hidden_state_count() == 3);
    CHECK(build_joint_pomdp(map, "banana", 1, {}).hidden_state_count() == 9);
    CHECK(build_joint_pomdp(map, "banana", 2, {}).hidden_state_count() == 27);
    CHECK_THROWS(build_joint_pomdp(map, "banana", 4, {}));
}

TEST_CASE("joint model with k=0 matches the simple model") {
    auto map = line_map(4);
    DetectorStats det{0.7, 0.1};
    auto simple = build_pomdp(map, "banana", det);
    auto joint = build_joint_pomdp(map, "banana", 0, det);
    CHECK(joint.hidden_state_count() == simple.hidden_state_count());
    CHECK(joint.observation_count() == simple.observation_count());
    for (int h = 0; h < 4; ++h) {
        for (int a = 0; a < simple.action_count(); ++a) {
            for (int z = 0; z < simple.observation_count(); ++z) {
                CHECK(joint.obs_prob(h, 1, a, z) ==
                      doctest::Approx(simple.obs_prob(h, 1, a, z)));
            }
        }
    }
}

TEST_CASE("joint observation indexing round-trips detection masks") {
    auto joint = build_joint_pomdp(line_map(3), "banana", 2, {});
    CHECK(joint.observation_count() == 9);  // 2^3 masks + NotApplicable
    CHECK(joint.observation_index({false, false, false}) !=
          joint.observation_index({true, false, false}));
    auto simple_view = build_joint_pomdp(line_map(3), "banana", 0, {});
    CHECK(simple_view.observation_index({true}) == kDetected);
    CHECK(simple_view.observation_index({false}) == kNotDetected);
}

TEST_CASE("solver terminates immediately on the forced optimum") {
    auto model = build_pomdp(line_map(1), "banana", {1.0, 0.0});
    Policy policy = solve(model, {50, 20, 1e-4, 3});
    Belief b = uniform_belief(1);
    CHECK(policy.action(b, 0) == model.terminate_action());
    CHECK(policy.value(b, 0) == doctest::Approx(100.0));
}

TEST_CASE("solver prefers information gathering over blind termination") {
    auto model = build_pomdp(line_map(2), "banana", {1.0, 0.0});
    Policy policy = solve(model, {100, 40, 1e-4, 3});
    Belief b = uniform_belief(2);
    // expected value of terminating blind is 0; observing first dominates
    CHECK(policy.action(b, 0) != model.terminate_action());
    CHECK(policy.value(b, 0) > 0.0);
    // after a perfect detection at the robot's location, terminate
    Belief sure = make_belief({1.0, 0.0});
    CHECK(policy.action(sure, 0) == model.terminate_action());
}

TEST_CASE("policy lookups are deterministic") {
    auto model = build_pomdp(line_map(4), "banana", {0.8, 0.05});
    Policy policy = solve(model, {100, 30, 1e-3, 9});
    Belief b = make_belief({0.4, 0.1, 0.3, 0.2});
    int first = policy.action(b, 2);
    for (int i = 0; i < 5; ++i) {
        CHECK(policy.action(b, 2) == first);
    }
}

TEST_CASE("policy value never decreases with extra backups") {
    auto model = build_pomdp(line_map(4), "banana", {0.8, 0.05});
    Belief b = uniform_belief(4);
    double previous = -1e18;
    for (int backups : {1, 5, 15, 40}) {
        Policy policy = solve(model, {100, backups, 1e-12, 9});
        double v = policy.value(b, 0);
        CHECK(v >= previous - 1e-9);
        previous = v;
    }
}

TEST_CASE("policies round-trip through serialization with a model hash guard") {
    auto model = build_pomdp(line_map(3), "banana", {0.8, 0.05});
    Policy policy = solve(model, {60, 20, 1e-3, 5});
    std::string path = "roundtrip_policy.json";
    save_policy(policy, path);
    Policy loaded = load_policy(path, model);
    Belief b = make_belief({0.2, 0.5, 0.3});
    CHECK(loaded.action(b, 1) == policy.action(b, 1));
    CHECK(loaded.value(b, 1) == doctest::Approx(policy.value(b, 1)));

    auto other = build_pomdp(line_map(3), "banana", {0.9, 0.05});
    CHECK_THROWS(load_policy(path, other));
    std::remove(path.c_str());
}
