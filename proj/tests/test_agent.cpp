#include <doctest.h>

#include <sstream>

#include "helpers.hpp"
#include "sarp/agent.hpp"

using namespace sarp;
namespace th = test_helpers;

namespace {

struct Setup {
    EnvironmentFile env;
    TargetSearchPomdp model;
    Policy policy;
    SceneGraphCorpus corpus;
    PerceptionModel perception;

    explicit Setup(const std::string& env_name, DetectorStats det = {0.6, 0.1})
        : env(load_environment(th::fixture(env_name))),
          model(build_pomdp(env.map, env.target_label, det)),
          policy(solve(model, {150, 40, 1e-3, 7})),
          corpus(generate_synthetic_corpus(
              load_generator_config(th::fixture("hallway_corpus.json")), 42)) {
        perception.true_positive = det.true_positive;
        perception.false_positive = det.false_positive;
        perception.predicates = {"near"};
    }
};

bool traces_equal(const EpisodeResult& a, const EpisodeResult& b) {
    if (a.steps != b.steps || a.trace.size() != b.trace.size()) {
        return false;
    }
    for (size_t i = 0; i < a.trace.size(); ++i) {
        if (a.trace[i].action != b.trace[i].action ||
            a.trace[i].observation != b.trace[i].observation ||
            a.trace[i].robot_location != b.trace[i].robot_location ||
            a.trace[i].biased != b.trace[i].biased) {
            return false;
        }
        for (size_t l = 0; l < a.trace[i].b.p.size(); ++l) {
            if (std::abs(a.trace[i].b.p[l] - b.trace[i].b.p[l]) > 1e-12) {
                return false;
            }
        }
    }
    return true;
}

}  // namespace

TEST_CASE("bias_belief rescales and normalizes without touching b") {
    Belief b;
    b.p = {0.15, 0.07, 0.15, 0.15, 0.33, 0.15};

    Belief same = bias_belief(b, {2, 2, 2, 2, 2, 2});
    for (size_t i = 0; i < 6; ++i) {
        CHECK(same.p[i] == doctest::Approx(b.p[i]));
    }

    Belief peaked = bias_belief(b, {0.1, 0.1, 0.1, 0.1, 0.6, 0.1});
    CHECK(peaked.p[4] > b.p[4]);
    CHECK(peaked.sum() == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(b.p[4] == doctest::Approx(0.33));  // input untouched

    Belief point = bias_belief(b, {0, 0, 1, 0, 0, 0});
    CHECK(point.p[2] == doctest::Approx(1.0));

    CHECK_THROWS(bias_belief(b, {0, 0, 0, 0, 0, 0}));
    CHECK_THROWS(bias_belief(b, {1.0, 1.0}));
    CHECK_THROWS(bias_belief(b, {1, 1, -1, 1, 1, 1}));
}

TEST_CASE("corpp_prior aggregates matching rules") {
    CorppRules rules;
    rules.default_weight = 0.0;
    rules.rules = {{"banana", 0, 0.25},
                   {"banana", 2, 0.25},
                   {"apple", 1, 0.9},
                   {"*", 5, 0.5}};
    Belief prior = corpp_prior(rules, "banana", 6);
    CHECK(prior.p[0] == doctest::Approx(0.25));
    CHECK(prior.p[1] == doctest::Approx(0.0));
    CHECK(prior.p[5] == doctest::Approx(0.5));
    CHECK(prior.sum() == doctest::Approx(1.0));

    CorppRules empty;
    CHECK_THROWS(corpp_prior(empty, "banana", 6));
    CorppRules out_of_range;
    out_of_range.rules = {{"banana", 9, 0.5}};
    CHECK_THROWS(corpp_prior(out_of_range, "banana", 6));
}

TEST_CASE("rules files parse in both accepted shapes") {
    auto rules = load_corpp_rules(th::fixture("hallway_rules.json"));
    CHECK(rules.rules.size() == 4);
    CHECK(rules.default_weight == doctest::Approx(0.05));
    Belief prior = corpp_prior(rules, "banana", 6);
    CHECK(prior.p[0] > prior.p[1]);
}

TEST_CASE("a co-located perfect-sensor episode succeeds immediately") {
    Setup s("hallway_demo.json", {1.0, 0.0});
    WorldOptions opts;
    opts.move_success_prob = 1.0;
    auto world = sample_world(s.env, 11, opts);
    // stage robot and target together at the hallway end, where observing
    // the current location first is strictly optimal
    world.robot_location = 5;
    world.target.location = 5;
    world.target.position = s.env.map.locations[5];
    PerceptionModel perfect = s.perception;
    perfect.true_positive = 1.0;
    perfect.false_positive = 0.0;

    auto result = run_sarp_episode(world, s.model, s.policy, s.corpus, perfect);
    CHECK(result.success);
    CHECK(result.steps <= 2);
    CHECK(result.action_cost <= 10.0);
    CHECK(result.reported_location == 5);
}

TEST_CASE("identical seeds give identical SARP traces") {
    Setup s("hallway.json");
    auto w1 = sample_world(s.env, 77);
    auto w2 = sample_world(s.env, 77);
    auto r1 = run_sarp_episode(w1, s.model, s.policy, s.corpus, s.perception);
    auto r2 = run_sarp_episode(w2, s.model, s.policy, s.corpus, s.perception);
    CHECK(traces_equal(r1, r2));
}

TEST_CASE("biasing fires exactly on Detected steps") {
    Setup s("hallway.json");
    for (uint64_t seed : {1, 2, 3, 4, 5}) {
        auto world = sample_world(s.env, seed);
        auto result = run_sarp_episode(world, s.model, s.policy, s.corpus, s.perception);
        int biased = 0;
        for (const auto& step : result.trace) {
            if (step.action == s.model.terminate_action()) {
                CHECK_FALSE(step.biased);
                continue;
            }
            CHECK(step.biased == (step.observation == kDetected));
            biased += step.biased ? 1 : 0;
        }
        CHECK(biased == result.biased_steps);
    }
}

TEST_CASE("b follows the pure Bayes trajectory regardless of biasing") {
    Setup s("hallway.json");
    for (uint64_t seed : {21, 22, 23}) {
        auto sarp_world = sample_world(s.env, seed);
        auto sarp = run_sarp_episode(sarp_world, s.model, s.policy, s.corpus,
                                     s.perception);
        // replay the same action/observation history through plain updates
        Belief b = uniform_belief(6);
        for (const auto& step : sarp.trace) {
            if (step.action == s.model.terminate_action()) {
                break;
            }
            b = belief_update(b, step.action, step.observation, s.model,
                              step.robot_location);
            for (size_t l = 0; l < 6; ++l) {
                CHECK(b.p[l] == doctest::Approx(step.b.p[l]).epsilon(1e-9));
            }
        }
    }
}

TEST_CASE("all agents share b trajectories in an evidence-free world") {
    Setup s("hallway.json");
    EnvironmentFile bare = s.env;
    bare.objects.clear();  // no evidence objects anywhere
    CorppRules uniform_rules;
    uniform_rules.default_weight = 1.0;

    for (uint64_t seed : {31, 32, 33}) {
        auto w_sarp = sample_world(bare, seed);
        auto w_uni = sample_world(bare, seed);
        auto w_corpp = sample_world(bare, seed);
        auto sarp = run_sarp_episode(w_sarp, s.model, s.policy, s.corpus, s.perception);
        auto uni = run_baseline_uniform(w_uni, s.model, s.policy, s.perception);
        auto corpp =
            run_baseline_corpp(w_corpp, s.model, s.policy, uniform_rules, s.perception);
        CHECK(traces_equal(uni, corpp));
        REQUIRE(sarp.steps == uni.steps);
        for (size_t i = 0; i < sarp.trace.size(); ++i) {
            for (size_t l = 0; l < 6; ++l) {
                CHECK(sarp.trace[i].b.p[l] ==
                      doctest::Approx(uni.trace[i].b.p[l]).epsilon(1e-9));
            }
        }
    }
}

TEST_CASE("predefined baseline cost is seed-independent") {
    Setup s("hallway.json");
    double cost = -1.0;
    for (uint64_t seed = 100; seed < 120; ++seed) {
        auto world = sample_world(s.env, seed);
        auto result = run_baseline_predefined(world, s.model, s.perception);
        if (cost < 0.0) {
            cost = result.action_cost;
        }
        CHECK(result.action_cost == doctest::Approx(cost));
        CHECK(result.terminated);
    }
    // visits 0..5 with one sensing stop per location from start 0
    CHECK(cost == doctest::Approx(60.0));
}

TEST_CASE("predefined baseline with a perfect sensor always succeeds") {
    Setup s("hallway.json", {1.0, 0.0});
    PerceptionModel perfect = s.perception;
    perfect.true_positive = 1.0;
    perfect.false_positive = 0.0;
    for (uint64_t seed = 0; seed < 25; ++seed) {
        auto world = sample_world(s.env, seed);
        CHECK(run_baseline_predefined(world, s.model, perfect).success);
    }
}

TEST_CASE("episodes respect the step cap") {
    Setup s("hallway.json", {0.5, 0.5});  // uninformative sensor: never terminates
    AgentConfig cfg;
    cfg.step_cap = 12;
    auto world = sample_world(s.env, 8);
    auto result = run_baseline_uniform(world, s.model, s.policy, s.perception, cfg);
    CHECK(result.steps <= 12);
    if (!result.terminated) {
        CHECK_FALSE(result.success);
    }
}

TEST_CASE("joint episodes track the marginal target belief") {
    Setup s("hallway.json");
    auto joint_model = build_joint_pomdp(s.env.map, s.env.target_label, 1,
                                         s.model.detector());
    Policy joint_policy = solve(joint_model, {100, 25, 1e-12, 7});
    auto world = sample_world_with_distractors(s.env, 1, 55, {});
    auto result =
        run_joint_episode(world, joint_model, joint_policy, s.perception);
    CHECK(result.steps > 0);
    CHECK(result.reported_location >= 0);
    CHECK(result.reported_location < 6);
}

TEST_CASE("episode traces serialize to JSON") {
    Setup s("hallway.json");
    auto world = sample_world(s.env, 3);
    auto result = run_sarp_episode(world, s.model, s.policy, s.corpus, s.perception);
    auto j = result.to_json();
    CHECK(j.at("trace").size() == static_cast<size_t>(result.steps));
    CHECK(j.at("true_location").get<int>() == result.true_location);
}
