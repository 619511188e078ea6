#include "sarp/experiment.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace sarp {

std::string agent_name(AgentKind kind) {
    switch (kind) {
        case AgentKind::kSarp:
            return "sarp";
        case AgentKind::kUniform:
            return "uniform";
        case AgentKind::kPredefined:
            return "predefined";
        case AgentKind::kCorpp:
            return "corpp";
    }
    throw std::logic_error("unknown agent kind");
}

AgentKind agent_from_name(const std::string& name) {
    if (name == "sarp") return AgentKind::kSarp;
    if (name == "uniform") return AgentKind::kUniform;
    if (name == "predefined") return AgentKind::kPredefined;
    if (name == "corpp") return AgentKind::kCorpp;
    throw std::invalid_argument("unknown agent: " + name);
}

namespace {

std::string resolve(const std::filesystem::path& base, const std::string& path) {
    std::filesystem::path p(path);
    if (p.is_absolute()) {
        return p.string();
    }
    return (base / p).string();
}

}  // namespace

ExperimentConfig load_experiment_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open experiment config: " + path);
    }
    nlohmann::json j;
    in >> j;
    auto base = std::filesystem::path(path).parent_path();

    ExperimentConfig cfg;
    std::string env_path = j.at("environment").get<std::string>();
    cfg.environment = load_environment(resolve(base, env_path));
    cfg.environment_name = cfg.environment.map.name;

    const auto& cj = j.at("corpus");
    if (cj.contains("file")) {
        cfg.corpus = load_corpus(resolve(base, cj.at("file").get<std::string>()));
    } else {
        auto gen = load_generator_config(
            resolve(base, cj.at("generator").get<std::string>()));
        cfg.corpus = generate_synthetic_corpus(gen, cj.value("seed", 0ull));
    }

    if (j.contains("agents")) {
        cfg.agents.clear();
        for (const auto& a : j.at("agents")) {
            cfg.agents.push_back(agent_from_name(a.get<std::string>()));
        }
    }
    cfg.trials = j.value("trials", 1);
    if (cfg.trials < 1) {
        throw std::invalid_argument("trial count must be at least 1");
    }
    cfg.base_seed = j.value("base_seed", 0ull);

    if (j.contains("solver")) {
        const auto& sj = j.at("solver");
        cfg.solver.belief_points = sj.value("belief_points", cfg.solver.belief_points);
        cfg.solver.max_backups = sj.value("max_backups", cfg.solver.max_backups);
        cfg.solver.epsilon = sj.value("epsilon", cfg.solver.epsilon);
        cfg.solver.seed = sj.value("seed", cfg.solver.seed);
    }
    if (j.contains("detector")) {
        const auto& dj = j.at("detector");
        cfg.detector.true_positive = dj.value("true_positive", cfg.detector.true_positive);
        cfg.detector.false_positive =
            dj.value("false_positive", cfg.detector.false_positive);
    }
    if (j.contains("perception")) {
        const auto& pj = j.at("perception");
        cfg.perception.sensing_radius =
            pj.value("sensing_radius", cfg.perception.sensing_radius);
        cfg.perception.relation_probability =
            pj.value("relation_probability", cfg.perception.relation_probability);
        cfg.perception.position_noise_sigma =
            pj.value("position_noise_sigma", cfg.perception.position_noise_sigma);
        if (pj.contains("predicates")) {
            cfg.perception.predicates =
                pj.at("predicates").get<std::vector<std::string>>();
        }
    }
    // one detector parameterizes both the observation model and the simulator
    cfg.perception.true_positive = cfg.detector.true_positive;
    cfg.perception.false_positive = cfg.detector.false_positive;
    cfg.pomdp.sensing_radius = cfg.perception.sensing_radius;

    if (j.contains("pomdp")) {
        const auto& pj = j.at("pomdp");
        cfg.pomdp.discount = pj.value("discount", cfg.pomdp.discount);
        cfg.pomdp.rewards.go_cost = pj.value("go_cost", cfg.pomdp.rewards.go_cost);
        cfg.pomdp.rewards.success_bonus =
            pj.value("success_bonus", cfg.pomdp.rewards.success_bonus);
        cfg.pomdp.rewards.failure_penalty =
            pj.value("failure_penalty", cfg.pomdp.rewards.failure_penalty);
        cfg.pomdp.rewards.distance_proportional =
            pj.value("distance_proportional", cfg.pomdp.rewards.distance_proportional);
        cfg.pomdp.rewards.cost_per_meter =
            pj.value("cost_per_meter", cfg.pomdp.rewards.cost_per_meter);
        cfg.pomdp.rewards.success_on_belief_argmax = pj.value(
            "success_on_belief_argmax", cfg.pomdp.rewards.success_on_belief_argmax);
    }
    if (j.contains("world")) {
        const auto& wj = j.at("world");
        cfg.world.move_success_prob =
            wj.value("move_success_prob", cfg.world.move_success_prob);
        cfg.world.placement_jitter_sigma =
            wj.value("placement_jitter_sigma", cfg.world.placement_jitter_sigma);
    }
    if (j.contains("agent")) {
        const auto& aj = j.at("agent");
        cfg.agent.association_radius =
            aj.value("association_radius", cfg.agent.association_radius);
        cfg.agent.step_cap = aj.value("step_cap", cfg.agent.step_cap);
    }
    if (j.contains("rules")) {
        cfg.corpp_rules = load_corpp_rules(resolve(base, j.at("rules").get<std::string>()));
    }
    if (j.contains("output_csv")) {
        cfg.output_csv = resolve(base, j.at("output_csv").get<std::string>());
    }
    return cfg;
}

namespace {

AgentAggregate aggregate(const std::string& name,
                         const std::vector<TrialRecord>& records) {
    AgentAggregate agg;
    agg.agent = name;
    double sum = 0.0;
    double sum_sq = 0.0;
    for (const auto& r : records) {
        ++agg.trials;
        sum += r.action_cost;
        sum_sq += r.action_cost * r.action_cost;
        agg.success_rate += r.success ? 1.0 : 0.0;
        agg.mean_steps += r.steps;
    }
    if (agg.trials > 0) {
        agg.mean_cost = sum / agg.trials;
        double variance = sum_sq / agg.trials - agg.mean_cost * agg.mean_cost;
        agg.cost_std = std::sqrt(std::max(0.0, variance));
        agg.success_rate /= agg.trials;
        agg.mean_steps /= agg.trials;
    }
    return agg;
}

}  // namespace

const AgentAggregate& AggregateReport::for_agent(const std::string& name) const {
    for (const auto& a : agents) {
        if (a.agent == name) {
            return a;
        }
    }
    throw std::out_of_range("no aggregate for agent: " + name);
}

std::string AggregateReport::table() const {
    std::ostringstream out;
    out << std::left << std::setw(12) << "agent" << std::right << std::setw(10)
        << "cost" << std::setw(10) << "std" << std::setw(10) << "success"
        << std::setw(10) << "steps" << std::setw(8) << "trials" << "\n";
    for (const auto& a : agents) {
        out << std::left << std::setw(12) << a.agent << std::right << std::fixed
            << std::setprecision(2) << std::setw(10) << a.mean_cost << std::setw(10)
            << a.cost_std << std::setw(10) << a.success_rate << std::setw(10)
            << a.mean_steps << std::setw(8) << a.trials << "\n";
    }
    return out.str();
}

AggregateReport run_experiment(const ExperimentConfig& config) {
    const auto& env = config.environment;
    TargetSearchPomdp model =
        build_pomdp(env.map, env.target_label, config.detector, config.pomdp);
    Policy policy = solve(model, config.solver);

    AggregateReport report;
    for (AgentKind kind : config.agents) {
        std::vector<TrialRecord> records;
        records.reserve(static_cast<size_t>(config.trials));
        for (int trial = 0; trial < config.trials; ++trial) {
            uint64_t seed = config.base_seed + static_cast<uint64_t>(trial);
            WorldState world = sample_world(env, seed, config.world);
            EpisodeResult episode;
            switch (kind) {
                case AgentKind::kSarp:
                    episode = run_sarp_episode(world, model, policy, config.corpus,
                                               config.perception, config.agent);
                    break;
                case AgentKind::kUniform:
                    episode = run_baseline_uniform(world, model, policy,
                                                   config.perception, config.agent);
                    break;
                case AgentKind::kPredefined:
                    episode = run_baseline_predefined(world, model, config.perception,
                                                      config.agent);
                    break;
                case AgentKind::kCorpp:
                    episode = run_baseline_corpp(world, model, policy,
                                                 config.corpp_rules, config.perception,
                                                 config.agent);
                    break;
            }
            records.push_back({trial, agent_name(kind), seed, episode.action_cost,
                               episode.success, episode.steps, episode.biased_steps});
        }
        report.agents.push_back(aggregate(agent_name(kind), records));
        report.trials.insert(report.trials.end(), records.begin(), records.end());
    }

    if (!config.output_csv.empty()) {
        write_trials_csv(report, config, config.output_csv);
    }
    return report;
}

void write_trials_csv(const AggregateReport& report, const ExperimentConfig& config,
                      const std::string& path) {
    std::filesystem::path target(path);
    std::filesystem::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp);
        if (!out) {
            throw std::runtime_error("cannot open output CSV: " + path);
        }
        out << "trial_id,agent,seed,env,query,action_cost,success,steps,biased_steps\n";
        for (const auto& r : report.trials) {
            out << r.trial_id << ',' << r.agent << ',' << r.seed << ','
                << config.environment_name << ',' << config.environment.target_label
                << ',' << r.action_cost << ',' << (r.success ? 1 : 0) << ',' << r.steps
                << ',' << r.biased_steps << "\n";
        }
    }
    std::filesystem::rename(tmp, target);
}

std::vector<SweepRow> run_scalability_sweep(const ExperimentConfig& config,
                                            const std::vector<int>& distractor_counts) {
    const auto& env = config.environment;

    auto now = [] { return std::chrono::steady_clock::now(); };
    auto seconds = [](auto start, auto end) {
        return std::chrono::duration<double>(end - start).count();
    };

    auto t0 = now();
    TargetSearchPomdp sarp_model =
        build_pomdp(env.map, env.target_label, config.detector, config.pomdp);
    Policy sarp_policy = solve(sarp_model, config.solver);
    double sarp_solve_time = seconds(t0, now());

    std::vector<SweepRow> rows;
    for (int k : distractor_counts) {
        SweepRow row;
        row.distractors = k;
        row.sarp_solve_seconds = sarp_solve_time;

        std::vector<TrialRecord> sarp_records;
        for (int trial = 0; trial < config.trials; ++trial) {
            uint64_t seed = config.base_seed + static_cast<uint64_t>(trial);
            WorldState world = sample_world_with_distractors(env, k, seed, config.world);
            EpisodeResult episode = run_sarp_episode(world, sarp_model, sarp_policy,
                                                     config.corpus, config.perception,
                                                     config.agent);
            sarp_records.push_back({trial, "sarp", seed, episode.action_cost,
                                    episode.success, episode.steps,
                                    episode.biased_steps});
        }
        row.sarp = aggregate("sarp", sarp_records);

        if (k <= 3) {
            auto t1 = now();
            TargetSearchPomdp joint_model = build_joint_pomdp(
                env.map, env.target_label, k, config.detector, config.pomdp);
            Policy joint_policy = solve(joint_model, config.solver);
            row.joint_solve_seconds = seconds(t1, now());

            std::vector<TrialRecord> joint_records;
            for (int trial = 0; trial < config.trials; ++trial) {
                uint64_t seed = config.base_seed + static_cast<uint64_t>(trial);
                WorldState world =
                    sample_world_with_distractors(env, k, seed, config.world);
                EpisodeResult episode = run_joint_episode(
                    world, joint_model, joint_policy, config.perception, config.agent);
                joint_records.push_back({trial, "joint", seed, episode.action_cost,
                                         episode.success, episode.steps, 0});
            }
            row.joint = aggregate("joint", joint_records);
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string sweep_table(const std::vector<SweepRow>& rows) {
    std::ostringstream out;
    out << std::setw(12) << "distractors" << std::setw(12) << "sarp_cost"
        << std::setw(12) << "sarp_succ" << std::setw(12) << "joint_cost"
        << std::setw(12) << "joint_succ" << std::setw(14) << "joint_solve_s" << "\n";
    for (const auto& r : rows) {
        out << std::setw(12) << r.distractors << std::fixed << std::setprecision(2)
            << std::setw(12) << r.sarp.mean_cost << std::setw(12)
            << r.sarp.success_rate;
        if (r.joint) {
            out << std::setw(12) << r.joint->mean_cost << std::setw(12)
                << r.joint->success_rate << std::setw(14) << r.joint_solve_seconds;
        } else {
            out << std::setw(12) << "-" << std::setw(12) << "-" << std::setw(14) << "-";
        }
        out << "\n";
    }
    return out.str();
}

namespace {

std::string format_belief(const Belief& b) {
    std::ostringstream out;
    out << '[';
    for (size_t i = 0; i < b.p.size(); ++i) {
        if (i > 0) {
            out << ' ';
        }
        out << std::fixed << std::setprecision(2) << b.p[i];
    }
    out << ']';
    return out.str();
}

}  // namespace

DemoResult run_demo(const ExperimentConfig& config, uint64_t seed) {
    const auto& env = config.environment;
    TargetSearchPomdp model =
        build_pomdp(env.map, env.target_label, config.detector, config.pomdp);
    Policy policy = solve(model, config.solver);
    WorldState world = sample_world(env, seed, config.world);

    DemoResult demo;
    int true_location = world.target.location;
    demo.episode = run_sarp_episode(world, model, policy, config.corpus,
                                    config.perception, config.agent);

    std::ostringstream out;
    out << "query: " << env.target_label << "  true location: " << true_location
        << "  seed: " << seed << "\n";
    for (size_t i = 0; i < demo.episode.trace.size(); ++i) {
        const auto& s = demo.episode.trace[i];
        out << "step " << i << "\n";
        if (s.action == model.terminate_action()) {
            out << "  A: terminate\n";
            break;
        }
        out << "  A: go l" << s.action << "\n";
        out << "  O: " << (s.observation == kDetected ? "Yes" : "No") << "\n";
        out << "  update: " << format_belief(s.b) << "\n";
        if (s.biased) {
            out << "  bias:   " << format_belief(s.b_prime) << "\n";
        } else {
            out << "  bias:   No\n";
        }
    }
    out << (demo.episode.success ? "reported correctly: location "
                                 : "reported: location ")
        << demo.episode.reported_location << "  cost: " << demo.episode.action_cost
        << "\n";
    demo.rendering = out.str();
    return demo;
}

}  // namespace sarp
