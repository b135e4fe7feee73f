// relplan: learn and evaluate reactive decision-list policies for
// relational planning domains via random-walk bootstrapped approximate
// policy iteration.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "relplan/harness/flat.hpp"
#include "relplan/harness/generators.hpp"
#include "relplan/harness/lrw.hpp"
#include "relplan/pddl/parser.hpp"
#include "relplan/pddl/policy_text.hpp"

using namespace relplan;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open file: " + path);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

struct ModelArgs {
    std::string generator;
    int size = 4;
    std::string domain_file;
    std::string problem_file;
    std::vector<std::string> goal_pred_names;

    void attach(CLI::App* cmd) {
        cmd->add_option("--generator", generator, "built-in domain: blocks | gripper");
        cmd->add_option("--size", size, "generator size (blocks, balls)");
        cmd->add_option("--domain", domain_file, "domain file (PPDDL subset)");
        cmd->add_option("--problem", problem_file, "problem file (required with --domain)");
        cmd->add_option("--goal-preds", goal_pred_names,
                        "world predicates whose goal images random walks may target");
    }
};

struct LoadedModel {
    std::shared_ptr<RelationalMDP> model;
    std::vector<PredId> goal_predicates;
    std::string domain_name;
};

LoadedModel load_model(const ModelArgs& args) {
    LoadedModel out;
    if (!args.generator.empty()) {
        BuiltinDomain builtin = make_builtin_domain({args.generator, args.size});
        out.model = builtin.model;
        out.goal_predicates = builtin.goal_predicates;
        out.domain_name = builtin.name;
    } else if (!args.domain_file.empty()) {
        if (args.problem_file.empty())
            throw ConfigError("--domain requires --problem for the initial distribution");
        DomainAst domain = parse_domain(slurp(args.domain_file));
        ProblemAst problem = parse_problem_ast(slurp(args.problem_file), domain);
        CompiledProblem cp = compile_problem(domain, problem);
        out.model = cp.model;
        out.domain_name = domain.name;
        RelState fixed = cp.state;
        out.model->set_initial_sampler([fixed](Rng&) { return fixed; });
        // Default G: the goal predicates used by the problem itself.
        for (const Fact& f : cp.state.goal) {
            PredId gp = f.pred();
            if (std::find(out.goal_predicates.begin(), out.goal_predicates.end(), gp) ==
                out.goal_predicates.end())
                out.goal_predicates.push_back(gp);
        }
    } else {
        throw ConfigError("specify --generator NAME or --domain FILE --problem FILE");
    }
    if (!args.goal_pred_names.empty()) {
        out.goal_predicates.clear();
        for (const std::string& name : args.goal_pred_names) {
            auto p = out.model->predicates().find(name);
            if (!p) throw ConfigError("unknown predicate in --goal-preds: " + name);
            PredId gp = out.model->predicates()[*p].kind == PredKind::Goal
                            ? *p
                            : out.model->predicates()[*p].goal;
            if (gp == kNoPred) throw ConfigError("predicate has no goal image: " + name);
            out.goal_predicates.push_back(gp);
        }
    }
    return out;
}

RelationalPolicy load_policy(const std::string& spec, const LoadedModel& lm,
                             std::shared_ptr<const DecisionList>* list_out = nullptr) {
    if (spec.empty() || spec == "random") return random_policy(lm.model);
    auto list = std::make_shared<DecisionList>(parse_policy(slurp(spec), *lm.model));
    if (list_out) *list_out = list;
    return policy_from_list(list, lm.model);
}

// --problems rw:N draws n-step random-walk problems; --problems generator
// draws fresh instances from the initial distribution.
std::function<RelState(Rng&)> problem_source(const std::string& spec, const LoadedModel& lm,
                                             double noop_probability) {
    if (spec == "generator" || spec.empty()) {
        auto model = lm.model;
        return [model](Rng& rng) { return model->sample_initial(rng); };
    }
    if (spec.rfind("rw:", 0) == 0) {
        RWConfig rw;
        rw.walk_length = std::stoi(spec.substr(3));
        rw.noop_probability = noop_probability;
        rw.goal_predicates = lm.goal_predicates;
        return rw_problem_source(lm.model, rw);
    }
    throw ConfigError("--problems expects 'rw:N' or 'generator', got: " + spec);
}

nlohmann::json report_json(const EvalReport& r) {
    nlohmann::json j;
    j["success_ratio"] = r.success_ratio;
    if (r.average_length)
        j["average_length"] = *r.average_length;
    else
        j["average_length"] = nullptr;
    j["samples"] = r.sample_count;
    j["step_limit"] = r.step_limit;
    return j;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write file: " + path);
    out << content;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"reactive-policy learning for relational planning domains"};
    app.require_subcommand(1);

    // ---- learn ----
    auto* learn = app.add_subcommand("learn", "run random-walk bootstrapped policy iteration");
    ModelArgs learn_model;
    learn_model.attach(learn);
    LRWConfig lrw;
    std::uint64_t seed = 1;
    std::string out_policy = "policy.txt", out_csv, out_summary, init_policy_spec = "random";
    learn->add_option("--trajectories", lrw.api_trajectories, "training trajectories per iteration");
    learn->add_option("--width", lrw.rollout.width, "rollout sampling width w");
    learn->add_option("--horizon", lrw.rollout.horizon, "rollout horizon h")->default_val(40);
    learn->add_option("--discount", lrw.rollout.discount, "discount factor");
    learn->add_option("--depth", lrw.learner.max_depth, "class expression depth bound d");
    learn->add_option("--length", lrw.learner.max_literals, "rule length bound l");
    learn->add_option("--beam", lrw.learner.beam_width, "beam width b");
    learn->add_option("--literal-cap", lrw.learner.literal_cap, "candidate literal cap");
    learn->add_option("--tau", lrw.tau, "success threshold");
    learn->add_option("--delta", lrw.delta, "escalation margin");
    learn->add_option("--max-walk", lrw.max_walk, "maximum walk length N");
    learn->add_option("--noop-prob", lrw.noop_probability, "walk no-op probability");
    learn->add_option("--sr-samples", lrw.sr_samples, "problems per success-ratio estimate");
    learn->add_option("--eval-samples", lrw.eval_samples, "problems per report row");
    learn->add_option("--max-iterations", lrw.max_iterations, "iteration cap");
    learn->add_option("--stop-patience", lrw.stop_patience, "iterations at N without improvement");
    learn->add_option("--initial-policy", init_policy_spec, "'random' or a policy file");
    learn->add_option("--seed", seed, "master seed");
    learn->add_option("--out", out_policy, "learned policy file");
    learn->add_option("--report", out_csv, "per-iteration CSV report");
    learn->add_option("--summary", out_summary, "JSON run summary");

    // ---- evaluate ----
    auto* evaluate = app.add_subcommand("evaluate", "measure SR/AL of a policy");
    ModelArgs eval_model;
    eval_model.attach(evaluate);
    std::string eval_policy_spec, eval_problems = "generator";
    int eval_samples = 100, eval_step_limit = 200;
    double eval_noop = 0.1;
    std::uint64_t eval_seed = 1;
    evaluate->add_option("--policy", eval_policy_spec, "'random' or a policy file")->required();
    evaluate->add_option("--problems", eval_problems, "'rw:N' or 'generator'");
    evaluate->add_option("--samples", eval_samples, "episodes");
    evaluate->add_option("--step-limit", eval_step_limit, "steps per episode");
    evaluate->add_option("--noop-prob", eval_noop, "walk no-op probability");
    evaluate->add_option("--seed", eval_seed, "master seed");

    // ---- sample-problems ----
    auto* sample = app.add_subcommand("sample-problems", "emit problem files");
    ModelArgs sample_model;
    sample_model.attach(sample);
    std::string sample_problems = "generator", sample_dir;
    int sample_count = 5;
    double sample_noop = 0.1;
    std::uint64_t sample_seed = 1;
    sample->add_option("--problems", sample_problems, "'rw:N' or 'generator'");
    sample->add_option("--count", sample_count, "number of problems");
    sample->add_option("--noop-prob", sample_noop, "walk no-op probability");
    sample->add_option("--out-dir", sample_dir, "write problem-NNN.pddl files here");
    sample->add_option("--seed", sample_seed, "master seed");

    // ---- rollout ----
    auto* roll = app.add_subcommand("rollout", "dump a rollout training-set file");
    ModelArgs roll_model;
    roll_model.attach(roll);
    std::string roll_policy_spec = "random", roll_problems = "generator", roll_out;
    RolloutConfig roll_cfg{1, 40, 1.0, 0.0};
    int roll_trajectories = 100;
    double roll_noop = 0.1;
    std::uint64_t roll_seed = 1;
    roll->add_option("--policy", roll_policy_spec, "'random' or a policy file");
    roll->add_option("--problems", roll_problems, "'rw:N' or 'generator'");
    roll->add_option("--trajectories", roll_trajectories, "trajectory count");
    roll->add_option("--width", roll_cfg.width, "sampling width w");
    roll->add_option("--horizon", roll_cfg.horizon, "horizon h");
    roll->add_option("--discount", roll_cfg.discount, "discount factor");
    roll->add_option("--noop-prob", roll_noop, "walk no-op probability");
    roll->add_option("--out", roll_out, "training-set file (default stdout)");
    roll->add_option("--seed", roll_seed, "master seed");

    // ---- solve-exact ----
    auto* solve = app.add_subcommand("solve-exact", "exact DP tables for an enumerable instance");
    ModelArgs solve_model;
    solve_model.attach(solve);
    std::string solve_policy_spec;
    double solve_gamma = 0.9;
    int solve_horizon = 20;
    std::size_t solve_cap = 200000;
    bool solve_full = false;
    solve->add_option("--policy", solve_policy_spec, "policy file (default: least legal action)");
    solve->add_option("--gamma", solve_gamma, "discount factor (< 1)");
    solve->add_option("--horizon", solve_horizon, "finite-horizon table depth");
    solve->add_option("--cap", solve_cap, "state-space cap");
    solve->add_flag("--full", solve_full, "include state descriptions");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*learn) {
            LoadedModel lm = load_model(learn_model);
            lrw.goal_predicates = lm.goal_predicates;
            lrw.on_iteration = [](const LrwIterationRow& row) {
                std::fprintf(stderr, "iter %d: n=%d sr_n=%.2f sr_star=%.2f\n", row.iteration,
                             row.walk, row.sr_n, row.sr_star);
            };
            Rng rng(seed);
            RelationalPolicy pi0 = load_policy(init_policy_spec, lm);
            LrwResult result = lrw_api(lm.model, lrw, pi0, rng);

            write_file(out_policy, render_policy(result.policy, *lm.model));
            if (!out_csv.empty()) {
                std::ostringstream csv;
                write_lrw_csv(csv, result.rows);
                write_file(out_csv, csv.str());
            }
            nlohmann::json summary;
            summary["domain"] = lm.domain_name;
            summary["seed"] = seed;
            summary["config"] = {{"trajectories", lrw.api_trajectories},
                                 {"width", lrw.rollout.width},
                                 {"horizon", lrw.rollout.horizon},
                                 {"depth", lrw.learner.max_depth},
                                 {"length", lrw.learner.max_literals},
                                 {"beam", lrw.learner.beam_width},
                                 {"tau", lrw.tau},
                                 {"delta", lrw.delta},
                                 {"max_walk", lrw.max_walk},
                                 {"noop_prob", lrw.noop_probability},
                                 {"sr_samples", lrw.sr_samples},
                                 {"eval_samples", lrw.eval_samples},
                                 {"max_iterations", lrw.max_iterations}};
            summary["iterations"] = result.rows.size();
            summary["final_walk"] = result.final_walk;
            summary["best_sr_star"] = result.best_sr_star;
            if (result.best_al_star) summary["best_al_star"] = *result.best_al_star;
            summary["policy_file"] = out_policy;
            if (!out_summary.empty()) write_file(out_summary, summary.dump(2) + "\n");
            std::cout << summary.dump(2) << "\n";
        } else if (*evaluate) {
            LoadedModel lm = load_model(eval_model);
            RelationalPolicy pi = load_policy(eval_policy_spec, lm);
            Rng rng(eval_seed);
            EvalReport report = evaluate_policy(pi, problem_source(eval_problems, lm, eval_noop),
                                                eval_samples, eval_step_limit, *lm.model, rng);
            std::cout << report_json(report).dump(2) << "\n";
        } else if (*sample) {
            LoadedModel lm = load_model(sample_model);
            auto source = problem_source(sample_problems, lm, sample_noop);
            Rng rng(sample_seed);
            for (int i = 0; i < sample_count; ++i) {
                Rng prng = rng.fork(static_cast<std::uint64_t>(i));
                RelState p = source(prng);
                char name[64];
                std::snprintf(name, sizeof(name), "problem-%03d", i);
                std::string text = render_problem(*lm.model, p, name, lm.domain_name);
                if (sample_dir.empty()) {
                    std::cout << text << "\n";
                } else {
                    write_file(sample_dir + "/" + name + ".pddl", text);
                }
            }
        } else if (*roll) {
            LoadedModel lm = load_model(roll_model);
            std::shared_ptr<const DecisionList> list;
            RelationalPolicy pi = load_policy(roll_policy_spec, lm, &list);
            auto rw_model = lm.model->with_initial_sampler(problem_source(roll_problems, lm, roll_noop));
            Rng rng(roll_seed);
            auto trajectories = improved_trajectories(roll_trajectories, roll_cfg, *rw_model, pi, rng);
            if (roll_out.empty()) {
                write_training_set(std::cout, trajectories, *lm.model);
            } else {
                std::ofstream out(roll_out, std::ios::binary);
                if (!out) throw ConfigError("cannot write file: " + roll_out);
                write_training_set(out, trajectories, *lm.model);
            }
        } else if (*solve) {
            LoadedModel lm = load_model(solve_model);
            Rng rng(1);
            RelState start = lm.model->sample_initial(rng);
            EnumeratedMdp enumerated = enumerate_relational(*lm.model, {&start, 1}, solve_cap);

            std::vector<int> flat_policy;
            if (!solve_policy_spec.empty()) {
                DecisionList list = parse_policy(slurp(solve_policy_spec), *lm.model);
                for (const RelState& s : enumerated.states) {
                    auto a = select_action(list, *lm.model, s);
                    int id = -1;
                    if (a)
                        id = static_cast<int>(
                            std::find(enumerated.actions.begin(), enumerated.actions.end(), *a) -
                            enumerated.actions.begin());
                    std::size_t idx = static_cast<std::size_t>(&s - enumerated.states.data());
                    if (id < 0 && !enumerated.flat.legal[idx].empty())
                        id = enumerated.flat.legal[idx].front();
                    flat_policy.push_back(id < 0 ? 0 : id);
                }
            }
            ExactSolution sol =
                exact_solve(enumerated.flat, flat_policy, solve_gamma, solve_horizon);
            nlohmann::json j;
            j["states"] = enumerated.states.size();
            j["gamma"] = solve_gamma;
            j["horizon"] = solve_horizon;
            j["r_max"] = sol.r_max;
            j["v_max"] = sol.v_max;
            if (sol.has_delta_star) j["delta_star"] = sol.delta_star;
            j["v"] = sol.v;
            auto& improved = j["improved_policy"] = nlohmann::json::array();
            for (std::size_t s = 0; s < enumerated.states.size(); ++s) {
                int a = sol.improved[s];
                improved.push_back(a < 0 ? nlohmann::json(nullptr)
                                         : nlohmann::json(lm.model->action_to_string(
                                               enumerated.actions[static_cast<std::size_t>(a)])));
            }
            if (solve_full) {
                auto& states = j["state_table"] = nlohmann::json::array();
                for (const RelState& s : enumerated.states) {
                    nlohmann::json row;
                    auto& world = row["world"] = nlohmann::json::array();
                    for (const Fact& f : s.world) world.push_back(lm.model->fact_to_string(f));
                    auto& goal = row["goal"] = nlohmann::json::array();
                    for (const Fact& f : s.goal) goal.push_back(lm.model->fact_to_string(f));
                    states.push_back(std::move(row));
                }
            }
            std::cout << j.dump(2) << "\n";
        }
    } catch (const std::exception& e) {
        nlohmann::json err;
        err["error"] = e.what();
        std::cerr << err.dump() << "\n";
        return 1;
    }
    return 0;
}
