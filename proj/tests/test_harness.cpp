#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "relplan/harness/flat.hpp"
#include "relplan/harness/lrw.hpp"
#include "relplan/pddl/policy_text.hpp"
#include "support/flat_builders.hpp"
#include "support/harness_helpers.hpp"
#include "support/models.hpp"

using namespace relplan;
using namespace relplan::testsupport;

TEST_CASE("random-walk goals are the g-image of the endpoint facts") {
    auto domain = make_builtin_domain({"blocks", 3});
    auto m = domain.model;
    auto pid = [&](const char* n) { return *m->predicates().find(n); };

    // Walk length 0: the goal must be the image of the initial world facts,
    // so the problem is born solved.
    RWConfig rw;
    rw.walk_length = 0;
    rw.goal_predicates = {pid("gon"), pid("gclear")};
    Rng rng(5);
    RelState p = sample_rw_problem(*m, rw, rng);
    CHECK(m->is_goal_state(p));
    for (const Fact& gf : p.goal) {
        const PredicateDecl& d = m->predicates()[gf.pred()];
        CHECK((d.name == "gon" || d.name == "gclear"));
        CHECK(p.world.contains(Fact(d.world, gf.args())));
    }
    // Both predicate kinds survive before further restriction.
    bool has_gon = false, has_gclear = false;
    for (const Fact& gf : p.goal) {
        if (m->predicates()[gf.pred()].name == "gon") has_gon = true;
        if (m->predicates()[gf.pred()].name == "gclear") has_gclear = true;
    }
    CHECK(has_gclear);
    (void)has_gon; // a single-tower draw may have no on-fact

    // Restriction to G = {gon} drops every other goal predicate.
    RWConfig on_only;
    on_only.walk_length = 8;
    on_only.goal_predicates = {pid("gon")};
    for (int i = 0; i < 20; ++i) {
        Rng r(static_cast<std::uint64_t>(100 + i));
        RelState q = sample_rw_problem(*m, on_only, r);
        for (const Fact& gf : q.goal) CHECK(m->predicates()[gf.pred()].name == "gon");
    }
}

TEST_CASE("random-walk sampling is deterministic per seed") {
    auto domain = make_builtin_domain({"blocks", 4});
    RWConfig rw;
    rw.walk_length = 12;
    rw.goal_predicates = {domain.model->predicates()[*domain.model->predicates().find("on")].goal};
    Rng a(42), b(42);
    CHECK(sample_rw_problem(*domain.model, rw, a) == sample_rw_problem(*domain.model, rw, b));
}

TEST_CASE("the hand gripper policy is exhaustively correct on small instances") {
    for (int balls : {2, 3}) {
        auto domain = make_builtin_domain({"gripper", balls});
        auto m = domain.model;
        DecisionList policy = gripper_hand_policy(*m);

        Rng rng(1);
        RelState init = m->sample_initial(rng);
        EnumeratedMdp enumerated = enumerate_relational(*m, {&init, 1});
        // From every reachable state, executing the policy reaches the goal.
        for (const RelState& s : enumerated.states) {
            RelState cur = s;
            int guard = 0;
            Rng srng(7);
            while (!m->is_goal_state(cur)) {
                auto a = select_action(policy, *m, cur);
                REQUIRE(a.has_value());
                cur = m->step(cur, *a, srng).first;
                REQUIRE(++guard <= 100);
            }
        }
    }
}

TEST_CASE("the hand gripper policy solves the RW distribution outright") {
    auto domain = make_builtin_domain({"gripper", 3});
    auto m = domain.model;
    auto list = std::make_shared<DecisionList>(gripper_hand_policy(*m));
    RWConfig rw;
    rw.walk_length = 20;
    rw.goal_predicates = domain.goal_predicates;
    Rng rng(9);
    EvalReport report = evaluate_policy(policy_from_list(list, m), rw_problem_source(m, rw), 60,
                                        100, *m, rng);
    CHECK(report.success_ratio == 1.0);
    REQUIRE(report.average_length.has_value());
    CHECK(*report.average_length >= 0.0);
}

TEST_CASE("a random policy rarely solves long-walk blocks problems") {
    auto domain = make_builtin_domain({"blocks", 10});
    auto m = domain.model;
    RWConfig rw;
    rw.walk_length = 1000;
    rw.goal_predicates = domain.goal_predicates;
    Rng rng(11);
    EvalReport report =
        evaluate_policy(random_policy(m), rw_problem_source(m, rw), 40, 500, *m, rng);
    CHECK(report.success_ratio <= 0.05);
}

TEST_CASE("zero solved episodes leave the average length absent") {
    auto domain = make_builtin_domain({"blocks", 4});
    auto m = domain.model;
    // A policy that never acts, on problems that are not born solved.
    RelationalPolicy stuck = [](const RelState&, Rng&) { return std::nullopt; };
    RWConfig rw;
    rw.walk_length = 6;
    rw.goal_predicates = domain.goal_predicates;
    Rng rng(13);
    EvalReport none = evaluate_policy(
        stuck, [&](Rng& r) {
            // Resample until the problem is unsolved at birth.
            for (;;) {
                RelState p = sample_rw_problem(*m, rw, r);
                if (!m->is_goal_state(p)) return p;
            }
        },
        20, 50, *m, rng);
    CHECK(none.success_ratio == 0.0);
    CHECK_FALSE(none.average_length.has_value());
}

TEST_CASE("exact_solve reproduces the geometric series on a self-loop") {
    FlatMdp m;
    m.legal = {{0}};
    m.transitions = {{{{1.0, 0}}}};
    m.reward = {{-1.0}};
    m.terminal = {false};
    m.initial = {{1.0, 0}};
    m.gamma = 0.9;
    ExactSolution sol = exact_solve(m, {}, 0.9, 4);
    CHECK(sol.v[0] == doctest::Approx(-10.0).epsilon(1e-9));
    CHECK(sol.v_h[0][0] == 0.0); // V_0 is identically zero
    CHECK(sol.v_h[1][0] == doctest::Approx(-1.0));
    CHECK(sol.v_h[2][0] == doctest::Approx(-1.9));
    CHECK(sol.v_max == doctest::Approx(10.0));
}

TEST_CASE("exact policy improvement never hurts and helps somewhere") {
    Rng rng(17);
    for (int round = 0; round < 20; ++round) {
        Rng r = rng.fork(static_cast<std::uint64_t>(round));
        FlatMdp m = make_random_mdp(20, 3, 0.9, r);
        std::vector<int> pi = random_flat_policy(m, r);
        ExactSolution sol = exact_solve(m, pi, 0.9, 4);
        ExactSolution improved_sol = exact_solve(m, sol.improved, 0.9, 4);
        bool strict = false;
        bool changed = false;
        for (std::size_t s = 0; s < 20; ++s) {
            CHECK(improved_sol.v[s] >= sol.v[s] - 1e-8);
            if (improved_sol.v[s] > sol.v[s] + 1e-8) strict = true;
            if (sol.improved[s] != pi[s]) changed = true;
        }
        if (changed) CHECK(strict);
    }
}

TEST_CASE("generated blocks problems pass the independent validity oracle") {
    auto domain = make_builtin_domain({"blocks", 5});
    for (int seed = 0; seed < 1000; ++seed) {
        Rng rng(static_cast<std::uint64_t>(seed));
        RelState p = generate_problem(domain, rng);
        CHECK(blocks_instance_valid(*domain.model, p));
    }
    Rng a(77), b(77);
    CHECK(generate_problem(domain, a) == generate_problem(domain, b));
}

TEST_CASE("generated gripper problems have the expected fact counts") {
    auto domain = make_builtin_domain({"gripper", 3});
    auto m = domain.model;
    Rng rng(3);
    RelState p = generate_problem(domain, rng);
    int at = 0, gat = 0;
    for (const Fact& f : p.world)
        if (m->predicates()[f.pred()].name == "at") ++at;
    for (const Fact& f : p.goal)
        if (m->predicates()[f.pred()].name == "gat") ++gat;
    CHECK(at == 3);
    CHECK(gat == 3);
    CHECK(generate_problem(domain, rng).world.contains(m->parse_fact("at-robby(rooma)")));
}

TEST_CASE("unknown generator names are config errors") {
    CHECK_THROWS_AS(make_builtin_domain({"freecell", 4}), ConfigError);
}

TEST_CASE("api's first iteration matches exact policy improvement on a line world") {
    CompiledProblem line = make_line_world(6, 5);
    auto m = line.model;
    m->set_discount(0.9);
    RelState init = line.state;
    m->set_initial_sampler([init](Rng&) { return init; });

    EnumeratedMdp enumerated = enumerate_relational(*m, {&init, 1});
    ExactSolution exact = exact_solve(enumerated.flat, {}, 0.9, 32); // pi0 = least legal

    auto pi0 = [m](const RelState& s, Rng&) -> std::optional<GroundAction> {
        auto legal = m->legal_actions(s);
        if (legal.empty()) return std::nullopt;
        return legal.front();
    };

    ApiConfig cfg;
    cfg.trajectories = 24;
    cfg.rollout = RolloutConfig{256, 12, 0.9};
    cfg.learner.max_depth = 2;
    cfg.learner.max_literals = 1;
    cfg.learner.beam_width = 8;
    cfg.max_iterations = 1;
    cfg.holdout_problems = 4;
    cfg.eval_step_limit = 40;
    Rng rng(23);
    ApiResult result = api(m, cfg, pi0, rng);

    for (std::size_t s = 0; s < enumerated.states.size(); ++s) {
        if (enumerated.flat.terminal[s]) continue;
        auto a = select_action(result.policy, *m, enumerated.states[s]);
        REQUIRE(a.has_value());
        CHECK(*a == enumerated.actions[static_cast<std::size_t>(
                        exact.improved[s])]);
    }
}

TEST_CASE("api started from an optimal policy stays within the learning bound") {
    CompiledProblem line = make_line_world(5, 4);
    auto m = line.model;
    m->set_discount(0.9);
    RelState init = line.state;
    m->set_initial_sampler([init](Rng&) { return init; });
    EnumeratedMdp enumerated = enumerate_relational(*m, {&init, 1});

    // Optimal policy: always move right (toward the goal position).
    auto right_list = std::make_shared<DecisionList>();
    {
        Rule rule;
        for (std::uint16_t i = 0; i < m->schemas().size(); ++i)
            if (m->schemas()[i].name == "move") rule.action_type = i;
        right_list->rules.push_back(rule); // bare move-rule prefers move over move-back
    }
    auto pi0 = policy_from_list(right_list, m);

    // Exact value of pi0 at the initial state.
    std::vector<int> pi0_flat;
    for (const RelState& s : enumerated.states) {
        auto a = select_action(*right_list, *m, s);
        pi0_flat.push_back(a ? static_cast<int>(std::find(enumerated.actions.begin(),
                                                          enumerated.actions.end(), *a) -
                                                enumerated.actions.begin())
                             : enumerated.flat.legal[0].empty() ? 0 : enumerated.flat.legal[0][0]);
    }
    // Fix terminal/absent entries to a legal action id.
    for (std::size_t s = 0; s < pi0_flat.size(); ++s)
        if (enumerated.flat.legal[s].empty())
            pi0_flat[s] = 0;
    ExactSolution base = exact_solve(enumerated.flat, pi0_flat, 0.9, 16);

    ApiConfig cfg;
    cfg.trajectories = 24;
    cfg.rollout = RolloutConfig{64, 12, 0.9};
    cfg.learner.max_depth = 2;
    cfg.learner.max_literals = 1;
    cfg.learner.beam_width = 6;
    cfg.max_iterations = 2;
    cfg.stop_patience = 2;
    cfg.holdout_problems = 4;
    cfg.eval_step_limit = 40;
    Rng rng(29);
    ApiResult result = api(m, cfg, pi0, rng);

    std::vector<int> learned_flat;
    for (const RelState& s : enumerated.states) {
        auto a = select_action(result.policy, *m, s);
        int id = 0;
        if (a)
            id = static_cast<int>(std::find(enumerated.actions.begin(), enumerated.actions.end(),
                                            *a) -
                                  enumerated.actions.begin());
        else if (!enumerated.flat.legal[&s - enumerated.states.data()].empty())
            id = enumerated.flat.legal[&s - enumerated.states.data()][0];
        learned_flat.push_back(id);
    }
    ExactSolution learned = exact_solve(enumerated.flat, learned_flat, 0.9, 16);

    const double epsilon = 0.05;
    const double bound = 2.0 * base.v_max * (epsilon + std::pow(0.9, cfg.rollout.horizon));
    CHECK(learned.v[0] >= base.v[0] - bound);
}

TEST_CASE("one api iteration improves a random policy on easy gripper walks") {
    auto domain = make_builtin_domain({"gripper", 3});
    auto m = domain.model;
    RWConfig rw;
    rw.walk_length = 12;
    rw.goal_predicates = domain.goal_predicates;
    auto rw_model = m->with_initial_sampler(rw_problem_source(m, rw));

    Rng rng(131);
    auto pi0 = random_policy(m);
    EvalReport before = evaluate_policy(pi0, rw_problem_source(m, rw), 100, 30, *m, rng);

    ApiConfig cfg;
    cfg.trajectories = 100;
    cfg.rollout = RolloutConfig{8, 30, 1.0}; // width > 1: the base policy is stochastic
    cfg.learner.max_depth = 3;
    cfg.learner.max_literals = 2;
    cfg.learner.beam_width = 8;
    cfg.max_iterations = 1;
    cfg.holdout_problems = 30;
    cfg.eval_step_limit = 30;
    Rng arng(133);
    ApiResult result = api(std::shared_ptr<const RelationalMDP>(rw_model), cfg, pi0, arng);

    auto list = std::make_shared<DecisionList>(result.policy);
    Rng erng(135);
    EvalReport after =
        evaluate_policy(policy_from_list(list, m), rw_problem_source(m, rw), 100, 30, *m, erng);
    CHECK(after.success_ratio > before.success_ratio);
}

TEST_CASE("sr estimates concentrate like a binomial sample") {
    auto domain = make_builtin_domain({"gripper", 3});
    auto m = domain.model;
    RWConfig rw;
    rw.walk_length = 10;
    rw.goal_predicates = domain.goal_predicates;
    const int samples = 50;
    std::vector<double> estimates;
    double mean = 0;
    for (int rep = 0; rep < 30; ++rep) {
        Rng rng(Rng::mix(4242, static_cast<std::uint64_t>(rep)));
        EvalReport rpt =
            evaluate_policy(random_policy(m), rw_problem_source(m, rw), samples, 25, *m, rng);
        estimates.push_back(rpt.success_ratio);
        mean += rpt.success_ratio;
    }
    mean /= 30.0;
    double spread_bound = 4.0 * std::sqrt(std::max(mean * (1 - mean), 0.01) / samples);
    for (double e : estimates) CHECK(std::abs(e - mean) <= spread_bound);
}

TEST_CASE("lrw-api escalates the walk length and stays monotone") {
    auto domain = make_builtin_domain({"gripper", 3});
    auto m = domain.model;

    LRWConfig cfg;
    cfg.max_walk = 20;
    cfg.tau = 0.9;
    cfg.delta = 0.1;
    cfg.sr_samples = 25;
    cfg.goal_predicates = domain.goal_predicates;
    cfg.api_trajectories = 40;
    cfg.rollout = RolloutConfig{1, 25, 1.0};
    cfg.learner.max_depth = 3;
    cfg.learner.max_literals = 2;
    cfg.learner.beam_width = 8;
    cfg.max_iterations = 3;
    cfg.eval_samples = 25;

    Rng rng(51);
    LrwResult result = lrw_api(m, cfg, random_policy(m), rng);
    REQUIRE_FALSE(result.rows.empty());
    int prev = 0;
    bool escalated = false;
    for (const auto& row : result.rows) {
        CHECK(row.walk >= prev);
        CHECK(row.walk <= cfg.max_walk);
        if (row.walk > 1) escalated = true;
        prev = row.walk;
    }
    CHECK(escalated); // within three iterations on this easy domain
}

TEST_CASE("a policy that masters every candidate pins the walk at N") {
    auto domain = make_builtin_domain({"gripper", 2});
    auto m = domain.model;
    auto list = std::make_shared<DecisionList>(gripper_hand_policy(*m));

    LRWConfig cfg;
    cfg.max_walk = 12;
    cfg.sr_samples = 20;
    cfg.goal_predicates = domain.goal_predicates;
    cfg.api_trajectories = 20;
    cfg.rollout = RolloutConfig{1, 20, 1.0};
    cfg.learner.max_depth = 2;
    cfg.learner.max_literals = 2;
    cfg.learner.beam_width = 6;
    cfg.max_iterations = 1;
    cfg.eval_samples = 20;

    Rng rng(53);
    LrwResult result = lrw_api(m, cfg, policy_from_list(list, m), rng);
    REQUIRE_FALSE(result.rows.empty());
    CHECK(result.rows.front().walk == cfg.max_walk);
}

TEST_CASE("lrw-api runs are reproducible seed for seed") {
    auto domain = make_builtin_domain({"gripper", 2});
    auto m = domain.model;

    LRWConfig cfg;
    cfg.max_walk = 8;
    cfg.sr_samples = 15;
    cfg.goal_predicates = domain.goal_predicates;
    cfg.api_trajectories = 15;
    cfg.rollout = RolloutConfig{1, 15, 1.0};
    cfg.learner.max_depth = 2;
    cfg.learner.max_literals = 2;
    cfg.learner.beam_width = 5;
    cfg.max_iterations = 2;
    cfg.eval_samples = 15;

    auto run = [&](std::uint64_t seed) {
        Rng rng(seed);
        LrwResult r = lrw_api(m, cfg, random_policy(m), rng);
        std::ostringstream csv;
        write_lrw_csv(csv, r.rows);
        return csv.str() + "|" + render_policy(r.policy, *m);
    };
    CHECK(run(7) == run(7));
}
