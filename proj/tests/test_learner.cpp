#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <sstream>

#include "relplan/learn/learner.hpp"
#include "relplan/pddl/policy_text.hpp"
#include "relplan/rollout/policies.hpp"
#include "relplan/taxonomy/interpret.hpp"
#include "support/models.hpp"

using namespace relplan;
using namespace relplan::testsupport;

namespace {

// Straight-line reimplementation of the two Hvalue sums, kept deliberately
// independent of the library path (no rule_allows batching, no masks).
double naive_hvalue(const Rule& rule, const FlatTrainingSet& data, const RelationalMDP& model,
                    std::size_t* covered_out = nullptr) {
    double total = 0;
    std::size_t covered = 0;
    for (const TrainingExample& ex : data.examples) {
        double advantage = 0;
        int allowed = 0;
        for (const auto& [action, q] : ex.q_estimates) {
            if (action.schema() != rule.action_type) continue;
            bool ok = true;
            for (const Literal& lit : rule.literals) {
                InterpContext ctx(model, ex.state);
                ObjectSet cls = interpret_class(lit.expr, ctx, action.args());
                if (!cls.test(action.arg(lit.var_index))) ok = false;
            }
            if (!ok) continue;
            ++allowed;
            double q_prior = 0;
            for (const auto& [a2, q2] : ex.q_estimates)
                if (a2 == *ex.prior_action) q_prior = q2;
            advantage += q - q_prior;
        }
        if (allowed > 0) {
            ++covered;
            total += 1.0 + advantage;
        }
    }
    if (covered_out) *covered_out = covered;
    return total;
}

// A hand-built training example on the clear-red model: the state lists
// facts, the estimates label (action, Q) pairs, the first estimate after
// sorting determines nothing -- prior is given explicitly.
TrainingExample make_example(const RelationalMDP& m, const std::vector<std::string>& facts,
                             const std::vector<std::pair<std::string, double>>& estimates,
                             const std::string& prior) {
    TrainingExample ex;
    std::vector<Fact> world;
    for (const std::string& f : facts) world.push_back(m.parse_fact(f));
    ex.state.world = FactSet::from_unsorted(std::move(world));
    for (const auto& [a, q] : estimates) ex.q_estimates.emplace_back(m.parse_action(a), q);
    std::sort(ex.q_estimates.begin(), ex.q_estimates.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    ex.prior_action = m.parse_action(prior);
    return ex;
}

} // namespace

TEST_CASE("q_advantage is the estimate difference against the prior action") {
    auto m = make_clearred_model(2);
    TrainingExample ex = make_example(*m, {"clear(b1)"},
                                      {{"pickup(b1,b2)", -5.0}, {"putdown(b1)", -3.0}},
                                      "pickup(b1,b2)");
    GroundAction a1 = m->parse_action("pickup(b1,b2)");
    GroundAction a2 = m->parse_action("putdown(b1)");
    CHECK(q_advantage(ex, a1) == 0.0);
    CHECK(q_advantage(ex, a2) == 2.0);
    ex.prior_action = a2;
    CHECK(q_advantage(ex, a1) == -2.0);
    CHECK_THROWS_AS(q_advantage(ex, m->parse_action("putdown(b2)")), EvaluationError);
}

TEST_CASE("hvalue follows the coverage-plus-advantage formula") {
    auto m = make_clearred_model(3);
    auto pid = [&](const char* n) { return *m->predicates().find(n); };
    FlatTrainingSet data;
    data.examples.push_back(make_example(
        *m, {"clear(b1)", "clear(b2)"},
        {{"pickup(b1,b3)", 2.0}, {"pickup(b2,b3)", -1.0}, {"putdown(b3)", 0.0}}, "putdown(b3)"));

    Rule nothing;
    nothing.action_type = m->parse_action("pickup(b1,b2)").schema();
    nothing.literals.push_back(Literal{0, ClassExpr::primitive(pid("holding"))}); // false here
    ScoredRule scored = hvalue(nothing, data, *m);
    CHECK(scored.hvalue == 0.0);
    CHECK(scored.covered_count == 0);

    // One covered example whose allowed actions have advantages +2 and -1.
    Rule pickup_clear;
    pickup_clear.action_type = nothing.action_type;
    ScoredRule covered = hvalue(pickup_clear, data, *m);
    CHECK(covered.covered_count == 1);
    CHECK(covered.hvalue == doctest::Approx(1.0 + (2.0 - 1.0)));
}

TEST_CASE("hvalue equals an independent straight-line reimplementation") {
    auto m = make_clearred_model(4);
    Rng rng(11);
    m->set_initial_sampler([](Rng& r) {
        auto mm = make_clearred_model(4);
        return gen_clearred_problem(*mm, 4, r);
    });
    auto pi = random_policy(m);
    Rng trng(12);
    auto trajs = improved_trajectories(12, RolloutConfig{1, 6, 1.0}, *m, pi, trng);
    FlatTrainingSet data = FlatTrainingSet::from_trajectories(trajs);
    REQUIRE(data.size() >= 3);

    ExprPool pool = expr_pool(*m);
    for (int round = 0; round < 30; ++round) {
        Rng r = rng.fork(static_cast<std::uint64_t>(round));
        Rule rule;
        rule.action_type = static_cast<std::uint16_t>(r.index(m->schemas().size()));
        int arity = static_cast<int>(m->schemas()[rule.action_type].params.size());
        int nlits = static_cast<int>(r.index(3));
        for (int i = 0; i < nlits; ++i)
            rule.literals.push_back(
                Literal{static_cast<int>(r.index(static_cast<std::size_t>(arity))),
                        random_class_expr(pool, 3, arity, r)});
        ScoredRule scored = hvalue(rule, data, *m);
        std::size_t covered = 0;
        double expected = naive_hvalue(rule, data, *m, &covered);
        CHECK(scored.hvalue == doctest::Approx(expected).epsilon(1e-12));
        CHECK(scored.covered_count == covered);
    }
}

TEST_CASE("hvalue is order-independent over the training multiset") {
    auto m = make_clearred_model(4);
    m->set_initial_sampler([](Rng& r) {
        auto mm = make_clearred_model(4);
        return gen_clearred_problem(*mm, 4, r);
    });
    auto pi = random_policy(m);
    Rng trng(13);
    auto trajs = improved_trajectories(12, RolloutConfig{1, 5, 1.0}, *m, pi, trng);
    FlatTrainingSet fwd = FlatTrainingSet::from_trajectories(trajs);
    FlatTrainingSet rev = fwd;
    std::reverse(rev.examples.begin(), rev.examples.end());

    DecisionList policy = clearred_hand_policy(*m);
    for (const Rule& rule : policy.rules)
        CHECK(hvalue(rule, fwd, *m).hvalue == doctest::Approx(hvalue(rule, rev, *m).hvalue));
}

TEST_CASE("beam search recovers a literal that identifies the best action") {
    auto m = make_clearred_model(3);
    std::uint16_t pickup = m->parse_action("pickup(b1,b2)").schema();
    FlatTrainingSet data;
    // In every example the unique positive-advantage pickup is the one whose
    // first argument is clear; other pickups hurt.
    data.examples.push_back(make_example(
        *m, {"clear(b1)", "on(b3,b2)"},
        {{"pickup(b1,b2)", 0.0}, {"pickup(b2,b3)", -6.0}, {"putdown(b1)", -4.0}}, "putdown(b1)"));
    data.examples.push_back(make_example(
        *m, {"clear(b2)", "on(b1,b3)"},
        {{"pickup(b2,b1)", 0.0}, {"pickup(b3,b1)", -6.0}, {"putdown(b2)", -4.0}}, "putdown(b2)"));
    data.examples.push_back(make_example(
        *m, {"clear(b3)", "on(b2,b1)"},
        {{"pickup(b3,b2)", 0.0}, {"pickup(b1,b2)", -6.0}, {"putdown(b3)", -4.0}}, "putdown(b3)"));

    LearnerConfig cfg;
    cfg.max_depth = 1;
    cfg.max_literals = 1;
    cfg.beam_width = 50;
    ScoredRule best = beam_search(data, cfg, pickup, *m);
    REQUIRE(best.rule.literals.size() == 1);
    CHECK(best.rule.literals[0].var_index == 0);
    REQUIRE(best.rule.literals[0].expr->kind == ClassExpr::Kind::Primitive);
    CHECK(m->predicates()[best.rule.literals[0].expr->pred].name == "clear");

    // Exhaustive oracle over every depth-1, length-1 rule for this type:
    // the returned rule attains the unique maximum of the hvalue op.
    std::vector<PredId> preds;
    for (std::size_t p = 0; p < m->predicates().size(); ++p)
        if (m->predicates()[static_cast<PredId>(p)].arity <= 2)
            preds.push_back(static_cast<PredId>(p));
    double best_h = -1e100;
    int best_count = 0;
    for (const Literal& lit : enumerate_literals(m->predicates(), 1, 2, preds)) {
        Rule r;
        r.action_type = pickup;
        r.literals.push_back(lit);
        double h = hvalue(r, data, *m).hvalue;
        if (h > best_h + 1e-12) {
            best_h = h;
            best_count = 1;
        } else if (h > best_h - 1e-12) {
            ++best_count;
        }
    }
    CHECK(hvalue(best.rule, data, *m).hvalue == doctest::Approx(best_h));
    CHECK(best.hvalue == doctest::Approx(best_h));
}

TEST_CASE("beam search returns the empty rule when no literal improves") {
    auto m = make_clearred_model(2);
    std::uint16_t putdown = m->parse_action("putdown(b1)").schema();
    FlatTrainingSet data;
    data.examples.push_back(
        make_example(*m, {"holding(b1)"}, {{"putdown(b1)", -1.0}}, "putdown(b1)"));
    data.examples.push_back(
        make_example(*m, {"holding(b2)"}, {{"putdown(b2)", -1.0}}, "putdown(b2)"));
    LearnerConfig cfg;
    cfg.max_depth = 2;
    cfg.max_literals = 2;
    cfg.beam_width = 8;
    ScoredRule best = beam_search(data, cfg, putdown, *m);
    CHECK(best.rule.literals.empty());
    CHECK(best.covered_count == 2);
    CHECK(best.hvalue == doctest::Approx(2.0));
}

TEST_CASE("learn_rule picks the action type with the higher hvalue") {
    auto m = make_clearred_model(3);
    FlatTrainingSet data;
    // Seven putdown-covered examples against three pickup-covered ones.
    for (int i = 0; i < 7; ++i)
        data.examples.push_back(
            make_example(*m, {"holding(b1)"}, {{"putdown(b1)", -1.0}}, "putdown(b1)"));
    for (int i = 0; i < 3; ++i)
        data.examples.push_back(make_example(*m, {"clear(b2)", "on(b1,b2)"},
                                             {{"pickup(b2,b1)", -1.0}}, "pickup(b2,b1)"));
    LearnerConfig cfg;
    cfg.max_depth = 1;
    cfg.max_literals = 1;
    cfg.beam_width = 4;
    ScoredRule best = learn_rule(data, cfg, *m);
    CHECK(m->schemas()[best.rule.action_type].name == "putdown");
    CHECK(best.hvalue == doctest::Approx(7.0));

    // Exact tie: one example each; the lexicographically least type wins.
    FlatTrainingSet tie;
    tie.examples.push_back(
        make_example(*m, {"holding(b1)"}, {{"putdown(b1)", -1.0}}, "putdown(b1)"));
    tie.examples.push_back(make_example(*m, {"clear(b2)", "on(b1,b2)"},
                                        {{"pickup(b2,b1)", -1.0}}, "pickup(b2,b1)"));
    ScoredRule tied = learn_rule(tie, cfg, *m);
    CHECK(m->schemas()[tied.rule.action_type].name == "pickup");
}

TEST_CASE("learn_decision_list covers, removes, and terminates") {
    auto m = make_clearred_model(4);
    LearnerConfig cfg;
    cfg.max_depth = 2;
    cfg.max_literals = 2;
    cfg.beam_width = 6;

    CHECK(learn_decision_list(FlatTrainingSet{}, cfg, *m).rules.empty());

    m->set_initial_sampler([](Rng& r) {
        auto mm = make_clearred_model(4);
        return gen_clearred_problem(*mm, 4, r);
    });
    auto list = std::make_shared<DecisionList>(clearred_hand_policy(*m));
    auto pi = policy_from_list(list, m);
    Rng rng(21);
    auto trajs = improved_trajectories(20, RolloutConfig{1, 12, 1.0}, *m, pi, rng);
    FlatTrainingSet data = FlatTrainingSet::from_trajectories(trajs);
    REQUIRE_FALSE(data.empty());

    DecisionList learned = learn_decision_list(data, cfg, *m);
    REQUIRE_FALSE(learned.rules.empty());

    // Set-cover progress: each rule covers something among the examples its
    // predecessors left, and bounds are honored.
    std::vector<char> remaining(data.size(), 1);
    for (const Rule& rule : learned.rules) {
        CHECK(static_cast<int>(rule.literals.size()) <= cfg.max_literals);
        for (const Literal& lit : rule.literals) CHECK(lit.expr->depth <= cfg.max_depth);
        std::size_t covered_now = 0;
        for (std::size_t e = 0; e < data.size(); ++e) {
            if (!remaining[e]) continue;
            const TrainingExample& ex = data.examples[e];
            InterpContext ctx(*m, ex.state);
            for (const auto& [a, q] : ex.q_estimates) {
                if (a.schema() != rule.action_type) continue;
                if (rule_allows(rule, ctx, a)) {
                    ++covered_now;
                    remaining[e] = 0;
                    break;
                }
            }
        }
        CHECK(covered_now > 0);
    }
}

TEST_CASE("exhaustive-comparable beams attain the global rule-space optimum") {
    auto m = make_clearred_model(3);
    FlatTrainingSet data;
    data.examples.push_back(make_example(
        *m, {"clear(b1)", "on(b3,b2)", "red(b3)"},
        {{"pickup(b1,b2)", -1.0}, {"pickup(b2,b3)", -5.0}, {"putdown(b3)", -4.0}}, "putdown(b3)"));
    data.examples.push_back(make_example(
        *m, {"holding(b2)", "red(b1)"}, {{"putdown(b2)", -1.0}}, "putdown(b2)"));

    LearnerConfig cfg;
    cfg.max_depth = 1;
    cfg.max_literals = 1;
    cfg.beam_width = 100000; // effectively exhaustive
    ScoredRule best = learn_rule(data, cfg, *m);

    std::vector<PredId> preds;
    for (std::size_t p = 0; p < m->predicates().size(); ++p)
        if (m->predicates()[static_cast<PredId>(p)].arity <= 2)
            preds.push_back(static_cast<PredId>(p));
    double global = -1e100;
    for (std::uint16_t t = 0; t < m->schemas().size(); ++t) {
        Rule nil;
        nil.action_type = t;
        global = std::max(global, hvalue(nil, data, *m).hvalue);
        int arity = static_cast<int>(m->schemas()[t].params.size());
        for (const Literal& lit : enumerate_literals(m->predicates(), 1, arity, preds)) {
            Rule r;
            r.action_type = t;
            r.literals.push_back(lit);
            global = std::max(global, hvalue(r, data, *m).hvalue);
        }
    }
    CHECK(best.hvalue == doctest::Approx(global));
}

TEST_CASE("learning from a written-and-reread training set is unchanged") {
    auto m = make_clearred_model(4);
    m->set_initial_sampler([](Rng& r) {
        auto mm = make_clearred_model(4);
        return gen_clearred_problem(*mm, 4, r);
    });
    auto hand = std::make_shared<DecisionList>(clearred_hand_policy(*m));
    Rng rng(47);
    auto trajs = improved_trajectories(15, RolloutConfig{1, 15, 1.0}, *m, policy_from_list(hand, m), rng);
    FlatTrainingSet direct = FlatTrainingSet::from_trajectories(trajs);

    std::ostringstream out;
    write_training_set(out, trajs, *m);
    std::istringstream in(out.str());
    FlatTrainingSet reread = FlatTrainingSet::from_examples(read_training_set(in, *m));

    LearnerConfig cfg;
    cfg.max_depth = 2;
    cfg.max_literals = 2;
    cfg.beam_width = 6;
    DecisionList a = learn_decision_list(direct, cfg, *m);
    DecisionList b = learn_decision_list(reread, cfg, *m);
    CHECK(render_policy(a, *m) == render_policy(b, *m));
}

TEST_CASE("a list learned from clear-red rollouts masters fresh problems") {
    auto m = make_clearred_model(4);
    m->set_initial_sampler([](Rng& r) {
        auto mm = make_clearred_model(4);
        return gen_clearred_problem(*mm, 4, r);
    });
    auto hand = std::make_shared<DecisionList>(clearred_hand_policy(*m));
    auto pi = policy_from_list(hand, m);
    Rng rng(31);
    auto trajs = improved_trajectories(40, RolloutConfig{1, 30, 1.0}, *m, pi, rng);
    FlatTrainingSet data = FlatTrainingSet::from_trajectories(trajs);

    LearnerConfig cfg;
    cfg.max_depth = 3;
    cfg.max_literals = 2;
    cfg.beam_width = 8;
    DecisionList learned = learn_decision_list(data, cfg, *m);
    REQUIRE_FALSE(learned.rules.empty());

    int solved = 0;
    const int trials = 20;
    for (int i = 0; i < trials; ++i) {
        Rng prng = rng.fork(5000 + static_cast<std::uint64_t>(i));
        RelState s = gen_clearred_problem(*m, 4, prng);
        Rng srng = rng.fork(6000 + static_cast<std::uint64_t>(i));
        for (int t = 0; t < 100 && !m->is_goal_state(s); ++t) {
            auto a = select_action(learned, *m, s);
            if (!a) break;
            s = m->step(s, *a, srng).first;
        }
        if (m->is_goal_state(s)) ++solved;
    }
    CHECK(solved >= trials - 1); // near-perfect at unit-test scale
}
