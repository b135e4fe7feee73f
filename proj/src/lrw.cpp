#include "relplan/harness/lrw.hpp"

#include <cmath>
#include <ostream>

namespace relplan {

void ApiConfig::check() const {
    rollout.check();
    learner.check();
    if (trajectories < 1 || max_iterations < 1 || stop_patience < 1 || holdout_problems < 1 ||
        eval_step_limit < 1)
        throw ConfigError("api configuration values must all be >= 1");
}

void LRWConfig::check() const {
    rollout.check();
    learner.check();
    if (max_walk < 1) throw ConfigError("the maximum walk length N must be >= 1");
    if (!(0 < delta && delta < tau && tau <= 1))
        throw ConfigError("walk escalation requires 0 < delta < tau <= 1");
    if (escalation_factor <= 1.0) throw ConfigError("escalation factor must exceed 1");
    if (sr_samples < 1 || api_trajectories < 1 || max_iterations < 1 || stop_patience < 1 ||
        eval_samples < 1)
        throw ConfigError("lrw configuration values must all be >= 1");
}

namespace {

// (SR, then AL) lexicographic improvement: higher success ratio wins;
// equal ratios prefer the lower average length.
bool improves(const EvalReport& candidate, const EvalReport& best) {
    if (candidate.success_ratio != best.success_ratio)
        return candidate.success_ratio > best.success_ratio;
    if (candidate.average_length && best.average_length)
        return *candidate.average_length < *best.average_length;
    return candidate.average_length.has_value() && !best.average_length.has_value();
}

} // namespace

ApiResult api(std::shared_ptr<const RelationalMDP> model, const ApiConfig& cfg,
              RelationalPolicy initial_policy, Rng& rng) {
    cfg.check();
    const RelationalMDP& m = *model;

    // Fixed held-out problems, drawn once.
    std::vector<RelState> holdout;
    for (int i = 0; i < cfg.holdout_problems; ++i) {
        Rng prng = rng.fork(0xA0, static_cast<std::uint64_t>(i));
        holdout.push_back(m.sample_initial(prng));
    }

    ApiResult best;
    best.evaluation.success_ratio = -1; // any real evaluation beats this
    RelationalPolicy current = std::move(initial_policy);
    int since_improvement = 0;

    for (int iter = 1; iter <= cfg.max_iterations; ++iter) {
        Rng iter_rng = rng.fork(0xB0, static_cast<std::uint64_t>(iter));
        auto trajectories =
            improved_trajectories(cfg.trajectories, cfg.rollout, m, current, iter_rng);
        FlatTrainingSet data = FlatTrainingSet::from_trajectories(trajectories);
        DecisionList learned = learn_decision_list(data, cfg.learner, m);

        auto list = std::make_shared<DecisionList>(learned);
        RelationalPolicy candidate = policy_from_list(list, model);
        Rng eval_rng = rng.fork(0xC0, static_cast<std::uint64_t>(iter));
        EvalReport eval =
            evaluate_policy_fixed(candidate, holdout, cfg.eval_step_limit, m, eval_rng);

        if (improves(eval, best.evaluation)) {
            best.policy = learned;
            best.evaluation = eval;
            since_improvement = 0;
        } else {
            ++since_improvement;
        }
        best.iterations = iter;
        if (since_improvement >= cfg.stop_patience) break;
        current = std::move(candidate);
    }
    return best;
}

LrwResult lrw_api(std::shared_ptr<const RelationalMDP> model, const LRWConfig& cfg,
                  RelationalPolicy initial_policy, Rng& rng) {
    cfg.check();
    const RelationalMDP& m = *model;

    auto rw_source = [&](int walk) {
        RWConfig rw;
        rw.walk_length = walk;
        rw.noop_probability = cfg.noop_probability;
        rw.goal_predicates = cfg.goal_predicates;
        return rw_problem_source(model, rw);
    };
    auto estimate_sr = [&](const RelationalPolicy& policy, int walk, Rng& erng) {
        return evaluate_policy(policy, rw_source(walk), cfg.sr_samples, cfg.step_limit(walk), m,
                               erng);
    };

    LrwResult out;
    RelationalPolicy current = std::move(initial_policy);
    int walk = 1;
    bool have_best = false;
    int since_improvement = 0;

    for (int iter = 1; iter <= cfg.max_iterations; ++iter) {
        Rng iter_rng = rng.fork(0xD0, static_cast<std::uint64_t>(iter));

        // Escalate the walk length once the distribution is mastered:
        // scan the geometric grid for the least candidate the current
        // policy has not mastered (SR below tau - delta), capped at N.
        Rng sr_rng = iter_rng.fork(1);
        double sr_here = estimate_sr(current, walk, sr_rng).success_ratio;
        if (sr_here > cfg.tau && walk < cfg.max_walk) {
            int candidate = walk;
            int chosen = cfg.max_walk;
            for (int k = 1;; ++k) {
                candidate = static_cast<int>(
                    std::ceil(static_cast<double>(walk) * std::pow(cfg.escalation_factor, k)));
                if (candidate >= cfg.max_walk) break;
                Rng crng = iter_rng.fork(100 + static_cast<std::uint64_t>(k));
                if (estimate_sr(current, candidate, crng).success_ratio < cfg.tau - cfg.delta) {
                    chosen = candidate;
                    break;
                }
            }
            walk = std::min(chosen, cfg.max_walk);
        }

        // One API improvement step on RW_walk.
        auto rw_model = m.with_initial_sampler(rw_source(walk));
        Rng traj_rng = iter_rng.fork(2);
        auto trajectories = improved_trajectories(cfg.api_trajectories, cfg.rollout, *rw_model,
                                                  current, traj_rng);
        FlatTrainingSet data = FlatTrainingSet::from_trajectories(trajectories);
        DecisionList learned = learn_decision_list(data, cfg.learner, m);
        auto list = std::make_shared<DecisionList>(learned);
        RelationalPolicy candidate = policy_from_list(list, model);

        // Report row: the learned policy on RW_walk and on RW_N.
        Rng eval_n = iter_rng.fork(3);
        Rng eval_star = iter_rng.fork(4);
        EvalReport on_n = evaluate_policy(candidate, rw_source(walk), cfg.eval_samples,
                                          cfg.step_limit(walk), m, eval_n);
        EvalReport on_star = evaluate_policy(candidate, rw_source(cfg.max_walk), cfg.eval_samples,
                                             cfg.step_limit(cfg.max_walk), m, eval_star);
        LrwIterationRow row;
        row.iteration = iter;
        row.walk = walk;
        row.sr_n = on_n.success_ratio;
        row.al_n = on_n.average_length;
        row.sr_star = on_star.success_ratio;
        row.al_star = on_star.average_length;
        out.rows.push_back(row);
        if (cfg.on_iteration) cfg.on_iteration(row);

        EvalReport best_eval;
        best_eval.success_ratio = out.best_sr_star;
        best_eval.average_length = out.best_al_star;
        if (!have_best || improves(on_star, best_eval)) {
            out.policy = learned;
            out.best_sr_star = on_star.success_ratio;
            out.best_al_star = on_star.average_length;
            have_best = true;
            since_improvement = 0;
        } else {
            ++since_improvement;
        }
        current = std::move(candidate);
        out.final_walk = walk;
        if (walk >= cfg.max_walk && since_improvement >= cfg.stop_patience) break;
    }
    return out;
}

void write_lrw_csv(std::ostream& out, std::span<const LrwIterationRow> rows) {
    out << "iter,n,sr_n,al_n,sr_star,al_star\n";
    auto cell = [](const std::optional<double>& v) {
        if (!v) return std::string();
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.6g", *v);
        return std::string(buf);
    };
    for (const LrwIterationRow& r : rows) {
        char head[64];
        std::snprintf(head, sizeof(head), "%d,%d,%.6g,", r.iteration, r.walk, r.sr_n);
        out << head << cell(r.al_n);
        char mid[32];
        std::snprintf(mid, sizeof(mid), ",%.6g,", r.sr_star);
        out << mid << cell(r.al_star) << "\n";
    }
}

int TheoryCheckConfig::sample_size() const {
    return static_cast<int>(
        std::ceil(std::log(static_cast<double>(hypothesis_count) / delta) / epsilon));
}

} // namespace relplan
