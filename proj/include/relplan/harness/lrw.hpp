#pragma once

#include <iosfwd>
#include <optional>

#include "relplan/harness/evaluate.hpp"
#include "relplan/harness/rw.hpp"
#include "relplan/learn/learner.hpp"

namespace relplan {

/// One approximate-policy-iteration run: trajectories of the rollout-
/// improved policy feed the decision-list learner; iterate until no further
/// improvement on a fixed held-out problem set.
struct ApiConfig {
    int trajectories = 100; // n: training trajectories per iteration
    RolloutConfig rollout;  // w, h, gamma, delta
    LearnerConfig learner;  // d, l, b
    int max_iterations = 8;
    int stop_patience = 3;
    int holdout_problems = 100;
    int eval_step_limit = 200;

    void check() const;
};

struct ApiResult {
    DecisionList policy; // best-evaluated list
    EvalReport evaluation;
    int iterations = 0;
};

ApiResult api(std::shared_ptr<const RelationalMDP> model, const ApiConfig& cfg,
              RelationalPolicy initial_policy, Rng& rng);

/// Long-random-walk bootstrapping: escalate the walk length toward N
/// whenever the current policy's success ratio clears tau, interleaved with
/// one API improvement step per iteration on the current RW_n distribution.
struct LRWConfig {
    int max_walk = 1000;    // N
    double tau = 0.9;       // success threshold
    double delta = 0.1;     // escalation margin
    int sr_samples = 100;   // problems per SR estimate
    double noop_probability = 0.1;
    double escalation_factor = 2.0; // geometric walk-length grid
    std::vector<PredId> goal_predicates; // G

    int api_trajectories = 100;
    RolloutConfig rollout;
    LearnerConfig learner;
    int max_iterations = 10;
    int stop_patience = 3;
    int eval_samples = 100; // per report row

    // Invoked after each iteration's report row is complete (progress
    // streaming); has no effect on the run itself.
    std::function<void(const struct LrwIterationRow&)> on_iteration;

    int step_limit(int walk) const { return std::max(4 * walk, 200); }
    void check() const;
};

struct LrwIterationRow {
    int iteration = 0;
    int walk = 0;       // n used for learning this iteration
    double sr_n = 0;    // learned policy on RW_n
    std::optional<double> al_n;
    double sr_star = 0; // learned policy on RW_N
    std::optional<double> al_star;
};

struct LrwResult {
    DecisionList policy; // best policy by (SR, then AL) on RW_N
    std::vector<LrwIterationRow> rows;
    double best_sr_star = 0;
    std::optional<double> best_al_star;
    int final_walk = 1;
};

LrwResult lrw_api(std::shared_ptr<const RelationalMDP> model, const LRWConfig& cfg,
                  RelationalPolicy initial_policy, Rng& rng);

/// Append-style CSV: header plus one row per iteration; absent averages
/// render as empty cells.
void write_lrw_csv(std::ostream& out, std::span<const LrwIterationRow> rows);

/// Parameters of the statistical spot-checks of the sample-complexity and
/// rollout-accuracy guarantees; consumed by the acceptance suite.
struct TheoryCheckConfig {
    double epsilon = 0.2;     // policy-learning accuracy
    double delta = 0.2;       // learning failure probability
    double delta_prime = 0.1; // per-state rollout failure probability
    int hypothesis_count = 16;

    /// n = ceil(epsilon^-1 * ln(|H| / delta)) trajectories.
    int sample_size() const;
};

} // namespace relplan
