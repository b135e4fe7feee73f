#pragma once

#include <functional>
#include <vector>

#include "relplan/core/mdp.hpp"

namespace relplan {

/// n-step random-walk problem distribution: walk n uniformly random legal
/// actions from an initial draw (mixing in a no-op with fixed probability),
/// then adopt the endpoint's facts, restricted to the goal predicates G, as
/// the goal of the starting state.
struct RWConfig {
    int walk_length = 1;            // n
    double noop_probability = 0.1;  // fixed across steps
    std::vector<PredId> goal_predicates; // G: goal-kind predicate ids

    void check(const RelationalMDP& model) const;
};

RelState sample_rw_problem(const RelationalMDP& model, const RWConfig& cfg, Rng& rng);

/// The distribution as a reusable problem source.
std::function<RelState(Rng&)> rw_problem_source(std::shared_ptr<const RelationalMDP> model,
                                                RWConfig cfg);

} // namespace relplan
