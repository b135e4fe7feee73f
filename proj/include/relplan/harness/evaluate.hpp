#pragma once

#include <functional>
#include <optional>

#include "relplan/rollout/policies.hpp"

namespace relplan {

/// Success ratio and average solution cost of a policy on a problem
/// distribution. The average length is the mean accumulated action cost of
/// the solved episodes and is absent when nothing was solved.
struct EvalReport {
    double success_ratio = 0;
    std::optional<double> average_length;
    int sample_count = 0;
    int step_limit = 0;
};

EvalReport evaluate_policy(const RelationalPolicy& policy,
                           const std::function<RelState(Rng&)>& problems, int sample_count,
                           int step_limit, const RelationalMDP& model, Rng& rng);

/// Evaluate against a fixed problem list (cycled in order) instead of a
/// sampled distribution; used for held-out comparisons across iterations.
EvalReport evaluate_policy_fixed(const RelationalPolicy& policy, std::span<const RelState> problems,
                                 int step_limit, const RelationalMDP& model, Rng& rng);

} // namespace relplan
