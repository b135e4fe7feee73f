#pragma once

#include <span>
#include <vector>

#include "relplan/rollout/dataset.hpp"
#include "relplan/taxonomy/enumerate.hpp"
#include "relplan/taxonomy/expr.hpp"

namespace relplan {

struct LearnerConfig {
    int max_depth = 2;   // d: class-expression depth bound
    int max_literals = 2; // l: literals per rule
    int beam_width = 5;  // b
    double coverage_weight = 1.0;
    double advantage_weight = 1.0;
    std::size_t literal_cap = kDefaultLiteralCap;
    // Predicates the class language is built over; empty means every unary
    // and binary predicate of the model (world, goal and comparison).
    std::vector<PredId> predicates;

    void check() const {
        if (max_depth < 1 || max_literals < 1 || beam_width < 1)
            throw ConfigError("learner bounds must all be >= 1");
    }
};

/// The flat multiset of training examples consumed by the learner.
/// Examples without any recorded legal action are dropped at ingestion, as
/// (by default) are examples whose estimates are all equal: those rank no
/// action above any other — in sparse-reward domains they are almost always
/// states from which no simulation reached a goal — and their coverage mass
/// would otherwise dominate rule selection.
struct FlatTrainingSet {
    std::vector<TrainingExample> examples;

    static FlatTrainingSet from_trajectories(std::span<const Trajectory> trajectories,
                                             bool drop_uninformative = true);
    static FlatTrainingSet from_examples(std::vector<TrainingExample> examples,
                                         bool drop_uninformative = true);

    bool empty() const { return examples.empty(); }
    std::size_t size() const { return examples.size(); }
};

struct ScoredRule {
    Rule rule;
    double hvalue = 0;
    std::size_t covered_count = 0;
};

/// Δ(s, a) = Q̂(s, a) − Q̂(s, π(s)), with π(s) the example's prior action.
/// Asking about an action without a recorded estimate is a lookup error.
double q_advantage(const TrainingExample& example, const GroundAction& action);

/// Number of covered examples plus the cumulative Q-advantage of the rule:
/// an example is covered when the rule allows at least one of its recorded
/// legal actions, and each covered example contributes the advantage sum of
/// its allowed actions.
ScoredRule hvalue(const Rule& rule, const FlatTrainingSet& data, const RelationalMDP& model,
                  double coverage_weight = 1.0, double advantage_weight = 1.0);

/// Greedy beam search over rules of one action type, growing rules one
/// literal at a time and keeping the best `beam_width` distinct heuristic
/// values per iteration, until the beam stops changing.
ScoredRule beam_search(const FlatTrainingSet& data, const LearnerConfig& cfg,
                       std::uint16_t action_type, const RelationalMDP& model);

/// Best beam-search result across all action types (ties prefer the
/// lexicographically least action type).
ScoredRule learn_rule(const FlatTrainingSet& data, const LearnerConfig& cfg,
                      const RelationalMDP& model);

/// Rivest-style set covering: learn a rule, append it, drop the examples it
/// covers, and repeat until the set is empty or the best rule covers
/// nothing (remaining examples fall through to the least legal action at
/// execution time).
DecisionList learn_decision_list(const FlatTrainingSet& data, const LearnerConfig& cfg,
                                 const RelationalMDP& model);

} // namespace relplan
