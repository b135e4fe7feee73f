#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "relplan/core/mdp.hpp"
#include "relplan/rollout/rollout.hpp"

namespace relplan {

using TrainingExample = TrainingExampleT<RelationalMDP>;
using Trajectory = TrajectoryT<RelationalMDP>;

/// Line-delimited training-set format, one JSON record per training example:
///   {"world": [...], "goal": [...], "prior": "act(a,b)"|null, "q": [["act(a)", v], ...]}
/// Trajectory structure is not preserved; the learner consumes the flat
/// multiset of examples.
void write_training_set(std::ostream& out, std::span<const Trajectory> trajectories,
                        const RelationalMDP& model);

std::vector<TrainingExample> read_training_set(std::istream& in, const RelationalMDP& model);

} // namespace relplan
