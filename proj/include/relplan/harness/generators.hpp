#pragma once

#include <memory>
#include <string>

#include "relplan/core/mdp.hpp"

namespace relplan {

/// A shipped problem generator ("blocks" or "gripper") at a given size.
struct GeneratorSpec {
    std::string domain;
    int size = 3;
};

/// A built-in domain compiled at a generator size, with its initial problem
/// sampler installed and the conventional random-walk goal predicate set.
struct BuiltinDomain {
    std::string name;
    std::shared_ptr<RelationalMDP> model;
    std::vector<PredId> goal_predicates; // default G for random walks
};

/// Compile a built-in domain. Unknown generator names are config errors.
BuiltinDomain make_builtin_domain(const GeneratorSpec& spec);

/// One problem instance from the generator (same distribution the built-in
/// model's initial sampler draws from).
RelState generate_problem(const BuiltinDomain& domain, Rng& rng);

/// The embedded domain documents (PPDDL subset, identical to what
/// make_builtin_domain compiles).
std::string_view builtin_domain_text(std::string_view name);

} // namespace relplan
