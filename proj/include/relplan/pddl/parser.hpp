#pragma once

#include <memory>
#include <string_view>

#include "relplan/core/mdp.hpp"
#include "relplan/pddl/ast.hpp"

namespace relplan {

/// Parse a PDDL/PPDDL-subset domain document. Supported requirements:
/// :strips :typing :equality :negative-preconditions :probabilistic-effects.
/// Preconditions are conjunctions of literals; effects are add/delete
/// conjunctions, optionally wrapped in one (probabilistic p E p E ...) whose
/// probabilities must sum to 1 within 1e-6.
DomainAst parse_domain(std::string_view text);

/// Parse a problem document against its domain. All objects and predicates
/// must resolve; goal literals must be ground and positive.
ProblemAst parse_problem_ast(std::string_view text, const DomainAst& domain);

/// A problem lowered to a relational MDP: the model carries the problem's
/// object universe (plus domain constants), typed static facts, and derived
/// goal/comparison predicates; the state holds the init facts (with type
/// membership) and the 'g'-mapped goal facts.
struct CompiledProblem {
    std::shared_ptr<RelationalMDP> model;
    RelState state;
};

CompiledProblem compile_problem(const DomainAst& domain, const ProblemAst& problem,
                                MdpOptions options = {});

/// Convenience: parse both documents and lower them.
CompiledProblem load_problem(std::string_view domain_text, std::string_view problem_text,
                             MdpOptions options = {});

/// Render a problem instance as a problem document that parses back to the
/// same state (goal facts are written with their world predicate names).
std::string render_problem(const RelationalMDP& model, const RelState& state,
                           std::string_view problem_name, std::string_view domain_name);

} // namespace relplan
