#pragma once

#include <string>
#include <string_view>

#include "relplan/core/mdp.hpp"
#include "relplan/taxonomy/expr.hpp"

namespace relplan {

/// Textual decision-list format, one rule per line:
///
///   actionname: (x1 in EXPR) & (x2 in EXPR)
///
/// EXPR  ::= PRIM | xN | a-thing | (not EXPR) | (REL EXPR) | (min REL)
/// REL   ::= PRIMREL | REL^-1 | REL* | REL^-*
///
/// '∈' / '∧' and the superscript forms '⁻¹' '⁻*' are accepted on input;
/// 'universal' is an alias for a-thing; identifiers are case-insensitive.
/// A rule with no literals is written as "actionname:". Lines starting with
/// '#' and blank lines are ignored.
std::string render_policy(const DecisionList& list, const RelationalMDP& model);

std::string render_rule(const Rule& rule, const RelationalMDP& model);
std::string render_class(const ClassExprPtr& expr, const RelationalMDP& model);

/// Parse the format above against a compiled model. Unknown predicates or
/// action names, arity misuse, and variable indices beyond the action arity
/// raise ParseError with the offending position.
DecisionList parse_policy(std::string_view text, const RelationalMDP& model);

} // namespace relplan
