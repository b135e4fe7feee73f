#pragma once

#include <span>
#include <vector>

#include "relplan/core/fact.hpp"
#include "relplan/taxonomy/expr.hpp"

namespace relplan {

inline constexpr std::size_t kDefaultLiteralCap = 200000;

/// All canonical class expressions of depth <= d over the given predicates
/// and action-argument variables. Relation expressions are restricted to the
/// four canonical forms R0, R0^-1, R0*, (R0^-1)*; double negation is never
/// generated. Order is deterministic (by depth, then construction order).
std::vector<ClassExprPtr> enumerate_classes(const PredicateTable& table, int depth,
                                            int action_arity, std::span<const PredId> predicates,
                                            std::size_t cap = kDefaultLiteralCap);

/// One literal per (action-argument variable, canonical class of depth <= d).
/// Exceeding the cap raises a resource error reporting the attempted count.
std::vector<Literal> enumerate_literals(const PredicateTable& table, int depth, int action_arity,
                                        std::span<const PredId> predicates,
                                        std::size_t cap = kDefaultLiteralCap);

} // namespace relplan
