#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "relplan/core/error.hpp"
#include "relplan/core/fact.hpp"
#include "relplan/core/schema.hpp"

namespace relplan {

struct RelExpr;
using RelExprPtr = std::shared_ptr<const RelExpr>;

/// Relation expression over binary predicates: R ::= R0 | R^-1 | R*.
struct RelExpr {
    enum class Kind : std::uint8_t { Primitive, Inverse, Star };
    Kind kind = Kind::Primitive;
    PredId pred = kNoPred; // Primitive only
    RelExprPtr inner;      // Inverse / Star

    static RelExprPtr primitive(PredId p) {
        auto e = std::make_shared<RelExpr>();
        e->kind = Kind::Primitive;
        e->pred = p;
        return e;
    }
    static RelExprPtr inverse(RelExprPtr r) {
        auto e = std::make_shared<RelExpr>();
        e->kind = Kind::Inverse;
        e->inner = std::move(r);
        return e;
    }
    static RelExprPtr star(RelExprPtr r) {
        auto e = std::make_shared<RelExpr>();
        e->kind = Kind::Star;
        e->inner = std::move(r);
        return e;
    }
};

bool structurally_equal(const RelExprPtr& a, const RelExprPtr& b);

struct ClassExpr;
using ClassExprPtr = std::shared_ptr<const ClassExpr>;

/// Class expression denoting a set of objects in a state:
/// C ::= C0 | x_i | a-thing | (not C) | (R C) | (min R).
struct ClassExpr {
    enum class Kind : std::uint8_t { Primitive, Var, AThing, Not, RelApply, MinRel };
    Kind kind = Kind::AThing;
    PredId pred = kNoPred;  // Primitive: unary predicate
    std::uint8_t var = 0;   // Var: action-argument position (0-based)
    ClassExprPtr inner;     // Not / RelApply
    RelExprPtr rel;         // RelApply / MinRel
    int depth = 1;          // 1 for leaves and (min R); child depth + 1 otherwise
    bool has_var = false;

    static ClassExprPtr primitive(PredId p) {
        auto e = std::make_shared<ClassExpr>();
        e->kind = Kind::Primitive;
        e->pred = p;
        return e;
    }
    static ClassExprPtr variable(int index) {
        auto e = std::make_shared<ClassExpr>();
        e->kind = Kind::Var;
        e->var = static_cast<std::uint8_t>(index);
        e->has_var = true;
        return e;
    }
    static ClassExprPtr a_thing() {
        auto e = std::make_shared<ClassExpr>();
        e->kind = Kind::AThing;
        return e;
    }
    static ClassExprPtr negation(ClassExprPtr c) {
        auto e = std::make_shared<ClassExpr>();
        e->kind = Kind::Not;
        e->depth = c->depth + 1;
        e->has_var = c->has_var;
        e->inner = std::move(c);
        return e;
    }
    static ClassExprPtr rel_apply(RelExprPtr r, ClassExprPtr c) {
        auto e = std::make_shared<ClassExpr>();
        e->kind = Kind::RelApply;
        e->depth = c->depth + 1;
        e->has_var = c->has_var;
        e->rel = std::move(r);
        e->inner = std::move(c);
        return e;
    }
    static ClassExprPtr min_rel(RelExprPtr r) {
        auto e = std::make_shared<ClassExpr>();
        e->kind = Kind::MinRel;
        e->rel = std::move(r);
        return e;
    }
};

inline int depth(const ClassExpr& e) { return e.depth; }
inline int depth(const ClassExprPtr& e) { return e->depth; }

bool structurally_equal(const ClassExprPtr& a, const ClassExprPtr& b);

/// One rule literal: x_varIndex ∈ expr.
struct Literal {
    int var_index = 0;
    ClassExprPtr expr;
};

/// An action-selection rule: actionType(x1..xk) : L1, ..., Lm. A rule with
/// no literals allows every action of its type.
struct Rule {
    std::uint16_t action_type = 0; // schema index in the model
    std::vector<Literal> literals;
};

/// An ordered list of rules; the policy representation. May be empty, in
/// which case execution always falls through to the least legal action.
struct DecisionList {
    std::vector<Rule> rules;
};

} // namespace relplan
