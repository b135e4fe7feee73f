#pragma once

#include <string>
#include <vector>

#include "relplan/pddl/sexpr.hpp"

namespace relplan {

struct AstTerm {
    std::string name;
    bool is_variable = false; // ?x style
    SourceSpan span;
};

struct AstAtom {
    std::string pred; // "=" for equality atoms
    std::vector<AstTerm> args;
    SourceSpan span;
};

struct AstLiteral {
    AstAtom atom;
    bool negated = false;
};

struct AstOutcome {
    double probability = 1.0;
    std::vector<AstLiteral> effects; // adds (positive) and deletes (negated)
    SourceSpan span;
};

struct AstPredicate {
    std::string name;
    std::vector<std::string> param_types; // "" when untyped; size = arity
    SourceSpan span;
};

struct AstTypedName {
    std::string name;
    std::string type; // "" when untyped / "object"
    SourceSpan span;
};

struct AstAction {
    std::string name;
    std::vector<AstTypedName> params; // ?x - type
    std::vector<AstLiteral> precondition;
    std::vector<AstOutcome> outcomes; // single outcome with probability 1 when deterministic
    double cost = 1.0;
    SourceSpan span;
};

struct DomainAst {
    std::string name;
    std::vector<std::string> requirements;
    std::vector<AstTypedName> types;     // type - parent
    std::vector<AstTypedName> constants; // shared objects
    std::vector<AstPredicate> predicates;
    std::vector<AstAction> actions;
    SourceSpan span;
};

struct ProblemAst {
    std::string name;
    std::string domain_name;
    std::vector<AstTypedName> objects;
    std::vector<AstAtom> init;
    std::vector<AstAtom> goal; // ground, positive
    SourceSpan span;
};

} // namespace relplan
