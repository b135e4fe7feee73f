#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "relplan/core/fact.hpp"

namespace relplan {

/// A term in a schema literal: an action parameter, a constant object, or a
/// tuple placeholder introduced by predicate binarization (resolved to an
/// interned object when the schema is grounded).
struct Term {
    enum class Kind : std::uint8_t { Param, Const, Tuple };
    Kind kind = Kind::Param;
    std::uint16_t index = 0; // parameter position or object id
    // Tuple terms: the original k-ary predicate and its argument terms.
    PredId tuple_pred = kNoPred;
    std::vector<Term> tuple_args;

    static Term param(std::uint16_t i) { return {Kind::Param, i, kNoPred, {}}; }
    static Term constant(ObjId o) { return {Kind::Const, o, kNoPred, {}}; }
};

struct SchemaAtom {
    PredId pred = kNoPred;
    std::vector<Term> args;
};

struct SchemaLiteral {
    SchemaAtom atom;
    bool negated = false;
};

/// (= t1 t2) or its negation, checked when the schema is grounded.
struct EqualityConstraint {
    Term lhs, rhs;
    bool negated = false;
};

struct SchemaParam {
    std::string name;
    PredId type = kNoPred; // unary type predicate, or kNoPred if untyped
};

/// One probabilistic outcome of an action: add/delete lists over world
/// predicates, taken with the given probability.
struct SchemaOutcome {
    double probability = 1.0;
    std::vector<SchemaAtom> add;
    std::vector<SchemaAtom> del;
};

/// A parameterized STRIPS action with probabilistic outcomes. Outcome
/// probabilities must sum to 1 within 1e-9; a deterministic schema is a
/// single outcome with probability 1.
struct ActionSchema {
    std::string name;
    std::vector<SchemaParam> params;
    std::vector<SchemaLiteral> precondition;
    std::vector<EqualityConstraint> equalities;
    std::vector<SchemaOutcome> outcomes;
    double cost = 1.0;
};

/// A ground action: schema index (into the model's name-sorted schema list)
/// plus argument objects. The total order is lexicographic on
/// (schema name, argument objects), realized as (index, args).
class GroundAction {
public:
    GroundAction() = default;
    GroundAction(std::uint16_t schema, std::span<const ObjId> args) : schema_(schema) {
        arity_ = static_cast<std::uint8_t>(args.size());
        args_.fill(0);
        for (std::size_t i = 0; i < args.size(); ++i) args_[i] = args[i];
    }
    GroundAction(std::uint16_t schema, std::initializer_list<ObjId> args)
        : GroundAction(schema, std::span<const ObjId>(args.begin(), args.size())) {}

    std::uint16_t schema() const { return schema_; }
    int arity() const { return arity_; }
    ObjId arg(int i) const { return args_[static_cast<std::size_t>(i)]; }
    std::span<const ObjId> args() const { return {args_.data(), arity_}; }

    friend bool operator==(const GroundAction& a, const GroundAction& b) {
        return a.schema_ == b.schema_ && a.arity_ == b.arity_ && a.args_ == b.args_;
    }
    friend bool operator<(const GroundAction& a, const GroundAction& b) {
        if (a.schema_ != b.schema_) return a.schema_ < b.schema_;
        return a.args_ < b.args_;
    }
    friend bool operator<=(const GroundAction& a, const GroundAction& b) { return a < b || a == b; }

private:
    std::uint16_t schema_ = 0;
    std::uint8_t arity_ = 0;
    std::array<ObjId, kMaxActionArity> args_{};
};

} // namespace relplan
