#include "relplan/taxonomy/interpret.hpp"

#include <algorithm>

namespace relplan {

bool structurally_equal(const RelExprPtr& a, const RelExprPtr& b) {
    if (a == b) return true;
    if (!a || !b || a->kind != b->kind) return false;
    if (a->kind == RelExpr::Kind::Primitive) return a->pred == b->pred;
    return structurally_equal(a->inner, b->inner);
}

bool structurally_equal(const ClassExprPtr& a, const ClassExprPtr& b) {
    if (a == b) return true;
    if (!a || !b || a->kind != b->kind) return false;
    switch (a->kind) {
    case ClassExpr::Kind::Primitive:
        return a->pred == b->pred;
    case ClassExpr::Kind::Var:
        return a->var == b->var;
    case ClassExpr::Kind::AThing:
        return true;
    case ClassExpr::Kind::Not:
        return structurally_equal(a->inner, b->inner);
    case ClassExpr::Kind::RelApply:
        return structurally_equal(a->rel, b->rel) && structurally_equal(a->inner, b->inner);
    case ClassExpr::Kind::MinRel:
        return structurally_equal(a->rel, b->rel);
    }
    return false;
}

InterpContext::InterpContext(const RelationalMDP& model, const RelState& state)
    : model_(&model), state_(&state), n_(model.object_count()) {}

const ObjectSet& InterpContext::unary_extension(PredId p) {
    auto it = unary_.find(p);
    if (it != unary_.end()) return it->second;

    const PredicateDecl& decl = model_->predicates()[p];
    ObjectSet ext(n_);
    auto scan = [&](const FactSet& facts, PredId id) {
        for (const Fact& f : facts)
            if (f.pred() == id) ext.set(f.arg(0));
    };
    switch (decl.kind) {
    case PredKind::World:
        scan(state_->world, p);
        break;
    case PredKind::Goal:
        scan(state_->goal, p);
        break;
    case PredKind::Comparison:
        if (!comparison_) comparison_ = model_->comparison_facts(*state_);
        scan(*comparison_, p);
        break;
    }
    return unary_.emplace(p, std::move(ext)).first->second;
}

const Relation& InterpContext::relation(const RelExprPtr& r) {
    auto it = rels_.find(r);
    if (it != rels_.end()) return it->second;

    Relation rel;
    rel.rows.assign(n_, ObjectSet(n_));
    switch (r->kind) {
    case RelExpr::Kind::Primitive: {
        const PredicateDecl& decl = model_->predicates()[r->pred];
        auto scan = [&](const FactSet& facts, PredId id) {
            for (const Fact& f : facts)
                if (f.pred() == id) rel.rows[f.arg(0)].set(f.arg(1));
        };
        switch (decl.kind) {
        case PredKind::World:
            scan(state_->world, r->pred);
            break;
        case PredKind::Goal:
            scan(state_->goal, r->pred);
            break;
        case PredKind::Comparison:
            if (!comparison_) comparison_ = model_->comparison_facts(*state_);
            scan(*comparison_, r->pred);
            break;
        }
        break;
    }
    case RelExpr::Kind::Inverse: {
        const Relation& inner = relation(r->inner);
        for (std::size_t o = 0; o < n_; ++o)
            inner.rows[o].for_each([&](std::size_t succ) { rel.rows[succ].set(o); });
        break;
    }
    case RelExpr::Kind::Star: {
        const Relation& inner = relation(r->inner);
        rel.rows = inner.rows;
        for (std::size_t o = 0; o < n_; ++o) rel.rows[o].set(o);
        // Warshall closure over bitset rows.
        for (std::size_t k = 0; k < n_; ++k)
            for (std::size_t i = 0; i < n_; ++i)
                if (rel.rows[i].test(k)) rel.rows[i] |= rel.rows[k];
        break;
    }
    }
    return rels_.emplace(r, std::move(rel)).first->second;
}

const Relation& interpret_rel(const RelExprPtr& r, InterpContext& ctx) {
    return ctx.relation(r);
}

namespace {

ObjectSet eval_class(const ClassExprPtr& e, InterpContext& ctx, std::span<const ObjId> binding);

ObjectSet compute_class(const ClassExprPtr& e, InterpContext& ctx, std::span<const ObjId> binding) {
    const std::size_t n = ctx.universe_size();
    switch (e->kind) {
    case ClassExpr::Kind::Primitive:
        return ctx.unary_extension(e->pred);
    case ClassExpr::Kind::Var: {
        if (e->var >= binding.size())
            throw EvaluationError("unbound action-argument variable x" +
                                  std::to_string(e->var + 1));
        ObjectSet s(n);
        s.set(binding[e->var]);
        return s;
    }
    case ClassExpr::Kind::AThing: {
        ObjectSet s(n);
        s.fill();
        return s;
    }
    case ClassExpr::Kind::Not: {
        ObjectSet s = eval_class(e->inner, ctx, binding);
        s.complement();
        return s;
    }
    case ClassExpr::Kind::RelApply: {
        // (R C) = { o | ∃o' ∈ C with (o', o) ∈ R }: union of successor rows.
        const Relation& rel = ctx.relation(e->rel);
        ObjectSet inner = eval_class(e->inner, ctx, binding);
        ObjectSet s(n);
        inner.for_each([&](std::size_t o) { s |= rel.rows[o]; });
        return s;
    }
    case ClassExpr::Kind::MinRel: {
        // (min R) = objects with an outgoing R edge and no incoming one.
        const Relation& rel = ctx.relation(e->rel);
        ObjectSet incoming(n);
        for (std::size_t o = 0; o < n; ++o) incoming |= rel.rows[o];
        ObjectSet s(n);
        for (std::size_t o = 0; o < n; ++o)
            if (rel.rows[o].any() && !incoming.test(o)) s.set(o);
        return s;
    }
    }
    return ObjectSet(n);
}

ObjectSet eval_class(const ClassExprPtr& e, InterpContext& ctx, std::span<const ObjId> binding) {
    return interpret_class(e, ctx, binding);
}

} // namespace

ObjectSet interpret_class(const ClassExprPtr& e, InterpContext& ctx,
                          std::span<const ObjId> binding) {
    if (!e->has_var) {
        auto it = ctx.classes_.find(e);
        if (it != ctx.classes_.end()) return it->second;
        ObjectSet s = compute_class(e, ctx, binding);
        ctx.classes_.emplace(e, s);
        return s;
    }
    return compute_class(e, ctx, binding);
}

bool rule_allows(const Rule& rule, InterpContext& ctx, const GroundAction& action) {
    if (action.schema() != rule.action_type)
        throw EvaluationError("rule_allows called with a mismatched action type");
    for (const Literal& lit : rule.literals) {
        if (lit.var_index >= action.arity())
            throw EvaluationError("rule literal variable exceeds the action arity");
        ObjectSet s = interpret_class(lit.expr, ctx, action.args());
        if (!s.test(action.arg(lit.var_index))) return false;
    }
    return true;
}

std::optional<GroundAction> select_action(const DecisionList& list, InterpContext& ctx,
                                          std::span<const GroundAction> legal) {
    if (legal.empty()) return std::nullopt;
    for (const Rule& rule : list.rules) {
        for (const GroundAction& a : legal) {
            if (a.schema() != rule.action_type) continue;
            if (rule_allows(rule, ctx, a)) return a; // legal list is ordered
        }
    }
    return legal.front();
}

std::optional<GroundAction> select_action(const DecisionList& list, const RelationalMDP& model,
                                          const RelState& state) {
    std::vector<GroundAction> legal = model.legal_actions(state);
    InterpContext ctx(model, state);
    return select_action(list, ctx, legal);
}

} // namespace relplan
