#pragma once

// Brute-force taxonomic-semantics oracle. Independent of the optimized
// interpreter: plain std::set recursion applying the defining equations
// one-to-one, with no caching, bitsets, or closure algorithms shared with
// the implementation under test.

#include <set>
#include <utility>
#include <vector>

#include "relplan/core/mdp.hpp"
#include "relplan/taxonomy/expr.hpp"

namespace relplan::testsupport {

using ObjPair = std::pair<ObjId, ObjId>;

inline std::set<ObjPair> naive_rel(const RelExprPtr& r, const RelationalMDP& m, const RelState& s) {
    std::set<ObjPair> out;
    switch (r->kind) {
    case RelExpr::Kind::Primitive: {
        const PredicateDecl& d = m.predicates()[r->pred];
        auto scan = [&](const FactSet& facts, PredId id) {
            for (const Fact& f : facts)
                if (f.pred() == id) out.emplace(f.arg(0), f.arg(1));
        };
        if (d.kind == PredKind::World) scan(s.world, r->pred);
        if (d.kind == PredKind::Goal) scan(s.goal, r->pred);
        if (d.kind == PredKind::Comparison) scan(m.comparison_facts(s), r->pred);
        break;
    }
    case RelExpr::Kind::Inverse:
        for (const ObjPair& p : naive_rel(r->inner, m, s)) out.emplace(p.second, p.first);
        break;
    case RelExpr::Kind::Star: {
        // ID ∪ {(o1, ov) | a chain o1..ov exists}: breadth-first reachability
        // per source object.
        std::set<ObjPair> base = naive_rel(r->inner, m, s);
        const std::size_t n = m.object_count();
        for (ObjId o = 0; o < n; ++o) {
            std::set<ObjId> reached{o};
            std::vector<ObjId> frontier{o};
            while (!frontier.empty()) {
                ObjId cur = frontier.back();
                frontier.pop_back();
                for (const ObjPair& p : base) {
                    if (p.first == cur && !reached.count(p.second)) {
                        reached.insert(p.second);
                        frontier.push_back(p.second);
                    }
                }
            }
            for (ObjId dest : reached) out.emplace(o, dest);
        }
        break;
    }
    }
    return out;
}

inline std::set<ObjId> naive_class(const ClassExprPtr& e, const RelationalMDP& m, const RelState& s,
                                   std::span<const ObjId> binding) {
    std::set<ObjId> out;
    const std::size_t n = m.object_count();
    switch (e->kind) {
    case ClassExpr::Kind::Primitive: {
        const PredicateDecl& d = m.predicates()[e->pred];
        auto scan = [&](const FactSet& facts, PredId id) {
            for (const Fact& f : facts)
                if (f.pred() == id) out.insert(f.arg(0));
        };
        if (d.kind == PredKind::World) scan(s.world, e->pred);
        if (d.kind == PredKind::Goal) scan(s.goal, e->pred);
        if (d.kind == PredKind::Comparison) scan(m.comparison_facts(s), e->pred);
        break;
    }
    case ClassExpr::Kind::Var:
        out.insert(binding[e->var]);
        break;
    case ClassExpr::Kind::AThing:
        for (ObjId o = 0; o < n; ++o) out.insert(o);
        break;
    case ClassExpr::Kind::Not: {
        std::set<ObjId> inner = naive_class(e->inner, m, s, binding);
        for (ObjId o = 0; o < n; ++o)
            if (!inner.count(o)) out.insert(o);
        break;
    }
    case ClassExpr::Kind::RelApply: {
        std::set<ObjId> inner = naive_class(e->inner, m, s, binding);
        std::set<ObjPair> rel = naive_rel(e->rel, m, s);
        for (ObjId o = 0; o < n; ++o)
            for (ObjId member : inner)
                if (rel.count({member, o})) out.insert(o);
        break;
    }
    case ClassExpr::Kind::MinRel: {
        std::set<ObjPair> rel = naive_rel(e->rel, m, s);
        for (ObjId o = 0; o < n; ++o) {
            bool outgoing = false, incoming = false;
            for (const ObjPair& p : rel) {
                if (p.first == o) outgoing = true;
                if (p.second == o) incoming = true;
            }
            if (outgoing && !incoming) out.insert(o);
        }
        break;
    }
    }
    return out;
}

inline bool naive_rule_allows(const Rule& rule, const RelationalMDP& m, const RelState& s,
                              const GroundAction& a) {
    for (const Literal& lit : rule.literals) {
        std::set<ObjId> cls = naive_class(lit.expr, m, s, a.args());
        if (!cls.count(a.arg(lit.var_index))) return false;
    }
    return true;
}

} // namespace relplan::testsupport
