#include "relplan/core/fact.hpp"

#include <algorithm>

namespace relplan {

PredicateTable derive_goal_schema(const PredicateTable& world_predicates) {
    PredicateTable out;
    for (const PredicateDecl& d : world_predicates) {
        if (d.kind != PredKind::World)
            throw DeclarationError("derive_goal_schema expects world predicates only, got: " + d.name);
        if (world_predicates.find("g" + d.name) || world_predicates.find("c" + d.name)) {
            const char* which = world_predicates.find("g" + d.name) ? "g" : "c";
            throw DeclarationError("predicate '" + d.name + "' clashes with existing '" + which +
                                   d.name + "' under goal/comparison derivation");
        }
        PredicateDecl w = d;
        w.goal = kNoPred;
        w.comparison = kNoPred;
        out.add(std::move(w));
    }
    const std::size_t n = world_predicates.size();
    for (std::size_t i = 0; i < n; ++i) {
        const PredicateDecl& d = out[static_cast<PredId>(i)];
        PredicateDecl g;
        g.name = "g" + d.name;
        g.arity = d.arity;
        g.kind = PredKind::Goal;
        g.world = static_cast<PredId>(i);
        out.add(std::move(g));
    }
    for (std::size_t i = 0; i < n; ++i) {
        const PredicateDecl& d = out[static_cast<PredId>(i)];
        PredicateDecl c;
        c.name = "c" + d.name;
        c.arity = d.arity;
        c.kind = PredKind::Comparison;
        c.world = static_cast<PredId>(i);
        out.add(std::move(c));
    }
    // Wire the forward links. Ids are worlds first, then goals, then comparisons.
    std::vector<PredicateDecl> rebuilt;
    rebuilt.reserve(out.size());
    for (const PredicateDecl& d : out) rebuilt.push_back(d);
    for (std::size_t i = 0; i < n; ++i) {
        rebuilt[i].goal = static_cast<PredId>(n + i);
        rebuilt[i].comparison = static_cast<PredId>(2 * n + i);
    }
    PredicateTable linked;
    for (PredicateDecl& d : rebuilt) linked.add(std::move(d));
    return linked;
}

FactSet FactSet::from_unsorted(std::vector<Fact> facts) {
    std::sort(facts.begin(), facts.end());
    facts.erase(std::unique(facts.begin(), facts.end()), facts.end());
    FactSet s;
    s.facts_ = std::move(facts);
    return s;
}

bool FactSet::contains(const Fact& f) const {
    return std::binary_search(facts_.begin(), facts_.end(), f);
}

void FactSet::insert(const Fact& f) {
    auto it = std::lower_bound(facts_.begin(), facts_.end(), f);
    if (it != facts_.end() && *it == f) return;
    facts_.insert(it, f);
}

void FactSet::erase(const Fact& f) {
    auto it = std::lower_bound(facts_.begin(), facts_.end(), f);
    if (it != facts_.end() && *it == f) facts_.erase(it);
}

void FactSet::apply(std::span<const Fact> del, std::span<const Fact> add) {
    for (const Fact& f : del) erase(f);
    for (const Fact& f : add) insert(f);
}

bool FactSet::contains_all(std::span<const Fact> facts) const {
    for (const Fact& f : facts)
        if (!contains(f)) return false;
    return true;
}

bool FactSet::contains_none(std::span<const Fact> facts) const {
    for (const Fact& f : facts)
        if (contains(f)) return false;
    return true;
}

} // namespace relplan
