#include "relplan/taxonomy/enumerate.hpp"

#include <string>

namespace relplan {

std::vector<ClassExprPtr> enumerate_classes(const PredicateTable& table, int depth,
                                            int action_arity, std::span<const PredId> predicates,
                                            std::size_t cap) {
    if (depth < 1) throw ConfigError("class enumeration requires depth >= 1");
    const std::size_t var_factor = std::max(action_arity, 1);

    std::vector<PredId> unary, binary;
    for (PredId p : predicates) {
        if (table[p].arity == 1) unary.push_back(p);
        if (table[p].arity == 2) binary.push_back(p);
    }

    std::vector<RelExprPtr> rels;
    for (PredId p : binary) {
        RelExprPtr base = RelExpr::primitive(p);
        rels.push_back(base);
        rels.push_back(RelExpr::inverse(base));
        rels.push_back(RelExpr::star(base));
        rels.push_back(RelExpr::star(RelExpr::inverse(base)));
    }

    std::vector<ClassExprPtr> classes;
    auto guard = [&](std::size_t next_count) {
        if (next_count * var_factor > cap)
            throw ResourceError("literal enumeration would produce at least " +
                                std::to_string(next_count * var_factor) + " literals (cap " +
                                std::to_string(cap) + ")");
    };

    // Depth 1: primitives, variables, a-thing, (min R).
    for (PredId p : unary) classes.push_back(ClassExpr::primitive(p));
    for (int v = 0; v < action_arity; ++v) classes.push_back(ClassExpr::variable(v));
    classes.push_back(ClassExpr::a_thing());
    for (const RelExprPtr& r : rels) classes.push_back(ClassExpr::min_rel(r));
    guard(classes.size());

    std::size_t level_begin = 0;
    for (int d = 2; d <= depth; ++d) {
        std::size_t level_end = classes.size();
        for (std::size_t i = level_begin; i < level_end; ++i) {
            ClassExprPtr c = classes[i]; // copy: push_back below may reallocate
            if (c->kind != ClassExpr::Kind::Not) {
                guard(classes.size() + 1);
                classes.push_back(ClassExpr::negation(c));
            }
            for (const RelExprPtr& r : rels) {
                guard(classes.size() + 1);
                classes.push_back(ClassExpr::rel_apply(r, c));
            }
        }
        level_begin = level_end;
    }
    return classes;
}

std::vector<Literal> enumerate_literals(const PredicateTable& table, int depth, int action_arity,
                                        std::span<const PredId> predicates, std::size_t cap) {
    std::vector<ClassExprPtr> classes =
        enumerate_classes(table, depth, action_arity, predicates, cap);
    std::vector<Literal> literals;
    literals.reserve(classes.size() * static_cast<std::size_t>(std::max(action_arity, 0)));
    for (const ClassExprPtr& c : classes)
        for (int v = 0; v < action_arity; ++v) literals.push_back(Literal{v, c});
    if (literals.size() > cap)
        throw ResourceError("literal enumeration produced " + std::to_string(literals.size()) +
                            " literals (cap " + std::to_string(cap) + ")");
    return literals;
}

} // namespace relplan
