#include "relplan/core/binarize.hpp"

#include <algorithm>

namespace relplan {

const BinarizeMap::Entry* BinarizeMap::entry_for(PredId before_id) const {
    for (const Entry& e : entries)
        if (e.original == before_id) return &e;
    return nullptr;
}

PredId BinarizeMap::mapped(PredId before_id) const {
    return passthrough[before_id];
}

namespace {

// Rewrite one atom over a binarized predicate into marker + projection atoms.
void expand_atom(const BinarizeMap::Entry& e, const SchemaAtom& atom,
                 std::vector<SchemaAtom>& out) {
    Term tuple;
    tuple.kind = Term::Kind::Tuple;
    tuple.tuple_pred = e.original;
    tuple.tuple_args = atom.args;
    out.push_back(SchemaAtom{e.marker, {tuple}});
    for (std::size_t i = 0; i < atom.args.size(); ++i)
        out.push_back(SchemaAtom{e.projections[i], {tuple, atom.args[i]}});
}

} // namespace

BinarizeMap binarize_predicates(const PredicateTable& world_predicates,
                                std::vector<ActionSchema>& schemas, int max_arity) {
    BinarizeMap map;
    map.before = world_predicates;
    map.passthrough.assign(world_predicates.size(), kNoPred);

    for (std::size_t i = 0; i < world_predicates.size(); ++i) {
        const PredicateDecl& d = world_predicates[static_cast<PredId>(i)];
        if (d.arity > max_arity)
            throw DeclarationError("predicate '" + d.name + "' has arity " +
                                   std::to_string(d.arity) + " above the binarization limit of " +
                                   std::to_string(max_arity));
        if (d.arity <= 2) {
            map.passthrough[i] = map.after.add_world(d.name, d.arity, d.is_type);
            continue;
        }
        map.identity = false;
        BinarizeMap::Entry e;
        e.original = static_cast<PredId>(i);
        e.marker = map.after.add_world(d.name + "_tup", 1);
        for (int k = 0; k < d.arity; ++k)
            e.projections.push_back(map.after.add_world(d.name + "_arg" + std::to_string(k + 1), 2));
        map.entries.push_back(std::move(e));
    }
    if (map.identity) return map;

    auto rewrite_atoms = [&](std::vector<SchemaAtom>& atoms) {
        std::vector<SchemaAtom> out;
        for (SchemaAtom& a : atoms) {
            if (const BinarizeMap::Entry* e = map.entry_for(a.pred)) {
                expand_atom(*e, a, out);
            } else {
                a.pred = map.mapped(a.pred);
                out.push_back(std::move(a));
            }
        }
        atoms = std::move(out);
    };

    for (ActionSchema& s : schemas) {
        for (SchemaParam& p : s.params)
            if (p.type != kNoPred) p.type = map.mapped(p.type);
        std::vector<SchemaLiteral> pre;
        for (SchemaLiteral& lit : s.precondition) {
            if (const BinarizeMap::Entry* e = map.entry_for(lit.atom.pred)) {
                std::vector<SchemaAtom> expanded;
                expand_atom(*e, lit.atom, expanded);
                if (lit.negated) {
                    // ¬p(t...) holds iff the tuple marker is absent: projections
                    // are present exactly when the marker is.
                    pre.push_back(SchemaLiteral{expanded.front(), true});
                } else {
                    for (SchemaAtom& a : expanded) pre.push_back(SchemaLiteral{std::move(a), false});
                }
            } else {
                lit.atom.pred = map.mapped(lit.atom.pred);
                pre.push_back(std::move(lit));
            }
        }
        s.precondition = std::move(pre);
        for (SchemaOutcome& o : s.outcomes) {
            rewrite_atoms(o.add);
            rewrite_atoms(o.del);
        }
    }
    return map;
}

std::string tuple_object_name(const PredicateDecl& pred, std::span<const ObjId> args,
                              const std::vector<std::string>& object_names) {
    std::string name = "<" + pred.name;
    for (ObjId a : args) {
        name += ' ';
        name += object_names[a];
    }
    name += '>';
    return name;
}

namespace {

// World-or-goal aware lookup of the binarized predicate ids for a fact.
struct FactMapping {
    PredId marker;
    const std::vector<PredId>* projections;
};

std::optional<FactMapping> mapping_for(const BinarizeMap& map, const PredicateTable& full_before,
                                       const PredicateTable& full_after, PredId pred,
                                       bool& is_goal) {
    const PredicateDecl& d = full_before[pred];
    is_goal = d.kind == PredKind::Goal;
    PredId world_before = is_goal ? d.world : pred;
    const BinarizeMap::Entry* e = map.entry_for(world_before);
    if (!e) return std::nullopt;
    static thread_local std::vector<PredId> proj_scratch;
    FactMapping fm;
    if (is_goal) {
        fm.marker = full_after[e->marker].goal;
        proj_scratch.clear();
        for (PredId p : e->projections) proj_scratch.push_back(full_after[p].goal);
        fm.projections = &proj_scratch;
    } else {
        fm.marker = e->marker;
        fm.projections = &e->projections;
    }
    return fm;
}

} // namespace

RelState binarize_state(const BinarizeMap& map, const PredicateTable& full_after,
                        const RelState& s, ObjectInterner& interner) {
    // full tables on both sides: `before` facts may be world or goal kind.
    PredicateTable full_before = derive_goal_schema(map.before);
    auto convert = [&](const FactSet& in) {
        std::vector<Fact> out;
        for (const Fact& f : in) {
            bool is_goal = false;
            auto fm = mapping_for(map, full_before, full_after, f.pred(), is_goal);
            if (!fm) {
                PredId base = is_goal ? full_before[f.pred()].world : f.pred();
                PredId mapped = map.mapped(base);
                out.emplace_back(is_goal ? full_after[mapped].goal : mapped, f.args());
                continue;
            }
            const PredicateDecl& world_decl =
                map.before[is_goal ? full_before[f.pred()].world : f.pred()];
            ObjId t = interner.intern_tuple(tuple_object_name(world_decl, f.args(), interner.names()));
            out.emplace_back(fm->marker, std::initializer_list<ObjId>{t});
            for (int i = 0; i < f.arity(); ++i)
                out.emplace_back((*fm->projections)[static_cast<std::size_t>(i)],
                                 std::initializer_list<ObjId>{t, f.arg(i)});
        }
        return FactSet::from_unsorted(std::move(out));
    };
    return RelState{convert(s.world), convert(s.goal)};
}

RelState reconstruct_state(const BinarizeMap& map, const PredicateTable& full_before,
                           const RelState& s, const ObjectInterner& interner) {
    PredicateTable full_after = derive_goal_schema(map.after);
    auto convert = [&](const FactSet& in) {
        std::vector<Fact> out;
        for (const Fact& f : in) {
            const PredicateDecl& d = full_after[f.pred()];
            bool is_goal = d.kind == PredKind::Goal;
            PredId world_after = is_goal ? d.world : f.pred();
            // Marker facts p_tup(t) anchor reconstruction; projections are
            // gathered by scanning for the same tuple object.
            const BinarizeMap::Entry* marker_entry = nullptr;
            for (const BinarizeMap::Entry& e : map.entries)
                if (e.marker == world_after) marker_entry = &e;
            bool is_projection = false;
            for (const BinarizeMap::Entry& e : map.entries)
                for (PredId p : e.projections)
                    if (p == world_after) is_projection = true;
            if (is_projection) continue;
            if (!marker_entry) {
                // Passthrough predicate: invert the id mapping.
                for (std::size_t i = 0; i < map.passthrough.size(); ++i) {
                    if (map.passthrough[i] == world_after) {
                        PredId before_world = static_cast<PredId>(i);
                        out.emplace_back(is_goal ? full_before[before_world].goal : before_world,
                                         f.args());
                        break;
                    }
                }
                continue;
            }
            ObjId t = f.arg(0);
            std::vector<ObjId> args;
            for (std::size_t k = 0; k < marker_entry->projections.size(); ++k) {
                PredId proj = marker_entry->projections[k];
                PredId proj_id = is_goal ? full_after[proj].goal : proj;
                bool found = false;
                for (const Fact& g : in) {
                    if (g.pred() == proj_id && g.arg(0) == t) {
                        args.push_back(g.arg(1));
                        found = true;
                        break;
                    }
                }
                if (!found)
                    throw EvaluationError("missing projection fact while reconstructing tuple " +
                                          interner.names()[t]);
            }
            PredId before_world = marker_entry->original;
            out.emplace_back(is_goal ? full_before[before_world].goal : before_world,
                             std::span<const ObjId>(args));
        }
        return FactSet::from_unsorted(std::move(out));
    };
    return RelState{convert(s.world), convert(s.goal)};
}

} // namespace relplan
