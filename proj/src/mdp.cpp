#include "relplan/core/mdp.hpp"

#include <algorithm>
#include <cmath>

namespace relplan {

RelationalMDP::RelationalMDP(const PredicateTable& world_predicates,
                             std::vector<ActionSchema> schemas, std::vector<std::string> objects,
                             std::vector<Fact> static_facts, MdpOptions options,
                             std::vector<RelState> seed_states)
    : schemas_(std::move(schemas)), objects_(std::move(objects)) {
    // Normalize schema order so that the ground-action order is lexicographic
    // on schema names regardless of declaration order.
    std::sort(schemas_.begin(), schemas_.end(),
              [](const ActionSchema& a, const ActionSchema& b) { return a.name < b.name; });
    for (std::size_t i = 1; i < schemas_.size(); ++i)
        if (schemas_[i].name == schemas_[i - 1].name)
            throw DeclarationError("duplicate action schema: " + schemas_[i].name);
    for (const ActionSchema& s : schemas_) {
        if (s.params.size() > kMaxActionArity)
            throw DeclarationError("action '" + s.name + "' exceeds the supported arity of " +
                                   std::to_string(kMaxActionArity));
        double total = 0;
        for (const SchemaOutcome& o : s.outcomes) total += o.probability;
        if (s.outcomes.empty() || std::abs(total - 1.0) > options.prob_tolerance)
            throw DeclarationError("outcome probabilities of action '" + s.name +
                                   "' do not sum to 1");
        if (s.cost < 0) throw DeclarationError("action '" + s.name + "' has negative cost");
        auto check_atom = [&](const SchemaAtom& a) {
            if (a.pred >= world_predicates.size())
                throw DeclarationError("action '" + s.name + "' references an undeclared predicate");
        };
        for (const SchemaLiteral& lit : s.precondition) check_atom(lit.atom);
        for (const SchemaOutcome& o : s.outcomes) {
            for (const SchemaAtom& a : o.add) check_atom(a);
            for (const SchemaAtom& a : o.del) check_atom(a);
        }
    }

    if (options.binarize) {
        binarize_map_ = binarize_predicates(world_predicates, schemas_, options.max_arity);
        predicates_ = derive_goal_schema(binarize_map_.after);
    } else {
        binarize_map_.before = world_predicates;
        binarize_map_.after = world_predicates;
        binarize_map_.passthrough.resize(world_predicates.size());
        for (std::size_t i = 0; i < world_predicates.size(); ++i)
            binarize_map_.passthrough[i] = static_cast<PredId>(i);
        predicates_ = derive_goal_schema(world_predicates);
    }

    interner_ = std::make_shared<ObjectInterner>(objects_);

    // Static facts and seed states arrive over the pre-binarization ids;
    // remap them (interning any tuple objects) if predicates were rewritten.
    if (!binarize_map_.identity) {
        PredicateTable full_after = derive_goal_schema(binarize_map_.after);
        RelState tmp{FactSet::from_unsorted(std::move(static_facts)), {}};
        static_facts_ = binarize_state(binarize_map_, full_after, tmp, *interner_).world.items();
        for (RelState& s : seed_states)
            seed_states_.push_back(binarize_state(binarize_map_, full_after, s, *interner_));
    } else {
        static_facts_ = std::move(static_facts);
        std::sort(static_facts_.begin(), static_facts_.end());
        seed_states_ = std::move(seed_states);
    }

    // Typed candidate lists come from static unary facts.
    std::vector<std::vector<ObjId>> by_type(predicates_.size());
    for (const Fact& f : static_facts_)
        if (f.arity() == 1) by_type[f.pred()].push_back(f.arg(0));
    for (auto& v : by_type) {
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
    }
    // Action arguments range over the declared universe; tuple objects are
    // internal fact carriers only.
    std::vector<ObjId> everything;
    for (std::size_t o = 0; o < interner_->declared_count(); ++o)
        everything.push_back(static_cast<ObjId>(o));

    for (std::uint16_t si = 0; si < schemas_.size(); ++si) {
        std::vector<std::vector<ObjId>> candidates;
        for (const SchemaParam& p : schemas_[si].params)
            candidates.push_back(p.type == kNoPred ? everything : by_type[p.type]);
        ground_schema(si, candidates);
    }
    objects_ = interner_->names(); // include tuple objects interned during grounding
    for (std::size_t o = 0; o < objects_.size(); ++o)
        object_ids_.emplace(objects_[o], static_cast<ObjId>(o));
    // Grounding enumerates candidates in object order, so per schema the
    // actions are already lexicographically sorted; schemas are name-sorted.
}

ObjId RelationalMDP::resolve_term(const Term& t, std::span<const ObjId> binding) {
    switch (t.kind) {
    case Term::Kind::Param:
        return binding[t.index];
    case Term::Kind::Const:
        return static_cast<ObjId>(t.index);
    case Term::Kind::Tuple: {
        std::vector<ObjId> args;
        for (const Term& a : t.tuple_args) args.push_back(resolve_term(a, binding));
        const PredicateDecl& d = binarize_map_.before[t.tuple_pred];
        return interner_->intern_tuple(tuple_object_name(d, args, interner_->names()));
    }
    }
    return 0;
}

Fact RelationalMDP::resolve_atom(const SchemaAtom& atom, std::span<const ObjId> binding) {
    std::vector<ObjId> args;
    for (const Term& t : atom.args) args.push_back(resolve_term(t, binding));
    return Fact(atom.pred, std::span<const ObjId>(args));
}

void RelationalMDP::ground_schema(std::uint16_t schema_index,
                                  const std::vector<std::vector<ObjId>>& candidates) {
    const ActionSchema& schema = schemas_[schema_index];
    std::vector<ObjId> binding(schema.params.size(), 0);

    auto eq_holds = [&](const EqualityConstraint& eq) {
        ObjId a = resolve_term(eq.lhs, binding);
        ObjId b = resolve_term(eq.rhs, binding);
        return eq.negated ? a != b : a == b;
    };

    auto emit = [&]() {
        for (const EqualityConstraint& eq : schema.equalities)
            if (!eq_holds(eq)) return;
        Grounded g;
        g.action = GroundAction(schema_index, std::span<const ObjId>(binding));
        g.cost = schema.cost;
        std::vector<Fact> pos, neg;
        for (const SchemaLiteral& lit : schema.precondition)
            (lit.negated ? neg : pos).push_back(resolve_atom(lit.atom, binding));
        std::sort(pos.begin(), pos.end());
        pos.erase(std::unique(pos.begin(), pos.end()), pos.end());
        std::sort(neg.begin(), neg.end());
        neg.erase(std::unique(neg.begin(), neg.end()), neg.end());
        g.precond_pos = std::move(pos);
        g.precond_neg = std::move(neg);
        for (const SchemaOutcome& o : schema.outcomes) {
            GroundedOutcome go;
            go.probability = o.probability;
            for (const SchemaAtom& a : o.add) go.add.push_back(resolve_atom(a, binding));
            for (const SchemaAtom& a : o.del) go.del.push_back(resolve_atom(a, binding));
            std::sort(go.add.begin(), go.add.end());
            std::sort(go.del.begin(), go.del.end());
            g.outcomes.push_back(std::move(go));
        }
        grounded_.push_back(std::move(g));
    };

    // Nested enumeration in candidate (object id) order keeps the grounded
    // list lexicographically sorted.
    std::function<void(std::size_t)> rec = [&](std::size_t depth) {
        if (depth == binding.size()) {
            emit();
            return;
        }
        for (ObjId o : candidates[depth]) {
            binding[depth] = o;
            rec(depth + 1);
        }
    };
    rec(0);
}

RelState RelationalMDP::sample_initial(Rng& rng) const {
    if (!initial_sampler_) throw ConfigError("model has no initial problem sampler");
    return initial_sampler_(rng);
}

std::shared_ptr<RelationalMDP> RelationalMDP::with_initial_sampler(
    std::function<RelState(Rng&)> sampler) const {
    auto copy = std::make_shared<RelationalMDP>(*this);
    copy->initial_sampler_ = std::move(sampler);
    return copy;
}

bool RelationalMDP::is_goal_state(const RelState& s) const {
    for (const Fact& gf : s.goal) {
        const PredicateDecl& d = predicates_[gf.pred()];
        if (d.kind != PredKind::Goal)
            throw EvaluationError("non-goal fact stored in goal set: " + fact_to_string(gf));
        if (!s.world.contains(Fact(d.world, gf.args()))) return false;
    }
    return true;
}

FactSet RelationalMDP::comparison_facts(const RelState& s) const {
    std::vector<Fact> out;
    for (const Fact& gf : s.goal) {
        const PredicateDecl& d = predicates_[gf.pred()];
        if (s.world.contains(Fact(d.world, gf.args())))
            out.emplace_back(predicates_[d.world].comparison, gf.args());
    }
    return FactSet::from_unsorted(std::move(out));
}

bool RelationalMDP::is_legal(const RelState& s, const GroundAction& a) const {
    const Grounded& g = grounded_data(a);
    return s.world.contains_all(g.precond_pos) && s.world.contains_none(g.precond_neg);
}

std::vector<GroundAction> RelationalMDP::legal_actions(const RelState& s) const {
    std::vector<GroundAction> out;
    for (const Grounded& g : grounded_)
        if (s.world.contains_all(g.precond_pos) && s.world.contains_none(g.precond_neg))
            out.push_back(g.action);
    return out;
}

const RelationalMDP::Grounded& RelationalMDP::grounded_data(const GroundAction& a) const {
    auto it = std::lower_bound(grounded_.begin(), grounded_.end(), a,
                               [](const Grounded& g, const GroundAction& key) { return g.action < key; });
    if (it == grounded_.end() || !(it->action == a))
        throw EvaluationError("unknown ground action: " + action_to_string(a));
    return *it;
}

std::pair<RelState, double> RelationalMDP::step(const RelState& s, const GroundAction& a,
                                                Rng& rng) const {
    if (is_goal_state(s)) return {s, 0.0};
    const Grounded& g = grounded_data(a);
    if (!(s.world.contains_all(g.precond_pos) && s.world.contains_none(g.precond_neg)))
        return {s, -g.cost};
    const GroundedOutcome* chosen = &g.outcomes.back();
    if (g.outcomes.size() > 1) {
        double u = rng.uniform01();
        double cum = 0;
        for (const GroundedOutcome& o : g.outcomes) {
            cum += o.probability;
            if (u < cum) {
                chosen = &o;
                break;
            }
        }
    }
    RelState next;
    next.world = s.world;
    next.world.apply(chosen->del, chosen->add);
    next.goal = s.goal;
    return {std::move(next), -g.cost};
}

RelState RelationalMDP::world_step(const RelState& s, const GroundAction& a, Rng& rng) const {
    const Grounded& g = grounded_data(a);
    if (!(s.world.contains_all(g.precond_pos) && s.world.contains_none(g.precond_neg))) return s;
    const GroundedOutcome* chosen = &g.outcomes.back();
    if (g.outcomes.size() > 1) {
        double u = rng.uniform01();
        double cum = 0;
        for (const GroundedOutcome& o : g.outcomes) {
            cum += o.probability;
            if (u < cum) {
                chosen = &o;
                break;
            }
        }
    }
    RelState next;
    next.world = s.world;
    next.world.apply(chosen->del, chosen->add);
    next.goal = s.goal;
    return next;
}

double RelationalMDP::action_cost(const GroundAction& a) const { return grounded_data(a).cost; }

std::optional<ObjId> RelationalMDP::find_object(std::string_view name) const {
    auto it = object_ids_.find(std::string(name));
    if (it == object_ids_.end()) return std::nullopt;
    return it->second;
}

std::string RelationalMDP::fact_to_string(const Fact& f) const {
    std::string out = predicates_[f.pred()].name;
    if (f.arity() == 0) return out;
    out += '(';
    for (int i = 0; i < f.arity(); ++i) {
        if (i) out += ',';
        out += objects_[f.arg(i)];
    }
    out += ')';
    return out;
}

std::string RelationalMDP::action_to_string(const GroundAction& a) const {
    std::string out = schemas_[a.schema()].name;
    if (a.arity() == 0) return out;
    out += '(';
    for (int i = 0; i < a.arity(); ++i) {
        if (i) out += ',';
        out += objects_[a.arg(i)];
    }
    out += ')';
    return out;
}

namespace {

// "name(a,b)" or bare "name" -> (name, args); throws on malformed text.
std::pair<std::string, std::vector<std::string>> split_application(std::string_view text) {
    auto strip = [](std::string_view v) {
        while (!v.empty() && (v.front() == ' ' || v.front() == '\t')) v.remove_prefix(1);
        while (!v.empty() && (v.back() == ' ' || v.back() == '\t')) v.remove_suffix(1);
        return v;
    };
    text = strip(text);
    auto open = text.find('(');
    if (open == std::string_view::npos) return {std::string(text), {}};
    if (text.back() != ')') throw Error("malformed application: " + std::string(text));
    std::string name(strip(text.substr(0, open)));
    std::string_view inner = text.substr(open + 1, text.size() - open - 2);
    std::vector<std::string> args;
    std::size_t start = 0;
    if (!strip(inner).empty()) {
        for (std::size_t i = 0; i <= inner.size(); ++i) {
            if (i == inner.size() || inner[i] == ',') {
                args.emplace_back(strip(inner.substr(start, i - start)));
                start = i + 1;
            }
        }
    }
    return {std::move(name), std::move(args)};
}

} // namespace

Fact RelationalMDP::parse_fact(std::string_view text) const {
    auto [name, arg_names] = split_application(text);
    auto pred = predicates_.find(name);
    if (!pred) throw Error("unknown predicate: " + name);
    std::vector<ObjId> args;
    for (const std::string& a : arg_names) {
        auto o = find_object(a);
        if (!o) throw Error("unknown object: " + a);
        args.push_back(*o);
    }
    if (args.size() != predicates_[*pred].arity)
        throw Error("arity mismatch for predicate: " + name);
    return Fact(*pred, std::span<const ObjId>(args));
}

GroundAction RelationalMDP::parse_action(std::string_view text) const {
    auto [name, arg_names] = split_application(text);
    std::uint16_t schema = 0;
    bool found = false;
    for (std::uint16_t i = 0; i < schemas_.size(); ++i)
        if (schemas_[i].name == name) {
            schema = i;
            found = true;
        }
    if (!found) throw Error("unknown action: " + name);
    std::vector<ObjId> args;
    for (const std::string& a : arg_names) {
        auto o = find_object(a);
        if (!o) throw Error("unknown object: " + a);
        args.push_back(*o);
    }
    if (args.size() != schemas_[schema].params.size())
        throw Error("arity mismatch for action: " + name);
    return GroundAction(schema, std::span<const ObjId>(args));
}

} // namespace relplan
