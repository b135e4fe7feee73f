#include "relplan/pddl/parser.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace relplan {

namespace {

const std::set<std::string> kSupportedRequirements = {
    ":strips", ":typing", ":equality", ":negative-preconditions", ":probabilistic-effects"};

double parse_number(const Sexpr& s) {
    if (s.kind != Sexpr::Kind::Atom) throw ParseError("expected a number", s.span, "a number");
    try {
        std::size_t used = 0;
        double v = std::stod(s.atom, &used);
        if (used != s.atom.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw ParseError("malformed number '" + s.atom + "'", s.span, "a number");
    }
}

// Typed list: names optionally followed by "- type" groups.
std::vector<AstTypedName> parse_typed_list(const Sexpr& list, bool variables) {
    std::vector<AstTypedName> out;
    std::vector<std::size_t> pending;
    for (std::size_t i = 0; i < list.items.size(); ++i) {
        const Sexpr& item = list.items[i];
        if (item.kind != Sexpr::Kind::Atom)
            throw ParseError("expected a name in typed list", item.span, "an identifier");
        if (item.atom == "-") {
            if (i + 1 >= list.items.size() || list.items[i + 1].kind != Sexpr::Kind::Atom)
                throw ParseError("dangling '-' in typed list", item.span, "a type name");
            const std::string& type = list.items[i + 1].atom;
            for (std::size_t idx : pending) out[idx].type = type;
            pending.clear();
            ++i;
            continue;
        }
        if (variables && item.atom.front() != '?')
            throw ParseError("expected a '?variable'", item.span, "a ?variable");
        if (!variables && item.atom.front() == '?')
            throw ParseError("unexpected variable in object list", item.span, "an object name");
        AstTypedName tn;
        tn.name = variables ? item.atom.substr(1) : item.atom;
        tn.span = item.span;
        pending.push_back(out.size());
        out.push_back(std::move(tn));
    }
    return out;
}

AstAtom parse_atom(const Sexpr& s) {
    if (s.kind != Sexpr::Kind::List || s.items.empty() ||
        s.items.front().kind != Sexpr::Kind::Atom)
        throw ParseError("expected an atom '(pred args...)'", s.span, "a predicate application");
    AstAtom atom;
    atom.pred = s.items.front().atom;
    atom.span = s.span;
    for (std::size_t i = 1; i < s.items.size(); ++i) {
        const Sexpr& arg = s.items[i];
        if (arg.kind != Sexpr::Kind::Atom)
            throw ParseError("expected a term", arg.span, "an object or ?variable");
        AstTerm t;
        t.is_variable = arg.atom.front() == '?';
        t.name = t.is_variable ? arg.atom.substr(1) : arg.atom;
        t.span = arg.span;
        atom.args.push_back(std::move(t));
    }
    return atom;
}

std::vector<AstLiteral> parse_literal_conjunction(const Sexpr& s) {
    std::vector<AstLiteral> out;
    auto parse_literal = [&](const Sexpr& lit) {
        if (lit.head_is("not")) {
            if (lit.items.size() != 2)
                throw ParseError("'not' takes exactly one atom", lit.span);
            out.push_back(AstLiteral{parse_atom(lit.items[1]), true});
        } else {
            out.push_back(AstLiteral{parse_atom(lit), false});
        }
    };
    if (s.head_is("and")) {
        for (std::size_t i = 1; i < s.items.size(); ++i) parse_literal(s.items[i]);
    } else if (s.kind == Sexpr::Kind::List && s.items.empty()) {
        // () — empty conjunction
    } else {
        parse_literal(s);
    }
    return out;
}

std::vector<AstOutcome> parse_effect(const Sexpr& s) {
    if (s.head_is("probabilistic")) {
        std::vector<AstOutcome> outcomes;
        if ((s.items.size() - 1) % 2 != 0)
            throw ParseError("'probabilistic' takes probability/effect pairs", s.span);
        double total = 0;
        for (std::size_t i = 1; i + 1 < s.items.size(); i += 2) {
            AstOutcome o;
            o.probability = parse_number(s.items[i]);
            if (o.probability < 0 || o.probability > 1)
                throw ParseError("outcome probability out of [0,1]", s.items[i].span);
            if (s.items[i + 1].head_is("probabilistic"))
                throw ParseError("nested 'probabilistic' effects are not supported",
                                 s.items[i + 1].span);
            o.effects = parse_literal_conjunction(s.items[i + 1]);
            o.span = s.items[i].span;
            total += o.probability;
            outcomes.push_back(std::move(o));
        }
        if (std::abs(total - 1.0) > 1e-6)
            throw ParseError("outcome probabilities sum to " + std::to_string(total), s.span,
                             "probabilities summing to 1");
        return outcomes;
    }
    AstOutcome o;
    o.probability = 1.0;
    o.effects = parse_literal_conjunction(s);
    o.span = s.span;
    return {o};
}

struct DomainSymbols {
    std::map<std::string, const AstPredicate*> predicates;
    std::map<std::string, std::string> type_parent; // type -> parent ("" = object)
    std::set<std::string> constants;
};

void validate_atom(const AstAtom& atom, const DomainSymbols& sym,
                   const std::map<std::string, std::string>& param_types, bool allow_equality) {
    if (atom.pred == "=") {
        if (!allow_equality) throw ParseError("'=' is only allowed in preconditions", atom.span);
        if (atom.args.size() != 2) throw ParseError("'=' takes two terms", atom.span);
    } else {
        auto it = sym.predicates.find(atom.pred);
        if (it == sym.predicates.end())
            throw ParseError("undeclared predicate '" + atom.pred + "'", atom.span,
                             "a declared predicate");
        if (it->second->param_types.size() != atom.args.size())
            throw ParseError("predicate '" + atom.pred + "' expects " +
                                 std::to_string(it->second->param_types.size()) + " arguments",
                             atom.span);
    }
    for (const AstTerm& t : atom.args) {
        if (t.is_variable) {
            if (!param_types.count(t.name))
                throw ParseError("unbound variable '?" + t.name + "'", t.span,
                                 "an action parameter");
        } else if (!sym.constants.count(t.name)) {
            throw ParseError("unknown constant '" + t.name + "'", t.span, "a declared constant");
        }
    }
}

} // namespace

DomainAst parse_domain(std::string_view text) {
    Sexpr root = parse_sexpr(text);
    if (!root.head_is("define") || root.items.size() < 2 || !root.items[1].head_is("domain") ||
        root.items[1].items.size() != 2 || root.items[1].items[1].kind != Sexpr::Kind::Atom)
        throw ParseError("expected (define (domain NAME) ...)", root.span);

    DomainAst domain;
    domain.name = root.items[1].items[1].atom;
    domain.span = root.span;

    for (std::size_t i = 2; i < root.items.size(); ++i) {
        const Sexpr& section = root.items[i];
        if (section.head_is(":requirements")) {
            for (std::size_t k = 1; k < section.items.size(); ++k) {
                const Sexpr& req = section.items[k];
                if (req.kind != Sexpr::Kind::Atom || !kSupportedRequirements.count(req.atom))
                    throw ParseError("unsupported requirement '" +
                                         (req.kind == Sexpr::Kind::Atom ? req.atom : "?") + "'",
                                     req.span);
                domain.requirements.push_back(req.atom);
            }
        } else if (section.head_is(":types")) {
            Sexpr body = section;
            body.items.erase(body.items.begin());
            for (AstTypedName& t : parse_typed_list(body, false)) {
                if (t.type == "object") t.type.clear();
                domain.types.push_back(std::move(t));
            }
        } else if (section.head_is(":constants")) {
            Sexpr body = section;
            body.items.erase(body.items.begin());
            domain.constants = parse_typed_list(body, false);
        } else if (section.head_is(":predicates")) {
            for (std::size_t k = 1; k < section.items.size(); ++k) {
                const Sexpr& p = section.items[k];
                if (p.kind != Sexpr::Kind::List || p.items.empty() ||
                    p.items.front().kind != Sexpr::Kind::Atom)
                    throw ParseError("expected a predicate declaration", p.span,
                                     "(name ?args...)");
                AstPredicate pred;
                pred.name = p.items.front().atom;
                pred.span = p.span;
                Sexpr params = p;
                params.items.erase(params.items.begin());
                for (const AstTypedName& v : parse_typed_list(params, true))
                    pred.param_types.push_back(v.type);
                domain.predicates.push_back(std::move(pred));
            }
        } else if (section.head_is(":action")) {
            if (section.items.size() < 2 || section.items[1].kind != Sexpr::Kind::Atom)
                throw ParseError("expected an action name", section.span, "an identifier");
            AstAction action;
            action.name = section.items[1].atom;
            action.span = section.span;
            bool saw_effect = false;
            for (std::size_t k = 2; k < section.items.size(); ++k) {
                const Sexpr& key = section.items[k];
                if (key.kind != Sexpr::Kind::Atom || k + 1 >= section.items.size())
                    throw ParseError("expected :keyword followed by a value", key.span);
                const Sexpr& value = section.items[++k];
                if (key.atom == ":parameters") {
                    if (value.kind != Sexpr::Kind::List)
                        throw ParseError("expected a parameter list", value.span, "(?x ...)");
                    action.params = parse_typed_list(value, true);
                } else if (key.atom == ":precondition") {
                    action.precondition = parse_literal_conjunction(value);
                } else if (key.atom == ":effect") {
                    action.outcomes = parse_effect(value);
                    saw_effect = true;
                } else if (key.atom == ":cost") {
                    action.cost = parse_number(value);
                    if (action.cost < 0) throw ParseError("negative action cost", value.span);
                } else {
                    throw ParseError("unknown action keyword '" + key.atom + "'", key.span,
                                     ":parameters, :precondition, :effect or :cost");
                }
            }
            if (!saw_effect) throw ParseError("action without :effect", section.span);
            domain.actions.push_back(std::move(action));
        } else {
            throw ParseError("unknown domain section", section.span,
                             ":requirements, :types, :constants, :predicates or :action");
        }
    }

    // Resolve declared names.
    DomainSymbols sym;
    std::set<std::string> type_names;
    for (const AstTypedName& t : domain.types) {
        if (!type_names.insert(t.name).second)
            throw ParseError("duplicate type '" + t.name + "'", t.span);
        sym.type_parent[t.name] = t.type;
    }
    for (const AstTypedName& t : domain.types)
        if (!t.type.empty() && !type_names.count(t.type))
            throw ParseError("undeclared parent type '" + t.type + "'", t.span);
    for (const AstPredicate& p : domain.predicates) {
        if (sym.predicates.count(p.name))
            throw ParseError("duplicate predicate '" + p.name + "'", p.span);
        if (type_names.count(p.name))
            throw ParseError("predicate '" + p.name + "' collides with a type name", p.span);
        sym.predicates.emplace(p.name, &p);
        for (const std::string& t : p.param_types)
            if (!t.empty() && !type_names.count(t))
                throw ParseError("undeclared type '" + t + "' in predicate '" + p.name + "'",
                                 p.span);
    }
    for (const AstTypedName& c : domain.constants) {
        if (!c.type.empty() && !type_names.count(c.type))
            throw ParseError("undeclared type '" + c.type + "' for constant", c.span);
        sym.constants.insert(c.name);
    }
    std::set<std::string> action_names;
    for (const AstAction& a : domain.actions) {
        if (!action_names.insert(a.name).second)
            throw ParseError("duplicate action '" + a.name + "'", a.span);
        std::map<std::string, std::string> params;
        for (const AstTypedName& p : a.params) {
            if (params.count(p.name))
                throw ParseError("duplicate parameter '?" + p.name + "'", p.span);
            if (!p.type.empty() && !type_names.count(p.type))
                throw ParseError("undeclared type '" + p.type + "'", p.span);
            params.emplace(p.name, p.type);
        }
        for (const AstLiteral& lit : a.precondition) validate_atom(lit.atom, sym, params, true);
        for (const AstOutcome& o : a.outcomes)
            for (const AstLiteral& lit : o.effects) {
                validate_atom(lit.atom, sym, params, false);
                if (lit.atom.pred == "=")
                    throw ParseError("'=' cannot appear in effects", lit.atom.span);
            }
    }
    return domain;
}

ProblemAst parse_problem_ast(std::string_view text, const DomainAst& domain) {
    Sexpr root = parse_sexpr(text);
    if (!root.head_is("define") || root.items.size() < 2 || !root.items[1].head_is("problem") ||
        root.items[1].items.size() != 2)
        throw ParseError("expected (define (problem NAME) ...)", root.span);

    ProblemAst problem;
    problem.name = root.items[1].items[1].atom;
    problem.span = root.span;

    for (std::size_t i = 2; i < root.items.size(); ++i) {
        const Sexpr& section = root.items[i];
        if (section.head_is(":domain")) {
            if (section.items.size() != 2 || section.items[1].kind != Sexpr::Kind::Atom)
                throw ParseError("expected (:domain NAME)", section.span);
            problem.domain_name = section.items[1].atom;
        } else if (section.head_is(":objects")) {
            Sexpr body = section;
            body.items.erase(body.items.begin());
            problem.objects = parse_typed_list(body, false);
        } else if (section.head_is(":init")) {
            for (std::size_t k = 1; k < section.items.size(); ++k)
                problem.init.push_back(parse_atom(section.items[k]));
        } else if (section.head_is(":goal")) {
            if (section.items.size() != 2)
                throw ParseError("expected (:goal CONJUNCTION)", section.span);
            for (const AstLiteral& lit : parse_literal_conjunction(section.items[1])) {
                if (lit.negated)
                    throw ParseError("goal literals must be positive", lit.atom.span);
                problem.goal.push_back(lit.atom);
            }
        } else {
            throw ParseError("unknown problem section", section.span,
                             ":domain, :objects, :init or :goal");
        }
    }

    if (!problem.domain_name.empty() && problem.domain_name != domain.name)
        throw ParseError("problem references domain '" + problem.domain_name + "'", problem.span,
                         "domain '" + domain.name + "'");

    // Resolution checks against the domain.
    std::set<std::string> type_names;
    for (const AstTypedName& t : domain.types) type_names.insert(t.name);
    std::set<std::string> object_names;
    for (const AstTypedName& c : domain.constants) object_names.insert(c.name);
    for (const AstTypedName& o : problem.objects) {
        if (!object_names.insert(o.name).second)
            throw ParseError("duplicate object '" + o.name + "'", o.span);
        if (!o.type.empty() && o.type != "object" && !type_names.count(o.type))
            throw ParseError("undeclared type '" + o.type + "'", o.span);
    }
    std::map<std::string, std::size_t> pred_arity;
    for (const AstPredicate& p : domain.predicates) pred_arity[p.name] = p.param_types.size();
    for (const AstTypedName& t : domain.types) pred_arity[t.name] = 1; // type membership facts

    auto check_ground_atom = [&](const AstAtom& atom) {
        auto it = pred_arity.find(atom.pred);
        if (it == pred_arity.end())
            throw ParseError("undeclared predicate '" + atom.pred + "'", atom.span);
        if (it->second != atom.args.size())
            throw ParseError("predicate '" + atom.pred + "' expects " +
                                 std::to_string(it->second) + " arguments",
                             atom.span);
        for (const AstTerm& t : atom.args) {
            if (t.is_variable)
                throw ParseError("variables are not allowed here", t.span, "an object name");
            if (!object_names.count(t.name))
                throw ParseError("unknown object '" + t.name + "'", t.span, "a declared object");
        }
    };
    for (const AstAtom& a : problem.init) check_ground_atom(a);
    for (const AstAtom& a : problem.goal) check_ground_atom(a);
    return problem;
}

namespace {

struct Lowering {
    PredicateTable world;                     // type predicates + declared predicates
    std::map<std::string, PredId> pred_ids;   // by name
    std::map<std::string, PredId> type_ids;   // type name -> unary predicate
    std::map<std::string, std::string> type_parent;
};

Lowering lower_predicates(const DomainAst& domain) {
    Lowering lo;
    for (const AstTypedName& t : domain.types) {
        lo.type_ids[t.name] = lo.world.add_world(t.name, 1, true);
        lo.type_parent[t.name] = t.type;
    }
    for (const AstPredicate& p : domain.predicates) {
        PredId id = lo.world.add_world(p.name, static_cast<int>(p.param_types.size()));
        lo.pred_ids[p.name] = id;
    }
    for (const auto& [name, id] : lo.type_ids) lo.pred_ids[name] = id;
    return lo;
}

std::vector<ActionSchema> lower_actions(const DomainAst& domain, const Lowering& lo,
                                        const std::map<std::string, ObjId>& constant_ids) {
    std::vector<ActionSchema> schemas;
    for (const AstAction& a : domain.actions) {
        ActionSchema s;
        s.name = a.name;
        s.cost = a.cost;
        std::map<std::string, std::uint16_t> param_index;
        for (const AstTypedName& p : a.params) {
            SchemaParam sp;
            sp.name = p.name;
            sp.type = p.type.empty() ? kNoPred : lo.type_ids.at(p.type);
            param_index[p.name] = static_cast<std::uint16_t>(s.params.size());
            s.params.push_back(std::move(sp));
        }
        auto lower_term = [&](const AstTerm& t) {
            if (t.is_variable) return Term::param(param_index.at(t.name));
            return Term::constant(constant_ids.at(t.name));
        };
        auto lower_atom = [&](const AstAtom& atom) {
            SchemaAtom out;
            out.pred = lo.pred_ids.at(atom.pred);
            for (const AstTerm& t : atom.args) out.args.push_back(lower_term(t));
            return out;
        };
        for (const AstLiteral& lit : a.precondition) {
            if (lit.atom.pred == "=") {
                EqualityConstraint eq;
                eq.lhs = lower_term(lit.atom.args[0]);
                eq.rhs = lower_term(lit.atom.args[1]);
                eq.negated = lit.negated;
                s.equalities.push_back(eq);
            } else {
                s.precondition.push_back(SchemaLiteral{lower_atom(lit.atom), lit.negated});
            }
        }
        for (const AstOutcome& o : a.outcomes) {
            SchemaOutcome so;
            so.probability = o.probability;
            for (const AstLiteral& lit : o.effects)
                (lit.negated ? so.del : so.add).push_back(lower_atom(lit.atom));
            s.outcomes.push_back(std::move(so));
        }
        schemas.push_back(std::move(s));
    }
    return schemas;
}

} // namespace

CompiledProblem compile_problem(const DomainAst& domain, const ProblemAst& problem,
                                MdpOptions options) {
    Lowering lo = lower_predicates(domain);

    // Universe: domain constants first, then problem objects, declared order.
    std::vector<std::string> universe;
    std::map<std::string, ObjId> object_ids;
    std::vector<AstTypedName> all_objects = domain.constants;
    all_objects.insert(all_objects.end(), problem.objects.begin(), problem.objects.end());
    for (const AstTypedName& o : all_objects) {
        object_ids[o.name] = static_cast<ObjId>(universe.size());
        universe.push_back(o.name);
    }

    // Static type-membership facts (declared type and its ancestors).
    std::vector<Fact> type_facts;
    for (const AstTypedName& o : all_objects) {
        std::string t = o.type == "object" ? "" : o.type;
        while (!t.empty()) {
            type_facts.emplace_back(lo.type_ids.at(t),
                                    std::initializer_list<ObjId>{object_ids.at(o.name)});
            t = lo.type_parent.at(t);
        }
    }

    std::vector<ActionSchema> schemas = lower_actions(domain, lo, object_ids);

    // Raw state over the full (pre-binarization) predicate table.
    PredicateTable full_before = derive_goal_schema(lo.world);
    std::vector<Fact> world_facts = type_facts;
    for (const AstAtom& a : problem.init) {
        PredId p = lo.pred_ids.at(a.pred);
        std::vector<ObjId> args;
        for (const AstTerm& t : a.args) args.push_back(object_ids.at(t.name));
        world_facts.emplace_back(p, std::span<const ObjId>(args));
        // Init facts over type predicates extend the typed-grounding base.
        if (lo.world[p].is_type) type_facts.emplace_back(p, std::span<const ObjId>(args));
    }
    std::vector<Fact> goal_facts;
    for (const AstAtom& a : problem.goal) {
        PredId p = lo.pred_ids.at(a.pred);
        std::vector<ObjId> args;
        for (const AstTerm& t : a.args) args.push_back(object_ids.at(t.name));
        goal_facts.emplace_back(full_before[p].goal, std::span<const ObjId>(args));
    }
    RelState raw{FactSet::from_unsorted(std::move(world_facts)),
                 FactSet::from_unsorted(std::move(goal_facts))};

    // The model interns tuple objects for the init/goal facts (seed state)
    // and for every ground action's rewritten literals; the universe is
    // fixed once construction finishes.
    auto model = std::make_shared<RelationalMDP>(lo.world, std::move(schemas), universe,
                                                 type_facts, options,
                                                 std::vector<RelState>{std::move(raw)});
    return CompiledProblem{model, model->seed_states().front()};
}

CompiledProblem load_problem(std::string_view domain_text, std::string_view problem_text,
                             MdpOptions options) {
    DomainAst domain = parse_domain(domain_text);
    ProblemAst problem = parse_problem_ast(problem_text, domain);
    return compile_problem(domain, problem, options);
}

std::string render_problem(const RelationalMDP& model, const RelState& state,
                           std::string_view problem_name, std::string_view domain_name) {
    RelState raw = state;
    const BinarizeMap& map = model.binarize_map();
    if (!map.identity) {
        ObjectInterner interner(model.objects());
        raw = reconstruct_state(map, derive_goal_schema(map.before), state, interner);
    }
    std::string out = "(define (problem " + std::string(problem_name) + ")\n  (:domain " +
                      std::string(domain_name) + ")\n  (:objects";
    // Tuple objects never appear in reconstructed facts; list declared ones.
    const std::size_t declared =
        map.identity ? model.objects().size()
                     : std::count_if(model.objects().begin(), model.objects().end(),
                                     [](const std::string& n) { return n.front() != '<'; });
    for (std::size_t o = 0; o < declared; ++o) out += " " + model.objects()[o];
    out += ")\n  (:init";
    auto render_fact = [&](const PredicateDecl& d, const Fact& f) {
        std::string s = " (" + d.name;
        for (int i = 0; i < f.arity(); ++i) s += " " + model.object_name(f.arg(i));
        return s + ")";
    };
    const PredicateTable& before = map.identity ? model.predicates() : derive_goal_schema(map.before);
    for (const Fact& f : raw.world) out += render_fact(before[f.pred()], f);
    out += ")\n  (:goal (and";
    for (const Fact& f : raw.goal) {
        const PredicateDecl& d = before[f.pred()];
        out += render_fact(before[d.world], f); // goal facts by world predicate name
    }
    out += ")))\n";
    return out;
}

} // namespace relplan
