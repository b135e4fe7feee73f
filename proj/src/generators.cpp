#include "relplan/harness/generators.hpp"

#include <algorithm>

#include "relplan/pddl/parser.hpp"

namespace relplan {

namespace {

constexpr std::string_view kBlocksDomain = R"((define (domain blocksworld)
  (:requirements :strips)
  ;; on(x y): block y rests directly on block x.
  (:predicates (on ?x ?y) (on-table ?x) (clear ?x) (holding ?x) (handempty))
  (:action pickup
    :parameters (?x)
    :precondition (and (clear ?x) (on-table ?x) (handempty))
    :effect (and (holding ?x)
                 (not (on-table ?x)) (not (clear ?x)) (not (handempty))))
  (:action putdown
    :parameters (?x)
    :precondition (holding ?x)
    :effect (and (on-table ?x) (clear ?x) (handempty) (not (holding ?x))))
  (:action stack
    :parameters (?x ?y)
    :precondition (and (holding ?x) (clear ?y))
    :effect (and (on ?y ?x) (clear ?x) (handempty)
                 (not (holding ?x)) (not (clear ?y))))
  (:action unstack
    :parameters (?x ?y)
    :precondition (and (on ?y ?x) (clear ?x) (handempty))
    :effect (and (holding ?x) (clear ?y)
                 (not (on ?y ?x)) (not (clear ?x)) (not (handempty))))))";

constexpr std::string_view kGripperDomain = R"((define (domain gripper)
  (:requirements :strips :typing :equality)
  (:types ball room gripper)
  (:predicates (at-robby ?r - room)
               (at ?b - ball ?r - room)
               (free ?g - gripper)
               (carry ?b - ball ?g - gripper))
  (:action move
    :parameters (?from - room ?to - room)
    :precondition (and (at-robby ?from) (not (= ?from ?to)))
    :effect (and (at-robby ?to) (not (at-robby ?from))))
  (:action pick
    :parameters (?b - ball ?r - room ?g - gripper)
    :precondition (and (at ?b ?r) (at-robby ?r) (free ?g))
    :effect (and (carry ?b ?g) (not (at ?b ?r)) (not (free ?g))))
  (:action drop
    :parameters (?b - ball ?r - room ?g - gripper)
    :precondition (and (carry ?b ?g) (at-robby ?r))
    :effect (and (at ?b ?r) (free ?g) (not (carry ?b ?g))))))";

std::string blocks_problem_shell(int n) {
    std::string objs;
    for (int i = 1; i <= n; ++i) objs += " b" + std::to_string(i);
    return "(define (problem blocks-gen) (:domain blocksworld) (:objects" + objs +
           ") (:init) (:goal (and)))";
}

std::string gripper_problem_shell(int balls) {
    std::string objs = " rooma roomb - room";
    for (int i = 1; i <= balls; ++i) objs += " ball" + std::to_string(i);
    objs += " - ball left right - gripper";
    return "(define (problem gripper-gen) (:domain gripper) (:objects" + objs +
           ") (:init) (:goal (and)))";
}

// Random partition of the blocks into towers, bottom-to-top.
std::vector<std::vector<ObjId>> sample_towers(int n, Rng& rng) {
    std::vector<ObjId> order;
    for (int i = 0; i < n; ++i) order.push_back(static_cast<ObjId>(i));
    for (int i = n - 1; i > 0; --i)
        std::swap(order[static_cast<std::size_t>(i)],
                  order[rng.index(static_cast<std::size_t>(i) + 1)]);
    std::vector<std::vector<ObjId>> towers;
    for (ObjId b : order) {
        std::size_t pick = rng.index(towers.size() + 1);
        if (pick == towers.size())
            towers.push_back({b});
        else
            towers[pick].push_back(b);
    }
    return towers;
}

struct BlocksIds {
    PredId on, gon, on_table, gon_table, clear, handempty;
};

RelState sample_blocks_problem(const BlocksIds& ids, int n, Rng& rng) {
    auto tower_facts = [&](const std::vector<std::vector<ObjId>>& towers, bool as_goal) {
        std::vector<Fact> facts;
        const PredId p_on = as_goal ? ids.gon : ids.on;
        const PredId p_table = as_goal ? ids.gon_table : ids.on_table;
        for (const auto& tower : towers) {
            for (std::size_t i = 0; i < tower.size(); ++i) {
                if (i == 0)
                    facts.emplace_back(p_table, std::initializer_list<ObjId>{tower[0]});
                else
                    facts.emplace_back(p_on,
                                       std::initializer_list<ObjId>{tower[i - 1], tower[i]});
            }
            if (!as_goal && !tower.empty())
                facts.emplace_back(ids.clear, std::initializer_list<ObjId>{tower.back()});
        }
        if (!as_goal) facts.emplace_back(ids.handempty, std::initializer_list<ObjId>{});
        return facts;
    };
    RelState s;
    s.world = FactSet::from_unsorted(tower_facts(sample_towers(n, rng), false));
    s.goal = FactSet::from_unsorted(tower_facts(sample_towers(n, rng), true));
    return s;
}

RelState gripper_problem(const RelationalMDP& m, int balls) {
    auto pid = [&](const char* name) { return *m.predicates().find(name); };
    auto oid = [&](const std::string& name) { return *m.find_object(name); };
    std::vector<Fact> world(m.static_facts().begin(), m.static_facts().end());
    world.emplace_back(pid("at-robby"), std::initializer_list<ObjId>{oid("rooma")});
    world.emplace_back(pid("free"), std::initializer_list<ObjId>{oid("left")});
    world.emplace_back(pid("free"), std::initializer_list<ObjId>{oid("right")});
    std::vector<Fact> goal;
    for (int i = 1; i <= balls; ++i) {
        ObjId ball = oid("ball" + std::to_string(i));
        world.emplace_back(pid("at"), std::initializer_list<ObjId>{ball, oid("rooma")});
        goal.emplace_back(m.predicates()[pid("at")].goal,
                          std::initializer_list<ObjId>{ball, oid("roomb")});
    }
    RelState s;
    s.world = FactSet::from_unsorted(std::move(world));
    s.goal = FactSet::from_unsorted(std::move(goal));
    return s;
}

} // namespace

std::string_view builtin_domain_text(std::string_view name) {
    if (name == "blocks" || name == "blocksworld") return kBlocksDomain;
    if (name == "gripper") return kGripperDomain;
    throw ConfigError("unknown built-in domain '" + std::string(name) +
                      "' (shipped generators: blocks, gripper)");
}

BuiltinDomain make_builtin_domain(const GeneratorSpec& spec) {
    if (spec.size < 1) throw ConfigError("generator size must be >= 1");
    BuiltinDomain out;
    if (spec.domain == "blocks" || spec.domain == "blocksworld") {
        out.name = "blocksworld";
        CompiledProblem cp = load_problem(kBlocksDomain, blocks_problem_shell(spec.size));
        out.model = cp.model;
        const auto& table = out.model->predicates();
        BlocksIds ids{*table.find("on"),       *table.find("gon"),   *table.find("on-table"),
                      *table.find("gon-table"), *table.find("clear"), *table.find("handempty")};
        const int n = spec.size;
        out.model->set_initial_sampler(
            [ids, n](Rng& rng) { return sample_blocks_problem(ids, n, rng); });
        out.goal_predicates = {out.model->predicates()[*out.model->predicates().find("on")].goal};
        return out;
    }
    if (spec.domain == "gripper") {
        out.name = "gripper";
        CompiledProblem cp = load_problem(kGripperDomain, gripper_problem_shell(spec.size));
        out.model = cp.model;
        RelState fixed = gripper_problem(*out.model, spec.size);
        out.model->set_initial_sampler([fixed](Rng&) { return fixed; });
        out.goal_predicates = {out.model->predicates()[*out.model->predicates().find("at")].goal};
        return out;
    }
    throw ConfigError("unknown generator '" + spec.domain + "' (shipped: blocks, gripper)");
}

RelState generate_problem(const BuiltinDomain& domain, Rng& rng) {
    return domain.model->sample_initial(rng);
}

} // namespace relplan
