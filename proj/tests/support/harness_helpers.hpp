#pragma once

// Hand policies and small relational models used by harness tests.

#include "relplan/harness/generators.hpp"
#include "relplan/pddl/parser.hpp"
#include "relplan/taxonomy/expr.hpp"

namespace relplan::testsupport {

// A correct gripper policy:
//   drop(b, r, g)  when r is b's goal room
//   pick(b, r, g)  when b has an unsatisfied goal
//   move(r1, r2)   when some carried ball belongs in r2
// Everything else falls through to the least legal action.
inline DecisionList gripper_hand_policy(const RelationalMDP& m) {
    auto pid = [&](const char* name) { return *m.predicates().find(name); };
    auto schema_index = [&](const char* name) {
        for (std::uint16_t i = 0; i < m.schemas().size(); ++i)
            if (m.schemas()[i].name == name) return i;
        throw Error(std::string("no schema named ") + name);
    };
    RelExprPtr gat = RelExpr::primitive(pid("gat"));
    RelExprPtr cat = RelExpr::primitive(pid("cat"));
    RelExprPtr carry = RelExpr::primitive(pid("carry"));

    DecisionList list;
    {
        Rule drop;
        drop.action_type = schema_index("drop");
        drop.literals.push_back(
            Literal{0, ClassExpr::rel_apply(RelExpr::inverse(gat), ClassExpr::variable(1))});
        list.rules.push_back(std::move(drop));
    }
    {
        Rule pick;
        pick.action_type = schema_index("pick");
        pick.literals.push_back(
            Literal{0, ClassExpr::rel_apply(RelExpr::inverse(gat), ClassExpr::a_thing())});
        pick.literals.push_back(Literal{
            0, ClassExpr::negation(ClassExpr::rel_apply(RelExpr::inverse(cat), ClassExpr::a_thing()))});
        list.rules.push_back(std::move(pick));
    }
    {
        Rule move;
        move.action_type = schema_index("move");
        move.literals.push_back(Literal{
            1, ClassExpr::rel_apply(gat, ClassExpr::rel_apply(RelExpr::inverse(carry),
                                                              ClassExpr::a_thing()))});
        list.rules.push_back(std::move(move));
    }
    return list;
}

// Line world: positions p1..pk, the agent moves along rightward/leftward
// adjacency facts; the goal asks for a position to be reached.
inline CompiledProblem make_line_world(int k, int goal_position) {
    std::string domain = R"((define (domain line)
      (:requirements :strips)
      (:predicates (at ?p) (right-of ?a ?b) (pos ?p))
      (:action move
        :parameters (?from ?to)
        :precondition (and (at ?from) (right-of ?from ?to))
        :effect (and (at ?to) (not (at ?from))))
      (:action move-back
        :parameters (?from ?to)
        :precondition (and (at ?from) (right-of ?to ?from))
        :effect (and (at ?to) (not (at ?from))))))";
    std::string objects, init;
    for (int i = 1; i <= k; ++i) {
        objects += " p" + std::to_string(i);
        init += " (pos p" + std::to_string(i) + ")";
        if (i < k)
            init += " (right-of p" + std::to_string(i) + " p" + std::to_string(i + 1) + ")";
    }
    init += " (at p1)";
    std::string problem = "(define (problem line-k) (:domain line) (:objects" + objects +
                          ") (:init" + init + ") (:goal (and (at p" +
                          std::to_string(goal_position) + "))))";
    return load_problem(domain, problem);
}

// Blocks-instance validity: every block has exactly one support, supports
// carry at most one block, towers are acyclic, clear/handempty agree with
// the on-facts. Checks the world side and (structurally) the goal side.
inline bool blocks_instance_valid(const RelationalMDP& m, const RelState& s) {
    auto pid = [&](const char* name) { return *m.predicates().find(name); };
    const std::size_t n = m.object_count();
    auto check_side = [&](const FactSet& facts, PredId on, PredId table, bool world_side) {
        std::vector<int> supports(n, 0), load(n, 0);
        std::vector<int> parent(n, -1);
        for (const Fact& f : facts) {
            if (f.pred() == table) supports[f.arg(0)] += 1;
            if (f.pred() == on) {
                supports[f.arg(1)] += 1; // on(x, y): y sits on x
                load[f.arg(0)] += 1;
                parent[f.arg(1)] = f.arg(0);
            }
        }
        for (std::size_t b = 0; b < n; ++b) {
            if (supports[b] != 1) return false;
            if (load[b] > 1) return false;
        }
        // Acyclic: following supports must reach the table.
        for (std::size_t b = 0; b < n; ++b) {
            std::size_t steps = 0;
            int cur = static_cast<int>(b);
            while (cur != -1 && steps <= n) {
                cur = parent[static_cast<std::size_t>(cur)];
                ++steps;
            }
            if (steps > n) return false;
        }
        if (world_side) {
            for (std::size_t b = 0; b < n; ++b) {
                bool clear = facts.contains(Fact(pid("clear"), {static_cast<ObjId>(b)}));
                if (clear != (load[b] == 0)) return false;
            }
            if (!facts.contains(Fact(pid("handempty"), {}))) return false;
        }
        return true;
    };
    return check_side(s.world, pid("on"), pid("on-table"), true) &&
           check_side(s.goal, pid("gon"), pid("gon-table"), false);
}

} // namespace relplan::testsupport
