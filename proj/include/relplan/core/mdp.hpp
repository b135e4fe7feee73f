#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "relplan/core/binarize.hpp"
#include "relplan/core/fact.hpp"
#include "relplan/core/rng.hpp"
#include "relplan/core/schema.hpp"

namespace relplan {

struct MdpOptions {
    bool binarize = true;        // rewrite predicates of arity >= 3
    int max_arity = kMaxPredArity;
    double prob_tolerance = 1e-9;
};

/// A relational MDP compiled from a planning domain: facts, states, ground
/// actions, probabilistic transitions and goal-based reward. The model is
/// immutable after construction and safe to share across workers; states are
/// value-like and each worker owns its own seeded random stream.
class RelationalMDP {
public:
    using State = RelState;
    using Action = GroundAction;

    struct GroundedOutcome {
        double probability = 1.0;
        std::vector<Fact> add; // sorted
        std::vector<Fact> del; // sorted
    };
    struct Grounded {
        GroundAction action;
        std::vector<Fact> precond_pos; // sorted
        std::vector<Fact> precond_neg; // sorted
        std::vector<GroundedOutcome> outcomes;
        double cost = 1.0;
    };

    /// Compile a model. `world_predicates` holds world declarations only
    /// (goal and comparison predicates are derived here); schemas reference
    /// its predicate ids. `static_facts` are facts that no action changes
    /// (e.g. type-membership facts); they drive typed grounding and are
    /// added to states by parsers and generators, not here. `seed_states`
    /// are raw (pre-binarization) states whose tuple objects must join the
    /// universe; their binarized forms are available via seed_states().
    RelationalMDP(const PredicateTable& world_predicates, std::vector<ActionSchema> schemas,
                  std::vector<std::string> objects, std::vector<Fact> static_facts,
                  MdpOptions options = {}, std::vector<RelState> seed_states = {});

    const std::vector<RelState>& seed_states() const { return seed_states_; }

    // --- model accessors ---
    const PredicateTable& predicates() const { return predicates_; }
    const std::vector<ActionSchema>& schemas() const { return schemas_; } // sorted by name
    const std::vector<std::string>& objects() const { return objects_; }
    std::size_t object_count() const { return objects_.size(); }
    const std::vector<Fact>& static_facts() const { return static_facts_; }
    const std::vector<Grounded>& grounded_actions() const { return grounded_; }
    const BinarizeMap& binarize_map() const { return binarize_map_; }

    double discount() const { return discount_; }
    void set_discount(double gamma) { discount_ = gamma; }

    void set_initial_sampler(std::function<RelState(Rng&)> sampler) {
        initial_sampler_ = std::move(sampler);
    }
    bool has_initial_sampler() const { return static_cast<bool>(initial_sampler_); }
    RelState sample_initial(Rng& rng) const;

    /// Copy of this model with a different initial problem distribution.
    std::shared_ptr<RelationalMDP> with_initial_sampler(std::function<RelState(Rng&)> sampler) const;

    // --- state operations ---
    bool is_goal_state(const RelState& s) const;
    bool is_terminal(const RelState& s) const { return is_goal_state(s); }
    FactSet comparison_facts(const RelState& s) const;

    std::vector<GroundAction> legal_actions(const RelState& s) const;
    bool is_legal(const RelState& s, const GroundAction& a) const;

    /// MDP transition: goal states are absorbing with zero reward; illegal
    /// actions are no-ops that still pay the action cost; otherwise one
    /// outcome is sampled and applied. Goal facts never change.
    std::pair<RelState, double> step(const RelState& s, const GroundAction& a, Rng& rng) const;

    /// Raw domain dynamics: applies the action if legal (no goal-state
    /// absorption). Used by the random-walk problem sampler.
    RelState world_step(const RelState& s, const GroundAction& a, Rng& rng) const;

    double action_cost(const GroundAction& a) const;

    // --- naming ---
    std::optional<ObjId> find_object(std::string_view name) const;
    const std::string& object_name(ObjId o) const { return objects_[o]; }
    std::string fact_to_string(const Fact& f) const;
    std::string action_to_string(const GroundAction& a) const;
    /// Parse "pred(a,b)" / "pred" against this model.
    Fact parse_fact(std::string_view text) const;
    /// Parse "name(a,b)" / "name" against this model.
    GroundAction parse_action(std::string_view text) const;

    const Grounded& grounded_data(const GroundAction& a) const;

private:
    void ground_schema(std::uint16_t schema_index, const std::vector<std::vector<ObjId>>& candidates);
    Fact resolve_atom(const SchemaAtom& atom, std::span<const ObjId> binding);
    ObjId resolve_term(const Term& t, std::span<const ObjId> binding);

    PredicateTable predicates_;
    std::vector<ActionSchema> schemas_;
    std::vector<std::string> objects_;
    std::vector<Fact> static_facts_;
    std::vector<Grounded> grounded_; // sorted by action order
    BinarizeMap binarize_map_;
    std::shared_ptr<ObjectInterner> interner_; // read-only after construction
    std::vector<RelState> seed_states_;        // binarized forms of the inputs
    std::map<std::string, ObjId> object_ids_;
    std::function<RelState(Rng&)> initial_sampler_;
    double discount_ = 1.0;
};

} // namespace relplan
