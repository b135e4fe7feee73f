#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "relplan/core/mdp.hpp"
#include "relplan/taxonomy/expr.hpp"

namespace relplan {

/// Bitset over the object universe of one model.
class ObjectSet {
public:
    ObjectSet() = default;
    explicit ObjectSet(std::size_t n) : n_(n), w_((n + 63) / 64, 0) {}

    std::size_t universe_size() const { return n_; }
    void set(std::size_t i) { w_[i >> 6] |= (1ull << (i & 63)); }
    void reset(std::size_t i) { w_[i >> 6] &= ~(1ull << (i & 63)); }
    bool test(std::size_t i) const { return (w_[i >> 6] >> (i & 63)) & 1; }

    ObjectSet& operator|=(const ObjectSet& o) {
        for (std::size_t i = 0; i < w_.size(); ++i) w_[i] |= o.w_[i];
        return *this;
    }
    ObjectSet& operator&=(const ObjectSet& o) {
        for (std::size_t i = 0; i < w_.size(); ++i) w_[i] &= o.w_[i];
        return *this;
    }
    void complement() {
        for (auto& word : w_) word = ~word;
        mask_tail();
    }
    void fill() {
        for (auto& word : w_) word = ~0ull;
        mask_tail();
    }
    bool any() const {
        for (auto word : w_)
            if (word) return true;
        return false;
    }
    std::size_t count() const {
        std::size_t c = 0;
        for (auto word : w_) c += static_cast<std::size_t>(__builtin_popcountll(word));
        return c;
    }
    friend bool operator==(const ObjectSet&, const ObjectSet&) = default;

    template <class Fn> void for_each(Fn&& fn) const {
        for (std::size_t wi = 0; wi < w_.size(); ++wi) {
            std::uint64_t word = w_[wi];
            while (word) {
                int bit = __builtin_ctzll(word);
                fn(wi * 64 + static_cast<std::size_t>(bit));
                word &= word - 1;
            }
        }
    }

private:
    void mask_tail() {
        if (n_ % 64 && !w_.empty()) w_.back() &= (~0ull >> (64 - (n_ % 64)));
    }
    std::size_t n_ = 0;
    std::vector<std::uint64_t> w_;
};

/// Adjacency view of a relation: rows[o] = successors of o.
struct Relation {
    std::vector<ObjectSet> rows;
};

/// Per-(model, state) interpretation context with memoization. Unary
/// extensions and relation adjacencies are cached per predicate; relation
/// and variable-free class expressions are cached per AST node, so a rule
/// evaluated for many candidate argument tuples pays for its expressions
/// once. Contexts are cheap to create and worker-local.
class InterpContext {
public:
    InterpContext(const RelationalMDP& model, const RelState& state);

    const RelationalMDP& model() const { return *model_; }
    const RelState& state() const { return *state_; }
    std::size_t universe_size() const { return n_; }

    const ObjectSet& unary_extension(PredId p);
    const Relation& relation(const RelExprPtr& r);

private:
    friend ObjectSet interpret_class(const ClassExprPtr&, InterpContext&, std::span<const ObjId>);
    const RelationalMDP* model_;
    const RelState* state_;
    std::size_t n_;
    std::optional<FactSet> comparison_; // built on first comparison lookup
    std::unordered_map<PredId, ObjectSet> unary_;
    // Caches hold shared ownership of their key nodes; a raw-pointer key
    // could alias a freed node whose address was reused.
    std::unordered_map<RelExprPtr, Relation> rels_;
    std::unordered_map<ClassExprPtr, ObjectSet> classes_; // var-free nodes
};

/// Set of object pairs denoted by a relation expression in a state.
/// Primitive relations read facts (comparison relations are derived);
/// Inverse flips pairs; Star is the reflexive-transitive closure.
const Relation& interpret_rel(const RelExprPtr& r, InterpContext& ctx);

/// Set of objects denoted by a class expression under an argument binding.
/// Var(i) with i outside the binding raises an evaluation error.
ObjectSet interpret_class(const ClassExprPtr& e, InterpContext& ctx, std::span<const ObjId> binding);

/// True iff every literal (x_i ∈ C) of the rule holds for the action's
/// argument tuple. The action's schema must equal the rule's action type.
bool rule_allows(const Rule& rule, InterpContext& ctx, const GroundAction& action);

/// π[L](s): scan rules in order over the legal actions; the first rule
/// allowing at least one legal action selects the least such action. If no
/// rule fires, the least legal action; if none is legal, nothing.
std::optional<GroundAction> select_action(const DecisionList& list, const RelationalMDP& model,
                                          const RelState& state);

/// Same, over a precomputed (ordered) legal-action list.
std::optional<GroundAction> select_action(const DecisionList& list, InterpContext& ctx,
                                          std::span<const GroundAction> legal);

} // namespace relplan
