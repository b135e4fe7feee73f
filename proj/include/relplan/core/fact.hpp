#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "relplan/core/error.hpp"

namespace relplan {

using PredId = std::uint16_t;
using ObjId = std::uint16_t;

inline constexpr PredId kNoPred = 0xFFFF;
inline constexpr int kMaxPredArity = 4;
inline constexpr int kMaxActionArity = 6;

enum class PredKind : std::uint8_t { World, Goal, Comparison };

/// A predicate declaration. World predicates carry links to their derived
/// goal ('g' prefix) and comparison ('c' prefix) predicates; derived
/// predicates link back to their world predicate.
struct PredicateDecl {
    std::string name;
    std::uint8_t arity = 0;
    PredKind kind = PredKind::World;
    PredId world = kNoPred;      // for Goal/Comparison: the base predicate
    PredId goal = kNoPred;       // for World: the derived goal predicate
    PredId comparison = kNoPred; // for World: the derived comparison predicate
    bool is_type = false;        // unary predicate compiled from a type
};

/// Immutable-after-build table of predicate declarations with name lookup.
class PredicateTable {
public:
    PredicateTable() = default;

    PredId add(PredicateDecl decl) {
        if (by_name_.count(decl.name))
            throw DeclarationError("duplicate predicate declaration: " + decl.name);
        PredId id = static_cast<PredId>(decls_.size());
        by_name_.emplace(decl.name, id);
        decls_.push_back(std::move(decl));
        return id;
    }

    PredId add_world(std::string name, int arity, bool is_type = false) {
        PredicateDecl d;
        d.name = std::move(name);
        d.arity = static_cast<std::uint8_t>(arity);
        d.kind = PredKind::World;
        d.is_type = is_type;
        return add(std::move(d));
    }

    std::optional<PredId> find(std::string_view name) const {
        auto it = by_name_.find(std::string(name));
        if (it == by_name_.end()) return std::nullopt;
        return it->second;
    }

    const PredicateDecl& operator[](PredId id) const { return decls_[id]; }
    std::size_t size() const { return decls_.size(); }

    auto begin() const { return decls_.begin(); }
    auto end() const { return decls_.end(); }

private:
    std::vector<PredicateDecl> decls_;
    std::map<std::string, PredId> by_name_;
};

/// For every world predicate p, derive the goal predicate gp and the
/// comparison predicate cp. The result contains exactly three declarations
/// per input declaration, with arities preserved. Collisions between a
/// derived name and an existing world name are declaration errors.
PredicateTable derive_goal_schema(const PredicateTable& world_predicates);

/// A ground fact: a predicate applied to objects. Total order is
/// (predicate id, args lexicographic); arity is fixed by the predicate.
class Fact {
public:
    Fact() = default;
    Fact(PredId pred, std::span<const ObjId> args) : pred_(pred) {
        if (args.size() > kMaxPredArity)
            throw DeclarationError("fact arity above the supported maximum of " +
                                   std::to_string(kMaxPredArity));
        arity_ = static_cast<std::uint8_t>(args.size());
        args_.fill(0);
        for (std::size_t i = 0; i < args.size(); ++i) args_[i] = args[i];
    }
    Fact(PredId pred, std::initializer_list<ObjId> args)
        : Fact(pred, std::span<const ObjId>(args.begin(), args.size())) {}

    PredId pred() const { return pred_; }
    int arity() const { return arity_; }
    ObjId arg(int i) const { return args_[static_cast<std::size_t>(i)]; }
    std::span<const ObjId> args() const { return {args_.data(), arity_}; }

    friend bool operator==(const Fact& a, const Fact& b) {
        return a.pred_ == b.pred_ && a.arity_ == b.arity_ && a.args_ == b.args_;
    }
    friend bool operator<(const Fact& a, const Fact& b) {
        if (a.pred_ != b.pred_) return a.pred_ < b.pred_;
        return a.args_ < b.args_;
    }

    std::uint64_t hash_key() const {
        std::uint64_t h = pred_;
        for (int i = 0; i < arity_; ++i) h = h * 0x100000001B3ull + args_[static_cast<std::size_t>(i)];
        return h;
    }

private:
    PredId pred_ = kNoPred;
    std::uint8_t arity_ = 0;
    std::array<ObjId, kMaxPredArity> args_{};
};

/// A set of facts with value semantics, stored sorted and duplicate-free.
class FactSet {
public:
    FactSet() = default;

    static FactSet from_unsorted(std::vector<Fact> facts);

    bool contains(const Fact& f) const;
    void insert(const Fact& f);
    void erase(const Fact& f);

    /// facts := (facts \ del) ∪ add. Inputs need not be sorted.
    void apply(std::span<const Fact> del, std::span<const Fact> add);

    bool contains_all(std::span<const Fact> facts) const;
    bool contains_none(std::span<const Fact> facts) const;

    std::size_t size() const { return facts_.size(); }
    bool empty() const { return facts_.empty(); }
    auto begin() const { return facts_.begin(); }
    auto end() const { return facts_.end(); }
    const std::vector<Fact>& items() const { return facts_; }

    friend bool operator==(const FactSet&, const FactSet&) = default;

    std::uint64_t hash() const {
        std::uint64_t h = 0xcbf29ce484222325ull;
        for (const Fact& f : facts_) h = (h ^ f.hash_key()) * 0x100000001B3ull;
        return h;
    }

private:
    std::vector<Fact> facts_; // sorted, unique
};

/// An MDP state: current world facts plus the (immutable) goal facts.
/// Comparison facts are derived on demand and never stored.
struct RelState {
    FactSet world;
    FactSet goal;

    friend bool operator==(const RelState&, const RelState&) = default;
};

struct RelStateHash {
    std::size_t operator()(const RelState& s) const {
        return static_cast<std::size_t>(s.world.hash() * 0x9E3779B97F4A7C15ull ^ s.goal.hash());
    }
};

} // namespace relplan
