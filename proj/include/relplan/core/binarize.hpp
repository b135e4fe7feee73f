#pragma once

#include <map>
#include <string>
#include <vector>

#include "relplan/core/fact.hpp"
#include "relplan/core/schema.hpp"

namespace relplan {

/// Interns tuple objects created by binarization. Each distinct
/// (world predicate, argument tuple) maps to one fresh object, shared by the
/// world fact and its goal image so that derived comparison facts line up.
class ObjectInterner {
public:
    explicit ObjectInterner(std::vector<std::string> declared)
        : names_(std::move(declared)), declared_count_(names_.size()) {
        for (std::size_t i = 0; i < names_.size(); ++i)
            if (!by_name_.emplace(names_[i], static_cast<ObjId>(i)).second)
                throw DeclarationError("duplicate object name: " + names_[i]);
    }

    ObjId intern_tuple(const std::string& name) {
        auto it = by_name_.find(name);
        if (it != by_name_.end()) return it->second;
        ObjId id = static_cast<ObjId>(names_.size());
        names_.push_back(name);
        by_name_.emplace(name, id);
        return id;
    }

    const std::vector<std::string>& names() const { return names_; }
    std::size_t declared_count() const { return declared_count_; }

private:
    std::vector<std::string> names_;
    std::size_t declared_count_;
    std::map<std::string, ObjId> by_name_;
};

/// Mapping produced by binarize_predicates: each world predicate of arity
/// k >= 3 is replaced by a unary tuple-marker predicate plus k binary
/// projection predicates; lower arities pass through unchanged.
struct BinarizeMap {
    struct Entry {
        PredId original = kNoPred;      // in the `before` table
        PredId marker = kNoPred;        // p_tup/1 in the `after` table
        std::vector<PredId> projections; // p_arg1..p_argk, binary
    };

    PredicateTable before; // world predicates only
    PredicateTable after;  // world predicates only, all arity <= 2
    std::vector<Entry> entries;               // one per binarized predicate
    std::vector<PredId> passthrough;          // after-id per untouched before-id
    bool identity = true;                     // no predicate needed rewriting

    const Entry* entry_for(PredId before_id) const;
    /// after-table id for a before-table predicate that passed through.
    PredId mapped(PredId before_id) const;
};

/// Replace every world predicate of arity >= 3 (up to max_arity) with binary
/// projections, rewriting schema preconditions and effects accordingly.
/// Literals over binarized predicates become marker + projection literals on
/// a tuple term that grounding resolves by interning. Arities above
/// max_arity raise a declaration error.
BinarizeMap binarize_predicates(const PredicateTable& world_predicates,
                                std::vector<ActionSchema>& schemas,
                                int max_arity = kMaxPredArity);

/// Deterministic object name for the tuple standing for pred(args...).
std::string tuple_object_name(const PredicateDecl& pred, std::span<const ObjId> args,
                              const std::vector<std::string>& object_names);

/// Rewrite a state over `before` world predicates into the binarized form,
/// interning tuple objects as needed. Goal facts use the same tuple object
/// as their world counterparts.
RelState binarize_state(const BinarizeMap& map, const PredicateTable& full_after,
                        const RelState& s, ObjectInterner& interner);

/// Inverse of binarize_state on states produced by it.
RelState reconstruct_state(const BinarizeMap& map, const PredicateTable& full_before,
                           const RelState& s, const ObjectInterner& interner);

} // namespace relplan
