#include "relplan/learn/learner.hpp"

#include <algorithm>
#include <unordered_map>

#include "relplan/taxonomy/interpret.hpp"

namespace relplan {

namespace {

bool ingestible(const TrainingExample& ex, bool drop_uninformative) {
    if (ex.q_estimates.empty()) return false;
    if (!drop_uninformative || ex.q_estimates.size() == 1) return true;
    double lo = ex.q_estimates.front().second, hi = lo;
    for (const auto& [a, v] : ex.q_estimates) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    return hi - lo > 1e-12;
}

} // namespace

FlatTrainingSet FlatTrainingSet::from_trajectories(std::span<const Trajectory> trajectories,
                                                   bool drop_uninformative) {
    FlatTrainingSet out;
    for (const Trajectory& t : trajectories)
        for (const TrainingExample& ex : t.steps)
            if (ingestible(ex, drop_uninformative)) out.examples.push_back(ex);
    return out;
}

FlatTrainingSet FlatTrainingSet::from_examples(std::vector<TrainingExample> examples,
                                               bool drop_uninformative) {
    FlatTrainingSet out;
    for (TrainingExample& ex : examples)
        if (ingestible(ex, drop_uninformative)) out.examples.push_back(std::move(ex));
    return out;
}

double q_advantage(const TrainingExample& example, const GroundAction& action) {
    if (!example.prior_action)
        throw EvaluationError("training example has no prior action");
    const double* q_a = nullptr;
    const double* q_prior = nullptr;
    for (const auto& [a, v] : example.q_estimates) {
        if (a == action) q_a = &v;
        if (a == *example.prior_action) q_prior = &v;
    }
    if (!q_a) throw EvaluationError("no Q estimate recorded for the queried action");
    if (!q_prior) throw EvaluationError("no Q estimate recorded for the prior action");
    return *q_a - *q_prior;
}

ScoredRule hvalue(const Rule& rule, const FlatTrainingSet& data, const RelationalMDP& model,
                  double coverage_weight, double advantage_weight) {
    ScoredRule out;
    out.rule = rule;
    for (const TrainingExample& ex : data.examples) {
        InterpContext ctx(model, ex.state);
        bool covered = false;
        double advantage = 0;
        for (const auto& [a, v] : ex.q_estimates) {
            if (a.schema() != rule.action_type) continue;
            if (!rule_allows(rule, ctx, a)) continue;
            covered = true;
            advantage += q_advantage(ex, a);
        }
        if (covered) {
            ++out.covered_count;
            out.hvalue += coverage_weight + advantage_weight * advantage;
        }
    }
    return out;
}

namespace {

// Highest variable index used by an expression, plus one (0 = var-free).
int var_arity(const ClassExprPtr& e) {
    switch (e->kind) {
    case ClassExpr::Kind::Var:
        return e->var + 1;
    case ClassExpr::Kind::Not:
        return var_arity(e->inner);
    case ClassExpr::Kind::RelApply:
        return var_arity(e->inner);
    default:
        return 0;
    }
}

std::uint64_t mix_hash(std::uint64_t h, std::uint64_t v) {
    return (h ^ (v + 0x9E3779B97F4A7C15ull + (h << 12) + (h >> 4))) * 0x100000001B3ull;
}

// The beam-search engine. Rules are represented as conjunctions of
// masks over each example's recorded legal actions; adding a literal is a
// bitwise AND, so Hvalue evaluation of candidate specializations is cheap.
// Literals whose allowed-action masks coincide on the whole training set
// are collapsed to their first (shallowest) representative, in the same
// spirit as the beam's distinct-heuristic-value rule.
class LearnEngine {
public:
    LearnEngine(const FlatTrainingSet& data, const LearnerConfig& cfg, const RelationalMDP& model)
        : data_(data), cfg_(cfg), model_(model) {
        cfg_.check();
        active_.assign(data_.examples.size(), 1);
        build();
    }

    void deactivate_covered(const ScoredRule& scored);
    bool any_active() const {
        return std::any_of(active_.begin(), active_.end(), [](char c) { return c != 0; });
    }

    ScoredRule beam_search(std::uint16_t action_type);
    ScoredRule learn_rule();

private:
    struct TypeData {
        std::uint16_t type = 0;
        int arity = 0;
        int stride = 1; // mask words per example
        std::vector<std::size_t> example_ids;            // into data_.examples
        std::vector<std::vector<GroundAction>> actions;  // per type-example
        std::vector<std::vector<double>> advantages;     // aligned with actions
        std::vector<std::uint64_t> full_mask;            // per type-example, stride words
        struct LiteralEntry {
            Literal literal;
            std::vector<std::uint64_t> masks; // per type-example, stride words
        };
        std::vector<LiteralEntry> literals;
    };

    struct Member {
        std::vector<std::uint64_t> masks;
        std::vector<int> literal_indices;
        double hvalue = 0;
        std::size_t covered = 0;
        std::uint64_t seq = 0;
    };

    void build();
    void score(const TypeData& td, std::span<const std::uint64_t> masks, double& hvalue,
               std::size_t& covered) const;
    Rule materialize(const TypeData& td, const Member& m) const;

    const FlatTrainingSet& data_;
    LearnerConfig cfg_;
    const RelationalMDP& model_;
    std::vector<TypeData> types_;
    std::vector<char> active_;
};

void LearnEngine::build() {
    const auto& schemas = model_.schemas();
    int max_arity = 0;
    for (const auto& s : schemas) max_arity = std::max(max_arity, static_cast<int>(s.params.size()));

    std::vector<PredId> preds = cfg_.predicates;
    if (preds.empty()) {
        for (std::size_t p = 0; p < model_.predicates().size(); ++p) {
            int arity = model_.predicates()[static_cast<PredId>(p)].arity;
            if (arity == 1 || arity == 2) preds.push_back(static_cast<PredId>(p));
        }
    }
    std::vector<ClassExprPtr> classes =
        enumerate_classes(model_.predicates(), cfg_.max_depth, max_arity, preds, cfg_.literal_cap);
    std::vector<int> class_vars(classes.size());
    for (std::size_t i = 0; i < classes.size(); ++i) class_vars[i] = var_arity(classes[i]);

    // Per-type example tables.
    types_.resize(schemas.size());
    for (std::size_t t = 0; t < schemas.size(); ++t) {
        types_[t].type = static_cast<std::uint16_t>(t);
        types_[t].arity = static_cast<int>(schemas[t].params.size());
    }
    for (std::size_t e = 0; e < data_.examples.size(); ++e) {
        const TrainingExample& ex = data_.examples[e];
        std::size_t i = 0;
        while (i < ex.q_estimates.size()) {
            std::uint16_t type = ex.q_estimates[i].first.schema();
            TypeData& td = types_[type];
            td.example_ids.push_back(e);
            td.actions.emplace_back();
            td.advantages.emplace_back();
            while (i < ex.q_estimates.size() && ex.q_estimates[i].first.schema() == type) {
                td.actions.back().push_back(ex.q_estimates[i].first);
                td.advantages.back().push_back(q_advantage(ex, ex.q_estimates[i].first));
                ++i;
            }
        }
    }
    for (TypeData& td : types_) {
        std::size_t max_actions = 0;
        for (const auto& acts : td.actions) max_actions = std::max(max_actions, acts.size());
        td.stride = std::max<int>(1, static_cast<int>((max_actions + 63) / 64));
        td.full_mask.assign(td.example_ids.size() * static_cast<std::size_t>(td.stride), 0);
        for (std::size_t k = 0; k < td.example_ids.size(); ++k)
            for (std::size_t j = 0; j < td.actions[k].size(); ++j)
                td.full_mask[k * static_cast<std::size_t>(td.stride) + (j >> 6)] |= 1ull << (j & 63);
    }

    // Pass 1: hash the extension of every variable-free class across the
    // whole training set, collapsing extensionally equal classes.
    std::vector<std::uint64_t> h1(classes.size(), 0x9E3779B97F4A7C15ull);
    std::vector<std::uint64_t> h2(classes.size(), 0xC2B2AE3D27D4EB4Full);
    for (const TrainingExample& ex : data_.examples) {
        InterpContext ctx(model_, ex.state);
        for (std::size_t c = 0; c < classes.size(); ++c) {
            if (class_vars[c] > 0) continue;
            ObjectSet ext = interpret_class(classes[c], ctx, {});
            std::uint64_t word_hash = 0xcbf29ce484222325ull;
            ext.for_each([&](std::size_t o) { word_hash = mix_hash(word_hash, o + 1); });
            h1[c] = mix_hash(h1[c], word_hash);
            h2[c] = mix_hash(h2[c] + 1, word_hash);
        }
    }
    std::vector<std::size_t> reps; // indices of distinct var-free classes
    {
        std::unordered_map<std::uint64_t, std::size_t> seen;
        for (std::size_t c = 0; c < classes.size(); ++c) {
            if (class_vars[c] > 0) continue;
            std::uint64_t key = mix_hash(h1[c], h2[c]);
            if (seen.emplace(key, c).second) reps.push_back(c);
        }
    }

    // Pass 2: materialize literal masks, example-major so each state's
    // interpretation context is built once. Variable-free literals reuse one
    // cached extension per (class, example); variable literals are evaluated
    // per candidate action binding. Always-false masks are dropped and mask
    // vectors equal to an earlier literal's collapse to that literal.
    for (TypeData& td : types_) {
        if (td.example_ids.empty()) continue;
        const std::size_t rows = td.example_ids.size();
        const std::size_t stride = static_cast<std::size_t>(td.stride);
        const std::size_t arity = static_cast<std::size_t>(td.arity);

        std::vector<std::size_t> var_classes;
        for (std::size_t c = 0; c < classes.size(); ++c)
            if (class_vars[c] > 0 && class_vars[c] <= td.arity) var_classes.push_back(c);

        const std::size_t mask_bytes =
            (reps.size() + var_classes.size()) * arity * rows * stride * 8;
        if (mask_bytes > (3ull << 30))
            throw ResourceError("literal masks would need " + std::to_string(mask_bytes >> 20) +
                                " MiB; lower the depth bound or the literal cap");

        std::vector<std::vector<std::uint64_t>> free_masks(reps.size() * arity);
        for (auto& v : free_masks) v.assign(rows * stride, 0);
        std::vector<std::vector<std::uint64_t>> var_masks(var_classes.size() * arity);
        for (auto& v : var_masks) v.assign(rows * stride, 0);

        for (std::size_t k = 0; k < rows; ++k) {
            const TrainingExample& ex = data_.examples[td.example_ids[k]];
            InterpContext ctx(model_, ex.state);
            const auto& acts = td.actions[k];
            for (std::size_t r = 0; r < reps.size(); ++r) {
                ObjectSet ext = interpret_class(classes[reps[r]], ctx, {});
                for (std::size_t v = 0; v < arity; ++v) {
                    auto& mask = free_masks[r * arity + v];
                    for (std::size_t j = 0; j < acts.size(); ++j)
                        if (ext.test(acts[j].arg(static_cast<int>(v))))
                            mask[k * stride + (j >> 6)] |= 1ull << (j & 63);
                }
            }
            for (std::size_t vc = 0; vc < var_classes.size(); ++vc) {
                for (std::size_t j = 0; j < acts.size(); ++j) {
                    ObjectSet ext = interpret_class(classes[var_classes[vc]], ctx, acts[j].args());
                    for (std::size_t v = 0; v < arity; ++v)
                        if (ext.test(acts[j].arg(static_cast<int>(v))))
                            var_masks[vc * arity + v][k * stride + (j >> 6)] |= 1ull << (j & 63);
                }
            }
        }

        td.literals.clear();
        std::unordered_map<std::uint64_t, std::vector<int>> mask_index;
        auto try_add = [&](Literal lit, std::vector<std::uint64_t>&& masks) {
            bool any =
                std::any_of(masks.begin(), masks.end(), [](std::uint64_t w) { return w != 0; });
            if (!any) return;
            std::uint64_t h = 0xcbf29ce484222325ull;
            for (std::uint64_t w : masks) h = mix_hash(h, w);
            auto& bucket = mask_index[h];
            for (int idx : bucket)
                if (td.literals[static_cast<std::size_t>(idx)].masks == masks) return;
            bucket.push_back(static_cast<int>(td.literals.size()));
            td.literals.push_back({std::move(lit), std::move(masks)});
        };
        for (std::size_t r = 0; r < reps.size(); ++r)
            for (std::size_t v = 0; v < arity; ++v)
                try_add(Literal{static_cast<int>(v), classes[reps[r]]},
                        std::move(free_masks[r * arity + v]));
        for (std::size_t vc = 0; vc < var_classes.size(); ++vc)
            for (std::size_t v = 0; v < arity; ++v)
                try_add(Literal{static_cast<int>(v), classes[var_classes[vc]]},
                        std::move(var_masks[vc * arity + v]));
    }
}

void LearnEngine::score(const TypeData& td, std::span<const std::uint64_t> masks, double& hvalue,
                        std::size_t& covered) const {
    hvalue = 0;
    covered = 0;
    const std::size_t stride = static_cast<std::size_t>(td.stride);
    for (std::size_t k = 0; k < td.example_ids.size(); ++k) {
        if (!active_[td.example_ids[k]]) continue;
        bool any = false;
        double advantage = 0;
        for (std::size_t w = 0; w < stride; ++w) {
            std::uint64_t word = masks[k * stride + w];
            if (!word) continue;
            any = true;
            while (word) {
                int bit = __builtin_ctzll(word);
                advantage += td.advantages[k][(w << 6) + static_cast<std::size_t>(bit)];
                word &= word - 1;
            }
        }
        if (any) {
            ++covered;
            hvalue += cfg_.coverage_weight + cfg_.advantage_weight * advantage;
        }
    }
}

Rule LearnEngine::materialize(const TypeData& td, const Member& m) const {
    Rule rule;
    rule.action_type = td.type;
    for (int idx : m.literal_indices)
        rule.literals.push_back(td.literals[static_cast<std::size_t>(idx)].literal);
    return rule;
}

ScoredRule LearnEngine::beam_search(std::uint16_t action_type) {
    const TypeData& td = types_[action_type];
    ScoredRule out;
    out.rule.action_type = action_type;
    if (td.example_ids.empty()) return out;

    std::uint64_t seq = 0;

    Member root;
    root.masks = td.full_mask;
    root.seq = seq++;
    score(td, root.masks, root.hvalue, root.covered);

    std::vector<Member> beam{root};
    std::vector<std::uint64_t> prev_ids{root.seq};

    for (;;) {
        // G = current beam plus all one-literal specializations.
        std::vector<Member> candidates = beam;
        for (const Member& parent : beam) {
            if (static_cast<int>(parent.literal_indices.size()) >= cfg_.max_literals) continue;
            for (std::size_t li = 0; li < td.literals.size(); ++li) {
                if (std::find(parent.literal_indices.begin(), parent.literal_indices.end(),
                              static_cast<int>(li)) != parent.literal_indices.end())
                    continue;
                Member child;
                child.masks.resize(parent.masks.size());
                bool alive = false;
                for (std::size_t w = 0; w < parent.masks.size(); ++w) {
                    child.masks[w] = parent.masks[w] & td.literals[li].masks[w];
                    alive |= child.masks[w] != 0;
                }
                if (!alive) continue;
                child.literal_indices = parent.literal_indices;
                child.literal_indices.push_back(static_cast<int>(li));
                child.seq = seq++;
                score(td, child.masks, child.hvalue, child.covered);
                candidates.push_back(std::move(child));
            }
        }
        // Keep the best beam_width rules with pairwise distinct heuristic
        // values; equal values prefer shorter rules, then earlier creation.
        std::stable_sort(candidates.begin(), candidates.end(), [](const Member& a, const Member& b) {
            if (a.hvalue != b.hvalue) return a.hvalue > b.hvalue;
            if (a.literal_indices.size() != b.literal_indices.size())
                return a.literal_indices.size() < b.literal_indices.size();
            return a.seq < b.seq;
        });
        std::vector<Member> next;
        for (Member& m : candidates) {
            if (static_cast<int>(next.size()) >= cfg_.beam_width) break;
            bool dup = std::any_of(next.begin(), next.end(),
                                   [&](const Member& kept) { return kept.hvalue == m.hvalue; });
            if (!dup) next.push_back(std::move(m));
        }
        std::vector<std::uint64_t> ids;
        for (const Member& m : next) ids.push_back(m.seq);
        if (ids == prev_ids) break;
        // Unchanged membership under new seq ids also terminates: detect by
        // comparing (hvalue, literal set) sequences.
        bool same = next.size() == beam.size();
        for (std::size_t i = 0; same && i < next.size(); ++i)
            same = next[i].hvalue == beam[i].hvalue &&
                   next[i].literal_indices == beam[i].literal_indices;
        beam = std::move(next);
        prev_ids = std::move(ids);
        if (same) break;
    }

    const Member& best = beam.front(); // sorted by hvalue
    out = ScoredRule{materialize(td, best), best.hvalue, best.covered};
    return out;
}

ScoredRule LearnEngine::learn_rule() {
    ScoredRule best;
    bool first = true;
    for (std::size_t t = 0; t < types_.size(); ++t) {
        ScoredRule r = beam_search(static_cast<std::uint16_t>(t));
        if (types_[t].example_ids.empty()) continue;
        if (first || r.hvalue > best.hvalue) {
            best = std::move(r);
            first = false;
        }
    }
    if (first) best.rule.action_type = 0;
    return best;
}

void LearnEngine::deactivate_covered(const ScoredRule& scored) {
    for (std::size_t e = 0; e < data_.examples.size(); ++e) {
        if (!active_[e]) continue;
        const TrainingExample& ex = data_.examples[e];
        InterpContext ctx(model_, ex.state);
        for (const auto& [a, v] : ex.q_estimates) {
            if (a.schema() != scored.rule.action_type) continue;
            if (rule_allows(scored.rule, ctx, a)) {
                active_[e] = 0;
                break;
            }
        }
    }
}

} // namespace

ScoredRule beam_search(const FlatTrainingSet& data, const LearnerConfig& cfg,
                       std::uint16_t action_type, const RelationalMDP& model) {
    LearnEngine engine(data, cfg, model);
    return engine.beam_search(action_type);
}

ScoredRule learn_rule(const FlatTrainingSet& data, const LearnerConfig& cfg,
                      const RelationalMDP& model) {
    LearnEngine engine(data, cfg, model);
    return engine.learn_rule();
}

DecisionList learn_decision_list(const FlatTrainingSet& data, const LearnerConfig& cfg,
                                 const RelationalMDP& model) {
    DecisionList list;
    if (data.empty()) return list;
    LearnEngine engine(data, cfg, model);
    while (engine.any_active()) {
        ScoredRule r = engine.learn_rule();
        if (r.covered_count == 0) break; // remaining examples fall through
        list.rules.push_back(r.rule);
        engine.deactivate_covered(r);
    }
    return list;
}

} // namespace relplan
