#include "relplan/harness/rw.hpp"

#include <algorithm>

namespace relplan {

void RWConfig::check(const RelationalMDP& model) const {
    if (walk_length < 0) throw ConfigError("random-walk length must be >= 0");
    if (noop_probability <= 0 || noop_probability >= 1)
        throw ConfigError("no-op probability must lie strictly in (0, 1)");
    if (goal_predicates.empty())
        throw ConfigError("the random-walk goal predicate set G must be nonempty");
    for (PredId p : goal_predicates)
        if (p >= model.predicates().size() || model.predicates()[p].kind != PredKind::Goal)
            throw ConfigError("G must contain goal predicates of the model");
}

RelState sample_rw_problem(const RelationalMDP& model, const RWConfig& cfg, Rng& rng) {
    cfg.check(model);
    RelState start = model.sample_initial(rng);

    // Raw world dynamics: walks ignore the starting goal entirely.
    RelState cur;
    cur.world = start.world;
    for (int i = 0; i < cfg.walk_length; ++i) {
        if (rng.bernoulli(cfg.noop_probability)) continue;
        std::vector<GroundAction> legal = model.legal_actions(cur);
        if (legal.empty()) continue; // no legal action acts as a no-op
        GroundAction a = legal[rng.index(legal.size())];
        cur = model.world_step(cur, a, rng);
    }

    // Goal image of the endpoint's world facts, restricted to G.
    std::vector<Fact> goals;
    for (const Fact& f : cur.world) {
        PredId gp = model.predicates()[f.pred()].goal;
        if (std::find(cfg.goal_predicates.begin(), cfg.goal_predicates.end(), gp) !=
            cfg.goal_predicates.end())
            goals.emplace_back(gp, f.args());
    }
    RelState problem;
    problem.world = start.world;
    problem.goal = FactSet::from_unsorted(std::move(goals));
    return problem;
}

std::function<RelState(Rng&)> rw_problem_source(std::shared_ptr<const RelationalMDP> model,
                                                RWConfig cfg) {
    return [model = std::move(model), cfg = std::move(cfg)](Rng& rng) {
        return sample_rw_problem(*model, cfg, rng);
    };
}

} // namespace relplan
