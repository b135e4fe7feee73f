#include "relplan/harness/evaluate.hpp"

namespace relplan {

namespace {

struct Episode {
    bool solved = false;
    double cost = 0;
};

Episode run_episode(const RelationalPolicy& policy, RelState state, int step_limit,
                    const RelationalMDP& model, Rng& rng) {
    Episode ep;
    for (int t = 0; t <= step_limit; ++t) {
        if (model.is_goal_state(state)) {
            ep.solved = true;
            return ep;
        }
        if (t == step_limit) return ep;
        std::optional<GroundAction> a = policy(state, rng);
        if (!a) return ep; // stuck: no legal action
        auto [next, reward] = model.step(state, *a, rng);
        ep.cost += -reward;
        state = std::move(next);
    }
    return ep;
}

} // namespace

EvalReport evaluate_policy(const RelationalPolicy& policy,
                           const std::function<RelState(Rng&)>& problems, int sample_count,
                           int step_limit, const RelationalMDP& model, Rng& rng) {
    if (step_limit < 1) throw ConfigError("evaluation requires step_limit >= 1");
    EvalReport report;
    report.sample_count = sample_count;
    report.step_limit = step_limit;
    int solved = 0;
    double total_cost = 0;
    for (int i = 0; i < sample_count; ++i) {
        Rng prng = rng.fork(static_cast<std::uint64_t>(i), 0);
        Rng erng = rng.fork(static_cast<std::uint64_t>(i), 1);
        Episode ep = run_episode(policy, problems(prng), step_limit, model, erng);
        if (ep.solved) {
            ++solved;
            total_cost += ep.cost;
        }
    }
    report.success_ratio = sample_count ? static_cast<double>(solved) / sample_count : 0.0;
    if (solved > 0) report.average_length = total_cost / solved;
    return report;
}

EvalReport evaluate_policy_fixed(const RelationalPolicy& policy, std::span<const RelState> problems,
                                 int step_limit, const RelationalMDP& model, Rng& rng) {
    EvalReport report;
    report.sample_count = static_cast<int>(problems.size());
    report.step_limit = step_limit;
    int solved = 0;
    double total_cost = 0;
    for (std::size_t i = 0; i < problems.size(); ++i) {
        Rng erng = rng.fork(static_cast<std::uint64_t>(i), 1);
        Episode ep = run_episode(policy, problems[i], step_limit, model, erng);
        if (ep.solved) {
            ++solved;
            total_cost += ep.cost;
        }
    }
    report.success_ratio =
        problems.empty() ? 0.0 : static_cast<double>(solved) / static_cast<double>(problems.size());
    if (solved > 0) report.average_length = total_cost / solved;
    return report;
}

} // namespace relplan
