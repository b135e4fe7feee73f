#pragma once

#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "relplan/core/error.hpp"
#include "relplan/core/rng.hpp"

namespace relplan {

/// Monte-Carlo rollout parameters. `delta` is the Q-estimate threshold used
/// when executing the approximately-improved action: 0 reduces to exact
/// argmax with least-action tie-breaking.
struct RolloutConfig {
    int width = 1;       // w: simulated trajectories per Q estimate
    int horizon = 1;     // h: simulation depth
    double discount = 1; // gamma
    double delta = 0.0;

    void check() const {
        if (width < 1 || horizon < 1) throw ConfigError("rollout requires width, horizon >= 1");
        if (discount < 0 || discount > 1) throw ConfigError("discount must lie in [0, 1]");
    }
};

/// A (possibly stochastic) policy over a model's states.
template <class Model>
using PolicyFn = std::function<std::optional<typename Model::Action>(
    const typename Model::State&, Rng&)>;

/// One rollout-labeled state: the base policy's action and the Q estimate
/// for every legal action (ascending action order).
template <class Model> struct TrainingExampleT {
    typename Model::State state;
    std::optional<typename Model::Action> prior_action;
    std::vector<std::pair<typename Model::Action, double>> q_estimates;
};

template <class Model> struct TrajectoryT {
    std::vector<TrainingExampleT<Model>> steps;
    std::vector<double> rewards;             // executed per-step rewards
    double cumulative_discounted_reward = 0; // v(t) of the executed path
};

/// Actions whose Q estimate is within `delta` of the maximum, plus the least
/// such action. The input must be nonempty and in ascending action order.
template <class Action> struct DeltaSelectionT {
    double threshold = 0;
    std::vector<Action> selected;
    Action chosen;
};

template <class Action>
DeltaSelectionT<Action> delta_action_select(const std::vector<std::pair<Action, double>>& q,
                                            double delta) {
    if (q.empty()) throw SelectionError("delta_action_select over an empty estimate map");
    double best = q.front().second;
    for (const auto& [a, v] : q) best = std::max(best, v);
    DeltaSelectionT<Action> out;
    out.threshold = delta;
    for (const auto& [a, v] : q)
        if (best - v <= delta) out.selected.push_back(a);
    out.chosen = out.selected.front();
    return out;
}

/// Estimate Q^pi(s, a) for every legal action by averaging `width`
/// simulated h-step continuations of `policy` after taking a. Terminal
/// states inside a simulation contribute nothing further.
template <class Model>
std::vector<std::pair<typename Model::Action, double>>
policy_rollout(const Model& model, const typename Model::State& state, const PolicyFn<Model>& policy,
               const RolloutConfig& cfg, Rng& rng) {
    cfg.check();
    std::vector<std::pair<typename Model::Action, double>> out;
    const auto legal = model.legal_actions(state);
    std::uint64_t action_tag = 0;
    for (const auto& action : legal) {
        double sum = 0;
        for (int k = 0; k < cfg.width; ++k) {
            Rng sim = rng.fork(action_tag, static_cast<std::uint64_t>(k));
            auto [next, reward] = model.step(state, action, sim);
            double total = reward;
            double gamma_pow = cfg.discount;
            typename Model::State cur = next;
            for (int i = 1; i <= cfg.horizon - 1; ++i) {
                if (model.is_terminal(cur)) break;
                std::optional<typename Model::Action> act = policy(cur, sim);
                if (!act) break; // no legal action: nothing further to collect
                auto [nxt, r] = model.step(cur, *act, sim);
                total += gamma_pow * r;
                gamma_pow *= cfg.discount;
                cur = nxt;
            }
            sum += total;
        }
        out.emplace_back(action, sum / cfg.width);
        ++action_tag;
    }
    return out;
}

/// One trajectory of the rollout-improved policy, recording a training
/// example at each visited state. Stops early at terminal states.
template <class Model>
TrajectoryT<Model> improved_trajectory(const Model& model, const PolicyFn<Model>& policy,
                                       const RolloutConfig& cfg, Rng& rng) {
    cfg.check();
    TrajectoryT<Model> out;
    Rng init_rng = rng.fork(0x1717);
    typename Model::State state = model.sample_initial(init_rng);
    double gamma_pow = 1.0;
    for (int i = 0; i < cfg.horizon; ++i) {
        if (model.is_terminal(state)) break;
        Rng step_rng = rng.fork(0x5157, static_cast<std::uint64_t>(i));
        auto q = policy_rollout(model, state, policy, cfg, step_rng);
        if (q.empty()) break; // dead end: no legal actions to record
        TrainingExampleT<Model> ex;
        ex.state = state;
        Rng prior_rng = step_rng.fork(1);
        ex.prior_action = policy(state, prior_rng);
        ex.q_estimates = q;
        out.steps.push_back(ex);
        auto selection = delta_action_select(q, cfg.delta);
        Rng exec_rng = step_rng.fork(2);
        // Exactly tied maxima carry no preference; executing a random
        // member keeps tie-heavy regions exploratory instead of collapsing
        // trajectories into deterministic action cycles.
        typename Model::Action chosen = selection.chosen;
        if (cfg.delta == 0.0 && selection.selected.size() > 1)
            chosen = selection.selected[exec_rng.index(selection.selected.size())];
        auto [next, reward] = model.step(state, chosen, exec_rng);
        out.rewards.push_back(reward);
        out.cumulative_discounted_reward += gamma_pow * reward;
        gamma_pow *= cfg.discount;
        state = next;
    }
    return out;
}

/// n independent trajectories of the improved policy, each from a fresh
/// draw of the model's initial distribution. Trajectory i consumes the
/// stream rng.fork(i), so parallel and serial evaluation agree.
template <class Model>
std::vector<TrajectoryT<Model>> improved_trajectories(int n, const RolloutConfig& cfg,
                                                      const Model& model,
                                                      const PolicyFn<Model>& policy, Rng& rng) {
    std::vector<TrajectoryT<Model>> out;
    out.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        Rng traj_rng = rng.fork(static_cast<std::uint64_t>(i));
        out.push_back(improved_trajectory(model, policy, cfg, traj_rng));
    }
    return out;
}

} // namespace relplan
