#include "relplan/harness/flat.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

namespace relplan {

int FlatMdp::local_index(int s, int a) const {
    const auto& acts = legal[static_cast<std::size_t>(s)];
    auto it = std::lower_bound(acts.begin(), acts.end(), a);
    if (it == acts.end() || *it != a)
        throw EvaluationError("action " + std::to_string(a) + " is not legal in state " +
                              std::to_string(s));
    return static_cast<int>(it - acts.begin());
}

std::pair<int, double> FlatMdp::step(int s, int a, Rng& rng) const {
    if (is_terminal(s)) return {s, 0.0};
    int i = local_index(s, a);
    const auto& arcs = transitions[static_cast<std::size_t>(s)][static_cast<std::size_t>(i)];
    const Arc* chosen = &arcs.back();
    if (arcs.size() > 1) {
        double u = rng.uniform01();
        double cum = 0;
        for (const Arc& arc : arcs) {
            cum += arc.probability;
            if (u < cum) {
                chosen = &arc;
                break;
            }
        }
    }
    return {chosen->next, reward[static_cast<std::size_t>(s)][static_cast<std::size_t>(i)]};
}

int FlatMdp::sample_initial(Rng& rng) const {
    if (initial.empty()) throw ConfigError("flat MDP has no initial distribution");
    double u = rng.uniform01();
    double cum = 0;
    for (const Arc& arc : initial) {
        cum += arc.probability;
        if (u < cum) return arc.next;
    }
    return initial.back().next;
}

void FlatMdp::validate(double tolerance) const {
    const std::size_t n = legal.size();
    if (transitions.size() != n || reward.size() != n || terminal.size() != n)
        throw ConfigError("flat MDP table sizes disagree");
    for (std::size_t s = 0; s < n; ++s) {
        if (!std::is_sorted(legal[s].begin(), legal[s].end()))
            throw ConfigError("legal action ids must be ascending");
        if (transitions[s].size() != legal[s].size() || reward[s].size() != legal[s].size())
            throw ConfigError("per-state table sizes disagree");
        for (const auto& arcs : transitions[s]) {
            double total = 0;
            for (const Arc& a : arcs) {
                if (a.next < 0 || a.next >= static_cast<int>(n))
                    throw ConfigError("transition to an unknown state");
                total += a.probability;
            }
            if (std::abs(total - 1.0) > tolerance)
                throw ConfigError("transition probabilities do not sum to 1");
        }
    }
    double total = 0;
    for (const Arc& a : initial) total += a.probability;
    if (!initial.empty() && std::abs(total - 1.0) > tolerance)
        throw ConfigError("initial probabilities do not sum to 1");
}

namespace {

std::vector<int> resolve_policy(const FlatMdp& mdp, std::vector<int> policy) {
    const std::size_t n = mdp.legal.size();
    if (policy.empty()) {
        for (std::size_t s = 0; s < n; ++s)
            policy.push_back(mdp.legal[s].empty() ? -1 : mdp.legal[s].front());
    }
    if (policy.size() != n) throw ConfigError("policy size differs from the state count");
    return policy;
}

} // namespace

ExactSolution exact_solve(const FlatMdp& mdp, std::vector<int> policy, double gamma, int horizon,
                          double tolerance, double distinct_tolerance) {
    const std::size_t n = mdp.legal.size();
    policy = resolve_policy(mdp, policy);
    ExactSolution out;
    out.horizon = horizon;

    out.r_max = 0;
    for (std::size_t s = 0; s < n; ++s)
        if (!mdp.terminal[s])
            for (double r : mdp.reward[s]) out.r_max = std::max(out.r_max, std::abs(r));

    auto q_of = [&](const std::vector<double>& v, std::size_t s, std::size_t i) {
        double q = mdp.reward[s][i];
        for (const FlatMdp::Arc& arc : mdp.transitions[s][i])
            q += gamma * arc.probability * v[static_cast<std::size_t>(arc.next)];
        return q;
    };
    auto policy_local = [&](std::size_t s) {
        return static_cast<std::size_t>(mdp.local_index(static_cast<int>(s), policy[s]));
    };

    // Finite-horizon recursion, V_0 = 0.
    out.v_h.assign(static_cast<std::size_t>(horizon) + 1, std::vector<double>(n, 0.0));
    out.q_h.assign(static_cast<std::size_t>(horizon) + 1, {});
    out.q_h[0].assign(n, {});
    for (std::size_t s = 0; s < n; ++s) out.q_h[0][s].assign(mdp.legal[s].size(), 0.0);
    for (int h = 1; h <= horizon; ++h) {
        const std::vector<double>& prev = out.v_h[static_cast<std::size_t>(h - 1)];
        auto& vh = out.v_h[static_cast<std::size_t>(h)];
        auto& qh = out.q_h[static_cast<std::size_t>(h)];
        qh.assign(n, {});
        for (std::size_t s = 0; s < n; ++s) {
            qh[s].assign(mdp.legal[s].size(), 0.0);
            if (mdp.terminal[s]) continue;
            for (std::size_t i = 0; i < mdp.legal[s].size(); ++i) qh[s][i] = q_of(prev, s, i);
            if (!mdp.legal[s].empty()) vh[s] = qh[s][policy_local(s)];
        }
    }

    if (gamma < 1.0) {
        out.v_max = out.r_max / (1.0 - gamma);
        // Iterative policy evaluation to the requested tolerance.
        std::vector<double> v(n, 0.0), next(n, 0.0);
        for (int iter = 0; iter < 1000000; ++iter) {
            double change = 0;
            for (std::size_t s = 0; s < n; ++s) {
                next[s] = (mdp.terminal[s] || mdp.legal[s].empty()) ? 0.0 : q_of(v, s, policy_local(s));
                change = std::max(change, std::abs(next[s] - v[s]));
            }
            v.swap(next);
            if (change < tolerance) break;
        }
        out.v = v;
        out.q.assign(n, {});
        out.improved.assign(n, -1);
        for (std::size_t s = 0; s < n; ++s) {
            out.q[s].assign(mdp.legal[s].size(), 0.0);
            if (mdp.legal[s].empty()) continue;
            for (std::size_t i = 0; i < mdp.legal[s].size(); ++i)
                out.q[s][i] = mdp.terminal[s] ? 0.0 : q_of(v, s, i);
            std::size_t best = 0;
            for (std::size_t i = 1; i < out.q[s].size(); ++i)
                if (out.q[s][i] > out.q[s][best]) best = i;
            out.improved[s] = mdp.legal[s][best]; // ties keep the least action
        }
        // Minimum gap between a best and best sub-optimal action.
        out.delta_star = 0;
        out.has_delta_star = false;
        for (std::size_t s = 0; s < n; ++s) {
            if (mdp.legal[s].size() < 2 || mdp.terminal[s]) continue;
            double best = *std::max_element(out.q[s].begin(), out.q[s].end());
            double runner = -std::numeric_limits<double>::infinity();
            for (double qv : out.q[s])
                if (best - qv > distinct_tolerance) runner = std::max(runner, qv);
            if (std::isfinite(runner)) {
                double gap = best - runner;
                if (!out.has_delta_star || gap < out.delta_star) {
                    out.delta_star = gap;
                    out.has_delta_star = true;
                }
            }
        }
        out.v_max = out.r_max / (1.0 - gamma);
    }
    return out;
}

int EnumeratedMdp::state_index(const RelState& s) const {
    auto it = index.find(s);
    return it == index.end() ? -1 : it->second;
}

EnumeratedMdp enumerate_relational(const RelationalMDP& model, std::span<const RelState> starts,
                                   std::size_t state_cap) {
    EnumeratedMdp out;
    out.flat.gamma = model.discount();
    const auto& grounded = model.grounded_actions();
    for (const auto& g : grounded) out.actions.push_back(g.action);

    std::deque<int> frontier;
    auto intern = [&](const RelState& s) {
        auto it = out.index.find(s);
        if (it != out.index.end()) return it->second;
        if (out.states.size() >= state_cap)
            throw ResourceError("state enumeration exceeded the cap of " +
                                std::to_string(state_cap) + " states");
        int id = static_cast<int>(out.states.size());
        out.states.push_back(s);
        out.index.emplace(s, id);
        frontier.push_back(id);
        return id;
    };
    for (const RelState& s : starts) {
        double p = 1.0 / static_cast<double>(starts.size());
        out.flat.initial.push_back({p, intern(s)});
    }

    while (!frontier.empty()) {
        int id = frontier.front();
        frontier.pop_front();
        RelState s = out.states[static_cast<std::size_t>(id)]; // copy: states vector grows below
        bool terminal = model.is_goal_state(s);
        std::vector<int> legal_ids;
        std::vector<std::vector<FlatMdp::Arc>> trans;
        std::vector<double> rewards;
        if (!terminal) {
            for (std::size_t gi = 0; gi < grounded.size(); ++gi) {
                const auto& g = grounded[gi];
                if (!(s.world.contains_all(g.precond_pos) && s.world.contains_none(g.precond_neg)))
                    continue;
                legal_ids.push_back(static_cast<int>(gi));
                rewards.push_back(-g.cost);
                std::vector<FlatMdp::Arc> arcs;
                for (const auto& o : g.outcomes) {
                    RelState next;
                    next.world = s.world;
                    next.world.apply(o.del, o.add);
                    next.goal = s.goal;
                    int nid = intern(next);
                    bool merged = false;
                    for (FlatMdp::Arc& a : arcs)
                        if (a.next == nid) {
                            a.probability += o.probability;
                            merged = true;
                        }
                    if (!merged) arcs.push_back({o.probability, nid});
                }
                trans.push_back(std::move(arcs));
            }
        }
        auto grow = [&](auto& table) { table.resize(out.states.size()); };
        grow(out.flat.legal);
        grow(out.flat.transitions);
        grow(out.flat.reward);
        out.flat.terminal.resize(out.states.size(), false);
        out.flat.legal[static_cast<std::size_t>(id)] = std::move(legal_ids);
        out.flat.transitions[static_cast<std::size_t>(id)] = std::move(trans);
        out.flat.reward[static_cast<std::size_t>(id)] = std::move(rewards);
        out.flat.terminal[static_cast<std::size_t>(id)] = terminal;
    }
    // Tables may be shorter than the state count when the last interned
    // states were terminal leaves; square them up.
    out.flat.legal.resize(out.states.size());
    out.flat.transitions.resize(out.states.size());
    out.flat.reward.resize(out.states.size());
    out.flat.terminal.resize(out.states.size(), false);
    for (std::size_t s = 0; s < out.states.size(); ++s)
        if (out.flat.legal[s].empty() && !out.flat.terminal[s])
            out.flat.terminal[s] = model.is_goal_state(out.states[s]);
    return out;
}

} // namespace relplan
