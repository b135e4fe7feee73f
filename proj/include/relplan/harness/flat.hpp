#pragma once

#include <optional>
#include <unordered_map>
#include <utility>
#include <vector>

#include "relplan/core/mdp.hpp"
#include "relplan/core/rng.hpp"

namespace relplan {

/// An explicit tabular MDP with per-state legal-action lists. Action ids are
/// global; per-state vectors are aligned with `legal[s]`. Terminal states
/// are absorbing with zero reward.
struct FlatMdp {
    using State = int;
    using Action = int;

    struct Arc {
        double probability = 1.0;
        int next = 0;
    };

    std::vector<std::vector<int>> legal;                    // ascending action ids
    std::vector<std::vector<std::vector<Arc>>> transitions; // [s][i] for legal[s][i]
    std::vector<std::vector<double>> reward;                // [s][i]
    std::vector<bool> terminal;
    std::vector<Arc> initial; // distribution over start states
    double gamma = 0.9;

    int num_states() const { return static_cast<int>(legal.size()); }
    double discount() const { return gamma; }
    bool is_terminal(int s) const { return terminal[static_cast<std::size_t>(s)]; }

    std::vector<int> legal_actions(int s) const { return legal[static_cast<std::size_t>(s)]; }

    int local_index(int s, int a) const;
    std::pair<int, double> step(int s, int a, Rng& rng) const;
    int sample_initial(Rng& rng) const;

    /// Checks outcome/initial distributions sum to 1 and indices are valid.
    void validate(double tolerance = 1e-9) const;
};

/// Exact dynamic-programming tables for one policy of a flat MDP. Per-state
/// vectors are aligned with the MDP's legal-action lists.
struct ExactSolution {
    std::vector<double> v;                         // V^pi, empty when gamma >= 1
    std::vector<std::vector<double>> q;            // Q^pi[s][i]
    std::vector<std::vector<double>> v_h;          // [h][s], h = 0..horizon
    std::vector<std::vector<std::vector<double>>> q_h; // [h][s][i]
    std::vector<int> improved;                     // PI^pi(s), least-argmax action id
    double r_max = 0;
    double v_max = 0;                              // R_max / (1 - gamma)
    double delta_star = 0;                         // 0 when no state has a Q gap
    bool has_delta_star = false;
    int horizon = 0;
};

/// Evaluate `policy` (state -> global action id; empty means "least legal
/// action") by iterating the Bellman recursion to `tolerance`, and compute
/// the finite-horizon tables up to `horizon`. Infinite-horizon tables, the
/// improved policy and the Q-advantage gap require gamma < 1.
ExactSolution exact_solve(const FlatMdp& mdp, std::vector<int> policy, double gamma, int horizon,
                          double tolerance = 1e-10, double distinct_tolerance = 1e-9);

/// Enumerate the reachable state space of a relational MDP from the given
/// start states, producing a flat MDP plus the state table. Exceeding
/// `state_cap` raises a resource error.
struct EnumeratedMdp {
    FlatMdp flat;
    std::vector<RelState> states;                 // index -> state
    std::vector<GroundAction> actions;            // global action id -> ground action
    int state_index(const RelState& s) const;     // -1 when unknown

    std::unordered_map<RelState, int, RelStateHash> index;
};

EnumeratedMdp enumerate_relational(const RelationalMDP& model, std::span<const RelState> starts,
                                   std::size_t state_cap = 200000);

} // namespace relplan
