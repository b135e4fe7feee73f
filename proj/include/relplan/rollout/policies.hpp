#pragma once

#include <memory>

#include "relplan/rollout/rollout.hpp"
#include "relplan/taxonomy/interpret.hpp"

namespace relplan {

using RelationalPolicy = PolicyFn<RelationalMDP>;

/// Deterministic policy executing a decision list (ignores the stream).
inline RelationalPolicy policy_from_list(std::shared_ptr<const DecisionList> list,
                                         std::shared_ptr<const RelationalMDP> model) {
    return [list = std::move(list), model = std::move(model)](const RelState& s, Rng&) {
        return select_action(*list, *model, s);
    };
}

/// Uniformly random choice among the legal actions.
inline RelationalPolicy random_policy(std::shared_ptr<const RelationalMDP> model) {
    return [model = std::move(model)](const RelState& s, Rng& rng) -> std::optional<GroundAction> {
        std::vector<GroundAction> legal = model->legal_actions(s);
        if (legal.empty()) return std::nullopt;
        return legal[rng.index(legal.size())];
    };
}

} // namespace relplan
