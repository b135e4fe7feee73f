#include "relplan/rollout/dataset.hpp"

#include <istream>
#include <ostream>

#include <json.hpp>

namespace relplan {

void write_training_set(std::ostream& out, std::span<const Trajectory> trajectories,
                        const RelationalMDP& model) {
    for (const Trajectory& t : trajectories) {
        for (const TrainingExample& ex : t.steps) {
            nlohmann::json rec;
            auto& world = rec["world"] = nlohmann::json::array();
            for (const Fact& f : ex.state.world) world.push_back(model.fact_to_string(f));
            auto& goal = rec["goal"] = nlohmann::json::array();
            for (const Fact& f : ex.state.goal) goal.push_back(model.fact_to_string(f));
            rec["prior"] = ex.prior_action ? nlohmann::json(model.action_to_string(*ex.prior_action))
                                           : nlohmann::json(nullptr);
            auto& q = rec["q"] = nlohmann::json::array();
            for (const auto& [a, v] : ex.q_estimates)
                q.push_back(nlohmann::json::array({model.action_to_string(a), v}));
            out << rec.dump() << '\n';
        }
    }
}

std::vector<TrainingExample> read_training_set(std::istream& in, const RelationalMDP& model) {
    std::vector<TrainingExample> out;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        nlohmann::json rec;
        try {
            rec = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw Error("training-set line " + std::to_string(line_no) + ": " + e.what());
        }
        TrainingExample ex;
        std::vector<Fact> world, goal;
        for (const auto& f : rec.at("world")) world.push_back(model.parse_fact(f.get<std::string>()));
        for (const auto& f : rec.at("goal")) goal.push_back(model.parse_fact(f.get<std::string>()));
        ex.state.world = FactSet::from_unsorted(std::move(world));
        ex.state.goal = FactSet::from_unsorted(std::move(goal));
        if (!rec.at("prior").is_null())
            ex.prior_action = model.parse_action(rec.at("prior").get<std::string>());
        for (const auto& pair : rec.at("q"))
            ex.q_estimates.emplace_back(model.parse_action(pair.at(0).get<std::string>()),
                                        pair.at(1).get<double>());
        std::sort(ex.q_estimates.begin(), ex.q_estimates.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        out.push_back(std::move(ex));
    }
    return out;
}

} // namespace relplan
