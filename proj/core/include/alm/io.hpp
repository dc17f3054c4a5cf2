#pragma once

#include <filesystem>

#include <nlohmann/json.hpp>

#include "alm/problem.hpp"

namespace alm::io {

using nlohmann::json;

/// {"dates": n, "nodes": [{"id", "date", "parent", "p", "q"}, ...]}
ScenarioTree tree_from_json(const json& j);
json to_json(const ScenarioTree& tree);

/// {"node-id": value} covering every node on dates first..last.
AdaptedProcess process_from_json(const ScenarioTree& tree, const json& j, int first, int last);
json to_json(const ScenarioTree& tree, const AdaptedProcess& process);

/// {"kind": "call"} or {"kind": "exponential", "p": 1.0}
LossFunction loss_from_json(const json& j);
json to_json(const LossFunction& loss);

/// {"tree", "payments", "loss", "alphas", "style", "cvar_level"}
HedgeProblem problem_from_json(const json& j);
json to_json(const HedgeProblem& problem);

/// {"v0", "style", "solver", "M", "diagnostics"}
json to_json(const ScenarioTree& tree, const SolveResult& result);
/// The "M" map of a result document, on dates 0..n.
AdaptedProcess wealth_from_json(const ScenarioTree& tree, const json& result);

json read_file(const std::filesystem::path& path);

}  // namespace alm::io
