#include "alm/io.hpp"

#include <cmath>
#include <fstream>

#include "alm/errors.hpp"

namespace alm::io {

namespace {

template <class F>
auto guarded(const char* what, F&& f) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw InvalidInput(std::string(what) + ": " + e.what());
  }
}

}  // namespace

ScenarioTree tree_from_json(const json& j) {
  TreeSpec spec = guarded("tree", [&] {
    TreeSpec s;
    s.dates = j.at("dates").get<int>();
    for (const json& n : j.at("nodes")) {
      NodeSpec ns;
      ns.id = n.at("id").get<std::string>();
      ns.date = n.at("date").get<int>();
      if (n.contains("parent") && !n["parent"].is_null()) ns.parent = n["parent"].get<std::string>();
      if (ns.parent) {
        ns.p = n.at("p").get<double>();
        ns.q = n.at("q").get<double>();
      }
      s.nodes.push_back(std::move(ns));
    }
    return s;
  });
  return ScenarioTree::build(spec);
}

json to_json(const ScenarioTree& tree) {
  json nodes = json::array();
  for (NodeIndex i = 0; i < tree.size(); ++i) {
    json n{{"id", tree.id(i)}, {"date", tree.date(i)}};
    if (auto p = tree.parent(i)) {
      n["parent"] = tree.id(*p);
      n["p"] = tree.transition(i, Measure::P);
      n["q"] = tree.transition(i, Measure::Q);
    } else {
      n["parent"] = nullptr;
    }
    nodes.push_back(std::move(n));
  }
  return {{"dates", tree.dates()}, {"nodes", std::move(nodes)}};
}

AdaptedProcess process_from_json(const ScenarioTree& tree, const json& j, int first, int last) {
  if (!j.is_object()) throw InvalidInput("process must be an object mapping node ids to values");
  AdaptedProcess out(tree, first, last);
  for (auto it = j.begin(); it != j.end(); ++it) {
    auto idx = tree.find(it.key());
    if (!idx) throw InvalidInput("process refers to unknown node '" + it.key() + "'");
    const int d = tree.date(*idx);
    if (d < first || d > last) continue;
    if (!it.value().is_number()) throw InvalidInput("value at node '" + it.key() + "' is not a number");
    out[*idx] = it.value().get<double>();
  }
  for (int d = first; d <= last; ++d)
    for (NodeIndex i : tree.nodes_at(d))
      if (std::isnan(out[i])) throw InvalidInput("process missing value at node '" + tree.id(i) + "'");
  return out;
}

json to_json(const ScenarioTree& tree, const AdaptedProcess& process) {
  json out = json::object();
  for (int d = process.first_date(); d <= process.last_date(); ++d)
    for (NodeIndex i : tree.nodes_at(d)) out[tree.id(i)] = process[i];
  return out;
}

LossFunction loss_from_json(const json& j) {
  return guarded("loss", [&] {
    const std::string kind = j.is_string() ? j.get<std::string>() : j.at("kind").get<std::string>();
    if (kind == "call") return make_call_loss();
    if (kind == "exponential") return make_exponential_loss(j.at("p").get<double>());
    throw InvalidInput("unknown loss kind '" + kind + "'");
  });
}

json to_json(const LossFunction& loss) {
  switch (loss.kind()) {
    case LossKind::Call: return {{"kind", "call"}};
    case LossKind::Exponential: return {{"kind", "exponential"}, {"p", loss.exponent()}};
    case LossKind::Custom: break;
  }
  throw InvalidInput("custom losses cannot be serialized");
}

HedgeProblem problem_from_json(const json& j) {
  ScenarioTree tree = tree_from_json(guarded("problem", [&] { return j.at("tree"); }));
  const int n = tree.dates();
  AdaptedProcess pay = process_from_json(tree, guarded("problem", [&] { return j.at("payments"); }), 1, n);
  LossFunction loss = loss_from_json(guarded("problem", [&] { return j.at("loss"); }));
  auto alphas = guarded("alphas", [&] { return j.at("alphas").get<std::vector<double>>(); });
  Style style = j.contains("style") ? style_from_string(guarded("style", [&] { return j["style"].get<std::string>(); }))
                                    : Style::EU;
  double level = j.contains("cvar_level") ? guarded("cvar_level", [&] { return j["cvar_level"].get<double>(); }) : 0.0;
  return HedgeProblem::from_payments(std::move(tree), pay, std::move(loss), std::move(alphas), style, level);
}

json to_json(const HedgeProblem& p) {
  return {{"tree", to_json(p.tree)},
          {"payments", to_json(p.tree, p.payments)},
          {"loss", to_json(p.loss)},
          {"alphas", p.alphas},
          {"style", to_string(p.style)},
          {"cvar_level", p.cvar_level}};
}

json to_json(const ScenarioTree& tree, const SolveResult& r) {
  json diag = json::object();
  for (const auto& [k, v] : r.diagnostics) diag[k] = std::isfinite(v) ? json(v) : json(nullptr);
  json out{{"v0", r.v0},
           {"style", to_string(r.style)},
           {"solver", r.solver},
           {"M", to_json(tree, r.wealth)},
           {"diagnostics", std::move(diag)}};
  if (!r.notes.empty()) out["notes"] = r.notes;
  return out;
}

AdaptedProcess wealth_from_json(const ScenarioTree& tree, const json& result) {
  return process_from_json(tree, guarded("result", [&] { return result.at("M"); }), 0, tree.dates());
}

json read_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open '" + path.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw InvalidInput("'" + path.string() + "' is not valid JSON: " + e.what());
  }
}

}  // namespace alm::io
