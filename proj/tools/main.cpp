#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "alm/alm.hpp"

using namespace alm;
using nlohmann::json;

namespace {

struct RunConfig {
  std::string input;
  std::string output;
  std::string style;
  std::string solver = "auto";
  std::string result;
  std::string alpha2_grid;
  std::uint64_t seed = 0;
  double tol = 1e-7;
  long samples = -1;
  int quadrature_nodes = -1;
  bool check_feasibility = false;
};

void emit(const RunConfig& cfg, const std::string& text) {
  if (cfg.output.empty()) {
    std::cout << text << '\n';
    return;
  }
  std::ofstream f(cfg.output);
  if (!f) throw InvalidInput("cannot write '" + cfg.output + "'");
  f << text << '\n';
}

HedgeProblem load_problem(const RunConfig& cfg) {
  if (cfg.input.empty()) throw InvalidInput("--input is required");
  HedgeProblem p = io::problem_from_json(io::read_file(cfg.input));
  if (!cfg.style.empty()) p = p.with_style(style_from_string(cfg.style));
  return p;
}

SolveResult from_closed_form(const HedgeProblem& p, ClosedFormResult cf) {
  SolveResult r;
  r.v0 = cf.value;
  r.style = p.style;
  r.solver = "closed-form:" + cf.formula_id;
  if (cf.process) r.wealth = *cf.process;
  if (!cf.binding_term.empty()) r.notes.push_back(cf.binding_term);
  return r;
}

std::optional<SolveResult> closed_form(const HedgeProblem& p) {
  const bool rn = p.tree.risk_neutral(1e-12);
  if (p.style == Style::CVAR) {
    if (!rn) return std::nullopt;
    return from_closed_form(p, cvar_increasing_value(p));
  }
  if (p.dates() == 1) return from_closed_form(p, n1_value(p));
  if (rn) {
    CoincidingResult c = coinciding_value(p);
    if (c.holds) return from_closed_form(p, c.result);
  }
  if (p.dates() == 2 && rn && p.loss.kind() == LossKind::Call) {
    RiskNeutralTriple t = riskneutral_n2(p);
    return from_closed_form(p, p.style == Style::EU ? t.eu : p.style == Style::TC ? t.tc : t.lb);
  }
  return std::nullopt;
}

std::optional<SolveResult> dynamic_programming(const HedgeProblem& p) {
  switch (p.style) {
    case Style::TC:
      return p.tree.risk_neutral(1e-12) ? tc_solve_riskneutral(p) : tc_solve_general(p);
    case Style::EU:
      if (p.dates() == 2) return eu_solve_n2(p);
      return std::nullopt;
    case Style::LB:
      if (p.dates() == 2) return lb_value_n2(p);
      return std::nullopt;
    default:
      return std::nullopt;
  }
}

SolveResult solve(const HedgeProblem& p, const std::string& solver) {
  if (solver == "oracle") return solve_oracle(p);
  if (solver == "closed-form") {
    auto r = closed_form(p);
    if (!r) throw PreconditionError("no closed form matches this problem");
    return *r;
  }
  if (solver == "dp") {
    auto r = dynamic_programming(p);
    if (!r) throw PreconditionError("no recursion for style " + to_string(p.style) + " with n = " +
                                    std::to_string(p.dates()));
    return *r;
  }
  if (solver != "auto") throw InvalidInput("unknown solver '" + solver + "'");
  // closed form, then recursion, then the oracle
  std::vector<std::string> skipped;
  for (auto* attempt : {&closed_form, &dynamic_programming}) {
    try {
      if (auto r = attempt(p)) {
        r->notes.insert(r->notes.end(), skipped.begin(), skipped.end());
        return *r;
      }
    } catch (const PreconditionError& e) {
      skipped.push_back(std::string("skipped: ") + e.what());
    }
  }
  SolveResult r = solve_oracle(p);
  r.notes.insert(r.notes.end(), skipped.begin(), skipped.end());
  return r;
}

json result_document(const HedgeProblem& p, const SolveResult& r, const RunConfig& cfg) {
  json j = io::to_json(p.tree, r);
  j["seed"] = cfg.seed;
  j["tolerance"] = cfg.tol;
  return j;
}

int cmd_solve(const RunConfig& cfg, const std::string& solver) {
  const HedgeProblem p = load_problem(cfg);
  const SolveResult r = solve(p, solver);
  emit(cfg, result_document(p, r, cfg).dump(2));
  return 0;
}

int cmd_compare(const RunConfig& cfg) {
  const HedgeProblem p = load_problem(cfg);
  json j;
  double v[3];
  int k = 0;
  for (Style s : {Style::EU, Style::TC, Style::LB}) {
    const SolveResult r = solve(p.with_style(s), cfg.solver);
    v[k++] = r.v0;
    j[to_string(s)] = {{"v0", r.v0}, {"solver", r.solver}};
  }
  const bool ordered = v[0] <= v[1] + cfg.tol && v[1] <= v[2] + cfg.tol;
  j["ordered"] = ordered;
  j["tolerance"] = cfg.tol;
  j["seed"] = cfg.seed;
  emit(cfg, j.dump(2));
  if (!ordered) {
    std::fprintf(stderr, "ordering violated: EU %.10g, TC %.10g, LB %.10g\n", v[0], v[1], v[2]);
    return 3;
  }
  return 0;
}

std::vector<double> parse_grid(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw InvalidInput("bad --alpha2-grid entry '" + item + "'");
    }
  }
  return out;
}

int cmd_figure1(const RunConfig& cfg) {
  experiment::LognormalModel m;
  m.alpha2_grid = cfg.alpha2_grid.empty() ? experiment::default_alpha2_grid() : parse_grid(cfg.alpha2_grid);
  if (cfg.samples >= 0) m.samples = static_cast<std::size_t>(cfg.samples);
  if (cfg.quadrature_nodes >= 0) m.quadrature_nodes = cfg.quadrature_nodes;
  m.seed = cfg.seed;
  m.validate();
  const experiment::Curves c = experiment::riskneutral_curves(m);
  std::ostringstream os;
  experiment::write_csv(os, c);
  std::string text = os.str();
  if (!text.empty() && text.back() == '\n') text.pop_back();
  emit(cfg, text);
  std::fprintf(stderr, "seed %llu, pathwise %.6f, conditional %.6f\n",
               static_cast<unsigned long long>(cfg.seed), c.almost_sure.pathwise, c.almost_sure.conditional);
  return 0;
}

int cmd_validate(const RunConfig& cfg) {
  if (cfg.input.empty()) throw InvalidInput("--input is required");
  const json doc = io::read_file(cfg.input);
  // a bare tree document is accepted too
  if (!doc.contains("tree")) {
    const ScenarioTree t = io::tree_from_json(doc);
    std::cout << "valid tree: " << t.size() << " nodes, " << t.dates() << " dates\n";
    return 0;
  }
  HedgeProblem p = io::problem_from_json(doc);
  if (!cfg.style.empty()) p = p.with_style(style_from_string(cfg.style));
  std::cout << "valid problem: " << p.tree.size() << " nodes, " << p.dates() << " dates, style "
            << to_string(p.style) << '\n';
  if (!cfg.check_feasibility) return 0;
  if (cfg.result.empty()) throw InvalidInput("--check-feasibility needs --result");
  const AdaptedProcess M = io::wealth_from_json(p.tree, io::read_file(cfg.result));
  const FeasibilityReport rep = check_feasibility(p, M, cfg.tol);
  for (const std::string& f : rep.failures) std::cout << "  " << f << '\n';
  std::cout << (rep.feasible ? "feasible" : "infeasible") << ", max violation " << rep.max_violation << '\n';
  return rep.feasible ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"asset-liability hedging under expected-loss constraints"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto problem_flags = [&](CLI::App* sub) {
    sub->add_option("--input", cfg.input, "problem JSON")->required();
    sub->add_option("--style", cfg.style, "EU, TC, LB or CVAR (overrides the file)");
    sub->add_option("--output", cfg.output, "write the result here instead of stdout");
    sub->add_option("--seed", cfg.seed, "recorded in the output");
    sub->add_option("--tol", cfg.tol, "comparison tolerance");
  };
  auto* solve_cmd = app.add_subcommand("solve", "solve one problem");
  problem_flags(solve_cmd);
  solve_cmd->add_option("--solver", cfg.solver, "auto, oracle, dp or closed-form")
      ->check(CLI::IsMember({"auto", "oracle", "dp", "closed-form"}));
  auto* oracle_cmd = app.add_subcommand("oracle", "solve with the direct convex program");
  problem_flags(oracle_cmd);
  auto* compare_cmd = app.add_subcommand("compare", "solve EU, TC and LB and check their ordering");
  problem_flags(compare_cmd);
  compare_cmd->add_option("--solver", cfg.solver, "auto, oracle, dp or closed-form")
      ->check(CLI::IsMember({"auto", "oracle", "dp", "closed-form"}));
  auto* validate_cmd = app.add_subcommand("validate", "check tree and problem invariants");
  validate_cmd->add_option("--input", cfg.input, "problem or tree JSON")->required();
  validate_cmd->add_option("--style", cfg.style);
  validate_cmd->add_option("--tol", cfg.tol);
  validate_cmd->add_flag("--check-feasibility", cfg.check_feasibility, "re-check a result's wealth process");
  validate_cmd->add_option("--result", cfg.result, "result JSON from solve");
  auto* fig_cmd = app.add_subcommand("figure1", "lognormal two-date sweep over alpha2, as CSV");
  fig_cmd->add_option("--alpha2-grid", cfg.alpha2_grid, "comma separated");
  fig_cmd->add_option("--samples", cfg.samples, "Monte Carlo samples, 0 disables");
  fig_cmd->add_option("--quadrature-nodes", cfg.quadrature_nodes);
  fig_cmd->add_option("--seed", cfg.seed);
  fig_cmd->add_option("--output", cfg.output, "CSV path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (*solve_cmd) return cmd_solve(cfg, cfg.solver);
    if (*oracle_cmd) return cmd_solve(cfg, "oracle");
    if (*compare_cmd) return cmd_compare(cfg);
    if (*validate_cmd) return cmd_validate(cfg);
    if (*fig_cmd) return cmd_figure1(cfg);
  } catch (const InvalidInput& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const Infeasible& e) {
    std::fprintf(stderr, "infeasible: %s\n", e.what());
    return 2;
  } catch (const Unbounded& e) {
    std::fprintf(stderr, "unbounded: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "solver failure: %s\n", e.what());
    return 3;
  }
  return 1;
}
