#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "trk/backend.hpp"
#include "trk/scenario.hpp"
#include "trk/semantics.hpp"
#include "trk/stl.hpp"
#include "trk/synthesis.hpp"

namespace fs = std::filesystem;

namespace {

std::vector<std::string> split_header(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) {
    std::size_t a = cell.find_first_not_of(" \t\r");
    std::size_t b = cell.find_last_not_of(" \t\r");
    out.push_back(a == std::string::npos ? "" : cell.substr(a, b - a + 1));
  }
  return out;
}

// Predicate CSVs carry their own atom names in the header.
trk::stl::PredicateTable table_from_header(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(path + ": empty file");
  const auto header = split_header(line);
  if (header.empty() || header[0] != "t")
    throw std::runtime_error(path + ": first column must be t");
  trk::stl::PredicateTable table;
  for (std::size_t i = 1; i < header.size(); ++i)
    if (!header[i].empty()) table.add(header[i], {}, 0.0);
  return table;
}

// u<k> columns of a trajectory CSV; rows without input cells (the final
// state) are skipped.
std::vector<std::vector<double>> read_inputs_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  std::getline(in, line);
  const auto header = split_header(line);
  std::vector<std::size_t> cols;
  for (std::size_t i = 1; i < header.size(); ++i)
    if (header[i].size() > 1 && header[i][0] == 'u' &&
        header[i].find_first_not_of("0123456789", 1) == std::string::npos)
      cols.push_back(i);
  std::vector<std::vector<double>> inputs;
  if (cols.empty()) return inputs;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto cells = split_header(line);
    std::vector<double> u;
    bool complete = true;
    for (std::size_t c : cols) {
      if (c >= cells.size() || cells[c].empty()) {
        complete = false;
        break;
      }
      u.push_back(std::stod(cells[c]));
    }
    if (complete) inputs.push_back(std::move(u));
  }
  return inputs;
}

struct MonitorArgs {
  std::string predicates_csv, scenario_path, trajectory_csv, formula;
  int t = 0;
};

int run_monitor(const MonitorArgs& args) {
  trk::stl::PredicateTable table;
  trk::semantics::PredicateSignalSet sig;
  std::string formula_text = args.formula;

  if (!args.predicates_csv.empty()) {
    table = table_from_header(args.predicates_csv);
    sig = trk::scenario::read_predicate_csv(args.predicates_csv, table);
    if (formula_text.empty())
      throw std::runtime_error("--formula is required with --predicates");
  } else if (!args.scenario_path.empty()) {
    trk::scenario::Scenario sc = trk::scenario::load(args.scenario_path);
    if (args.trajectory_csv.empty())
      throw std::runtime_error("--trajectory is required with --scenario");
    auto traj = trk::scenario::read_state_csv(args.trajectory_csv);
    sig = trk::semantics::booleanize(traj, sc.problem.predicates);
    table = sc.problem.predicates;
    if (formula_text.empty()) formula_text = sc.formula_text;
  } else {
    throw std::runtime_error("monitor needs --predicates or --scenario");
  }

  const auto f = trk::stl::parse(formula_text, table);
  const int chi = trk::semantics::characteristic(*f, sig, args.t);
  std::printf("characteristic %+d\n", chi);
  std::printf("theta %d\n", trk::semantics::theta(*f, sig, args.t));
  std::printf("theta_left %d\n", trk::semantics::theta_left(*f, sig, args.t));
  std::printf("theta_right %d\n", trk::semantics::theta_right(*f, sig, args.t));
  return chi > 0 ? 0 : 2;
}

struct SynthArgs {
  std::string scenario_path, out_dir, solver_cmd, objective;
  double time_limit = 600.0;
  double mip_gap = 0.0;
  bool keep_files = false;
};

int run_synth(const SynthArgs& args) {
  trk::scenario::Scenario sc = trk::scenario::load(args.scenario_path);
  if (!args.objective.empty())
    sc.problem.objective = trk::synthesis::objective_from_string(args.objective);

  trk::backend::SolverConfig cfg =
      args.solver_cmd.empty() ? trk::backend::default_config() : trk::backend::SolverConfig{};
  if (!args.solver_cmd.empty()) cfg.command_template = args.solver_cmd;
  cfg.time_limit_seconds = args.time_limit;
  cfg.mip_gap = args.mip_gap;
  cfg.keep_files = args.keep_files;

  const auto res = trk::synthesis::solve(sc.problem, cfg);
  if (res.status == trk::backend::SolveStatus::Infeasible) {
    std::printf("infeasible: no trajectory satisfies the specification\n");
    return 3;
  }
  if (!res.feasible) {
    std::fprintf(stderr, "solver failed: %s\n", res.solver_status.c_str());
    return 1;
  }
  const auto rep = trk::synthesis::validate(sc.problem, res);

  if (!args.out_dir.empty()) {
    fs::create_directories(args.out_dir);
    const fs::path dir(args.out_dir);
    trk::scenario::write_trajectory_csv((dir / "trajectory.csv").string(), res.trajectory,
                                        res.inputs);
    const auto sig = trk::semantics::booleanize(res.trajectory, sc.problem.predicates);
    trk::scenario::write_plotdata_csv((dir / "plotdata.csv").string(), sc.problem.predicates,
                                      sig);
    trk::scenario::write_summary_json((dir / "summary.json").string(), sc, res, rep);
    std::error_code ec;
    if (!fs::equivalent(args.scenario_path, dir / "scenario.json", ec))
      fs::copy_file(args.scenario_path, dir / "scenario.json",
                    fs::copy_options::overwrite_existing);
  }

  std::string qualifier;
  if (res.status != trk::backend::SolveStatus::Optimal)
    qualifier = " (" + trk::backend::to_string(res.status) + ", best incumbent)";
  std::printf("%s %lld (theta %lld, theta_left %lld, theta_right %lld) in %.2fs%s, %s\n",
              trk::synthesis::to_string(sc.problem.objective).c_str(), res.objective_value,
              rep.theta, rep.theta_left, rep.theta_right, res.solve_seconds, qualifier.c_str(),
              rep.pass ? "validated" : "VALIDATION FAILED");
  return rep.pass ? 0 : 1;
}

struct VerifyArgs {
  std::string result_dir;
  std::string scenario_path, trajectory_csv;
  long long expect = 0;
  bool has_expect = false;
};

int run_verify(VerifyArgs args) {
  if (!args.result_dir.empty()) {
    const fs::path dir(args.result_dir);
    for (const char* name : {"scenario.json", "trajectory.csv", "summary.json"})
      if (!fs::exists(dir / name))
        throw std::runtime_error(args.result_dir + ": missing " + name);
    args.scenario_path = (dir / "scenario.json").string();
    args.trajectory_csv = (dir / "trajectory.csv").string();
    std::ifstream in(dir / "summary.json");
    const auto summary = nlohmann::json::parse(in);
    args.expect = summary.at("objective").get<long long>();
    args.has_expect = true;
  } else if (args.scenario_path.empty() || args.trajectory_csv.empty()) {
    throw std::runtime_error("verify needs a result directory or --scenario with --trajectory");
  }

  trk::scenario::Scenario sc = trk::scenario::load(args.scenario_path);
  trk::synthesis::SynthesisResult res;
  res.feasible = true;
  res.status = trk::backend::SolveStatus::Optimal;
  res.trajectory = trk::scenario::read_state_csv(args.trajectory_csv);
  res.inputs = read_inputs_csv(args.trajectory_csv);

  const auto sig = trk::semantics::booleanize(res.trajectory, sc.problem.predicates);
  long long variant = 0;
  switch (sc.problem.objective) {
    case trk::synthesis::Objective::Theta:
      variant = trk::semantics::theta(*sc.problem.formula, sig, 0);
      break;
    case trk::synthesis::Objective::ThetaLeft:
      variant = trk::semantics::theta_left(*sc.problem.formula, sig, 0);
      break;
    case trk::synthesis::Objective::ThetaRight:
      variant = trk::semantics::theta_right(*sc.problem.formula, sig, 0);
      break;
  }
  res.objective_value = args.has_expect ? args.expect : variant;

  const auto rep = trk::synthesis::validate(sc.problem, res);
  const auto shift_rep = trk::semantics::verify_shift_theorem(*sc.problem.formula, sig, 0);
  const bool bound_ok = trk::semantics::verify_bound(*sc.problem.formula, sig, 0);

  std::printf("theta %lld, theta_left %lld, theta_right %lld\n", rep.theta, rep.theta_left,
              rep.theta_right);
  std::printf("satisfied        %s\n", rep.char_holds ? "ok" : "FAIL");
  std::printf("dynamics         %s\n", rep.dynamics_ok ? "ok" : "FAIL");
  std::printf("objective        %s\n", rep.objective_consistent ? "ok" : "FAIL");
  std::printf("shift_invariance %s (%lld shifts checked)\n",
              shift_rep.ok() ? "ok" : "FAIL", shift_rep.checked);
  std::printf("direction_bound  %s\n", bound_ok ? "ok" : "FAIL");
  const bool all = rep.pass && shift_rep.ok() && bound_ok;
  return all ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"combined temporal robustness: monitoring, synthesis, checking"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "0.1.0");

  MonitorArgs margs;
  CLI::App* monitor = app.add_subcommand(
      "monitor", "evaluate a formula's satisfaction and robustness on a signal");
  monitor->add_option("--predicates", margs.predicates_csv,
                      "CSV of +1/-1 predicate rows (header: t,<name>,...)");
  monitor->add_option("--scenario", margs.scenario_path, "scenario JSON (with --trajectory)");
  monitor->add_option("--trajectory", margs.trajectory_csv, "state trajectory CSV");
  monitor->add_option("--formula", margs.formula, "formula text (defaults to the scenario's)");
  monitor->add_option("--t", margs.t, "evaluation time")->capture_default_str();

  SynthArgs sargs;
  CLI::App* synth =
      app.add_subcommand("synth", "synthesize a robustness-maximizing controller");
  synth->add_option("--scenario", sargs.scenario_path, "scenario JSON")->required();
  synth->add_option("--out-dir", sargs.out_dir, "directory for trajectory/summary outputs");
  synth->add_option("--objective", sargs.objective, "theta | theta_left | theta_right");
  synth->add_option("--solver-cmd", sargs.solver_cmd,
                    "solver command template ({model} {solution} {time_limit} {mip_gap})");
  synth->add_option("--time-limit", sargs.time_limit, "solver time limit, seconds")
      ->capture_default_str();
  synth->add_option("--mip-gap", sargs.mip_gap, "relative MIP gap")->capture_default_str();
  synth->add_flag("--keep-files", sargs.keep_files, "keep the LP and solution files");

  VerifyArgs vargs;
  CLI::App* verify =
      app.add_subcommand("verify", "re-check a synthesized trajectory against its scenario");
  verify->add_option("dir", vargs.result_dir, "synth output directory");
  verify->add_option("--scenario", vargs.scenario_path, "scenario JSON (with --trajectory)");
  verify->add_option("--trajectory", vargs.trajectory_csv, "trajectory CSV");
  verify->add_option("--expect", vargs.expect, "expected objective value")
      ->each([&vargs](const std::string&) { vargs.has_expect = true; });

  CLI11_PARSE(app, argc, argv);

  try {
    if (monitor->parsed()) return run_monitor(margs);
    if (synth->parsed()) return run_synth(sargs);
    if (verify->parsed()) return run_verify(vargs);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 1;
}
