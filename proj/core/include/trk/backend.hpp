#pragma once

#include <map>
#include <string>

#include "trk/milp.hpp"

namespace trk::backend {

enum class SolveStatus { Optimal, Feasible, Infeasible, Timeout, Error };

std::string to_string(SolveStatus s);

struct Solution {
  SolveStatus status = SolveStatus::Error;
  double objective = 0.0;
  std::map<std::string, double> values;
  std::string raw_status;  // solver's own words, for diagnostics

  bool has(const std::string& name) const { return values.count(name) != 0; }
  // Solvers are allowed to omit variables at zero.
  double value(const std::string& name, double fallback = 0.0) const;
};

// The command template is run through the shell with {model}, {solution},
// {time_limit} and {mip_gap} substituted.
struct SolverConfig {
  std::string command_template;
  double time_limit_seconds = 600.0;
  double mip_gap = 0.0;
  bool keep_files = false;
  std::string work_dir;  // empty: fresh directory under the system temp dir
};

// Solver discovery, in order: TRK_SOLVER_CMD, a cbc binary on PATH, the
// bundled LP driver script (TRK_LP_DRIVER, next to the executable, or the
// source-tree copy). Throws if nothing is found.
SolverConfig default_config();

// Exports the model, runs the solver, parses the solution file. Understands
// the bundled driver's format, cbc -solu files and CPLEX-style XML.
Solution run(const milp::Model& model, const SolverConfig& config);

// Snaps integer and binary variables to integers in place; throws if any
// sits further than tol from one.
void round_integers(const milp::Model& model, Solution& sol, double tol = 1e-4);

}  // namespace trk::backend
