#pragma once

#include <string>
#include <vector>

#include "trk/backend.hpp"
#include "trk/encoding.hpp"
#include "trk/milp.hpp"
#include "trk/semantics.hpp"
#include "trk/stl.hpp"

namespace trk::synthesis {

struct Box {
  std::vector<double> lo, hi;
};

// x_{t+1} = A x_t + B u_t with componentwise state box and |u_i| <= input_bound.
struct LinearSystem {
  std::vector<std::vector<double>> A;
  std::vector<std::vector<double>> B;
  Box state_box;
  double input_bound = 0.0;
  std::vector<double> x0;

  int state_dim() const { return static_cast<int>(A.size()); }
  int input_dim() const { return A.empty() ? 0 : static_cast<int>(B[0].size()); }
  void check() const;
  std::vector<double> step(const std::vector<double>& x, const std::vector<double>& u) const;
};

enum class Objective { Theta, ThetaLeft, ThetaRight };

std::string to_string(Objective o);
Objective objective_from_string(const std::string& s);

struct SynthesisProblem {
  LinearSystem system;
  stl::PredicateTable predicates;
  stl::FormulaPtr formula;
  int horizon = 0;
  Objective objective = Objective::Theta;
  // Secondary objective weight in (0, 0.5): picks a deterministic optimum
  // when robustness ties. theta/theta_left reward early zone occupancy
  // (dwell), theta_right penalizes late occupancy (promptness). The integer
  // robustness is always recoverable from the score by rounding.
  double tiebreak_weight = 0.0;
};

struct BuiltModel {
  milp::Model model;
  std::vector<std::vector<milp::VarId>> x;  // [t][dim], t = 0..H
  std::vector<std::vector<milp::VarId>> u;  // [t][dim], t = 0..H-1
  milp::VarId theta_var = -1;               // robustness of the chosen variant at t = 0
  milp::VarId score_var = -1;               // J
};

// Dynamics + formula encoding + satisfaction pin (root holds at t = 0),
// maximizing J = theta_variant + tiebreak.
BuiltModel build(const SynthesisProblem& problem);

struct SynthesisResult {
  backend::SolveStatus status = backend::SolveStatus::Error;
  bool feasible = false;
  long long objective_value = 0;  // integer robustness achieved
  double solver_objective = 0.0;  // raw J
  semantics::StateSignal trajectory;
  std::vector<std::vector<double>> inputs;
  std::string solver_status;
  double solve_seconds = 0.0;
};

SynthesisResult solve(const SynthesisProblem& problem, const backend::SolverConfig& config);

// Re-derives everything from the returned trajectory, independent of the
// solver: simulate the dynamics, booleanize, recompute the robustness.
struct ValidationReport {
  long long theta = 0, theta_left = 0, theta_right = 0;
  bool dynamics_ok = false;         // x0, dynamics, state box, input bound
  bool objective_consistent = false;  // recomputed variant == reported value
  bool char_holds = false;          // formula satisfied at t = 0
  bool pass = false;
};

ValidationReport validate(const SynthesisProblem& problem, const SynthesisResult& result,
                          double dynamics_tol = 1e-5);

}  // namespace trk::synthesis
