#include "trk/synthesis.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

namespace trk::synthesis {

using milp::LinearExpr;
using milp::Sense;
using milp::VarId;
using milp::VarKind;

void LinearSystem::check() const {
  const std::size_t n = A.size();
  if (n == 0) throw std::invalid_argument("empty system matrix");
  for (const auto& row : A)
    if (row.size() != n) throw std::invalid_argument("A must be square");
  if (B.size() != n) throw std::invalid_argument("B must have one row per state dimension");
  const std::size_t m = B[0].size();
  if (m == 0) throw std::invalid_argument("system has no inputs");
  for (const auto& row : B)
    if (row.size() != m) throw std::invalid_argument("ragged B");
  if (state_box.lo.size() != n || state_box.hi.size() != n)
    throw std::invalid_argument("state box does not match state dimension");
  for (std::size_t d = 0; d < n; ++d)
    if (state_box.lo[d] > state_box.hi[d]) throw std::invalid_argument("empty state box");
  if (!(input_bound > 0.0)) throw std::invalid_argument("input bound must be positive");
  if (x0.size() != n) throw std::invalid_argument("x0 does not match state dimension");
  for (std::size_t d = 0; d < n; ++d)
    if (x0[d] < state_box.lo[d] || x0[d] > state_box.hi[d])
      throw std::invalid_argument("x0 outside the state box");
}

std::vector<double> LinearSystem::step(const std::vector<double>& x,
                                       const std::vector<double>& u) const {
  const std::size_t n = A.size(), m = B[0].size();
  std::vector<double> next(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) next[i] += A[i][j] * x[j];
    for (std::size_t k = 0; k < m; ++k) next[i] += B[i][k] * u[k];
  }
  return next;
}

std::string to_string(Objective o) {
  switch (o) {
    case Objective::Theta: return "theta";
    case Objective::ThetaLeft: return "theta_left";
    case Objective::ThetaRight: return "theta_right";
  }
  return "theta";
}

Objective objective_from_string(const std::string& s) {
  if (s == "theta") return Objective::Theta;
  if (s == "theta_left") return Objective::ThetaLeft;
  if (s == "theta_right") return Objective::ThetaRight;
  throw std::invalid_argument("unknown objective '" + s + "'");
}

namespace {

bool region_atom(const stl::Formula* f) {
  switch (f->kind) {
    case stl::NodeKind::Pred: return true;
    case stl::NodeKind::And:
      return region_atom(f->left.get()) && region_atom(f->right.get());
    default: return false;
  }
}

// Maximal conjunction/predicate subtrees; the pieces whose occupancy the
// tiebreak scores.
void collect_atoms(const stl::FormulaPtr& f, std::vector<stl::FormulaPtr>& out) {
  if (region_atom(f.get())) {
    out.push_back(f);
    return;
  }
  if (f->left) collect_atoms(f->left, out);
  if (f->right) collect_atoms(f->right, out);
}

}  // namespace

BuiltModel build(const SynthesisProblem& pb) {
  pb.system.check();
  if (!pb.formula) throw std::invalid_argument("no formula");
  const int H = pb.horizon;
  if (H < 1) throw std::invalid_argument("horizon must be at least 1");
  if (stl::formula_length(*pb.formula) > H)
    throw std::invalid_argument("formula window exceeds the horizon");
  const int n = pb.system.state_dim();
  const int m = pb.system.input_dim();
  for (const auto& p : pb.predicates.all())
    if (static_cast<int>(p.coeffs.size()) != n)
      throw std::invalid_argument("predicate '" + p.name + "' does not match state dimension");
  if (pb.tiebreak_weight < 0.0 || pb.tiebreak_weight >= 0.5)
    throw std::invalid_argument("tiebreak_weight must lie in [0, 0.5)");

  double Ms = 1.0;
  for (const auto& p : pb.predicates.all()) {
    double s = std::abs(p.offset);
    for (int d = 0; d < n; ++d)
      s += std::abs(p.coeffs[d]) *
           std::max(std::abs(pb.system.state_box.lo[d]), std::abs(pb.system.state_box.hi[d]));
    Ms = std::max(Ms, s + 1.0);
  }

  BuiltModel bm{milp::Model(2.0 * H + 4.0, Ms), {}, {}, -1, -1};
  milp::Model& model = bm.model;

  bm.x.resize(H + 1);
  for (int t = 0; t <= H; ++t)
    for (int d = 0; d < n; ++d)
      bm.x[t].push_back(model.add_var(VarKind::Continuous, pb.system.state_box.lo[d],
                                      pb.system.state_box.hi[d],
                                      "x_" + std::to_string(d) + "_" + std::to_string(t)));
  for (int d = 0; d < n; ++d) model.fix(bm.x[0][d], pb.system.x0[d]);

  bm.u.resize(H);
  for (int t = 0; t < H; ++t)
    for (int d = 0; d < m; ++d)
      bm.u[t].push_back(model.add_var(VarKind::Continuous, -pb.system.input_bound,
                                      pb.system.input_bound,
                                      "u_" + std::to_string(d) + "_" + std::to_string(t)));

  for (int t = 0; t < H; ++t)
    for (int i = 0; i < n; ++i) {
      LinearExpr e = LinearExpr::term(bm.x[t + 1][i]);
      for (int j = 0; j < n; ++j)
        if (pb.system.A[i][j] != 0.0) e.add(bm.x[t][j], -pb.system.A[i][j]);
      for (int k = 0; k < m; ++k)
        if (pb.system.B[i][k] != 0.0) e.add(bm.u[t][k], -pb.system.B[i][k]);
      model.add_constraint(e, Sense::EQ, 0.0,
                           "dyn_" + std::to_string(i) + "_" + std::to_string(t));
    }

  encoding::EncodingContext ctx(model, pb.predicates, H, bm.x);
  switch (pb.objective) {
    case Objective::Theta: bm.theta_var = encode_formula_theta(ctx, pb.formula, 0); break;
    case Objective::ThetaLeft:
      bm.theta_var = encode_formula_theta_left(ctx, pb.formula, 0);
      break;
    case Objective::ThetaRight:
      bm.theta_var = encode_formula_theta_right(ctx, pb.formula, 0);
      break;
  }
  model.fix(encode_formula_bool(ctx, pb.formula, 0), 1.0);

  const double cap = H + 1.0;
  bm.score_var = model.add_var(VarKind::Continuous, -cap - 1.0, cap + 1.0, "J");
  LinearExpr def = LinearExpr::term(bm.score_var);
  def.add(bm.theta_var, -1.0);
  if (pb.tiebreak_weight > 0.0) {
    std::vector<stl::FormulaPtr> atoms;
    collect_atoms(pb.formula, atoms);
    const double total = double(atoms.size()) * (H + 1.0) * (H + 2.0) / 2.0;
    const double scale = pb.tiebreak_weight / std::max(total, 1.0);
    // Tie direction follows the objective: past robustness grows with early
    // entries, so theta_right gets a promptness penalty on late occupancy;
    // theta and theta_left get a dwell bonus weighted toward early steps.
    // Either term stays below 0.5 total, so integer optima are never traded.
    for (const auto& atom : atoms)
      for (int t = 0; t <= H; ++t) {
        const VarId q = encode_formula_bool(ctx, atom, t);
        if (pb.objective == Objective::ThetaRight)
          def.add(q, scale * (t + 1.0));
        else
          def.add(q, -scale * (H + 1.0 - t));
      }
  }
  model.add_constraint(def, Sense::EQ, 0.0, "def_J");
  model.set_objective(true, LinearExpr::term(bm.score_var));
  return bm;
}

SynthesisResult solve(const SynthesisProblem& pb, const backend::SolverConfig& config) {
  SynthesisResult res;
  BuiltModel bm = build(pb);

  const auto t0 = std::chrono::steady_clock::now();
  backend::Solution sol = backend::run(bm.model, config);
  res.solve_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  res.status = sol.status;
  res.solver_status = sol.raw_status.empty() ? backend::to_string(sol.status) : sol.raw_status;

  const bool has_point = !sol.values.empty() && sol.status != backend::SolveStatus::Infeasible &&
                         sol.status != backend::SolveStatus::Error;
  if (!has_point) return res;
  backend::round_integers(bm.model, sol);

  const int H = pb.horizon;
  const int n = pb.system.state_dim();
  const int m = pb.system.input_dim();
  // Snap to 6 decimals: keeps genuine geometry but removes solver noise that
  // could flip a boolean on an active predicate boundary.
  const auto snap = [](double v) { return std::round(v * 1e6) / 1e6; };
  res.trajectory.states.assign(H + 1, {});
  for (int t = 0; t <= H; ++t)
    for (int d = 0; d < n; ++d)
      res.trajectory.states[t].push_back(snap(sol.value(bm.model.var(bm.x[t][d]).name)));
  res.inputs.assign(H, {});
  for (int t = 0; t < H; ++t)
    for (int d = 0; d < m; ++d)
      res.inputs[t].push_back(snap(sol.value(bm.model.var(bm.u[t][d]).name)));

  res.solver_objective = sol.objective;
  res.objective_value = std::llround(sol.value(bm.model.var(bm.theta_var).name));
  res.feasible = true;
  return res;
}

ValidationReport validate(const SynthesisProblem& pb, const SynthesisResult& res,
                          double dynamics_tol) {
  ValidationReport rep;
  const int H = pb.horizon;
  if (!res.feasible || static_cast<int>(res.trajectory.states.size()) != H + 1 ||
      static_cast<int>(res.inputs.size()) != H)
    return rep;

  const auto& sys = pb.system;
  const int n = sys.state_dim();
  const int m = sys.input_dim();
  bool dyn = true;
  for (int d = 0; d < n && dyn; ++d)
    dyn = std::abs(res.trajectory.states[0][d] - sys.x0[d]) <= dynamics_tol;
  for (int t = 0; t <= H && dyn; ++t) {
    if (static_cast<int>(res.trajectory.states[t].size()) != n) {
      dyn = false;
      break;
    }
    for (int d = 0; d < n; ++d) {
      const double v = res.trajectory.states[t][d];
      if (v < sys.state_box.lo[d] - dynamics_tol || v > sys.state_box.hi[d] + dynamics_tol)
        dyn = false;
    }
  }
  for (int t = 0; t < H && dyn; ++t) {
    if (static_cast<int>(res.inputs[t].size()) != m) {
      dyn = false;
      break;
    }
    for (int d = 0; d < m; ++d)
      if (std::abs(res.inputs[t][d]) > sys.input_bound + dynamics_tol) dyn = false;
    if (!dyn) break;
    const auto next = sys.step(res.trajectory.states[t], res.inputs[t]);
    for (int d = 0; d < n; ++d)
      if (std::abs(next[d] - res.trajectory.states[t + 1][d]) > dynamics_tol) dyn = false;
  }
  rep.dynamics_ok = dyn;

  const auto sig = semantics::booleanize(res.trajectory, pb.predicates);
  rep.theta = semantics::theta(*pb.formula, sig, 0);
  rep.theta_left = semantics::theta_left(*pb.formula, sig, 0);
  rep.theta_right = semantics::theta_right(*pb.formula, sig, 0);
  long long variant = rep.theta;
  if (pb.objective == Objective::ThetaLeft) variant = rep.theta_left;
  if (pb.objective == Objective::ThetaRight) variant = rep.theta_right;
  rep.objective_consistent = variant == res.objective_value;
  rep.char_holds = semantics::characteristic(*pb.formula, sig, 0) > 0;
  rep.pass = rep.dynamics_ok && rep.objective_consistent && rep.char_holds;
  return rep;
}

}  // namespace trk::synthesis
