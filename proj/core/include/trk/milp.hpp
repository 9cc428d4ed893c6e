#pragma once

#include <limits>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace trk::milp {

using VarId = int;

enum class VarKind { Continuous, Integer, Binary };
enum class Sense { LE, GE, EQ };

constexpr double kInf = std::numeric_limits<double>::infinity();

struct LinearTerm {
  VarId var;
  double coef;
};

// Sparse affine expression: sum of coef*var plus a constant.
class LinearExpr {
 public:
  LinearExpr() = default;
  LinearExpr(double c) : constant_(c) {}  // NOLINT: implicit by design
  static LinearExpr term(VarId v, double coef = 1.0);

  LinearExpr& add(VarId v, double coef);
  LinearExpr& add(const LinearExpr& other, double scale = 1.0);
  LinearExpr& operator+=(const LinearExpr& other) { return add(other); }

  double constant() const { return constant_; }
  void set_constant(double c) { constant_ = c; }
  // Terms merged by variable, zero coefficients dropped, insertion order kept.
  std::vector<LinearTerm> normalized() const;
  bool empty() const;

 private:
  std::vector<LinearTerm> terms_;
  double constant_ = 0.0;
};

struct Variable {
  std::string name;
  VarKind kind;
  double lb, ub;
};

struct Constraint {
  std::string name;
  std::vector<LinearTerm> terms;  // normalized, constant folded into rhs
  Sense sense;
  double rhs;
};

// Mixed integer linear model with deterministic variable/constraint order.
// big_m_time bounds time-robustness quantities (counter/theta gadgets),
// big_m_space bounds |mu(x)| over the state box, epsilon separates strict
// predicate violation from satisfaction.
class Model {
 public:
  Model(double big_m_time, double big_m_space, double epsilon = 1e-6);

  VarId add_var(VarKind kind, double lb, double ub, const std::string& name);
  void add_constraint(const LinearExpr& lhs, Sense sense, double rhs, std::string name = "");
  void set_objective(bool maximize, const LinearExpr& expr);

  // Pins a variable by tightening both bounds; value must sit inside them.
  void fix(VarId v, double value);

  double big_m_time() const { return big_m_time_; }
  double big_m_space() const { return big_m_space_; }
  double epsilon() const { return epsilon_; }

  const std::vector<Variable>& variables() const { return vars_; }
  const std::vector<Constraint>& constraints() const { return cons_; }
  const Variable& var(VarId v) const { return vars_.at(v); }
  VarId find_var(const std::string& name) const;  // -1 if absent
  bool maximize() const { return maximize_; }
  const LinearExpr& objective() const { return objective_; }

  // CPLEX LP text; deterministic for identical construction traces.
  std::string export_lp() const;

 private:
  double big_m_time_, big_m_space_, epsilon_;
  std::vector<Variable> vars_;
  std::vector<Constraint> cons_;
  std::unordered_map<std::string, VarId> names_;
  std::unordered_set<std::string> cons_names_;
  LinearExpr objective_;
  bool maximize_ = true;
  int anon_constraints_ = 0;
};

// r = min(inputs) via selector binaries: r <= x_i, r >= x_i - M(1-b_i),
// sum b_i = 1, M = big_m_time. Requires M to cover the spread between the
// largest input upper bound and the smallest input lower bound.
VarId encode_min(Model& m, const std::vector<VarId>& inputs, const std::string& name);
// r = max(inputs), mirrored.
VarId encode_max(Model& m, const std::vector<VarId>& inputs, const std::string& name);

// w = z * y for binary z and y in [lo, hi] (exact, no big-M):
//   w <= hi z,  w >= lo z,  w <= y - lo(1-z),  w >= y - hi(1-z)
VarId encode_binary_product(Model& m, VarId z, VarId y, double lo, double hi,
                            const std::string& name);
// Same with an affine expression in place of y.
VarId encode_binary_product(Model& m, VarId z, const LinearExpr& y, double lo, double hi,
                            const std::string& name, VarKind kind = VarKind::Continuous);

}  // namespace trk::milp
