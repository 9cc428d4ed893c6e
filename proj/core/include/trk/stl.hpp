#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace trk::stl {

// Linear predicate over the system state: holds at x iff coeffs . x + offset >= 0.
// The boundary (mu = 0) counts as satisfied. Predicates with empty coeffs are
// abstract atoms: they can be monitored against +-1 signal rows but not
// evaluated against states.
struct LinearPredicate {
  int id = 0;  // 1-based, assigned by the table
  std::string name;
  std::vector<double> coeffs;
  double offset = 0.0;

  double mu(const std::vector<double>& x) const;
};

class PredicateTable {
 public:
  // Returns the assigned id. Throws std::invalid_argument on duplicate names
  // or mismatched coefficient dimensions.
  int add(const std::string& name, std::vector<double> coeffs, double offset);

  const LinearPredicate& by_id(int id) const;
  const LinearPredicate* find(const std::string& name) const;  // null if absent
  int size() const { return static_cast<int>(preds_.size()); }
  // State dimension shared by all non-abstract predicates (0 if none).
  int dimension() const;
  const std::vector<LinearPredicate>& all() const { return preds_; }

 private:
  std::vector<LinearPredicate> preds_;
};

// Closed discrete time interval [lo, hi], 0 <= lo <= hi.
struct Interval {
  int lo = 0;
  int hi = 0;
};

enum class NodeKind { Pred, Not, And, Or, Until, Eventually, Always };

class Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

class Formula {
 public:
  NodeKind kind;
  int pred_id = 0;     // Pred only
  Interval window;     // Until / Eventually / Always
  FormulaPtr left;     // unary child, or left operand of And/Or/Until
  FormulaPtr right;    // right operand of And/Or/Until

  static FormulaPtr pred(int pred_id);
  static FormulaPtr negate(FormulaPtr f);
  static FormulaPtr conj(FormulaPtr a, FormulaPtr b);
  static FormulaPtr disj(FormulaPtr a, FormulaPtr b);
  static FormulaPtr until(Interval w, FormulaPtr a, FormulaPtr b);
  static FormulaPtr eventually(Interval w, FormulaPtr f);
  static FormulaPtr always(Interval w, FormulaPtr f);
};

struct ParseError : std::runtime_error {
  ParseError(const std::string& msg, size_t pos) : std::runtime_error(msg), position(pos) {}
  size_t position;
};

// Grammar, loosest binding first:
//   or    := and ('|' and)*
//   and   := until ('&' until)*
//   until := unary ('U' '[' int ',' int ']' until)?      right associative
//   unary := '!' unary | 'F' '[' a ',' b ']' unary | 'G' '[' a ',' b ']' unary | atom
//   atom  := identifier | '(' or ')'
// F/G/U are operators only when immediately followed by '['; otherwise they
// are ordinary predicate identifiers. Whitespace is insignificant.
FormulaPtr parse(const std::string& text, const PredicateTable& table);

// Canonical text form; parse(print(f)) reproduces the tree.
std::string print(const Formula& f, const PredicateTable& table);

// Number of future steps an evaluation at t may touch: evaluation at t reads
// times in [t, t + formula_length(f)].
int formula_length(const Formula& f);

// Distinct predicate ids in preorder.
std::vector<int> predicates_of(const Formula& f);

}  // namespace trk::stl
