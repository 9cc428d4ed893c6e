#pragma once

#include <cstdint>
#include <vector>

#include "trk/stl.hpp"

namespace trk::semantics {

// Boolean signal rows over the time domain {0..horizon}: rows[k-1][t] is the
// satisfaction (+1/-1) of predicate k at time t.
struct PredicateSignalSet {
  int horizon = -1;
  std::vector<std::vector<int>> rows;

  int num_predicates() const { return static_cast<int>(rows.size()); }
  void check() const;  // throws unless every row has horizon+1 entries in {+1,-1}
};

// Sampled state trajectory, states[t] is the state at time t.
struct StateSignal {
  std::vector<std::vector<double>> states;

  int horizon() const { return static_cast<int>(states.size()) - 1; }
};

// chi rows from a state trajectory; boundary mu = 0 counts as satisfied.
PredicateSignalSet booleanize(const StateSignal& sig, const stl::PredicateTable& table);

// Satisfaction (+1) or violation (-1) of f at time t.
// Requires 0 <= t and t + formula_length(f) <= horizon.
int characteristic(const stl::Formula& f, const PredicateSignalSet& sig, int t);

// Combined, left (future run), and right (past run) temporal robustness.
// Values saturate at +-cap with cap = horizon + 1; windows never leave
// {0..horizon}, so every predicate robustness is 0 at t = 0 and t = horizon.
int theta(const stl::Formula& f, const PredicateSignalSet& sig, int t);
int theta_left(const stl::Formula& f, const PredicateSignalSet& sig, int t);
int theta_right(const stl::Formula& f, const PredicateSignalSet& sig, int t);

// Per-predicate time shift: row k of the result at t is row k of the input at
// t + taus[k-1], clamped to the domain (constant extrapolation at the ends).
PredicateSignalSet shift(const PredicateSignalSet& sig, const std::vector<int>& taus);

// Closed interval of times that evaluating f at t may read from each
// predicate row; entries are {lo, hi}, or {1, 0} (empty) for unused rows.
std::vector<std::pair<int, int>> access_windows(const stl::Formula& f, int num_predicates,
                                                int t);

struct ShiftReport {
  long long checked = 0;
  std::vector<std::vector<int>> violations;  // offending shift vectors

  bool ok() const { return violations.empty(); }
};

// Checks the shift-invariance guarantee: with r = |theta(f, sig, t)|, every
// per-predicate shift vector with entries in [-r, r] whose shifted reads stay
// inside the domain must preserve the characteristic at t. Enumerates all
// such vectors when (2r+1)^K <= 100000, otherwise samples 10000 uniformly.
ShiftReport verify_shift_theorem(const stl::Formula& f, const PredicateSignalSet& sig, int t,
                                 uint64_t seed = 12345);

// |theta| <= |theta_left| and |theta| <= |theta_right| at (f, t).
bool verify_bound(const stl::Formula& f, const PredicateSignalSet& sig, int t);

}  // namespace trk::semantics
