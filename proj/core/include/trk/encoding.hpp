#pragma once

#include <optional>
#include <unordered_map>
#include <vector>

#include "trk/milp.hpp"
#include "trk/stl.hpp"

namespace trk::encoding {

// Backward (c*, future run) and forward (d*, past run) satisfaction counters
// for one predicate, indexed by time.
struct CounterSet {
  std::vector<milp::VarId> c1, c0, d1, d0;
};

// Shared state for encoding one or more formulas over a common time grid.
// Two modes:
//  - state mode: predicate booleans are tied to state variables through
//    big-M rows (synthesis),
//  - abstract mode: predicate booleans are free binaries that callers pin to
//    a known signal (equivalence testing, monitoring experiments).
// Encoded (node, t) pairs are cached, so re-encoding is free and shared
// subformulas share variables.
class EncodingContext {
 public:
  EncodingContext(milp::Model& model, const stl::PredicateTable& table, int horizon,
                  std::vector<std::vector<milp::VarId>> state_vars);
  EncodingContext(milp::Model& model, const stl::PredicateTable& table, int horizon);

  milp::Model& model() { return model_; }
  const stl::PredicateTable& table() const { return table_; }
  int horizon() const { return H_; }
  int cap() const { return H_ + 1; }  // saturation bound on robustness values
  bool abstract_mode() const { return state_vars_.empty(); }
  const std::vector<std::vector<milp::VarId>>& state_vars() const { return state_vars_; }

  // Picks big-M constants for an encoding over this table and horizon:
  // big_m_time covers the robustness value spread, big_m_space bounds |mu|
  // over the state box plus one.
  static double default_big_m_time(int horizon) { return 2.0 * horizon + 4.0; }

 private:
  friend milp::VarId encode_predicate_bool(EncodingContext&, int, int);
  friend milp::VarId encode_predicate_negation(EncodingContext&, int, int);
  friend const CounterSet& encode_counters(EncodingContext&, int);
  friend milp::VarId encode_theta_directional(EncodingContext&, int, int, bool);
  friend milp::VarId encode_theta_pred(EncodingContext&, int, int);
  friend class FormulaEncoder;

  void check_pred(int pred_id) const;
  void check_time(int t) const;
  std::string node_name(const stl::Formula* f);

  milp::Model& model_;
  const stl::PredicateTable& table_;
  int H_;
  std::vector<std::vector<milp::VarId>> state_vars_;  // [t][dim], empty in abstract mode

  // per-predicate caches, grids are [pred-1][t] with -1 for "not yet built"
  std::vector<std::vector<milp::VarId>> z_, nz_, thp_, thm_, th_;
  std::vector<std::optional<CounterSet>> counters_;

  // per-(node, t) caches for composite formulas
  std::unordered_map<const stl::Formula*, std::vector<milp::VarId>> theta_cache_, left_cache_,
      right_cache_, bool_cache_;
  std::unordered_map<const stl::Formula*, int> node_ids_;
  int next_node_id_ = 0;
};

// z_<pred>_<t>, binary, 1 iff mu(x_t) >= 0 (state mode adds the big-M rows:
// mu <= big_m_space z - eps (1-z) and mu >= -big_m_space (1-z)).
milp::VarId encode_predicate_bool(EncodingContext& ctx, int pred_id, int t);

// nz_<pred>_<t> with z + nz = 1.
milp::VarId encode_predicate_negation(EncodingContext& ctx, int pred_id, int t);

// Counter chains over the whole grid:
//   c1_t = z_t (1 + c1_{t+1}),  c0_t = (1-z_t)(1 + c0_{t+1}),  c*_{H+1} = 0
//   d1_t = z_t (1 + d1_{t-1}),  d0_t = (1-z_t)(1 + d0_{t-1}),  d*_{-1} = 0
const CounterSet& encode_counters(EncodingContext& ctx, int pred_id);

// Directional predicate robustness:
//   left:  thp = c1_t - c0_t - (2 z_t - 1)
//   right: thm = d1_t - d0_t - (2 z_t - 1)
milp::VarId encode_theta_directional(EncodingContext& ctx, int pred_id, int t, bool left);

// Combined predicate robustness th_<pred>_<t> = z min(thp,thm) + (1-z) max(thp,thm).
milp::VarId encode_theta_pred(EncodingContext& ctx, int pred_id, int t);

// Robustness of a formula node at t (variables th_n<k>_<t> / thp_... / thm_...).
milp::VarId encode_formula_theta(EncodingContext& ctx, const stl::FormulaPtr& f, int t);
milp::VarId encode_formula_theta_left(EncodingContext& ctx, const stl::FormulaPtr& f, int t);
milp::VarId encode_formula_theta_right(EncodingContext& ctx, const stl::FormulaPtr& f, int t);

// Boolean satisfaction of a formula node at t (q_n<k>_<t>; predicates reuse z).
milp::VarId encode_formula_bool(EncodingContext& ctx, const stl::FormulaPtr& f, int t);

}  // namespace trk::encoding
