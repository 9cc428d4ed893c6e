#include "trk/encoding.hpp"

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <string>

namespace trk::encoding {

using milp::LinearExpr;
using milp::Model;
using milp::Sense;
using milp::VarId;
using milp::VarKind;

namespace {

std::string tstr(int t) { return std::to_string(t); }

// m-ary Boolean conjunction: q <= x_i, q >= sum x_i - (m-1).
VarId bool_and(Model& m, const std::vector<VarId>& inputs, const std::string& name) {
  if (inputs.empty()) throw std::invalid_argument("bool_and needs at least one input");
  if (inputs.size() == 1) return inputs[0];
  VarId q = m.add_var(VarKind::Binary, 0.0, 1.0, name);
  LinearExpr lb = LinearExpr::term(q);
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    LinearExpr e = LinearExpr::term(q);
    e.add(inputs[i], -1.0);
    m.add_constraint(e, Sense::LE, 0.0, name + "_le_" + std::to_string(i));
    lb.add(inputs[i], -1.0);
  }
  m.add_constraint(lb, Sense::GE, -double(inputs.size() - 1), name + "_lb");
  return q;
}

// m-ary Boolean disjunction: q >= x_i, q <= sum x_i.
VarId bool_or(Model& m, const std::vector<VarId>& inputs, const std::string& name) {
  if (inputs.empty()) throw std::invalid_argument("bool_or needs at least one input");
  if (inputs.size() == 1) return inputs[0];
  VarId q = m.add_var(VarKind::Binary, 0.0, 1.0, name);
  LinearExpr ub = LinearExpr::term(q);
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    LinearExpr e = LinearExpr::term(q);
    e.add(inputs[i], -1.0);
    m.add_constraint(e, Sense::GE, 0.0, name + "_ge_" + std::to_string(i));
    ub.add(inputs[i], -1.0);
  }
  m.add_constraint(ub, Sense::LE, 0.0, name + "_ub");
  return q;
}

}  // namespace

EncodingContext::EncodingContext(Model& model, const stl::PredicateTable& table, int horizon,
                                 std::vector<std::vector<VarId>> state_vars)
    : model_(model), table_(table), H_(horizon), state_vars_(std::move(state_vars)) {
  if (H_ < 0) throw std::invalid_argument("horizon must be nonnegative");
  if (model_.big_m_time() + 1e-9 < 2.0 * H_ + 2.0)
    throw std::invalid_argument("model big_m_time below 2H+2; robustness gadgets need it");
  if (!state_vars_.empty()) {
    if (static_cast<int>(state_vars_.size()) != H_ + 1)
      throw std::invalid_argument("state grid must have one row per step 0..H");
    const std::size_t dim = state_vars_[0].size();
    for (const auto& row : state_vars_)
      if (row.size() != dim) throw std::invalid_argument("ragged state grid");
    for (const auto& p : table_.all())
      if (p.coeffs.size() != dim)
        throw std::invalid_argument("predicate '" + p.name + "' does not match state dimension");
  }
  const std::size_t K = table_.size();
  const std::vector<VarId> empty_row(H_ + 1, -1);
  z_.assign(K, empty_row);
  nz_.assign(K, empty_row);
  thp_.assign(K, empty_row);
  thm_.assign(K, empty_row);
  th_.assign(K, empty_row);
  counters_.resize(K);
}

EncodingContext::EncodingContext(Model& model, const stl::PredicateTable& table, int horizon)
    : EncodingContext(model, table, horizon, {}) {}

void EncodingContext::check_pred(int pred_id) const {
  if (pred_id < 1 || pred_id > static_cast<int>(table_.size()))
    throw std::invalid_argument("unknown predicate id " + std::to_string(pred_id));
}

void EncodingContext::check_time(int t) const {
  if (t < 0 || t > H_) throw std::out_of_range("time " + std::to_string(t) + " outside 0..H");
}

std::string EncodingContext::node_name(const stl::Formula* f) {
  auto [it, inserted] = node_ids_.try_emplace(f, next_node_id_);
  if (inserted) ++next_node_id_;
  return "n" + std::to_string(it->second);
}

VarId encode_predicate_bool(EncodingContext& ctx, int pred_id, int t) {
  ctx.check_pred(pred_id);
  ctx.check_time(t);
  VarId& slot = ctx.z_[pred_id - 1][t];
  if (slot >= 0) return slot;

  const stl::LinearPredicate& p = ctx.table_.by_id(pred_id);
  Model& m = ctx.model_;
  const std::string name = "z_" + p.name + "_" + tstr(t);
  VarId z = m.add_var(VarKind::Binary, 0.0, 1.0, name);
  if (!ctx.abstract_mode()) {
    LinearExpr mu(p.offset);
    for (std::size_t d = 0; d < p.coeffs.size(); ++d)
      if (p.coeffs[d] != 0.0) mu.add(ctx.state_vars_[t][d], p.coeffs[d]);
    const double Ms = m.big_m_space();
    const double eps = m.epsilon();
    // z = 0 forces mu <= -eps, z = 1 forces mu >= 0
    LinearExpr hi = mu;
    hi.add(z, -(Ms + eps));
    m.add_constraint(hi, Sense::LE, -eps, "def_" + name + "_hi");
    LinearExpr lo = mu;
    lo.add(z, -Ms);
    m.add_constraint(lo, Sense::GE, -Ms, "def_" + name + "_lo");
  }
  slot = z;
  return z;
}

VarId encode_predicate_negation(EncodingContext& ctx, int pred_id, int t) {
  ctx.check_pred(pred_id);
  ctx.check_time(t);
  VarId& slot = ctx.nz_[pred_id - 1][t];
  if (slot >= 0) return slot;

  VarId z = encode_predicate_bool(ctx, pred_id, t);
  Model& m = ctx.model_;
  const std::string name = "nz_" + ctx.table_.by_id(pred_id).name + "_" + tstr(t);
  VarId nz = m.add_var(VarKind::Binary, 0.0, 1.0, name);
  LinearExpr e = LinearExpr::term(z);
  e.add(nz, 1.0);
  m.add_constraint(e, Sense::EQ, 1.0, "def_" + name);
  slot = nz;
  return nz;
}

const CounterSet& encode_counters(EncodingContext& ctx, int pred_id) {
  ctx.check_pred(pred_id);
  auto& slot = ctx.counters_[pred_id - 1];
  if (slot) return *slot;

  Model& m = ctx.model_;
  const int H = ctx.horizon();
  const std::string pname = ctx.table_.by_id(pred_id).name;
  CounterSet cs;
  cs.c1.assign(H + 1, -1);
  cs.c0.assign(H + 1, -1);
  cs.d1.assign(H + 1, -1);
  cs.d0.assign(H + 1, -1);

  for (int t = H; t >= 0; --t) {
    VarId z = encode_predicate_bool(ctx, pred_id, t);
    VarId nz = encode_predicate_negation(ctx, pred_id, t);
    LinearExpr y1(1.0), y0(1.0);
    if (t < H) {
      y1.add(cs.c1[t + 1], 1.0);
      y0.add(cs.c0[t + 1], 1.0);
    }
    const double hi = double(H + 1 - t);
    cs.c1[t] = encode_binary_product(m, z, y1, 1.0, hi, "c1_" + pname + "_" + tstr(t),
                                     VarKind::Integer);
    cs.c0[t] = encode_binary_product(m, nz, y0, 1.0, hi, "c0_" + pname + "_" + tstr(t),
                                     VarKind::Integer);
  }
  for (int t = 0; t <= H; ++t) {
    VarId z = ctx.z_[pred_id - 1][t];
    VarId nz = ctx.nz_[pred_id - 1][t];
    LinearExpr y1(1.0), y0(1.0);
    if (t > 0) {
      y1.add(cs.d1[t - 1], 1.0);
      y0.add(cs.d0[t - 1], 1.0);
    }
    const double hi = double(t + 1);
    cs.d1[t] = encode_binary_product(m, z, y1, 1.0, hi, "d1_" + pname + "_" + tstr(t),
                                     VarKind::Integer);
    cs.d0[t] = encode_binary_product(m, nz, y0, 1.0, hi, "d0_" + pname + "_" + tstr(t),
                                     VarKind::Integer);
  }
  slot = std::move(cs);
  return *slot;
}

VarId encode_theta_directional(EncodingContext& ctx, int pred_id, int t, bool left) {
  ctx.check_pred(pred_id);
  ctx.check_time(t);
  VarId& slot = (left ? ctx.thp_ : ctx.thm_)[pred_id - 1][t];
  if (slot >= 0) return slot;

  const CounterSet& cs = encode_counters(ctx, pred_id);
  Model& m = ctx.model_;
  // A run can extend at most to the domain edge in its direction.
  const double reach = left ? double(ctx.horizon() - t) : double(t);
  const std::string name =
      (left ? "thp_" : "thm_") + ctx.table_.by_id(pred_id).name + "_" + tstr(t);
  VarId v = m.add_var(VarKind::Integer, -reach, reach, name);
  // v = count1 - count0 - (2z - 1)
  LinearExpr e = LinearExpr::term(v);
  e.add(left ? cs.c1[t] : cs.d1[t], -1.0);
  e.add(left ? cs.c0[t] : cs.d0[t], 1.0);
  e.add(ctx.z_[pred_id - 1][t], 2.0);
  m.add_constraint(e, Sense::EQ, 1.0, "def_" + name);
  slot = v;
  return v;
}

VarId encode_theta_pred(EncodingContext& ctx, int pred_id, int t) {
  ctx.check_pred(pred_id);
  ctx.check_time(t);
  VarId& slot = ctx.th_[pred_id - 1][t];
  if (slot >= 0) return slot;

  VarId tl = encode_theta_directional(ctx, pred_id, t, true);
  VarId tr = encode_theta_directional(ctx, pred_id, t, false);
  Model& m = ctx.model_;
  const std::string pname = ctx.table_.by_id(pred_id).name;
  VarId lo = encode_min(m, {tl, tr}, "thlo_" + pname + "_" + tstr(t));
  VarId hi = encode_max(m, {tl, tr}, "thhi_" + pname + "_" + tstr(t));
  VarId z = ctx.z_[pred_id - 1][t];
  VarId nz = encode_predicate_negation(ctx, pred_id, t);
  // satisfied points take the weaker (min) direction, violated the stronger
  VarId w1 = encode_binary_product(m, z, lo, m.var(lo).lb, m.var(lo).ub,
                                   "w1_" + pname + "_" + tstr(t));
  VarId w0 = encode_binary_product(m, nz, hi, m.var(hi).lb, m.var(hi).ub,
                                   "w0_" + pname + "_" + tstr(t));
  // the weaker direction also caps the magnitude
  const double b = std::min(double(t), double(ctx.horizon() - t));
  const std::string name = "th_" + pname + "_" + tstr(t);
  VarId th = m.add_var(VarKind::Continuous, -b, b, name);
  LinearExpr e = LinearExpr::term(th);
  e.add(w1, -1.0);
  e.add(w0, -1.0);
  m.add_constraint(e, Sense::EQ, 0.0, "def_" + name);
  slot = th;
  return th;
}

class FormulaEncoder {
 public:
  enum class Variant { Theta, Left, Right, Bool };

  FormulaEncoder(EncodingContext& ctx, Variant variant) : ctx_(ctx), variant_(variant) {}

  VarId encode(const stl::FormulaPtr& f, int t) {
    if (!f) throw std::invalid_argument("null formula");
    if (t < 0 || t + stl::formula_length(*f) > ctx_.horizon())
      throw std::out_of_range("formula window leaves the horizon at t=" + tstr(t));
    return rec(f.get(), t);
  }

 private:
  EncodingContext& ctx_;
  Variant variant_;

  std::vector<VarId>& slots(const stl::Formula* f) {
    auto& cache = variant_ == Variant::Theta  ? ctx_.theta_cache_
                  : variant_ == Variant::Left ? ctx_.left_cache_
                  : variant_ == Variant::Right
                      ? ctx_.right_cache_
                      : ctx_.bool_cache_;
    auto [it, inserted] = cache.try_emplace(f);
    if (inserted) it->second.assign(ctx_.horizon() + 1, -1);
    return it->second;
  }

  std::string prefix() const {
    switch (variant_) {
      case Variant::Theta: return "th";
      case Variant::Left: return "thp";
      case Variant::Right: return "thm";
      case Variant::Bool: return "q";
    }
    return "th";
  }

  VarId leaf(int pred_id, int t) {
    switch (variant_) {
      case Variant::Theta: return encode_theta_pred(ctx_, pred_id, t);
      case Variant::Left: return encode_theta_directional(ctx_, pred_id, t, true);
      case Variant::Right: return encode_theta_directional(ctx_, pred_id, t, false);
      case Variant::Bool: return encode_predicate_bool(ctx_, pred_id, t);
    }
    return -1;
  }

  VarId pair_min(VarId a, VarId b, const std::string& name) {
    return encode_min(ctx_.model_, {a, b}, name);
  }

  VarId pair_and(VarId a, VarId b, const std::string& name) {
    return bool_and(ctx_.model_, {a, b}, name);
  }

  VarId rec(const stl::Formula* f, int t) {
    if (f->kind == stl::NodeKind::Pred) return leaf(f->pred_id, t);
    std::vector<VarId>& cached = slots(f);
    if (cached[t] >= 0) return cached[t];
    const std::string name = prefix() + "_" + ctx_.node_name(f) + "_" + tstr(t);
    VarId v = variant_ == Variant::Bool ? rec_bool(f, t, name) : rec_theta(f, t, name);
    cached[t] = v;
    return v;
  }

  VarId rec_theta(const stl::Formula* f, int t, const std::string& name) {
    Model& m = ctx_.model_;
    switch (f->kind) {
      case stl::NodeKind::Not: {
        VarId c = rec(f->left.get(), t);
        VarId v = m.add_var(VarKind::Continuous, -m.var(c).ub, -m.var(c).lb, name);
        LinearExpr e = LinearExpr::term(v);
        e.add(c, 1.0);
        m.add_constraint(e, Sense::EQ, 0.0, "def_" + name);
        return v;
      }
      case stl::NodeKind::And:
        return encode_min(m, {rec(f->left.get(), t), rec(f->right.get(), t)}, name);
      case stl::NodeKind::Or:
        return encode_max(m, {rec(f->left.get(), t), rec(f->right.get(), t)}, name);
      case stl::NodeKind::Eventually:
      case stl::NodeKind::Always: {
        std::vector<VarId> xs;
        for (int u = t + f->window.lo; u <= t + f->window.hi; ++u)
          xs.push_back(rec(f->left.get(), u));
        if (xs.size() == 1) return xs[0];
        return f->kind == stl::NodeKind::Eventually ? encode_max(m, xs, name)
                                                    : encode_min(m, xs, name);
      }
      case stl::NodeKind::Until: {
        std::optional<VarId> pfx;
        auto extend = [&](int u) {
          VarId lv = rec(f->left.get(), u);
          pfx = pfx ? pair_min(*pfx, lv, name + "_pfx_" + tstr(u)) : lv;
        };
        for (int u = t; u < t + f->window.lo; ++u) extend(u);
        std::vector<VarId> cands;
        for (int tp = t + f->window.lo; tp <= t + f->window.hi; ++tp) {
          VarId rv = rec(f->right.get(), tp);
          cands.push_back(pfx ? pair_min(rv, *pfx, name + "_cand_" + tstr(tp)) : rv);
          if (tp < t + f->window.hi) extend(tp);
        }
        if (cands.size() == 1) return cands[0];
        return encode_max(m, cands, name);
      }
      default:
        throw std::logic_error("unexpected node kind");
    }
  }

  VarId rec_bool(const stl::Formula* f, int t, const std::string& name) {
    Model& m = ctx_.model_;
    switch (f->kind) {
      case stl::NodeKind::Not: {
        if (f->left->kind == stl::NodeKind::Pred)
          return encode_predicate_negation(ctx_, f->left->pred_id, t);
        VarId c = rec(f->left.get(), t);
        VarId q = m.add_var(VarKind::Binary, 0.0, 1.0, name);
        LinearExpr e = LinearExpr::term(q);
        e.add(c, 1.0);
        m.add_constraint(e, Sense::EQ, 1.0, "def_" + name);
        return q;
      }
      case stl::NodeKind::And:
        return bool_and(m, {rec(f->left.get(), t), rec(f->right.get(), t)}, name);
      case stl::NodeKind::Or:
        return bool_or(m, {rec(f->left.get(), t), rec(f->right.get(), t)}, name);
      case stl::NodeKind::Eventually:
      case stl::NodeKind::Always: {
        std::vector<VarId> xs;
        for (int u = t + f->window.lo; u <= t + f->window.hi; ++u)
          xs.push_back(rec(f->left.get(), u));
        return f->kind == stl::NodeKind::Eventually ? bool_or(m, xs, name)
                                                    : bool_and(m, xs, name);
      }
      case stl::NodeKind::Until: {
        std::optional<VarId> pfx;
        auto extend = [&](int u) {
          VarId lv = rec(f->left.get(), u);
          pfx = pfx ? pair_and(*pfx, lv, name + "_pfx_" + tstr(u)) : lv;
        };
        for (int u = t; u < t + f->window.lo; ++u) extend(u);
        std::vector<VarId> cands;
        for (int tp = t + f->window.lo; tp <= t + f->window.hi; ++tp) {
          VarId rv = rec(f->right.get(), tp);
          cands.push_back(pfx ? pair_and(rv, *pfx, name + "_cand_" + tstr(tp)) : rv);
          if (tp < t + f->window.hi) extend(tp);
        }
        return bool_or(m, cands, name);
      }
      default:
        throw std::logic_error("unexpected node kind");
    }
  }
};

VarId encode_formula_theta(EncodingContext& ctx, const stl::FormulaPtr& f, int t) {
  return FormulaEncoder(ctx, FormulaEncoder::Variant::Theta).encode(f, t);
}

VarId encode_formula_theta_left(EncodingContext& ctx, const stl::FormulaPtr& f, int t) {
  return FormulaEncoder(ctx, FormulaEncoder::Variant::Left).encode(f, t);
}

VarId encode_formula_theta_right(EncodingContext& ctx, const stl::FormulaPtr& f, int t) {
  return FormulaEncoder(ctx, FormulaEncoder::Variant::Right).encode(f, t);
}

VarId encode_formula_bool(EncodingContext& ctx, const stl::FormulaPtr& f, int t) {
  return FormulaEncoder(ctx, FormulaEncoder::Variant::Bool).encode(f, t);
}

}  // namespace trk::encoding
