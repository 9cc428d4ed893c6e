#include "trk/milp.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace trk::milp {

LinearExpr LinearExpr::term(VarId v, double coef) {
  LinearExpr e;
  e.add(v, coef);
  return e;
}

LinearExpr& LinearExpr::add(VarId v, double coef) {
  terms_.push_back({v, coef});
  return *this;
}

LinearExpr& LinearExpr::add(const LinearExpr& other, double scale) {
  for (const auto& t : other.terms_) terms_.push_back({t.var, t.coef * scale});
  constant_ += other.constant_ * scale;
  return *this;
}

std::vector<LinearTerm> LinearExpr::normalized() const {
  std::vector<LinearTerm> out;
  for (const auto& t : terms_) {
    bool merged = false;
    for (auto& o : out) {
      if (o.var == t.var) {
        o.coef += t.coef;
        merged = true;
        break;
      }
    }
    if (!merged) out.push_back(t);
  }
  std::erase_if(out, [](const LinearTerm& t) { return t.coef == 0.0; });
  return out;
}

bool LinearExpr::empty() const { return normalized().empty(); }

Model::Model(double big_m_time, double big_m_space, double epsilon)
    : big_m_time_(big_m_time), big_m_space_(big_m_space), epsilon_(epsilon) {
  if (big_m_time_ <= 0 || big_m_space_ <= 0)
    throw std::invalid_argument("big-M constants must be positive");
  if (epsilon_ <= 0) throw std::invalid_argument("epsilon must be positive");
}

namespace {

bool valid_name(const std::string& s) {
  if (s.empty() || s.size() > 200) return false;
  if (!std::isalpha(static_cast<unsigned char>(s[0])) && s[0] != '_') return false;
  for (char c : s)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
  return true;
}

std::string fmt_num(double v) {
  if (std::floor(v) == v && std::abs(v) < 1e15)
    return std::to_string(static_cast<long long>(v));
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

void append_expr(std::string& out, const std::vector<LinearTerm>& terms,
                 const std::vector<Variable>& vars) {
  bool first = true;
  for (const auto& t : terms) {
    double c = t.coef;
    if (first) {
      if (c < 0) out += "- ";
    } else {
      out += (c < 0) ? " - " : " + ";
    }
    double a = std::abs(c);
    if (a != 1.0) {
      out += fmt_num(a);
      out += ' ';
    }
    out += vars[t.var].name;
    first = false;
  }
}

}  // namespace

VarId Model::add_var(VarKind kind, double lb, double ub, const std::string& name) {
  if (!valid_name(name))
    throw std::invalid_argument("bad variable name '" + name + "'");
  if (names_.count(name))
    throw std::invalid_argument("duplicate variable name '" + name + "'");
  if (lb > ub)
    throw std::invalid_argument("variable '" + name + "' has lb > ub");
  if (kind == VarKind::Binary && (lb < 0 || ub > 1))
    throw std::invalid_argument("binary variable '" + name + "' needs bounds within [0,1]");
  VarId id = static_cast<VarId>(vars_.size());
  vars_.push_back({name, kind, lb, ub});
  names_.emplace(name, id);
  return id;
}

void Model::add_constraint(const LinearExpr& lhs, Sense sense, double rhs, std::string name) {
  auto terms = lhs.normalized();
  if (terms.empty())
    throw std::logic_error("constraint '" + name + "' has no variables");
  for (const auto& t : terms)
    if (t.var < 0 || t.var >= static_cast<VarId>(vars_.size()))
      throw std::out_of_range("constraint references unknown variable id");
  if (name.empty()) name = "c" + std::to_string(anon_constraints_++);
  if (!valid_name(name)) throw std::invalid_argument("bad constraint name '" + name + "'");
  if (!cons_names_.insert(name).second)
    throw std::invalid_argument("duplicate constraint name '" + name + "'");
  cons_.push_back({std::move(name), std::move(terms), sense, rhs - lhs.constant()});
}

void Model::set_objective(bool maximize, const LinearExpr& expr) {
  auto terms = expr.normalized();
  if (!terms.empty() && expr.constant() != 0.0)
    throw std::invalid_argument("objective constants are not supported");
  maximize_ = maximize;
  objective_ = expr;
}

void Model::fix(VarId v, double value) {
  auto& var = vars_.at(v);
  if (value < var.lb || value > var.ub)
    throw std::invalid_argument("cannot fix '" + var.name + "' to " + fmt_num(value) +
                                " outside [" + fmt_num(var.lb) + "," + fmt_num(var.ub) + "]");
  if (var.kind != VarKind::Continuous && std::floor(value) != value)
    throw std::invalid_argument("cannot fix integer '" + var.name + "' to " + fmt_num(value));
  var.lb = var.ub = value;
}

VarId Model::find_var(const std::string& name) const {
  auto it = names_.find(name);
  return it == names_.end() ? -1 : it->second;
}

std::string Model::export_lp() const {
  std::string out;
  out += maximize_ ? "Maximize\n" : "Minimize\n";
  out += " obj: ";
  auto obj_terms = objective_.normalized();
  if (obj_terms.empty()) {
    out += fmt_num(objective_.constant());
  } else {
    append_expr(out, obj_terms, vars_);
  }
  out += "\nSubject To\n";
  for (const auto& c : cons_) {
    out += ' ' + c.name + ": ";
    append_expr(out, c.terms, vars_);
    switch (c.sense) {
      case Sense::LE: out += " <= "; break;
      case Sense::GE: out += " >= "; break;
      case Sense::EQ: out += " = "; break;
    }
    out += fmt_num(c.rhs) + "\n";
  }

  std::string bounds, generals, binaries;
  for (const auto& v : vars_) {
    if (v.kind == VarKind::Binary) {
      binaries += ' ' + v.name + "\n";
      if (v.lb == v.ub) bounds += ' ' + v.name + " = " + fmt_num(v.lb) + "\n";
      continue;
    }
    if (v.kind == VarKind::Integer) generals += ' ' + v.name + "\n";
    if (v.lb == v.ub) {
      bounds += ' ' + v.name + " = " + fmt_num(v.lb) + "\n";
    } else if (v.lb == -kInf && v.ub == kInf) {
      bounds += ' ' + v.name + " free\n";
    } else if (v.lb == -kInf) {
      bounds += " -inf <= " + v.name + " <= " + fmt_num(v.ub) + "\n";
    } else if (v.ub == kInf) {
      bounds += ' ' + v.name + " >= " + fmt_num(v.lb) + "\n";
    } else {
      bounds += ' ' + fmt_num(v.lb) + " <= " + v.name + " <= " + fmt_num(v.ub) + "\n";
    }
  }
  if (!bounds.empty()) out += "Bounds\n" + bounds;
  if (!generals.empty()) out += "Generals\n" + generals;
  if (!binaries.empty()) out += "Binaries\n" + binaries;
  out += "End\n";
  return out;
}

namespace {

void check_gadget_inputs(const Model& m, const std::vector<VarId>& inputs,
                         const std::string& name) {
  if (inputs.empty())
    throw std::invalid_argument("gadget '" + name + "' needs at least one input");
  double max_ub = -kInf, min_lb = kInf;
  for (VarId v : inputs) {
    const auto& var = m.var(v);
    if (var.lb == -kInf || var.ub == kInf)
      throw std::invalid_argument("gadget '" + name + "' input '" + var.name +
                                  "' must be bounded");
    max_ub = std::max(max_ub, var.ub);
    min_lb = std::min(min_lb, var.lb);
  }
  if (m.big_m_time() < max_ub - min_lb)
    throw std::invalid_argument("big_m_time " + fmt_num(m.big_m_time()) +
                                " does not cover input spread of gadget '" + name + "'");
}

}  // namespace

VarId encode_min(Model& m, const std::vector<VarId>& inputs, const std::string& name) {
  check_gadget_inputs(m, inputs, name);
  double lb = kInf, ub = kInf;
  for (VarId v : inputs) {
    lb = std::min(lb, m.var(v).lb);
    ub = std::min(ub, m.var(v).ub);
  }
  VarId r = m.add_var(VarKind::Continuous, lb, ub, name);
  LinearExpr pick;
  for (size_t i = 0; i < inputs.size(); ++i) {
    std::string suffix = "_" + std::to_string(i);
    m.add_constraint(LinearExpr::term(r).add(inputs[i], -1.0), Sense::LE, 0.0,
                     name + "_le" + suffix);
    VarId b = m.add_var(VarKind::Binary, 0, 1, name + "_sel" + suffix);
    // r >= x_i - M (1 - b_i); M covers the largest possible x_i - r
    const double M = m.var(inputs[i]).ub - lb;
    m.add_constraint(LinearExpr::term(r).add(inputs[i], -1.0).add(b, -M), Sense::GE, -M,
                     name + "_ge" + suffix);
    pick.add(b, 1.0);
  }
  m.add_constraint(pick, Sense::EQ, 1.0, name + "_pick");
  return r;
}

VarId encode_max(Model& m, const std::vector<VarId>& inputs, const std::string& name) {
  check_gadget_inputs(m, inputs, name);
  double lb = -kInf, ub = -kInf;
  for (VarId v : inputs) {
    lb = std::max(lb, m.var(v).lb);
    ub = std::max(ub, m.var(v).ub);
  }
  VarId r = m.add_var(VarKind::Continuous, lb, ub, name);
  LinearExpr pick;
  for (size_t i = 0; i < inputs.size(); ++i) {
    std::string suffix = "_" + std::to_string(i);
    m.add_constraint(LinearExpr::term(r).add(inputs[i], -1.0), Sense::GE, 0.0,
                     name + "_ge" + suffix);
    VarId b = m.add_var(VarKind::Binary, 0, 1, name + "_sel" + suffix);
    // r <= x_i + M (1 - b_i); M covers the largest possible r - x_i
    const double M = ub - m.var(inputs[i]).lb;
    m.add_constraint(LinearExpr::term(r).add(inputs[i], -1.0).add(b, M), Sense::LE, M,
                     name + "_le" + suffix);
    pick.add(b, 1.0);
  }
  m.add_constraint(pick, Sense::EQ, 1.0, name + "_pick");
  return r;
}

VarId encode_binary_product(Model& m, VarId z, VarId y, double lo, double hi,
                            const std::string& name) {
  return encode_binary_product(m, z, LinearExpr::term(y), lo, hi, name);
}

VarId encode_binary_product(Model& m, VarId z, const LinearExpr& y, double lo, double hi,
                            const std::string& name, VarKind kind) {
  if (m.var(z).kind != VarKind::Binary)
    throw std::invalid_argument("product '" + name + "' needs a binary switch variable");
  if (lo > hi) throw std::invalid_argument("product '" + name + "' has lo > hi");
  VarId w = m.add_var(kind, std::min(0.0, lo), std::max(0.0, hi), name);
  m.add_constraint(LinearExpr::term(w).add(z, -hi), Sense::LE, 0.0, name + "_cap1");
  m.add_constraint(LinearExpr::term(w).add(z, -lo), Sense::GE, 0.0, name + "_cap0");
  // w <= y - lo (1 - z)
  m.add_constraint(LinearExpr::term(w).add(y, -1.0).add(z, -lo), Sense::LE, -lo, name + "_on1");
  // w >= y - hi (1 - z)
  m.add_constraint(LinearExpr::term(w).add(y, -1.0).add(z, -hi), Sense::GE, -hi, name + "_on0");
  return w;
}

}  // namespace trk::milp
