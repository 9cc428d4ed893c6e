#include "trk/stl.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace trk::stl {

double LinearPredicate::mu(const std::vector<double>& x) const {
  if (coeffs.empty())
    throw std::logic_error("predicate '" + name + "' is abstract (no coefficients)");
  if (coeffs.size() != x.size())
    throw std::invalid_argument("state dimension " + std::to_string(x.size()) +
                                " does not match predicate '" + name + "'");
  double v = offset;
  for (size_t i = 0; i < coeffs.size(); ++i) v += coeffs[i] * x[i];
  return v;
}

int PredicateTable::add(const std::string& name, std::vector<double> coeffs, double offset) {
  if (name.empty()) throw std::invalid_argument("predicate name must not be empty");
  if (find(name)) throw std::invalid_argument("duplicate predicate name '" + name + "'");
  if (!coeffs.empty()) {
    int dim = dimension();
    if (dim != 0 && dim != static_cast<int>(coeffs.size()))
      throw std::invalid_argument("predicate '" + name + "' has dimension " +
                                  std::to_string(coeffs.size()) + ", table uses " +
                                  std::to_string(dim));
  }
  LinearPredicate p;
  p.id = static_cast<int>(preds_.size()) + 1;
  p.name = name;
  p.coeffs = std::move(coeffs);
  p.offset = offset;
  preds_.push_back(std::move(p));
  return preds_.back().id;
}

const LinearPredicate& PredicateTable::by_id(int id) const {
  if (id < 1 || id > size()) throw std::out_of_range("predicate id " + std::to_string(id));
  return preds_[id - 1];
}

const LinearPredicate* PredicateTable::find(const std::string& name) const {
  for (const auto& p : preds_)
    if (p.name == name) return &p;
  return nullptr;
}

int PredicateTable::dimension() const {
  for (const auto& p : preds_)
    if (!p.coeffs.empty()) return static_cast<int>(p.coeffs.size());
  return 0;
}

namespace {

std::shared_ptr<Formula> make(NodeKind kind) {
  auto f = std::make_shared<Formula>();
  f->kind = kind;
  return f;
}

void check_window(const Interval& w) {
  if (w.lo < 0 || w.hi < w.lo)
    throw std::invalid_argument("bad interval [" + std::to_string(w.lo) + "," +
                                std::to_string(w.hi) + "]");
}

}  // namespace

FormulaPtr Formula::pred(int pred_id) {
  if (pred_id < 1) throw std::invalid_argument("predicate id must be >= 1");
  auto f = make(NodeKind::Pred);
  f->pred_id = pred_id;
  return f;
}

FormulaPtr Formula::negate(FormulaPtr f) {
  auto n = make(NodeKind::Not);
  n->left = std::move(f);
  return n;
}

FormulaPtr Formula::conj(FormulaPtr a, FormulaPtr b) {
  auto n = make(NodeKind::And);
  n->left = std::move(a);
  n->right = std::move(b);
  return n;
}

FormulaPtr Formula::disj(FormulaPtr a, FormulaPtr b) {
  auto n = make(NodeKind::Or);
  n->left = std::move(a);
  n->right = std::move(b);
  return n;
}

FormulaPtr Formula::until(Interval w, FormulaPtr a, FormulaPtr b) {
  check_window(w);
  auto n = make(NodeKind::Until);
  n->window = w;
  n->left = std::move(a);
  n->right = std::move(b);
  return n;
}

FormulaPtr Formula::eventually(Interval w, FormulaPtr f) {
  check_window(w);
  auto n = make(NodeKind::Eventually);
  n->window = w;
  n->left = std::move(f);
  return n;
}

FormulaPtr Formula::always(Interval w, FormulaPtr f) {
  check_window(w);
  auto n = make(NodeKind::Always);
  n->window = w;
  n->left = std::move(f);
  return n;
}

namespace {

class Parser {
 public:
  Parser(const std::string& text, const PredicateTable& table) : text_(text), table_(table) {}

  FormulaPtr run() {
    auto f = parse_or();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    return f;
  }

 private:
  const std::string& text_;
  const PredicateTable& table_;
  size_t pos_ = 0;

  [[noreturn]] void fail(const std::string& msg) const {
    std::ostringstream os;
    os << "parse error at " << pos_ << ": " << msg << "\n  " << text_ << "\n  "
       << std::string(std::min(pos_, text_.size()), ' ') << '^';
    throw ParseError(os.str(), pos_);
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  char peek() {
    skip_ws();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  void expect(char c) {
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  // Identifier at the cursor, without consuming it.
  std::string peek_ident() {
    skip_ws();
    size_t p = pos_;
    if (p >= text_.size()) return {};
    char c = text_[p];
    if (!std::isalpha(static_cast<unsigned char>(c)) && c != '_') return {};
    size_t e = p;
    while (e < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[e])) || text_[e] == '_'))
      ++e;
    return text_.substr(p, e - p);
  }

  // True when the identifier is one of F/G/U immediately followed by '['.
  bool at_operator(const char* op) {
    std::string id = peek_ident();
    if (id != op) return false;
    size_t after = pos_ + id.size();
    return after < text_.size() && text_[after] == '[';
  }

  int parse_int() {
    skip_ws();
    size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (pos_ == start) fail("expected a nonnegative integer");
    return std::stoi(text_.substr(start, pos_ - start));
  }

  Interval parse_window() {
    expect('[');
    Interval w;
    w.lo = parse_int();
    expect(',');
    w.hi = parse_int();
    expect(']');
    if (w.hi < w.lo) fail("interval upper bound below lower bound");
    return w;
  }

  FormulaPtr parse_or() {
    auto f = parse_and();
    while (peek() == '|') {
      ++pos_;
      f = Formula::disj(std::move(f), parse_and());
    }
    return f;
  }

  FormulaPtr parse_and() {
    auto f = parse_until();
    while (peek() == '&') {
      ++pos_;
      f = Formula::conj(std::move(f), parse_until());
    }
    return f;
  }

  FormulaPtr parse_until() {
    auto f = parse_unary();
    skip_ws();
    if (at_operator("U")) {
      pos_ += 1;
      Interval w = parse_window();
      return Formula::until(w, std::move(f), parse_until());
    }
    return f;
  }

  FormulaPtr parse_unary() {
    char c = peek();
    if (c == '!') {
      ++pos_;
      return Formula::negate(parse_unary());
    }
    if (at_operator("F")) {
      pos_ += 1;
      Interval w = parse_window();
      return Formula::eventually(w, parse_unary());
    }
    if (at_operator("G")) {
      pos_ += 1;
      Interval w = parse_window();
      return Formula::always(w, parse_unary());
    }
    if (c == '(') {
      ++pos_;
      auto f = parse_or();
      expect(')');
      return f;
    }
    std::string id = peek_ident();
    if (id.empty()) fail("expected a predicate, '!', '(', or F/G/U");
    const LinearPredicate* p = table_.find(id);
    if (!p) fail("unknown predicate '" + id + "'");
    pos_ += id.size();
    return Formula::pred(p->id);
  }
};

int precedence(NodeKind k) {
  switch (k) {
    case NodeKind::Or: return 0;
    case NodeKind::And: return 1;
    case NodeKind::Until: return 2;
    default: return 3;  // unary and atoms
  }
}

void print_rec(const Formula& f, const PredicateTable& table, int parent_prec, std::string& out) {
  int prec = precedence(f.kind);
  bool parens = prec < parent_prec;
  if (parens) out += '(';
  switch (f.kind) {
    case NodeKind::Pred:
      out += table.by_id(f.pred_id).name;
      break;
    case NodeKind::Not:
      out += '!';
      print_rec(*f.left, table, 3, out);
      break;
    case NodeKind::And:
      print_rec(*f.left, table, 1, out);
      out += " & ";
      print_rec(*f.right, table, 2, out);
      break;
    case NodeKind::Or:
      print_rec(*f.left, table, 0, out);
      out += " | ";
      print_rec(*f.right, table, 1, out);
      break;
    case NodeKind::Until:
      print_rec(*f.left, table, 3, out);
      out += " U[" + std::to_string(f.window.lo) + "," + std::to_string(f.window.hi) + "] ";
      print_rec(*f.right, table, 2, out);
      break;
    case NodeKind::Eventually:
    case NodeKind::Always:
      out += (f.kind == NodeKind::Eventually) ? 'F' : 'G';
      out += '[' + std::to_string(f.window.lo) + ',' + std::to_string(f.window.hi) + "] ";
      print_rec(*f.left, table, 3, out);
      break;
  }
  if (parens) out += ')';
}

}  // namespace

FormulaPtr parse(const std::string& text, const PredicateTable& table) {
  return Parser(text, table).run();
}

std::string print(const Formula& f, const PredicateTable& table) {
  std::string out;
  print_rec(f, table, 0, out);
  return out;
}

int formula_length(const Formula& f) {
  switch (f.kind) {
    case NodeKind::Pred: return 0;
    case NodeKind::Not: return formula_length(*f.left);
    case NodeKind::And:
    case NodeKind::Or:
      return std::max(formula_length(*f.left), formula_length(*f.right));
    case NodeKind::Until:
      return f.window.hi + std::max(formula_length(*f.left), formula_length(*f.right));
    case NodeKind::Eventually:
    case NodeKind::Always:
      return f.window.hi + formula_length(*f.left);
  }
  return 0;
}

namespace {
void collect_preds(const Formula& f, std::vector<int>& out) {
  if (f.kind == NodeKind::Pred) {
    if (std::find(out.begin(), out.end(), f.pred_id) == out.end()) out.push_back(f.pred_id);
    return;
  }
  if (f.left) collect_preds(*f.left, out);
  if (f.right) collect_preds(*f.right, out);
}
}  // namespace

std::vector<int> predicates_of(const Formula& f) {
  std::vector<int> out;
  collect_preds(f, out);
  return out;
}

}  // namespace trk::stl
