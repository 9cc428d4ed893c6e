#include "trk/semantics.hpp"

#include <algorithm>
#include <climits>
#include <random>
#include <unordered_map>

namespace trk::semantics {

void PredicateSignalSet::check() const {
  if (horizon < 0) throw std::invalid_argument("signal horizon must be >= 0");
  for (size_t k = 0; k < rows.size(); ++k) {
    if (rows[k].size() != static_cast<size_t>(horizon) + 1)
      throw std::invalid_argument("signal row " + std::to_string(k + 1) + " has " +
                                  std::to_string(rows[k].size()) + " samples, expected " +
                                  std::to_string(horizon + 1));
    for (int v : rows[k])
      if (v != 1 && v != -1)
        throw std::invalid_argument("signal row " + std::to_string(k + 1) +
                                    " holds a value outside {+1,-1}");
  }
}

PredicateSignalSet booleanize(const StateSignal& sig, const stl::PredicateTable& table) {
  if (sig.states.empty()) throw std::invalid_argument("empty state signal");
  PredicateSignalSet out;
  out.horizon = sig.horizon();
  out.rows.resize(table.size());
  for (const auto& p : table.all()) {
    auto& row = out.rows[p.id - 1];
    row.reserve(sig.states.size());
    for (const auto& x : sig.states) row.push_back(p.mu(x) >= 0.0 ? 1 : -1);
  }
  return out;
}

namespace {

constexpr int kUnset = INT_MIN;

// One evaluation pass; the leaf rule distinguishes the four semantics.
enum class Leaf { Char, Theta, ThetaLeft, ThetaRight };

class Evaluator {
 public:
  Evaluator(const PredicateSignalSet& sig, Leaf leaf)
      : sig_(sig), leaf_(leaf), cap_(sig.horizon + 1) {}

  int eval(const stl::Formula& f, int t) {
    auto& column = memo_[&f];
    if (column.empty()) column.assign(sig_.horizon + 1, kUnset);
    if (column[t] != kUnset) return column[t];
    int v = compute(f, t);
    column[t] = v;
    return v;
  }

 private:
  const PredicateSignalSet& sig_;
  Leaf leaf_;
  int cap_;
  std::unordered_map<const stl::Formula*, std::vector<int>> memo_;

  int run_forward(const std::vector<int>& row, int t) const {
    int tau = 0;
    while (t + tau + 1 <= sig_.horizon && row[t + tau + 1] == row[t]) ++tau;
    return tau;
  }

  int run_backward(const std::vector<int>& row, int t) const {
    int tau = 0;
    while (t - tau - 1 >= 0 && row[t - tau - 1] == row[t]) ++tau;
    return tau;
  }

  int predicate_value(const stl::Formula& f, int t) const {
    const auto& row = sig_.rows.at(f.pred_id - 1);
    switch (leaf_) {
      case Leaf::Char: return row[t];
      case Leaf::ThetaLeft: return row[t] * run_forward(row, t);
      case Leaf::ThetaRight: return row[t] * run_backward(row, t);
      case Leaf::Theta:
        return row[t] * std::min(run_forward(row, t), run_backward(row, t));
    }
    return 0;
  }

  int compute(const stl::Formula& f, int t) {
    using stl::NodeKind;
    switch (f.kind) {
      case NodeKind::Pred:
        return predicate_value(f, t);
      case NodeKind::Not:
        return -eval(*f.left, t);
      case NodeKind::And:
        return std::min(eval(*f.left, t), eval(*f.right, t));
      case NodeKind::Or:
        return std::max(eval(*f.left, t), eval(*f.right, t));
      case NodeKind::Eventually: {
        int best = -cap_;
        for (int u = t + f.window.lo; u <= t + f.window.hi; ++u)
          best = std::max(best, eval(*f.left, u));
        return best;
      }
      case NodeKind::Always: {
        int best = cap_;
        for (int u = t + f.window.lo; u <= t + f.window.hi; ++u)
          best = std::min(best, eval(*f.left, u));
        return best;
      }
      case NodeKind::Until: {
        // prefix holds the minimum of the left operand over [t, u).
        int best = -cap_;
        int prefix = cap_;
        for (int u = t; u < t + f.window.lo; ++u) prefix = std::min(prefix, eval(*f.left, u));
        for (int u = t + f.window.lo; u <= t + f.window.hi; ++u) {
          best = std::max(best, std::min(eval(*f.right, u), prefix));
          prefix = std::min(prefix, eval(*f.left, u));
        }
        return best;
      }
    }
    return 0;
  }
};

int evaluate(const stl::Formula& f, const PredicateSignalSet& sig, int t, Leaf leaf) {
  sig.check();
  if (t < 0 || t + stl::formula_length(f) > sig.horizon)
    throw std::out_of_range("evaluation at t=" + std::to_string(t) + " reads past horizon " +
                            std::to_string(sig.horizon));
  for (int id : stl::predicates_of(f))
    if (id > sig.num_predicates())
      throw std::invalid_argument("formula references predicate id " + std::to_string(id) +
                                  " but the signal has " + std::to_string(sig.num_predicates()) +
                                  " rows");
  return Evaluator(sig, leaf).eval(f, t);
}

}  // namespace

int characteristic(const stl::Formula& f, const PredicateSignalSet& sig, int t) {
  return evaluate(f, sig, t, Leaf::Char);
}

int theta(const stl::Formula& f, const PredicateSignalSet& sig, int t) {
  return evaluate(f, sig, t, Leaf::Theta);
}

int theta_left(const stl::Formula& f, const PredicateSignalSet& sig, int t) {
  return evaluate(f, sig, t, Leaf::ThetaLeft);
}

int theta_right(const stl::Formula& f, const PredicateSignalSet& sig, int t) {
  return evaluate(f, sig, t, Leaf::ThetaRight);
}

PredicateSignalSet shift(const PredicateSignalSet& sig, const std::vector<int>& taus) {
  sig.check();
  if (taus.size() != sig.rows.size())
    throw std::invalid_argument("shift vector has " + std::to_string(taus.size()) +
                                " entries for " + std::to_string(sig.rows.size()) + " rows");
  PredicateSignalSet out;
  out.horizon = sig.horizon;
  out.rows.resize(sig.rows.size());
  for (size_t k = 0; k < sig.rows.size(); ++k) {
    out.rows[k].resize(sig.horizon + 1);
    for (int t = 0; t <= sig.horizon; ++t) {
      int src = std::clamp(t + taus[k], 0, sig.horizon);
      out.rows[k][t] = sig.rows[k][src];
    }
  }
  return out;
}

namespace {

void windows_rec(const stl::Formula& f, int lo, int hi,
                 std::vector<std::pair<int, int>>& wins) {
  using stl::NodeKind;
  switch (f.kind) {
    case NodeKind::Pred: {
      auto& w = wins[f.pred_id - 1];
      if (w.first > w.second) {
        w = {lo, hi};
      } else {
        w.first = std::min(w.first, lo);
        w.second = std::max(w.second, hi);
      }
      return;
    }
    case NodeKind::Not:
      windows_rec(*f.left, lo, hi, wins);
      return;
    case NodeKind::And:
    case NodeKind::Or:
      windows_rec(*f.left, lo, hi, wins);
      windows_rec(*f.right, lo, hi, wins);
      return;
    case NodeKind::Eventually:
    case NodeKind::Always:
      windows_rec(*f.left, lo + f.window.lo, hi + f.window.hi, wins);
      return;
    case NodeKind::Until:
      windows_rec(*f.right, lo + f.window.lo, hi + f.window.hi, wins);
      if (hi + f.window.hi - 1 >= lo) windows_rec(*f.left, lo, hi + f.window.hi - 1, wins);
      return;
  }
}

}  // namespace

std::vector<std::pair<int, int>> access_windows(const stl::Formula& f, int num_predicates,
                                                int t) {
  std::vector<std::pair<int, int>> wins(num_predicates, {1, 0});
  windows_rec(f, t, t, wins);
  return wins;
}

ShiftReport verify_shift_theorem(const stl::Formula& f, const PredicateSignalSet& sig, int t,
                                 uint64_t seed) {
  const int chi0 = characteristic(f, sig, t);
  const int r = std::abs(theta(f, sig, t));
  const int K = sig.num_predicates();
  const int H = sig.horizon;

  auto wins = access_windows(f, K, t);
  std::vector<std::pair<int, int>> range(K);
  for (int k = 0; k < K; ++k) {
    if (wins[k].first > wins[k].second) {
      range[k] = {-r, r};  // row never read, any shift is harmless
    } else {
      range[k] = {std::max(-r, -wins[k].first), std::min(r, H - wins[k].second)};
    }
  }

  ShiftReport report;
  std::vector<int> taus(K, -r);
  auto test = [&](const std::vector<int>& tv) {
    ++report.checked;
    if (characteristic(f, shift(sig, tv), t) != chi0) report.violations.push_back(tv);
  };

  double total = 1.0;
  for (int k = 0; k < K; ++k) total *= 2.0 * r + 1.0;
  if (total <= 100000.0) {
    // odometer over [-r, r]^K, skipping vectors with out-of-domain reads
    while (true) {
      bool in_domain = true;
      for (int k = 0; k < K && in_domain; ++k)
        in_domain = taus[k] >= range[k].first && taus[k] <= range[k].second;
      if (in_domain) test(taus);
      int k = K - 1;
      while (k >= 0 && taus[k] == r) taus[k--] = -r;
      if (k < 0) break;
      ++taus[k];
    }
  } else {
    std::mt19937_64 rng(seed);
    for (int i = 0; i < 10000; ++i) {
      for (int k = 0; k < K; ++k) {
        std::uniform_int_distribution<int> dist(range[k].first, range[k].second);
        taus[k] = dist(rng);
      }
      test(taus);
    }
  }
  return report;
}

bool verify_bound(const stl::Formula& f, const PredicateSignalSet& sig, int t) {
  const int th = std::abs(theta(f, sig, t));
  return th <= std::abs(theta_left(f, sig, t)) && th <= std::abs(theta_right(f, sig, t));
}

}  // namespace trk::semantics
