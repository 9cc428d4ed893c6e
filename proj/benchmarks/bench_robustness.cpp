#include <benchmark/benchmark.h>

#include <random>

#include "trk/encoding.hpp"
#include "trk/semantics.hpp"
#include "trk/stl.hpp"

using namespace trk;

namespace {

stl::PredicateTable make_table() {
  stl::PredicateTable table;
  table.add("p1", {}, 0.0);
  table.add("p2", {}, 0.0);
  table.add("p3", {}, 0.0);
  return table;
}

semantics::PredicateSignalSet make_signal(int horizon, uint64_t seed) {
  std::mt19937_64 rng(seed);
  semantics::PredicateSignalSet sig;
  sig.horizon = horizon;
  sig.rows.assign(3, std::vector<int>(horizon + 1));
  for (auto& row : sig.rows)
    for (auto& v : row) v = (rng() & 1) ? 1 : -1;
  return sig;
}

const char* kFormula = "G[2,5](p1 & p2) | p3 U[0,4] (p1 | !p2)";

}  // namespace

static void BM_theta_sweep(benchmark::State& state) {
  const int H = static_cast<int>(state.range(0));
  auto table = make_table();
  auto f = stl::parse(kFormula, table);
  auto sig = make_signal(H, 17);
  const int len = stl::formula_length(*f);
  for (auto _ : state) {
    long long acc = 0;
    for (int t = 0; t + len <= H; ++t) acc += semantics::theta(*f, sig, t);
    benchmark::DoNotOptimize(acc);
  }
  state.SetItemsProcessed(state.iterations() * (H - len + 1));
}
BENCHMARK(BM_theta_sweep)->Arg(16)->Arg(64)->Arg(256)->Arg(1024);

static void BM_characteristic_sweep(benchmark::State& state) {
  const int H = static_cast<int>(state.range(0));
  auto table = make_table();
  auto f = stl::parse(kFormula, table);
  auto sig = make_signal(H, 17);
  const int len = stl::formula_length(*f);
  for (auto _ : state) {
    long long acc = 0;
    for (int t = 0; t + len <= H; ++t) acc += semantics::characteristic(*f, sig, t);
    benchmark::DoNotOptimize(acc);
  }
  state.SetItemsProcessed(state.iterations() * (H - len + 1));
}
BENCHMARK(BM_characteristic_sweep)->Arg(16)->Arg(64)->Arg(256)->Arg(1024);

static void BM_shift_check(benchmark::State& state) {
  const int H = static_cast<int>(state.range(0));
  auto table = make_table();
  auto f = stl::parse(kFormula, table);
  auto sig = make_signal(H, 23);
  for (auto _ : state) {
    auto rep = semantics::verify_shift_theorem(*f, sig, 1);
    benchmark::DoNotOptimize(rep.checked);
  }
}
BENCHMARK(BM_shift_check)->Arg(16)->Arg(32);

static void BM_encode_formula(benchmark::State& state) {
  const int H = static_cast<int>(state.range(0));
  auto table = make_table();
  auto f = stl::parse(kFormula, table);
  for (auto _ : state) {
    milp::Model m(encoding::EncodingContext::default_big_m_time(H), 100.0);
    encoding::EncodingContext ctx(m, table, H);
    benchmark::DoNotOptimize(encode_formula_theta(ctx, f, 0));
    state.counters["rows"] = static_cast<double>(m.constraints().size());
  }
}
BENCHMARK(BM_encode_formula)->Arg(16)->Arg(64)->Arg(128);

static void BM_export_lp(benchmark::State& state) {
  const int H = static_cast<int>(state.range(0));
  auto table = make_table();
  auto f = stl::parse(kFormula, table);
  milp::Model m(encoding::EncodingContext::default_big_m_time(H), 100.0);
  encoding::EncodingContext ctx(m, table, H);
  m.set_objective(true, milp::LinearExpr::term(encode_formula_theta(ctx, f, 0)));
  for (auto _ : state) {
    auto text = m.export_lp();
    benchmark::DoNotOptimize(text.data());
    state.SetBytesProcessed(state.bytes_processed() + static_cast<int64_t>(text.size()));
  }
}
BENCHMARK(BM_export_lp)->Arg(16)->Arg(64)->Arg(128);

BENCHMARK_MAIN();
