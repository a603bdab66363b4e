#include <benchmark/benchmark.h>

#include <random>

#include "prefel/elicit.hpp"
#include "prefel/pro.hpp"

using namespace prefel;

namespace {

LpProblem random_lp(int n, int m, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  LpProblem lp = LpProblem::nonnegative(n);
  for (int j = 0; j < n; ++j) lp.objective[j] = u(rng);
  lp.ineq_matrix = Mat::Zero(m, n);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) lp.ineq_matrix(i, j) = u(rng);
  lp.ineq_rhs = Vec::Constant(m, static_cast<double>(n));
  return lp;
}

// Snapshot of an exp10 elicitation after m answers.
Session elicited(int m) {
  Session s = Session::start("bench", -0.5, 0.5, {}, "exp10", {});
  s.run(m);
  return s;
}

Mat scenarios(int k, int assets) {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(-0.4, 0.4);
  Mat x(k, assets);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < assets; ++j) x(i, j) = u(rng);
  return x;
}

}  // namespace

static void BM_SolveLp(benchmark::State& st) {
  const int n = static_cast<int>(st.range(0));
  const LpProblem lp = random_lp(n, n, 1);
  for (auto _ : st) benchmark::DoNotOptimize(solve_lp(lp).value);
}
BENCHMARK(BM_SolveLp)->Arg(20)->Arg(80)->Arg(200)->Unit(benchmark::kMillisecond);

static void BM_AnalyticCenter(benchmark::State& st) {
  const Session s = elicited(static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(analytic_center(s.polyhedron()).c.sum());
  st.counters["N"] = s.grid().size();
}
BENCHMARK(BM_AnalyticCenter)->Arg(10)->Arg(30)->Arg(60)->Unit(benchmark::kMillisecond);

static void BM_GenerateQuery(benchmark::State& st) {
  const Session s = elicited(static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(generate_query(s.polyhedron(), s.grid(), QueryConfig{}).s);
  st.counters["N"] = s.grid().size();
}
BENCHMARK(BM_GenerateQuery)->Arg(10)->Arg(30)->Unit(benchmark::kMillisecond);

static void BM_ElicitStep(benchmark::State& st) {
  const Session base = elicited(static_cast<int>(st.range(0)));
  for (auto _ : st) {
    Session s = base;
    s.run(1);
    benchmark::DoNotOptimize(s.answered().size());
  }
}
BENCHMARK(BM_ElicitStep)->Arg(10)->Arg(30)->Unit(benchmark::kMillisecond);

static void BM_ProClassic(benchmark::State& st) {
  const Session s = elicited(static_cast<int>(st.range(0)));
  const ProInstance inst = make_instance(s.polyhedron(), s.grid(), scenarios(6, 2));
  for (auto _ : st) benchmark::DoNotOptimize(solve_pro_classic(inst).value);
}
BENCHMARK(BM_ProClassic)->Arg(10)->Arg(30)->Unit(benchmark::kMillisecond);

static void BM_ProConservative(benchmark::State& st) {
  const Session s = elicited(30);
  const ProInstance inst = make_instance(s.polyhedron(), s.grid(), scenarios(6, 2));
  const IncrementBox box = increment_bounds(inst);
  const Scheme scheme = st.range(0) == 0 ? Scheme::budget : Scheme::gamma;
  const ConservatismConfig cfg{scheme, scheme == Scheme::budget ? 5.0 : 0.5, std::nullopt};
  for (auto _ : st) benchmark::DoNotOptimize(solve_pro_conservative(inst, box, cfg).value);
  st.SetLabel(to_string(scheme));
}
BENCHMARK(BM_ProConservative)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
