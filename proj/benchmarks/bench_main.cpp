#include <benchmark/benchmark.h>

#include <pwsreg/pwsreg.hpp>

using namespace pwsreg;

namespace {

const char* kField = "1 - y + 0.1*(x^2 + (y - 1)^2 - 1)*x";

void BM_ExprTreeEval(benchmark::State& state) {
  const Expr e = parse_expr(kField);
  Point2 p{0.3, 0.2};
  for (auto _ : state) {
    benchmark::DoNotOptimize(e.eval(p));
    p.x += 1e-9;
  }
}
BENCHMARK(BM_ExprTreeEval);

void BM_ExprCompiledEval(benchmark::State& state) {
  const CompiledExpr e(parse_expr(kField));
  Point2 p{0.3, 0.2};
  for (auto _ : state) {
    benchmark::DoNotOptimize(e(p));
    p.x += 1e-9;
  }
}
BENCHMARK(BM_ExprCompiledEval);

void BM_LieChain(benchmark::State& state) {
  const Scenario scn = builtin("fold_k2_variant");
  const auto& chain = scn.system.lie(Side::plus);
  const int order = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(chain(order, {0.01, 0.0}));
}
BENCHMARK(BM_LieChain)->Arg(2)->Arg(4)->Arg(6);

void BM_IntegrateOrbit(benchmark::State& state) {
  const Flow f = Flow::of(VectorField2::parse("-y", "x"), Regime::plus);
  IntegratorOptions o;
  o.rel_tol = 1e-10;
  o.abs_tol = 1e-12;
  for (auto _ : state) benchmark::DoNotOptimize(integrate(f, {1.0, 0.0}, 0.0, 6.283185307179586, o));
}
BENCHMARK(BM_IntegrateOrbit);

void BM_RegularizedReturn(benchmark::State& state) {
  const Scenario scn = builtin("type_a_circle", {{"b", 0.1}});
  const double eps = 1e-3;
  const auto pi = return_map_eps(scn, hermite_transition(1), eps, 0.75);
  const Interval w = return_window_eps(scn, hermite_transition(1), eps, 0.75);
  for (auto _ : state) benchmark::DoNotOptimize(pi(w.mid()));
}
BENCHMARK(BM_RegularizedReturn)->Unit(benchmark::kMillisecond);

void BM_FilippovReturn(benchmark::State& state) {
  const Scenario scn = builtin("type_b_cubic");
  for (auto _ : state) benchmark::DoNotOptimize(return_map_filippov(scn, 0.05));
}
BENCHMARK(BM_FilippovReturn)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
