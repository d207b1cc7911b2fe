#include <benchmark/benchmark.h>

#include "dlqr/dlqr.hpp"

namespace {

using namespace dlqr;

Problem Fem(int n_elements) {
  ParabolicEllipticParams p;
  p.n_elements = n_elements;
  return ParabolicEllipticProblem(p);
}

void BM_Projectors(benchmark::State& state) {
  const Problem p = Fem(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(ComputeProjectors(p.sys));
  state.SetLabel("n_x=" + std::to_string(p.sys.n_x()));
}
BENCHMARK(BM_Projectors)->Arg(4)->Arg(27)->Arg(60)->Unit(benchmark::kMicrosecond);

void BM_SemiExplicitSplit(benchmark::State& state) {
  const Problem p = Fem(static_cast<int>(state.range(0)));
  const Eigen::Index n1 = DetectSemiExplicitBlock(p.sys.E());
  for (auto _ : state) benchmark::DoNotOptimize(DecomposeSemiExplicit(p.sys, n1));
}
BENCHMARK(BM_SemiExplicitSplit)->Arg(4)->Arg(27)->Arg(60)->Unit(benchmark::kMicrosecond);

void BM_Dre(benchmark::State& state) {
  const Problem p = Fem(static_cast<int>(state.range(0)));
  const PipelineResult s = Prepare(p, {});
  const TimeGrid g = TimeGrid::Uniform(0, p.weights.t_f, 201);
  DreOptions o;
  o.method = state.range(1) ? DreMethod::kImplicit : DreMethod::kExplicit;
  long steps = 0;
  for (auto _ : state) {
    const RiccatiSolution rs = SolveProjectedDre(s.wf, s.split, g, o);
    steps = rs.stats.accepted;
  }
  state.counters["steps"] = static_cast<double>(steps);
}
BENCHMARK(BM_Dre)->Args({4, 0})->Args({4, 1})->Args({12, 1})->Args({27, 1})
    ->Unit(benchmark::kMillisecond);

void BM_ClosedLoop(benchmark::State& state) {
  const Problem p = Fem(27);
  PipelineOptions o;
  o.n_output_nodes = static_cast<std::size_t>(state.range(0));
  o.open_loop_reference = false;
  const PipelineResult r = RunPipeline(p, o);
  for (auto _ : state) {
    benchmark::DoNotOptimize(SimulateClosedLoop(r.wf, *r.gains, p.x_i, *r.grid, o.sim));
  }
}
BENCHMARK(BM_ClosedLoop)->Arg(201)->Arg(2001)->Unit(benchmark::kMillisecond);

void BM_Picard(benchmark::State& state) {
  const Problem p = Fem(4);
  const PipelineResult s = Prepare(p, {});
  const TimeGrid g = TimeGrid::Uniform(0, p.weights.t_f, 401);
  PicardOptions o;
  o.anderson_depth = static_cast<int>(state.range(0));
  int it = 0;
  for (auto _ : state) it = PicardSolve(s.wf, s.split, p.x_i, g, o).iterations;
  state.counters["iterations"] = it;
}
BENCHMARK(BM_Picard)->Arg(6)->Unit(benchmark::kMillisecond);

void BM_Oracle(benchmark::State& state) {
  const Problem p = Fem(4);
  const PipelineResult s = Prepare(p, {});
  for (auto _ : state) {
    benchmark::DoNotOptimize(DirectTranscription(s.wf, s.split, p.weights, p.x_i,
                                                 static_cast<int>(state.range(0))));
  }
}
BENCHMARK(BM_Oracle)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_Pipeline(benchmark::State& state) {
  const Problem p = Fem(static_cast<int>(state.range(0)));
  PipelineOptions o;
  o.n_output_nodes = 601;
  for (auto _ : state) benchmark::DoNotOptimize(RunPipeline(p, o).J_feedback);
}
BENCHMARK(BM_Pipeline)->Arg(4)->Arg(27)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
