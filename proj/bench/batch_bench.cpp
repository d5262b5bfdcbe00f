// Serial reference vs OpenMP batch kernels.

#include "swivel/batch.hpp"

#include <benchmark/benchmark.h>

using namespace swivel;

namespace {

Execution mode(const benchmark::State& st) {
  return st.range(0) ? Execution::Parallel : Execution::Serial;
}

void BM_ClassifyBatch(benchmark::State& st) {
  const Mat3 j = nominal_inertia(VehicleParams{});
  const auto gains = random_gain_sets(200, 1, j);
  for (auto _ : st) benchmark::DoNotOptimize(classify_batch(gains, j, mode(st)));
  st.SetItemsProcessed(st.iterations() * 200);
}

void BM_CriticalPointSearch(benchmark::State& st) {
  const ErrorGainMatrix p(Vec3(1.0, 2.0, 3.0).asDiagonal());
  for (auto _ : st) benchmark::DoNotOptimize(critical_point_search(p, 20000, 7, mode(st)));
  st.SetItemsProcessed(st.iterations() * 20000);
}

void BM_RunBatch(benchmark::State& st) {
  Scenario sc;
  sc.duration = 2.0;
  sc.reference.type = ReferenceType::FixedAxisSinusoid;
  sc.disturbance.gyro_noise_sigma = 0.075;
  std::vector<Scenario> batch(8, sc);
  for (std::size_t i = 0; i < batch.size(); ++i) batch[i].seed = i + 1;
  for (auto _ : st) benchmark::DoNotOptimize(run_batch(batch, mode(st)));
  st.SetItemsProcessed(st.iterations() * static_cast<long>(batch.size()));
}

}  // namespace

BENCHMARK(BM_ClassifyBatch)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CriticalPointSearch)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RunBatch)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
