// Copyright 2026 The krigmis Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Parallel kernels against their serial reference implementations.

#include <benchmark/benchmark.h>

#include "krigmis/reference.hpp"
#include "krigmis/risk.hpp"

namespace krigmis {
namespace {

const CorrelationModel& bench_model() {
  static const auto m = CorrelationModel::matern({0.3, 0.4, 0.5}, 1.7);
  return m;
}

void BM_AssembleCorrelation(benchmark::State& state) {
  const auto d = srs(state.range(0), 3, 1);
  for (auto _ : state) benchmark::DoNotOptimize(assemble_correlation(bench_model(), d.points));
}

void BM_AssembleCorrelationReference(benchmark::State& state) {
  const auto d = srs(state.range(0), 3, 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(reference::assemble_correlation(bench_model(), d.points));
  }
}

void BM_LhsMaximin(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(lhs_maximin(40, 2, 3, state.range(0)));
}

void BM_LhsMaximinReference(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(reference::lhs_maximin(40, 2, 3, state.range(0)));
}

struct RiskFixture {
  Design design = srs(20, 2, 5);
  KrigingState truth = fit(design, CorrelationModel::matern({0.4, 0.4}, 2.5));
  KrigingState model = fit(design, CorrelationModel::exponential({0.3, 0.3}));
  EstimatorMatrix est = estimator_matrix(Method::CV, model);
  std::vector<double> x0{0.3, 0.7};
  RiskInputs inputs() const { return {truth, model, est, x0}; }
};

const RiskFixture& risk_fixture() {
  static const RiskFixture f;
  return f;
}

void BM_RiskMonteCarlo(benchmark::State& state) {
  const auto in = risk_fixture().inputs();
  for (auto _ : state) benchmark::DoNotOptimize(risk_monte_carlo(in, state.range(0), 7));
}

void BM_RiskMonteCarloReference(benchmark::State& state) {
  const auto in = risk_fixture().inputs();
  for (auto _ : state) benchmark::DoNotOptimize(reference::risk_monte_carlo(in, state.range(0), 7));
}

void BM_IntegratedCriteria(benchmark::State& state) {
  const auto& f = risk_fixture();
  const RiskContext ctx(f.truth, f.model, f.est);
  const auto test = srs(state.range(0), 2, 8);
  for (auto _ : state) benchmark::DoNotOptimize(integrated_criteria(ctx, test.points));
}

void BM_IntegratedCriteriaReference(benchmark::State& state) {
  const auto& f = risk_fixture();
  const auto test = srs(state.range(0), 2, 8);
  for (auto _ : state) {
    benchmark::DoNotOptimize(reference::integrated_criteria(f.truth, f.model, f.est, test.points));
  }
}

BENCHMARK(BM_AssembleCorrelation)->Arg(100)->Arg(400);
BENCHMARK(BM_AssembleCorrelationReference)->Arg(100)->Arg(400);
BENCHMARK(BM_LhsMaximin)->Arg(1000);
BENCHMARK(BM_LhsMaximinReference)->Arg(1000);
BENCHMARK(BM_RiskMonteCarlo)->Arg(1 << 17);
BENCHMARK(BM_RiskMonteCarloReference)->Arg(1 << 17);
BENCHMARK(BM_IntegratedCriteria)->Arg(1000);
BENCHMARK(BM_IntegratedCriteriaReference)->Arg(1000);

}  // namespace
}  // namespace krigmis

BENCHMARK_MAIN();
