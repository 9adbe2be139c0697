#include <benchmark/benchmark.h>

#include <cmath>
#include <random>
#include <sstream>
#include <string>

#include "vote_audit/election_data.hpp"
#include "vote_audit/montecarlo.hpp"
#include "vote_audit/prediction.hpp"
#include "vote_audit/scenario.hpp"
#include "vote_audit/special_fn.hpp"
#include "vote_audit/svg_plot.hpp"
#include "vote_audit/wls.hpp"

using namespace vote_audit;

namespace {

const ElectionDataset& fixture() {
  static const ElectionDataset ds = load_dataset(VOTE_AUDIT_FIXTURE_PATH);
  return ds;
}

}  // namespace

static void BM_StudentTSf(benchmark::State& state) {
  const double t = static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(special::student_t_sf(t, 105.0));
}
BENCHMARK(BM_StudentTSf)->Arg(0)->Arg(2)->Arg(7)->Arg(20);

static void BM_StudentTQuantile(benchmark::State& state) {
  double p = 0.01;
  for (auto _ : state) {
    benchmark::DoNotOptimize(special::student_t_quantile(p, 105.0));
    p = p < 0.98 ? p + 0.01 : 0.01;
  }
}
BENCHMARK(BM_StudentTQuantile);

static void BM_LogGamma(benchmark::State& state) {
  double x = 0.1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(special::log_gamma(x));
    x = x < 100.0 ? x * 1.37 : 0.1;
  }
}
BENCHMARK(BM_LogGamma);

static void BM_ParseFixture(benchmark::State& state) {
  const std::string csv = to_csv(fixture());
  for (auto _ : state) benchmark::DoNotOptimize(parse_dataset(csv));
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * csv.size()));
}
BENCHMARK(BM_ParseFixture);

static void BM_FitThroughOrigin(benchmark::State& state) {
  const auto green = partition(fixture(), Variant::red_only).green;
  for (auto _ : state) benchmark::DoNotOptimize(wls::fit_through_origin(green));
}
BENCHMARK(BM_FitThroughOrigin);

static void BM_SolveGeneral(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto p = static_cast<std::size_t>(state.range(1));
  std::mt19937_64 rng(1);
  std::normal_distribution<double> z;
  wls::GeneralWlsProblem prob{wls::Matrix(n, p), std::vector<double>(n), std::vector<double>(n)};
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < p; ++j) prob.design(i, j) = z(rng);
    prob.response[i] = z(rng);
    prob.variance_weights[i] = 0.5 + std::abs(z(rng));
  }
  for (auto _ : state) benchmark::DoNotOptimize(wls::solve_general(prob));
}
BENCHMARK(BM_SolveGeneral)->Args({106, 1})->Args({50, 4})->Args({1000, 4});

static void BM_AnalyzePipeline(benchmark::State& state) {
  const auto& ds = fixture();
  for (auto _ : state) {
    const auto part = partition(ds, Variant::red_only);
    const auto fit = wls::fit_through_origin(part.green);
    benchmark::DoNotOptimize(prediction::reversal_probability(fit, part.red, reversal_threshold(ds, part.red)));
  }
}
BENCHMARK(BM_AnalyzePipeline);

static void BM_ReversalScenario(benchmark::State& state) {
  const auto& ds = fixture();
  const auto red = partition(ds, Variant::red_only).red;
  const Count votes = votes_needed(ds.margin_official());
  for (auto _ : state) benchmark::DoNotOptimize(scenario::build_reversal_scenario(ds, red, votes));
}
BENCHMARK(BM_ReversalScenario);

static void BM_RenderScatter(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(plot::render_scatter_svg(fixture(), {}));
}
BENCHMARK(BM_RenderScatter);

static void BM_Calibrate(benchmark::State& state) {
  const auto& ds = fixture();
  const auto threads = static_cast<unsigned>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(montecarlo::calibrate(ds, {0.15, 6.5}, 1000, 20160522, Variant::red_only, threads));
  state.SetItemsProcessed(state.iterations() * 1000);
}
BENCHMARK(BM_Calibrate)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
