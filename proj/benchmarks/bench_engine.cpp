#include <benchmark/benchmark.h>

#include "drexp/engine.hpp"
#include "drexp/harness.hpp"
#include "drexp/oracle.hpp"

namespace {

using namespace drexp;

const ModelFamily kIntegrable = ModelFamily::pareto(ParetoDomain::above_one());

DivergenceProfile fitted_profile(std::size_t n) {
  return DivergenceProfile::fit(kIntegrable,
                                sample(kIntegrable, ParamPoint::pareto(2.0), n, 7));
}

void BM_divergence(benchmark::State& state) {
  const DivergenceProfile profile = fitted_profile(1000);
  double theta = 1.2;
  for (auto _ : state) {
    benchmark::DoNotOptimize(profile.divergence_pareto(theta));
    theta = theta < 4.0 ? theta + 1e-4 : 1.2;
  }
}
BENCHMARK(BM_divergence);

void BM_risk_value_es(benchmark::State& state) {
  const RiskFunctional es{FunctionalId::ExpectedShortfall, 0.05};
  double theta = 1.2;
  for (auto _ : state) {
    benchmark::DoNotOptimize(risk_value(es, kIntegrable, ParamPoint::pareto(theta)));
    theta = theta < 4.0 ? theta + 1e-4 : 1.2;
  }
}
BENCHMARK(BM_risk_value_es);

void BM_admissible_set(benchmark::State& state) {
  const DivergenceProfile profile = fitted_profile(static_cast<std::size_t>(state.range(0)));
  DRQuery q;
  q.functional = RiskFunctional{FunctionalId::ExpectedShortfall, 0.05};
  q.delta = 0.5;
  for (auto _ : state) {
    benchmark::DoNotOptimize(admissible_set(profile, q));
  }
}
BENCHMARK(BM_admissible_set)->Arg(100)->Arg(10000);

void BM_dr_estimate_truncated_es(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  const Observations obs = sample(kIntegrable, ParamPoint::pareto(2.0), n, 7);
  const DivergenceProfile profile = DivergenceProfile::fit(kIntegrable, obs);
  DRQuery q;
  q.functional = RiskFunctional{FunctionalId::ExpectedShortfall, 0.05};
  q.delta = 0.5;
  for (auto _ : state) {
    benchmark::DoNotOptimize(dr_estimate(profile, q, obs));
  }
}
BENCHMARK(BM_dr_estimate_truncated_es)->Arg(200)->Arg(2000);

void BM_expectation_oracle_es(benchmark::State& state) {
  const RiskFunctional es{FunctionalId::ExpectedShortfall, 0.01};
  for (auto _ : state) {
    benchmark::DoNotOptimize(expectation_oracle(kIntegrable, ParamPoint::pareto(1.8), es));
  }
}
BENCHMARK(BM_expectation_oracle_es);

void BM_run_plan(benchmark::State& state) {
  ExperimentPlan plan;
  plan.family = kIntegrable;
  plan.truth = ParamPoint::pareto(2.0);
  plan.functional = FunctionalId::ExpectedShortfall;
  plan.beta_rule = BetaRule::power(1.0, 0.5);
  plan.delta = 0.5;
  plan.n_grid = {500};
  plan.replications = 50;
  plan.master_seed = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_plan(plan, static_cast<unsigned>(state.range(0))));
  }
}
BENCHMARK(BM_run_plan)->Arg(1)->Arg(4);

}  // namespace

int main(int argc, char** argv) {
  benchmark::Initialize(&argc, argv);
  if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
  benchmark::RunSpecifiedBenchmarks();
  return 0;
}
