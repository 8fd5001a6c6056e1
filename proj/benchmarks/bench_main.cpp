#include "mtd/alp.hpp"
#include "mtd/environment.hpp"
#include "mtd/estimator.hpp"
#include "mtd/rng.hpp"
#include "mtd/strategies.hpp"

#include <benchmark/benchmark.h>

namespace {

void BM_AlpSolveWeb(benchmark::State& state) {
    const auto domain = mtd::make_web_app_domain();
    const double dist[] = {0.5, 0.35, 0.15};
    const auto posterior = mtd::PosteriorTable::uniform_over(domain, dist);
    const auto basis = mtd::build_basis(domain.space());
    for (auto _ : state) {
        auto w = mtd::solve_alp(mtd::build_alp(domain, posterior, basis));
        benchmark::DoNotOptimize(w);
    }
}
BENCHMARK(BM_AlpSolveWeb);

void BM_AlpSolveWebStateBasis(benchmark::State& state) {
    const auto domain = mtd::make_web_app_domain();
    const double dist[] = {0.5, 0.35, 0.15};
    const auto posterior = mtd::PosteriorTable::uniform_over(domain, dist);
    const auto basis = mtd::build_state_basis(domain.space());
    for (auto _ : state) {
        auto w = mtd::solve_alp(mtd::build_alp(domain, posterior, basis));
        benchmark::DoNotOptimize(w);
    }
}
BENCHMARK(BM_AlpSolveWebStateBasis);

// one 1000-step ATA-FMDP episode, re-optimizing every step
void BM_AtaEpisodeWebEvolving(benchmark::State& state) {
    const auto scenario = mtd::builtin_scenario("web-evolving").scenario;
    const auto domain = mtd::make_web_app_domain();
    std::uint64_t seed = 10;
    for (auto _ : state) {
        mtd::AtaFmdp agent(domain, mtd::StrategyParams{});
        mtd::Environment env(domain, scenario);
        mtd::Rng env_rng(seed, 1), strat_rng(seed, 2);
        auto log = mtd::run_episode(agent, env, mtd::Config{0}, scenario.horizon, env_rng, strat_rng);
        benchmark::DoNotOptimize(log);
        ++seed;
    }
}
BENCHMARK(BM_AtaEpisodeWebEvolving)->Unit(benchmark::kMillisecond);

void BM_FplEpisodeWebEvolving(benchmark::State& state) {
    const auto scenario = mtd::builtin_scenario("web-evolving").scenario;
    const auto domain = mtd::make_web_app_domain();
    std::uint64_t seed = 10;
    for (auto _ : state) {
        mtd::FplMtd agent(domain.space().size(), 0.007, 0.1, 1000);
        mtd::Environment env(domain, scenario);
        mtd::Rng env_rng(seed, 1), strat_rng(seed, 2);
        auto log = mtd::run_episode(agent, env, mtd::Config{0}, scenario.horizon, env_rng, strat_rng);
        benchmark::DoNotOptimize(log);
        ++seed;
    }
}
BENCHMARK(BM_FplEpisodeWebEvolving)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
