#pragma once

#include "mtd/domain.hpp"
#include "mtd/environment.hpp"
#include "mtd/estimator.hpp"
#include "mtd/strategies.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mtd {

class Rng;

struct ExperimentConfig {
    /// Built-in domain name or path to a domain JSON file; empty means the
    /// scenario's default domain.
    std::string domain;
    /// Built-in scenario name or path to a scenario JSON file.
    std::string scenario = "web-evolving";
    std::string strategy = "ata-fmdp";
    StrategyParams params;
    /// Overrides the domain's switching-cost weight when set.
    std::optional<double> alpha;
    int timesteps = 1000;
    int iterations = 10;
    std::uint64_t seed = 10;
    /// Configuration label; defaults to the first enumerated configuration.
    std::optional<std::string> start_state;
    bool with_hindsight = true;

    void validate() const;
};

struct ResolvedInputs {
    DomainInfo domain;
    Scenario scenario;
    Config start;
};

ResolvedInputs resolve_inputs(const ExperimentConfig& config);

/// Scenario cut or stretched to horizon T: phases starting at or after T are
/// dropped, and the last remaining phase is clipped or extended to end at T.
Scenario with_horizon(const Scenario& scenario, int horizon);

/// Seeds of iteration i: environment stream and strategy stream.
Rng environment_rng(std::uint64_t base_seed, int iteration);
Rng strategy_rng(std::uint64_t base_seed, int iteration);

struct IterationResult {
    std::uint64_t seed = 0;
    std::vector<StepRecord> steps;
    double average_reward = 0.0;
};

struct HindsightResult {
    double best_static = 0.0;
    double worst_static = 0.0;
    Config best_config;
    Config worst_config;
    /// Mean over iterations of each static configuration's average reward.
    std::vector<double> per_config;
};

struct RunResult {
    std::string strategy;
    double alpha = 0.0;
    Config start;
    std::vector<IterationResult> iterations;
    double mean_avg_reward = 0.0;
    /// Population standard deviation of the per-iteration averages.
    double std_avg_reward = 0.0;
    /// Mean over iterations of the cumulative reward after each step.
    std::vector<double> mean_cumulative;
    /// Mean over iterations of the per-step reward, and its trailing 50-step mean.
    std::vector<double> mean_reward;
    std::vector<double> rolling_mean;
    std::optional<HindsightResult> hindsight;
};

inline constexpr int kRollingWindow = 50;

/// Trailing mean over the last `window` values (fewer at the start).
std::vector<double> rolling_mean(std::span<const double> values, int window = kRollingWindow);

double mean(std::span<const double> values);
double population_std(std::span<const double> values);

RunResult run_experiment(const ExperimentConfig& config);
/// Same, with inputs already resolved.
RunResult run_experiment(const ExperimentConfig& config, const ResolvedInputs& inputs);

/// Replays every static configuration with the run_experiment seed schedule.
HindsightResult hindsight_bounds(const DomainInfo& domain, const Scenario& scenario, Config start, int horizon,
                                 int iterations, std::uint64_t base_seed);

/// max_b sum_t static_runs[b][t] - (sum_t run_rewards[t] - sum_t sc_series[t]).
/// run_rewards must not already include the switching costs in sc_series.
double policy_regret(std::span<const double> run_rewards, const std::vector<std::vector<double>>& static_runs,
                     std::span<const double> sc_series);

struct RegretBoundCheck {
    double epsilon = 0.0;
    double gap = 0.0;
    double bound = 0.0;
    bool pass = false;
};

/// epsilon = sup-norm difference of the two reward tables; the policy optimal
/// for the estimated rewards is evaluated under the true ones and compared
/// with the true optimum.
RegretBoundCheck avg_regret_bound_check(const DomainInfo& domain, const PosteriorTable& posterior_true,
                                        const PosteriorTable& posterior_est);

/// Each (s, a) distribution shifted by U(-max_shift, max_shift) per mass,
/// clipped at 0 and renormalized.
PosteriorTable perturb_posterior(const PosteriorTable& posterior, double max_shift, Rng& rng);

/// Random distribution per (s, a) over all types.
PosteriorTable random_posterior(std::size_t states, std::size_t types, Rng& rng);

struct EstimatorCheck {
    std::vector<double> estimate;
    double max_error = 0.0;
    bool pass = false;
};

/// Feeds `samples` simulated attacks at one fixed (s, a) through a
/// ThreatEstimator: type ~ p_att, success ~ Bernoulli(mu[type]). Compares the
/// normalized n / mu with p_att.
EstimatorCheck estimator_unbiasedness_check(std::span<const double> p_att, std::span<const double> mus, int samples,
                                            double beta, Rng& rng, double tolerance = 0.05);

/// Policy regret of one defender run against the adaptive adversary whose
/// reward is 0 after the first step iff the first configuration was y.
/// Two configurations {x, y}; the defender starts in x, moves to y with
/// probability p (paying switch_cost once) and otherwise stays, then holds.
double theorem1_run_regret(double p, int horizon, double switch_cost, Rng& rng);
double theorem1_mean_regret(double p, int horizon, int runs, double switch_cost, Rng& rng);

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
};

LinearFit linear_fit(std::span<const double> xs, std::span<const double> ys);

struct PropertyCheck {
    std::string name;
    bool pass = false;
    std::string detail;
};

/// ALP-vs-VI exactness, estimator unbiasedness, average-regret bound and
/// Theorem-1 linearity.
std::vector<PropertyCheck> run_property_checks(std::uint64_t seed);

struct SummaryRow {
    std::string strategy;
    double alpha = 0.0;
    double mean_avg_reward = 0.0;
    double std_avg_reward = 0.0;
    double best_static = 0.0;
    double worst_static = 0.0;
};

SummaryRow summary_row(const RunResult& result);

/// Shortest round-trip decimal form with '.' separator.
std::string format_number(double value);

void write_steps_csv(std::ostream& out, const RunResult& result, const DomainInfo& domain);
void write_summary_csv(std::ostream& out, std::span<const SummaryRow> rows);
void write_rolling_csv(std::ostream& out, const RunResult& result);
std::string metadata_json(const ExperimentConfig& config, const ResolvedInputs& inputs);

/// steps.csv, summary.csv, rolling.csv and metadata.json under dir.
void write_run_outputs(const std::filesystem::path& dir, const ExperimentConfig& config, const ResolvedInputs& inputs,
                       const RunResult& result);

}  // namespace mtd
