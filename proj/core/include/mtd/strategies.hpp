#pragma once

#include "mtd/alp.hpp"
#include "mtd/domain.hpp"
#include "mtd/environment.hpp"
#include "mtd/estimator.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mtd {

class Rng;

/// reopt_period value meaning "solve once at t = 0 and never again".
inline constexpr int kNeverReoptimize = 0;

struct StrategyParams {
    double beta = 2.0;
    int reopt_period = 1;
    /// Break exact ties between greedy actions with the strategy rng instead of
    /// always taking the lowest action index.
    bool random_ties = true;
    double epsilon = 0.2;
    double fpl_gamma = 0.007;
    double fpl_eta = 0.1;
    int fpl_lmax = 1000;
};

/// A defender. select() is called once per timestep, then observe() with the
/// outcome of that same step.
class Strategy {
public:
    virtual ~Strategy() = default;
    virtual std::string name() const = 0;
    virtual Config select(Config s, Rng& rng) = 0;
    virtual void observe(const StepRecord& step, Rng& rng) = 0;
};

/// Adaptive threat-aware factored-MDP defender.
///
/// Keeps decayed attack-success counts, and whenever re-optimization is due
/// rebuilds the attacker-type posterior for every (state, action), solves the
/// approximate LP and acts greedily on the resulting value function.
class AtaFmdp final : public Strategy {
public:
    AtaFmdp(DomainInfo domain, StrategyParams params);
    AtaFmdp(DomainInfo domain, StrategyParams params, BasisSet basis);

    std::string name() const override { return "ata-fmdp"; }
    Config select(Config s, Rng& rng) override;
    void observe(const StepRecord& step, Rng& rng) override;

    void reoptimize(Rng* tie_rng);
    const ThreatEstimator& estimator() const { return estimator_; }
    const std::optional<Policy>& policy() const { return policy_; }
    const std::vector<double>& weights() const { return weights_; }
    int reoptimizations() const { return reoptimizations_; }

private:
    DomainInfo domain_;
    StrategyParams params_;
    BasisSet basis_;
    ThreatEstimator estimator_;
    std::optional<Policy> policy_;
    std::vector<double> weights_;
    int t_ = 0;
    int reoptimizations_ = 0;
};

/// Per-action running-mean rewards; explores uniformly with probability epsilon.
class EpsilonGreedy final : public Strategy {
public:
    EpsilonGreedy(std::size_t actions, double epsilon);

    std::string name() const override { return "eps-greedy"; }
    Config select(Config s, Rng& rng) override;
    void observe(const StepRecord& step, Rng& rng) override;

    Config greedy() const;
    void update(Config a, double reward);
    double mean(Config a) const { return means_.at(a.index); }
    std::size_t pulls(Config a) const { return counts_.at(a.index); }

private:
    double epsilon_;
    std::vector<double> means_;
    std::vector<std::size_t> counts_;
};

/// argmax_a estimates[a] + perturbations[a], lowest index on ties.
std::size_t perturbed_leader(std::span<const double> estimates, std::span<const double> perturbations);

/// Number of independent redraws until `draw` returns `played`, capped at lmax.
/// An unbiased estimate of 1 / P(select played), truncated.
int geometric_resampling_count(std::size_t played, const std::function<std::size_t()>& draw, int lmax);

/// Follow-the-perturbed-leader over configurations with geometric-resampling
/// importance weights. Observed rewards already include the switching cost.
class FplMtd final : public Strategy {
public:
    FplMtd(std::size_t actions, double explore, double eta, int lmax);

    std::string name() const override { return "fpl"; }
    Config select(Config s, Rng& rng) override;
    void observe(const StepRecord& step, Rng& rng) override;

    std::size_t draw_selection(Rng& rng) const;
    /// Adds reward * K to the played action's estimate; returns K.
    int update(Config a, double reward, Rng& rng);
    double estimate(Config a) const { return estimates_.at(a.index); }

private:
    double explore_;
    double eta_;
    int lmax_;
    std::vector<double> estimates_;
};

class UniformRandom final : public Strategy {
public:
    explicit UniformRandom(std::size_t actions) : actions_(actions) {}

    std::string name() const override { return "urs"; }
    Config select(Config s, Rng& rng) override;
    void observe(const StepRecord&, Rng&) override {}

private:
    std::size_t actions_;
};

/// Always switches to (and then stays in) one configuration.
class StaticDefense final : public Strategy {
public:
    StaticDefense(Config c, std::string label) : c_(c), label_(std::move(label)) {}

    std::string name() const override { return "static:" + label_; }
    Config select(Config, Rng&) override { return c_; }
    void observe(const StepRecord&, Rng&) override {}

private:
    Config c_;
    std::string label_;
};

/// ata-fmdp, fpl, eps-greedy, urs or static:<config-label>.
std::unique_ptr<Strategy> make_strategy(const std::string& name, const DomainInfo& domain,
                                        const StrategyParams& params);

/// Runs `horizon` interaction steps from `start` and returns the step log.
std::vector<StepRecord> run_episode(Strategy& strategy, Environment& env, Config start, int horizon,
                                    Rng& env_rng, Rng& strategy_rng);

/// Convenience wrapper: a fresh AtaFmdp run with one rng shared by both sides.
std::vector<StepRecord> ata_fmdp_run(const DomainInfo& domain, Environment& env, int horizon, int reopt_period,
                                     double beta, Rng& rng);

}  // namespace mtd
