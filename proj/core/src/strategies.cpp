#include "mtd/strategies.hpp"

#include "mtd/rng.hpp"

#include <stdexcept>

namespace mtd {

AtaFmdp::AtaFmdp(DomainInfo domain, StrategyParams params)
    : AtaFmdp(domain, params, build_basis(domain.space())) {}

AtaFmdp::AtaFmdp(DomainInfo domain, StrategyParams params, BasisSet basis)
    : domain_(std::move(domain)),
      params_(params),
      basis_(std::move(basis)),
      estimator_(domain_.type_count(), domain_.space().size(), params.beta) {
    if (params_.reopt_period < 0) throw std::invalid_argument("reopt_period must be >= 0");
}

void AtaFmdp::reoptimize(Rng* tie_rng) {
    const auto posterior = posterior_snapshot(estimator_, domain_);
    const auto alp = build_alp(domain_, posterior, basis_);
    weights_ = solve_alp(alp);
    policy_ = extract_policy(weights_, domain_, posterior, basis_, params_.random_ties ? tie_rng : nullptr);
    ++reoptimizations_;
}

Config AtaFmdp::select(Config s, Rng& rng) {
    const bool due = params_.reopt_period == kNeverReoptimize ? !policy_.has_value()
                                                               : (t_ % params_.reopt_period == 0 || !policy_);
    if (due) reoptimize(&rng);
    return (*policy_)(s);
}

void AtaFmdp::observe(const StepRecord& step, Rng&) {
    estimator_.update(step.attacker_type, step.state, step.action, step.phi);
    ++t_;
}

EpsilonGreedy::EpsilonGreedy(std::size_t actions, double epsilon)
    : epsilon_(epsilon), means_(actions, 0.0), counts_(actions, 0) {
    if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw std::invalid_argument("epsilon must lie in [0, 1]");
    if (actions == 0) throw std::invalid_argument("epsilon-greedy needs at least one action");
}

Config EpsilonGreedy::greedy() const {
    std::size_t best = 0;
    for (std::size_t a = 1; a < means_.size(); ++a)
        if (means_[a] > means_[best]) best = a;
    return Config{best};
}

Config EpsilonGreedy::select(Config, Rng& rng) {
    if (rng.uniform01() < epsilon_) return Config{rng.uniform_index(means_.size())};
    return greedy();
}

void EpsilonGreedy::update(Config a, double reward) {
    auto& n = counts_.at(a.index);
    ++n;
    means_[a.index] += (reward - means_[a.index]) / static_cast<double>(n);
}

void EpsilonGreedy::observe(const StepRecord& step, Rng&) {
    update(step.action, step.reward);
}

std::size_t perturbed_leader(std::span<const double> estimates, std::span<const double> perturbations) {
    if (estimates.empty() || estimates.size() != perturbations.size())
        throw std::invalid_argument("perturbed_leader: size mismatch");
    std::size_t best = 0;
    double best_value = estimates[0] + perturbations[0];
    for (std::size_t a = 1; a < estimates.size(); ++a) {
        const double v = estimates[a] + perturbations[a];
        if (v > best_value) {
            best_value = v;
            best = a;
        }
    }
    return best;
}

int geometric_resampling_count(std::size_t played, const std::function<std::size_t()>& draw, int lmax) {
    if (lmax < 1) throw std::invalid_argument("geometric resampling cap must be >= 1");
    for (int k = 1; k < lmax; ++k)
        if (draw() == played) return k;
    return lmax;
}

FplMtd::FplMtd(std::size_t actions, double explore, double eta, int lmax)
    : explore_(explore), eta_(eta), lmax_(lmax), estimates_(actions, 0.0) {
    if (actions == 0) throw std::invalid_argument("FPL needs at least one action");
    if (!(explore >= 0.0 && explore <= 1.0)) throw std::invalid_argument("FPL exploration rate must lie in [0, 1]");
    if (!(eta > 0.0)) throw std::invalid_argument("FPL perturbation rate must be positive");
    if (lmax < 1) throw std::invalid_argument("FPL resampling cap must be >= 1");
}

std::size_t FplMtd::draw_selection(Rng& rng) const {
    if (rng.uniform01() < explore_) return rng.uniform_index(estimates_.size());
    std::vector<double> z(estimates_.size());
    for (double& v : z) v = rng.exponential(eta_);
    return perturbed_leader(estimates_, z);
}

Config FplMtd::select(Config, Rng& rng) {
    return Config{draw_selection(rng)};
}

int FplMtd::update(Config a, double reward, Rng& rng) {
    const int k = geometric_resampling_count(a.index, [&] { return draw_selection(rng); }, lmax_);
    estimates_.at(a.index) += reward * static_cast<double>(k);
    return k;
}

void FplMtd::observe(const StepRecord& step, Rng& rng) {
    update(step.action, step.reward, rng);
}

Config UniformRandom::select(Config, Rng& rng) {
    return Config{rng.uniform_index(actions_)};
}

std::unique_ptr<Strategy> make_strategy(const std::string& name, const DomainInfo& domain,
                                        const StrategyParams& params) {
    const std::size_t n = domain.space().size();
    if (name == "ata-fmdp") return std::make_unique<AtaFmdp>(domain, params);
    if (name == "fpl") return std::make_unique<FplMtd>(n, params.fpl_gamma, params.fpl_eta, params.fpl_lmax);
    if (name == "eps-greedy") return std::make_unique<EpsilonGreedy>(n, params.epsilon);
    if (name == "urs") return std::make_unique<UniformRandom>(n);
    if (name.starts_with("static:")) {
        const std::string label = name.substr(7);
        return std::make_unique<StaticDefense>(domain.space().parse(label), label);
    }
    throw std::invalid_argument("unknown strategy '" + name + "'");
}

std::vector<StepRecord> run_episode(Strategy& strategy, Environment& env, Config start, int horizon,
                                    Rng& env_rng, Rng& strategy_rng) {
    if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");
    std::vector<StepRecord> log;
    log.reserve(static_cast<std::size_t>(horizon));
    Config s = start;
    for (int t = 0; t < horizon; ++t) {
        const Config a = strategy.select(s, strategy_rng);
        const StepRecord rec = env.step(s, a, env_rng);
        strategy.observe(rec, strategy_rng);
        log.push_back(rec);
        s = next_state(env.domain().space(), s, a);
    }
    return log;
}

std::vector<StepRecord> ata_fmdp_run(const DomainInfo& domain, Environment& env, int horizon, int reopt_period,
                                     double beta, Rng& rng) {
    StrategyParams params;
    params.reopt_period = reopt_period;
    params.beta = beta;
    AtaFmdp agent(domain, params);
    return run_episode(agent, env, Config{0}, horizon, rng, rng);
}

}  // namespace mtd
