#include "mtd/experiment.hpp"

#include "mtd/alp.hpp"
#include "mtd/io.hpp"
#include "mtd/mdp.hpp"
#include "mtd/rng.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <json.hpp>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace mtd {

void ExperimentConfig::validate() const {
    if (timesteps < 1) throw std::invalid_argument("timesteps must be >= 1");
    if (iterations < 1) throw std::invalid_argument("iterations must be >= 1");
    if (alpha && !(*alpha >= 0.0)) throw std::invalid_argument("alpha must be >= 0");
    if (params.reopt_period < 0) throw std::invalid_argument("reopt period must be >= 0");
}

namespace {

bool is_builtin_domain(const std::string& name) {
    return name == "web" || name == "network" || name == "web-3xsc" || name == "network-3xsc" ||
           name == "web-dh-postgres";
}

}  // namespace

ResolvedInputs resolve_inputs(const ExperimentConfig& config) {
    config.validate();
    Scenario scenario;
    std::string domain_name = config.domain;
    const auto names = builtin_scenario_names();
    if (std::find(names.begin(), names.end(), config.scenario) != names.end()) {
        auto builtin = builtin_scenario(config.scenario);
        scenario = std::move(builtin.scenario);
        if (domain_name.empty()) domain_name = builtin.domain;
    } else {
        scenario = scenario_from_json(read_text_file(config.scenario));
        if (domain_name.empty()) throw std::invalid_argument("a scenario file needs an explicit domain");
    }

    DomainInfo domain = is_builtin_domain(domain_name) ? make_builtin_domain(domain_name, config.seed)
                                                       : domain_from_json(read_text_file(domain_name));
    if (config.alpha) domain = domain.with_alpha(*config.alpha);

    scenario = with_horizon(scenario, config.timesteps);
    resolve_scenario(scenario, domain);  // fail early on unknown type ids

    Config start{0};
    if (config.start_state) start = domain.space().parse(*config.start_state);
    return {std::move(domain), std::move(scenario), start};
}

Scenario with_horizon(const Scenario& scenario, int horizon) {
    if (horizon < 1) throw ScenarioError("horizon must be >= 1");
    Scenario out;
    out.horizon = horizon;
    for (const auto& p : scenario.phases)
        if (p.start < horizon) out.phases.push_back(p);
    if (out.phases.empty()) throw ScenarioError("scenario has no phase before the horizon");
    out.phases.back().end = horizon;
    out.validate();
    return out;
}

Rng environment_rng(std::uint64_t base_seed, int iteration) {
    return Rng(base_seed + static_cast<std::uint64_t>(iteration), 1);
}

Rng strategy_rng(std::uint64_t base_seed, int iteration) {
    return Rng(base_seed + static_cast<std::uint64_t>(iteration), 2);
}

std::vector<double> rolling_mean(std::span<const double> values, int window) {
    if (window < 1) throw std::invalid_argument("rolling window must be >= 1");
    std::vector<double> out(values.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        sum += values[i];
        if (i >= static_cast<std::size_t>(window)) sum -= values[i - window];
        out[i] = sum / static_cast<double>(std::min<std::size_t>(i + 1, window));
    }
    return out;
}

double mean(std::span<const double> values) {
    if (values.empty()) return 0.0;
    double s = 0.0;
    for (double v : values) s += v;
    return s / static_cast<double>(values.size());
}

double population_std(std::span<const double> values) {
    if (values.empty()) return 0.0;
    const double m = mean(values);
    double s = 0.0;
    for (double v : values) s += (v - m) * (v - m);
    return std::sqrt(s / static_cast<double>(values.size()));
}

namespace {

IterationResult run_iteration(const ExperimentConfig& config, const ResolvedInputs& inputs, const std::string& strategy,
                              int i) {
    auto agent = make_strategy(strategy, inputs.domain, config.params);
    Environment env(inputs.domain, inputs.scenario);
    Rng env_rng = environment_rng(config.seed, i);
    Rng strat_rng = strategy_rng(config.seed, i);
    IterationResult it;
    it.seed = config.seed + static_cast<std::uint64_t>(i);
    it.steps = run_episode(*agent, env, inputs.start, inputs.scenario.horizon, env_rng, strat_rng);
    double total = 0.0;
    for (const auto& r : it.steps) total += r.reward;
    it.average_reward = total / static_cast<double>(it.steps.size());
    return it;
}

}  // namespace

RunResult run_experiment(const ExperimentConfig& config) {
    return run_experiment(config, resolve_inputs(config));
}

RunResult run_experiment(const ExperimentConfig& config, const ResolvedInputs& inputs) {
    config.validate();
    RunResult result;
    result.strategy = config.strategy;
    result.alpha = inputs.domain.alpha();
    result.start = inputs.start;
    const int horizon = inputs.scenario.horizon;

    std::vector<double> averages;
    result.mean_reward.assign(horizon, 0.0);
    for (int i = 0; i < config.iterations; ++i) {
        result.iterations.push_back(run_iteration(config, inputs, config.strategy, i));
        averages.push_back(result.iterations.back().average_reward);
        for (int t = 0; t < horizon; ++t) result.mean_reward[t] += result.iterations.back().steps[t].reward;
    }
    for (double& v : result.mean_reward) v /= static_cast<double>(config.iterations);
    result.mean_cumulative.resize(horizon);
    double acc = 0.0;
    for (int t = 0; t < horizon; ++t) result.mean_cumulative[t] = acc += result.mean_reward[t];
    result.rolling_mean = rolling_mean(result.mean_reward);
    result.mean_avg_reward = mean(averages);
    result.std_avg_reward = population_std(averages);
    if (config.with_hindsight)
        result.hindsight =
            hindsight_bounds(inputs.domain, inputs.scenario, inputs.start, horizon, config.iterations, config.seed);
    return result;
}

HindsightResult hindsight_bounds(const DomainInfo& domain, const Scenario& scenario, Config start, int horizon,
                                 int iterations, std::uint64_t base_seed) {
    if (iterations < 1) throw std::invalid_argument("iterations must be >= 1");
    const Scenario sc = with_horizon(scenario, horizon);
    const ResolvedInputs inputs{domain, sc, start};
    ExperimentConfig cfg;
    cfg.iterations = iterations;
    cfg.seed = base_seed;
    cfg.timesteps = horizon;

    HindsightResult h;
    const std::size_t n = domain.space().size();
    h.per_config.assign(n, 0.0);
    for (std::size_t c = 0; c < n; ++c) {
        const std::string name = "static:" + domain.space().label(Config{c});
        double total = 0.0;
        for (int i = 0; i < iterations; ++i) total += run_iteration(cfg, inputs, name, i).average_reward;
        h.per_config[c] = total / static_cast<double>(iterations);
    }
    const auto best = std::max_element(h.per_config.begin(), h.per_config.end());
    const auto worst = std::min_element(h.per_config.begin(), h.per_config.end());
    h.best_static = *best;
    h.worst_static = *worst;
    h.best_config = Config{static_cast<std::size_t>(best - h.per_config.begin())};
    h.worst_config = Config{static_cast<std::size_t>(worst - h.per_config.begin())};
    return h;
}

double policy_regret(std::span<const double> run_rewards, const std::vector<std::vector<double>>& static_runs,
                     std::span<const double> sc_series) {
    if (static_runs.empty()) throw std::invalid_argument("policy_regret: no competitor sequences");
    if (sc_series.size() != run_rewards.size()) throw std::invalid_argument("policy_regret: horizon mismatch");
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& run : static_runs) {
        if (run.size() != run_rewards.size()) throw std::invalid_argument("policy_regret: horizon mismatch");
        double s = 0.0;
        for (double r : run) s += r;
        best = std::max(best, s);
    }
    double alg = 0.0;
    for (std::size_t t = 0; t < run_rewards.size(); ++t) alg += run_rewards[t] - sc_series[t];
    return best - alg;
}

RegretBoundCheck avg_regret_bound_check(const DomainInfo& domain, const PosteriorTable& posterior_true,
                                        const PosteriorTable& posterior_est) {
    const RewardTable r_true = reward_table(domain, posterior_true);
    const RewardTable r_est = reward_table(domain, posterior_est);
    const double gamma = domain.gamma();
    RegretBoundCheck c;
    c.epsilon = r_true.max_abs_difference(r_est);
    c.bound = 2.0 * c.epsilon / (1.0 - gamma);

    const auto opt_true = value_iteration(r_true, gamma, 1e-10);
    const auto opt_est = value_iteration(r_est, gamma, 1e-10);
    const auto v_est_policy = evaluate_policy(r_true, opt_est.policy, gamma);
    for (std::size_t s = 0; s < v_est_policy.size(); ++s)
        c.gap = std::max(c.gap, opt_true.values[s] - v_est_policy[s]);
    c.pass = c.gap <= c.bound + 1e-8;
    return c;
}

PosteriorTable perturb_posterior(const PosteriorTable& posterior, double max_shift, Rng& rng) {
    PosteriorTable out = posterior;
    for (std::size_t s = 0; s < out.states(); ++s) {
        for (std::size_t a = 0; a < out.states(); ++a) {
            auto cell = out.at(Config{s}, Config{a});
            double total = 0.0;
            for (double& p : cell) {
                p = std::max(0.0, p + rng.uniform(-max_shift, max_shift));
                total += p;
            }
            if (total > 0.0) {
                for (double& p : cell) p /= total;
            } else {
                const auto orig = posterior.at(Config{s}, Config{a});
                std::copy(orig.begin(), orig.end(), cell.begin());
            }
        }
    }
    return out;
}

PosteriorTable random_posterior(std::size_t states, std::size_t types, Rng& rng) {
    PosteriorTable out(states, types);
    for (std::size_t s = 0; s < states; ++s) {
        for (std::size_t a = 0; a < states; ++a) {
            auto cell = out.at(Config{s}, Config{a});
            double total = 0.0;
            for (double& p : cell) total += p = rng.exponential(1.0);
            for (double& p : cell) p /= total;
        }
    }
    return out;
}

EstimatorCheck estimator_unbiasedness_check(std::span<const double> p_att, std::span<const double> mus, int samples,
                                            double beta, Rng& rng, double tolerance) {
    if (p_att.size() != mus.size() || p_att.empty())
        throw std::invalid_argument("estimator check: p_att and mu sizes differ");
    if (samples < 1) throw std::invalid_argument("estimator check: samples must be >= 1");

    ConfigSpace space(std::vector<FactorSpec>{FactorSpec{"target", {"only"}}});
    std::vector<AttackerTypeSpec> types;
    for (std::size_t k = 0; k < mus.size(); ++k)
        types.push_back({"type" + std::to_string(k), false, {mus[k]}, {1.0}});
    const DomainInfo domain(space, types, {0.0}, 1.0, 0.5);

    ThreatEstimator est(types.size(), 1, beta);
    const Config c{0};
    for (int i = 0; i < samples; ++i) {
        const std::size_t type = rng.categorical(p_att);
        est.update(type, c, c, rng.bernoulli(mus[type]));
    }

    EstimatorCheck out;
    out.estimate = attacker_type_posterior(est, c, c, domain);
    for (std::size_t k = 0; k < p_att.size(); ++k)
        out.max_error = std::max(out.max_error, std::abs(out.estimate[k] - p_att[k]));
    out.pass = out.max_error <= tolerance;
    return out;
}

double theorem1_run_regret(double p, int horizon, double switch_cost, Rng& rng) {
    if (horizon < 1) throw std::invalid_argument("theorem1: horizon must be >= 1");
    const Config x{0}, y{1};
    const Config first = rng.bernoulli(p) ? y : x;

    std::vector<double> rewards(horizon), sc(horizon, 0.0);
    std::vector<std::vector<double>> statics(2, std::vector<double>(horizon));
    if (first != x) sc[0] = switch_cost;
    for (int t = 1; t <= horizon; ++t) {
        rewards[t - 1] = theorem1_reward(first, t, y);
        statics[0][t - 1] = theorem1_reward(x, t, y);
        statics[1][t - 1] = theorem1_reward(y, t, y);
    }
    return policy_regret(rewards, statics, sc);
}

double theorem1_mean_regret(double p, int horizon, int runs, double switch_cost, Rng& rng) {
    if (runs < 1) throw std::invalid_argument("theorem1: runs must be >= 1");
    double total = 0.0;
    for (int i = 0; i < runs; ++i) total += theorem1_run_regret(p, horizon, switch_cost, rng);
    return total / static_cast<double>(runs);
}

LinearFit linear_fit(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size() || xs.size() < 2) throw std::invalid_argument("linear_fit: need >= 2 paired points");
    const double mx = mean(xs), my = mean(ys);
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    if (sxx == 0.0) throw std::invalid_argument("linear_fit: xs are all equal");
    LinearFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    f.r2 = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
    return f;
}

std::vector<PropertyCheck> run_property_checks(std::uint64_t seed) {
    std::vector<PropertyCheck> checks;
    Rng rng(seed, 7);
    const DomainInfo web = make_web_app_domain();

    {
        // exact basis: ALP values and policy against value iteration
        const BasisSet basis = build_state_basis(web.space());
        double worst = 0.0;
        bool same_policy = true;
        for (int trial = 0; trial < 5; ++trial) {
            const auto posterior = random_posterior(web.space().size(), web.type_count(), rng);
            const auto w = solve_alp(build_alp(web, posterior, basis));
            const auto v = approximate_values(basis, web.space(), w);
            const auto vi = value_iteration(reward_table(web, posterior), web.gamma(), 1e-12);
            for (std::size_t s = 0; s < v.size(); ++s) worst = std::max(worst, std::abs(v[s] - vi.values[s]));
            same_policy = same_policy && extract_policy(w, web, posterior, basis) == vi.policy;
        }
        checks.push_back({"alp-vs-vi", worst <= 1e-5 && same_policy,
                          "max |V_alp - V_vi| = " + format_number(worst) +
                              (same_policy ? ", policies match" : ", policies differ")});
    }
    {
        const double p[] = {0.6, 0.4}, mu[] = {0.5, 1.0};
        const auto c = estimator_unbiasedness_check(p, mu, 10000, 1.0, rng);
        checks.push_back({"estimator-unbiased", c.pass, "max error = " + format_number(c.max_error)});
    }
    {
        bool pass = true;
        double worst_ratio = 0.0;
        for (int trial = 0; trial < 100; ++trial) {
            const auto truth = random_posterior(web.space().size(), web.type_count(), rng);
            const auto c = avg_regret_bound_check(web, truth, perturb_posterior(truth, 0.05, rng));
            pass = pass && c.pass;
            if (c.bound > 0.0) worst_ratio = std::max(worst_ratio, c.gap / c.bound);
        }
        checks.push_back({"avg-regret-bound", pass, "max gap / bound = " + format_number(worst_ratio)});
    }
    {
        const double p = 0.3;
        const std::vector<double> ts = {100, 500, 1000, 5000};
        std::vector<double> regrets;
        for (double t : ts) regrets.push_back(theorem1_mean_regret(p, static_cast<int>(t), 2000, 0.5, rng));
        const auto fit = linear_fit(ts, regrets);
        const bool pass = fit.r2 >= 0.99 && std::abs(fit.slope - p) <= 0.2 * p;
        checks.push_back({"theorem1-linear", pass,
                          "slope = " + format_number(fit.slope) + ", R2 = " + format_number(fit.r2)});
    }
    return checks;
}

SummaryRow summary_row(const RunResult& result) {
    SummaryRow row{result.strategy, result.alpha, result.mean_avg_reward, result.std_avg_reward, 0.0, 0.0};
    if (result.hindsight) {
        row.best_static = result.hindsight->best_static;
        row.worst_static = result.hindsight->worst_static;
    }
    return row;
}

std::string format_number(double value) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    if (ec != std::errc()) throw std::runtime_error("format_number failed");
    return std::string(buf, ptr);
}

void write_steps_csv(std::ostream& out, const RunResult& result, const DomainInfo& domain) {
    const auto& space = domain.space();
    out << "iteration,t,state,action,attacker_type,phi,reward\n";
    for (std::size_t i = 0; i < result.iterations.size(); ++i) {
        for (const auto& r : result.iterations[i].steps) {
            out << i << ',' << r.t << ',' << space.label(r.state) << ',' << space.label(r.action) << ','
                << domain.type(r.attacker_type).id << ',' << (r.phi ? 1 : 0) << ',' << format_number(r.reward) << '\n';
        }
    }
}

void write_summary_csv(std::ostream& out, std::span<const SummaryRow> rows) {
    out << "strategy,alpha,mean_avg_reward,std_avg_reward,best_static,worst_static\n";
    for (const auto& r : rows) {
        out << r.strategy << ',' << format_number(r.alpha) << ',' << format_number(r.mean_avg_reward) << ','
            << format_number(r.std_avg_reward) << ',' << format_number(r.best_static) << ','
            << format_number(r.worst_static) << '\n';
    }
}

void write_rolling_csv(std::ostream& out, const RunResult& result) {
    out << "t,mean_reward,rolling_mean_" << kRollingWindow << ",mean_cumulative\n";
    for (std::size_t t = 0; t < result.mean_reward.size(); ++t) {
        out << t << ',' << format_number(result.mean_reward[t]) << ',' << format_number(result.rolling_mean[t]) << ','
            << format_number(result.mean_cumulative[t]) << '\n';
    }
}

std::string metadata_json(const ExperimentConfig& config, const ResolvedInputs& inputs) {
    nlohmann::ordered_json j;
    j["domain"] = config.domain;
    j["scenario"] = config.scenario;
    j["strategy"] = config.strategy;
    j["alpha"] = inputs.domain.alpha();
    j["timesteps"] = inputs.scenario.horizon;
    j["iterations"] = config.iterations;
    j["seed"] = config.seed;
    j["iteration_seeds"] = "seed + iteration index";
    j["start_state"] = inputs.domain.space().label(inputs.start);
    j["params"] = {{"beta", config.params.beta},
                   {"reopt_period", config.params.reopt_period},
                   {"random_ties", config.params.random_ties},
                   {"epsilon", config.params.epsilon},
                   {"fpl_gamma", config.params.fpl_gamma},
                   {"fpl_eta", config.params.fpl_eta},
                   {"fpl_lmax", config.params.fpl_lmax}};
    j["rolling_window"] = kRollingWindow;
    return j.dump(2) + "\n";
}

void write_run_outputs(const std::filesystem::path& dir, const ExperimentConfig& config, const ResolvedInputs& inputs,
                       const RunResult& result) {
    std::filesystem::create_directories(dir);
    auto open = [&](const char* name) {
        std::ofstream f(dir / name, std::ios::binary);
        if (!f) throw std::runtime_error("cannot write '" + (dir / name).string() + "'");
        return f;
    };
    {
        auto f = open("steps.csv");
        write_steps_csv(f, result, inputs.domain);
    }
    {
        auto f = open("summary.csv");
        const SummaryRow row = summary_row(result);
        write_summary_csv(f, std::span<const SummaryRow>(&row, 1));
    }
    {
        auto f = open("rolling.csv");
        write_rolling_csv(f, result);
    }
    {
        auto f = open("metadata.json");
        f << metadata_json(config, inputs);
    }
}

}  // namespace mtd
