// One PASS/FAIL line per acceptance criterion. Exit status is nonzero when any
// criterion fails.

#include "mtd/alp.hpp"
#include "mtd/environment.hpp"
#include "mtd/estimator.hpp"
#include "mtd/experiment.hpp"
#include "mtd/lp.hpp"
#include "mtd/rng.hpp"
#include "oracles.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

using namespace mtd;

namespace {

// tolerances
constexpr double kMarginFpl = 0.05;
constexpr double kMarginEps = 0.20;
constexpr double kMarginUrs = 0.35;
constexpr double kMarginEach = 0.05;
constexpr double kNodeOfflineShare = 0.80;
constexpr int kAdaptationWindow = 50;
constexpr int kBurnIn = 100;
constexpr double kLanguageLo = 0.40, kLanguageHi = 0.60;
constexpr double kUrsCeiling = 30.0, kOthersFloor = 100.0;
constexpr double kAlpVsVi = 1e-5;
constexpr double kAlpSeconds = 1.0;
constexpr double kLpObjective = 1e-6;
constexpr int kLpProblems = 200;
constexpr double kEstimatorError = 0.05;
constexpr int kEstimatorSamples = 10000;
constexpr int kPerturbations = 100;
constexpr double kPerturbation = 0.05;
constexpr double kBoundSlack = 1e-8;
constexpr double kMinR2 = 0.99;
constexpr double kSlopeRel = 0.20;
constexpr std::uint64_t kSeed = 10;

const std::vector<std::string> kBaselines{"fpl", "eps-greedy", "urs"};

struct Outcome {
    bool pass;
    std::string detail;
};

std::string fmt(double v, int digits = 4) {
    std::ostringstream os;
    os.precision(digits);
    os << v;
    return os.str();
}

double margin(double ours, double theirs) { return (ours - theirs) / std::abs(theirs); }

RunResult run(const std::string& scenario, const std::string& strategy, double alpha) {
    ExperimentConfig c;
    c.scenario = scenario;
    c.strategy = strategy;
    c.alpha = alpha;
    c.iterations = 10;
    c.timesteps = 1000;
    c.seed = kSeed;
    c.with_hindsight = false;
    return run_experiment(c);
}

// ATA-FMDP against every baseline at one alpha, with per-baseline minimum margins.
Outcome beats_baselines(const std::string& scenario, const std::vector<double>& alphas,
                        const std::vector<double>& min_margins) {
    std::map<std::string, double> score;
    for (const auto& s : std::vector<std::string>{"ata-fmdp", "fpl", "eps-greedy", "urs"}) {
        double total = 0;
        for (double a : alphas) total += run(scenario, s, a).mean_avg_reward;
        score[s] = total / static_cast<double>(alphas.size());
    }
    bool pass = true;
    std::string detail = "ata=" + fmt(score["ata-fmdp"]);
    for (std::size_t i = 0; i < kBaselines.size(); ++i) {
        const double m = margin(score["ata-fmdp"], score[kBaselines[i]]);
        pass = pass && m >= min_margins[i];
        detail += " " + kBaselines[i] + "=" + fmt(score[kBaselines[i]]) + " (+" + fmt(100 * m, 3) + "% vs " +
                  fmt(100 * min_margins[i], 3) + "%)";
    }
    return {pass, detail};
}

Outcome criterion1() { return beats_baselines("web-evolving", {0.0, 0.5, 1.0}, {kMarginFpl, kMarginEps, kMarginUrs}); }

Outcome criterion2() {
    return beats_baselines("web-most-adverse", {1.0}, {kMarginEach, kMarginEach, kMarginEach});
}

Outcome criterion3() {
    auto out = beats_baselines("net-evolving", {1.0}, {kMarginEach, kMarginEach, kMarginEach});
    const auto in = resolve_inputs([] {
        ExperimentConfig c;
        c.scenario = "net-evolving";
        return c;
    }());
    const auto node0 = *in.domain.space().factor_index("node0");
    const auto& values = in.domain.space().factor(node0).values;
    const std::size_t offline = std::find(values.begin(), values.end(), "offline") - values.begin();
    const auto r = run("net-evolving", "ata-fmdp", 1.0);
    int total = 0, off = 0;
    for (const auto& it : r.iterations)
        for (const auto& s : it.steps)
            if (s.t >= 330 + kAdaptationWindow && s.t < 660) {
                ++total;
                off += in.domain.space().value_of(s.action, node0) == offline;
            }
    const double share = static_cast<double>(off) / total;
    out.pass = out.pass && share >= kNodeOfflineShare;
    out.detail += "; node0 offline " + fmt(100 * share, 4) + "% of [380,660) (need >= 80%)";
    return out;
}

Outcome criterion4() {
    ExperimentConfig c;
    c.scenario = "web-dh-postgres";
    c.strategy = "ata-fmdp";
    c.alpha = 0.0;
    c.with_hindsight = false;
    const auto in = resolve_inputs(c);
    const auto& sp = in.domain.space();
    const auto db = *sp.factor_index("database"), lang = *sp.factor_index("language");
    const auto idx = [&](std::size_t j, const std::string& v) {
        const auto& vals = sp.factor(j).values;
        return static_cast<std::size_t>(std::find(vals.begin(), vals.end(), v) - vals.begin());
    };
    const auto mysql = idx(db, "MySQL"), php = idx(lang, "PHP");

    // default start, after burn-in: database choices and language balance
    const auto r = run_experiment(c, in);
    int steps = 0, on_mysql = 0, on_php = 0, late_switches = 0, late_to_mysql = 0;
    for (const auto& it : r.iterations)
        for (const auto& s : it.steps) {
            if (s.t < kBurnIn) continue;
            ++steps;
            on_mysql += sp.value_of(s.action, db) == mysql;
            on_php += sp.value_of(s.action, lang) == php;
            if (sp.value_of(s.state, db) != sp.value_of(s.action, db)) {
                ++late_switches;
                late_to_mysql += sp.value_of(s.action, db) == mysql;
            }
        }

    // Postgres start: every database switch over the whole run lands on MySQL
    auto pg = in;
    pg.start = sp.parse("PHP|Postgres");
    const auto rp = run_experiment(c, pg);
    int switches = 0, to_mysql = 0;
    bool every_iteration_switches = true;
    for (const auto& it : rp.iterations) {
        int mine = 0;
        for (const auto& s : it.steps)
            if (sp.value_of(s.state, db) != sp.value_of(s.action, db)) {
                ++mine;
                to_mysql += sp.value_of(s.action, db) == mysql;
            }
        switches += mine;
        every_iteration_switches = every_iteration_switches && mine > 0;
    }

    const double share_mysql = static_cast<double>(on_mysql) / steps;
    const double share_php = static_cast<double>(on_php) / steps;
    const bool pass = on_mysql == steps && late_to_mysql == late_switches && every_iteration_switches &&
                      to_mysql == switches && share_php >= kLanguageLo && share_php <= kLanguageHi;
    return {pass, "db switches to MySQL " + std::to_string(to_mysql) + "/" + std::to_string(switches) +
                      " from a Postgres start, " + std::to_string(late_to_mysql) + "/" +
                      std::to_string(late_switches) + " after burn-in; steps on MySQL " + fmt(100 * share_mysql, 4) +
                      "%, PHP/Python " + fmt(100 * share_php, 3) + "/" + fmt(100 - 100 * share_php, 3) + "%"};
}

Outcome criterion5() {
    bool pass = true;
    std::string detail;
    for (const auto& s : std::vector<std::string>{"ata-fmdp", "fpl", "eps-greedy", "urs"}) {
        const double v = run("web-evolving-3xsc", s, 1.0).mean_avg_reward;
        pass = pass && (s == "urs" ? v < kUrsCeiling : v > kOthersFloor);
        detail += (detail.empty() ? "" : " ") + s + "=" + fmt(v);
    }
    return {pass, detail + " (urs < 30, others > 100)"};
}

oracle::RewardFn table_rewards(const DomainInfo& d, const PosteriorTable& p) {
    return [&d, &p](std::size_t s, std::size_t a) {
        const auto cell = p.at(Config{s}, Config{a});
        return oracle::expected_reward(d, s, a, std::vector<double>(cell.begin(), cell.end()));
    };
}

Outcome criterion6() {
    const auto d = make_web_app_domain();
    const auto basis = build_state_basis(d.space());
    Rng rng(kSeed, 6);
    std::vector<PosteriorTable> posteriors{posterior_snapshot(ThreatEstimator(3, 4, 2.0), d)};
    for (const auto& dist : std::vector<std::vector<double>>{{0.5, 0.35, 0.15}, {0.1, 0.0, 0.9}, {1, 0, 0}})
        posteriors.push_back(PosteriorTable::uniform_over(d, dist));
    for (int i = 0; i < 16; ++i) posteriors.push_back(random_posterior(4, 3, rng));

    double worst = 0;
    int policy_mismatch = 0;
    const auto t0 = std::chrono::steady_clock::now();
    for (const auto& post : posteriors) {
        const auto w = solve_alp(build_alp(d, post, basis));
        const auto v = approximate_values(basis, d.space(), w);
        const auto pi = extract_policy(w, d, post, basis);
        const auto vi = oracle::value_iteration(4, table_rewards(d, post), d.gamma());
        for (std::size_t s = 0; s < 4; ++s) {
            worst = std::max(worst, std::abs(v[s] - vi.values[s]));
            policy_mismatch += pi(Config{s}).index != vi.policy[s];
        }
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool pass = worst <= kAlpVsVi && policy_mismatch == 0 && secs < kAlpSeconds;
    return {pass, std::to_string(posteriors.size()) + " posteriors, max |V_alp - V_vi| = " + fmt(worst, 3) +
                      ", policy mismatches " + std::to_string(policy_mismatch) + ", " + fmt(secs, 3) + " s"};
}

Outcome criterion7() {
    Rng rng(kSeed, 7);
    int mismatched_status = 0, mismatched_value = 0;
    std::map<LpStatus, int> seen;
    for (int k = 0; k < kLpProblems; ++k) {
        const std::size_t n = 1 + rng.uniform_index(4);
        const std::size_t m = 1 + rng.uniform_index(6);
        const auto lp = oracle::random_lp(rng, n, m, false);
        const auto s = solve_lp(lp);
        const auto o = oracle::enumerate_vertices(lp);
        ++seen[o.status];
        if (s.status != o.status) {
            ++mismatched_status;
        } else if (s.status == LpStatus::optimal &&
                   std::abs(s.objective_value - o.objective) > kLpObjective * std::max(1.0, std::abs(o.objective))) {
            ++mismatched_value;
        }
    }
    return {mismatched_status == 0 && mismatched_value == 0,
            std::to_string(kLpProblems) + " LPs (optimal " + std::to_string(seen[LpStatus::optimal]) +
                ", infeasible " + std::to_string(seen[LpStatus::infeasible]) + ", unbounded " +
                std::to_string(seen[LpStatus::unbounded]) + "); status mismatches " +
                std::to_string(mismatched_status) + ", objective mismatches " + std::to_string(mismatched_value)};
}

Outcome criterion8() {
    Rng rng(kSeed, 8);
    const std::vector<std::vector<double>> p_atts{{0.5, 0.35, 0.15}, {0.1, 0.0, 0.9}, {0.2, 0.3, 0.3, 0.2}};
    const std::vector<std::vector<double>> mus{{0.32, 0.7, 0.78}, {0.36, 0.65, 0.87}, {0.55, 0.25, 0.28, 0.58}};
    double worst = 0;
    bool pass = true;
    for (std::size_t i = 0; i < p_atts.size(); ++i) {
        const auto c = estimator_unbiasedness_check(p_atts[i], mus[i], kEstimatorSamples, 1.0, rng, kEstimatorError);
        // recompute the error here rather than trusting the library's flag
        double err = 0;
        for (std::size_t k = 0; k < p_atts[i].size(); ++k) err = std::max(err, std::abs(c.estimate[k] - p_atts[i][k]));
        worst = std::max(worst, err);
        pass = pass && err <= kEstimatorError;
    }
    return {pass, "max componentwise error " + fmt(worst, 3) + " over " + std::to_string(p_atts.size()) +
                      " type mixes (need <= 0.05)"};
}

Outcome criterion9() {
    const auto d = make_web_app_domain();
    const double g = d.gamma();
    Rng rng(kSeed, 9);
    double worst_ratio = 0;
    int violations = 0;
    for (int k = 0; k < kPerturbations; ++k) {
        const auto truth = random_posterior(4, 3, rng);
        const auto est = perturb_posterior(truth, kPerturbation, rng);
        const auto rt = table_rewards(d, truth), re = table_rewards(d, est);
        double eps = 0;
        for (std::size_t s = 0; s < 4; ++s)
            for (std::size_t a = 0; a < 4; ++a) eps = std::max(eps, std::abs(rt(s, a) - re(s, a)));
        const auto opt_true = oracle::value_iteration(4, rt, g);
        const auto opt_est = oracle::value_iteration(4, re, g);
        const auto v = oracle::policy_value(4, rt, opt_est.policy, g);
        double gap = 0;
        for (std::size_t s = 0; s < 4; ++s) gap = std::max(gap, opt_true.values[s] - v[s]);
        const double bound = 2 * eps / (1 - g);
        violations += gap > bound + kBoundSlack;
        if (bound > 0) worst_ratio = std::max(worst_ratio, gap / bound);
        // the library's own check must agree
        violations += !avg_regret_bound_check(d, truth, est).pass;
    }
    return {violations == 0, std::to_string(kPerturbations) + " perturbations, max gap/bound " + fmt(worst_ratio, 3) +
                                 ", violations " + std::to_string(violations)};
}

Outcome criterion10() {
    const std::vector<double> ts{100, 500, 1000, 5000};
    bool pass = true;
    std::string detail;
    for (double p : {0.1, 0.3, 0.7}) {
        Rng rng(kSeed, 10);
        std::vector<double> reg;
        for (double t : ts) reg.push_back(theorem1_mean_regret(p, static_cast<int>(t), 2000, 0.5, rng));
        // least squares done here, independent of the library fit
        double mx = 0, my = 0;
        for (std::size_t i = 0; i < ts.size(); ++i) {
            mx += ts[i] / ts.size();
            my += reg[i] / ts.size();
        }
        double sxy = 0, sxx = 0, syy = 0;
        for (std::size_t i = 0; i < ts.size(); ++i) {
            sxy += (ts[i] - mx) * (reg[i] - my);
            sxx += (ts[i] - mx) * (ts[i] - mx);
            syy += (reg[i] - my) * (reg[i] - my);
        }
        const double slope = sxy / sxx;
        const double r2 = sxy * sxy / (sxx * syy);
        pass = pass && r2 >= kMinR2 && std::abs(slope - p) <= kSlopeRel * p;
        detail += (detail.empty() ? "" : "; ") + std::string("p=") + fmt(p, 2) + " slope " + fmt(slope) + " R2 " +
                  fmt(r2, 6);
    }
    return {pass, detail};
}

Outcome criterion11() {
    int differing = 0, total = 0;
    for (const std::string scenario : {"web-evolving", "net-evolving", "web-most-adverse"})
        for (const std::string s : {"ata-fmdp", "fpl", "eps-greedy", "urs"}) {
            ExperimentConfig c;
            c.scenario = scenario;
            c.strategy = s;
            c.iterations = 3;
            c.with_hindsight = false;
            std::string csv[2];
            for (auto& out : csv) {
                const auto in = resolve_inputs(c);
                std::ostringstream os;
                write_steps_csv(os, run_experiment(c, in), in.domain);
                out = os.str();
            }
            ++total;
            differing += csv[0] != csv[1] || csv[0].empty();
        }
    return {differing == 0, std::to_string(total - differing) + "/" + std::to_string(total) +
                                " scenario x strategy pairs byte-identical"};
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"web evolving margins", criterion1},
        {"web most-adverse margins", criterion2},
        {"network evolving margins and node0", criterion3},
        {"dh-postgres landscape", criterion4},
        {"high switching cost web", criterion5},
        {"alp exactness vs value iteration", criterion6},
        {"lp vs vertex enumeration", criterion7},
        {"estimator monte carlo", criterion8},
        {"average regret bound", criterion9},
        {"theorem 1 linearity", criterion10},
        {"determinism", criterion11},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        const auto out = criteria[i].second();
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        failed += !out.pass;
        std::printf("%s %2zu %s: %s [%.2fs]\n", out.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                    out.detail.c_str(), secs);
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
