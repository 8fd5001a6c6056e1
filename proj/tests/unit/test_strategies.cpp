#include "mtd/environment.hpp"
#include "mtd/experiment.hpp"
#include "mtd/rng.hpp"
#include "mtd/strategies.hpp"
#include "oracles.hpp"
#include "web_fixture.hpp"

#include <doctest.h>

#include <algorithm>

using namespace mtd;
using namespace web;

namespace {

std::vector<StepRecord> episode(Strategy& s, const DomainInfo& d, const Scenario& sc, std::uint64_t seed) {
    Environment env(d, sc);
    Rng env_rng(seed, 1), strat_rng(seed, 2);
    return run_episode(s, env, C1, sc.horizon, env_rng, strat_rng);
}

double average(const std::vector<StepRecord>& log) {
    double t = 0;
    for (const auto& r : log) t += r.reward;
    return t / static_cast<double>(log.size());
}

}  // namespace

TEST_SUITE("strategies") {

TEST_CASE("epsilon greedy argmax and running mean") {
    EpsilonGreedy g(4, 0.0);
    CHECK(g.greedy() == Config{0});
    g.update(Config{0}, 10);
    g.update(Config{1}, 20);
    g.update(Config{2}, 5);
    g.update(Config{3}, 5);
    CHECK(g.greedy() == Config{1});
    Rng rng(1);
    CHECK(g.select(C1, rng) == Config{1});

    EpsilonGreedy m(1, 0.0);
    for (double r : {10.0, 10.0, 10.0, 10.0}) m.update(Config{0}, r);
    m.update(Config{0}, 20);
    CHECK(m.mean(Config{0}) == doctest::Approx(12));
    CHECK(m.pulls(Config{0}) == 5);
    CHECK_THROWS(EpsilonGreedy(4, 1.5));
}

TEST_CASE("epsilon one behaves like uniform random") {
    const auto d = make_web_app_domain();
    EpsilonGreedy g(4, 1.0);
    UniformRandom u(4);
    Rng rg(7), ru(7);
    std::vector<int> cg(4), cu(4);
    for (int i = 0; i < 20000; ++i) {
        const Config a = g.select(C1, rg);
        g.update(a, 200.0 - 10.0 * a.index);
        ++cg[a.index];
        ++cu[u.select(C1, ru).index];
    }
    for (std::size_t a = 0; a < 4; ++a) {
        CHECK(cg[a] / 20000.0 == doctest::Approx(0.25).epsilon(0.02 / 0.25));
        CHECK(cu[a] / 20000.0 == doctest::Approx(0.25).epsilon(0.02 / 0.25));
    }
}

TEST_CASE("uniform random selection") {
    UniformRandom u(4);
    Rng rng(9);
    std::vector<int> c(4);
    for (int i = 0; i < 10000; ++i) ++c[u.select(Config{static_cast<std::size_t>(i % 4)}, rng).index];
    for (int v : c) CHECK(std::abs(v / 10000.0 - 0.25) <= 0.02);
    UniformRandom one(1);
    for (int i = 0; i < 10; ++i) CHECK(one.select(C1, rng) == Config{0});
}

TEST_CASE("static defense holds its configuration") {
    const auto d = make_web_app_domain();
    StaticDefense st(C4, "Python|Postgres");
    CHECK(st.name() == "static:Python|Postgres");
    Scenario sc{300, {{0, 300, PhaseMode::static_dist, {{"unknown", 1.0}}, {}}}};
    const auto log = episode(st, d, sc, 3);
    CHECK(log[0].reward == doctest::Approx(200 - 100));
    for (std::size_t t = 1; t < log.size(); ++t) {
        CHECK(log[t].action == C4);
        CHECK(log[t].reward == 200);
    }
}

TEST_CASE("perturbed leader and geometric resampling") {
    const double est[] = {5, 5, 5}, zero[] = {0, 0, 0};
    CHECK(perturbed_leader(est, zero) == 0);
    const double z[] = {0, 1, 0.5};
    CHECK(perturbed_leader(est, z) == 1);
    int calls = 0;
    CHECK(geometric_resampling_count(2, [&] { ++calls; return std::size_t{2}; }, 1000) == 1);
    CHECK(calls == 1);
    CHECK(geometric_resampling_count(2, [] { return std::size_t{0}; }, 1000) == 1000);
    int n = 0;
    CHECK(geometric_resampling_count(1, [&] { return ++n == 7 ? std::size_t{1} : std::size_t{0}; }, 1000) == 7);
}

TEST_CASE("fpl update adds reward times K") {
    FplMtd f(3, 0.0, 0.1, 1000);
    Rng rng(4);
    const int k = f.update(Config{0}, 50.0, rng);
    CHECK(k >= 1);
    CHECK(k <= 1000);
    CHECK(f.estimate(Config{0}) == doctest::Approx(50.0 * k));

    // one action: re-selected on the first redraw
    FplMtd single(1, 0.0, 0.1, 1000);
    CHECK(single.update(Config{0}, 3.0, rng) == 1);
    CHECK(single.estimate(Config{0}) == doctest::Approx(3.0));
}

TEST_CASE("fpl estimates stay nonnegative under nonnegative rewards") {
    const auto d = make_web_app_domain();
    FplMtd f(4, 0.007, 0.1, 1000);
    const auto log = episode(f, d, builtin_scenario("web-evolving").scenario, 10);
    for (std::size_t a = 0; a < 4; ++a) CHECK(f.estimate(Config{a}) >= 0.0);
    CHECK(log.size() == 1000);
}

TEST_CASE("ata-fmdp cold start is myopic when gamma and alpha are zero") {
    const auto d = make_web_app_domain().with_gamma(0.0).with_alpha(0.0);
    StrategyParams p;
    p.random_ties = false;
    AtaFmdp agent(d, p);
    agent.reoptimize(nullptr);
    // capable-uniform cold-start posterior per target
    for (std::size_t s = 0; s < 4; ++s) {
        std::size_t best = 0;
        double best_r = -1e18;
        for (std::size_t a = 0; a < 4; ++a) {
            std::vector<double> post(3, 0.0);
            int capable = 0;
            for (std::size_t k = 0; k < 3; ++k) capable += d.mu(k, Config{a}) > 0;
            for (std::size_t k = 0; k < 3; ++k) post[k] = d.mu(k, Config{a}) > 0 ? 1.0 / capable : 0.0;
            const double r = oracle::expected_reward(d, s, a, post);
            if (r > best_r + 1e-9) {
                best_r = r;
                best = a;
            }
        }
        CHECK((*agent.policy())(Config{s}).index == best);
    }
}

TEST_CASE("ata-fmdp re-optimizes on its schedule") {
    const auto d = make_web_app_domain();
    const auto sc = builtin_scenario("web-evolving").scenario;
    StrategyParams p;
    p.reopt_period = 10;
    AtaFmdp agent(d, p);
    episode(agent, d, sc, 1);
    CHECK(agent.reoptimizations() == 100);
    p.reopt_period = kNeverReoptimize;
    AtaFmdp once(d, p);
    episode(once, d, sc, 1);
    CHECK(once.reoptimizations() == 1);
    p.reopt_period = -1;
    CHECK_THROWS(AtaFmdp(d, p));
}

TEST_CASE("ata-fmdp runs are deterministic") {
    const auto d = make_web_app_domain();
    const auto sc = builtin_scenario("web-evolving").scenario;
    AtaFmdp a(d, {}), b(d, {});
    const auto la = episode(a, d, sc, 10), lb = episode(b, d, sc, 10);
    REQUIRE(la.size() == lb.size());
    for (std::size_t t = 0; t < la.size(); ++t) {
        CHECK(la[t].action == lb[t].action);
        CHECK(la[t].reward == lb[t].reward);
        CHECK(la[t].attacker_type == lb[t].attacker_type);
    }
    Environment env(d, sc);
    Rng rng(10);
    CHECK(ata_fmdp_run(d, env, 1000, 1, 2.0, rng).size() == 1000);
}

TEST_CASE("strategy factory") {
    const auto d = make_web_app_domain();
    for (const std::string name : {"ata-fmdp", "fpl", "eps-greedy", "urs", "static:PHP|Postgres"})
        CHECK(make_strategy(name, d, {})->name() == name);
    CHECK_THROWS(make_strategy("nope", d, {}));
    CHECK_THROWS(make_strategy("static:Perl|MySQL", d, {}));
}

}  // TEST_SUITE

// Kept apart so the web-evolving invariant is reported on its own.
TEST_SUITE("adaptation") {

double adaptive_minus_frozen(const DomainInfo& d, const Scenario& sc) {
    double adaptive = 0, frozen = 0;
    for (std::uint64_t seed = 10; seed < 20; ++seed) {
        StrategyParams p;
        AtaFmdp a(d, p);
        adaptive += average(episode(a, d, sc, seed));
        p.reopt_period = kNeverReoptimize;
        AtaFmdp f(d, p);
        frozen += average(episode(f, d, sc, seed));
    }
    return adaptive - frozen;
}

TEST_CASE("adaptation beats a policy frozen at t = 0 on the evolving web scenario") {
    const double diff = adaptive_minus_frozen(make_web_app_domain(), builtin_scenario("web-evolving").scenario);
    CHECK(diff > 0.0);
}

TEST_CASE("adaptation beats a frozen policy against the most-adverse attacker") {
    const double diff =
        adaptive_minus_frozen(make_web_app_domain().with_alpha(0.0), builtin_scenario("web-most-adverse").scenario);
    CHECK(diff > 0.0);
}

}  // TEST_SUITE
