#include "mtd/environment.hpp"

#include "mtd/rng.hpp"

#include <cmath>

namespace mtd {

void Scenario::validate() const {
    if (horizon < 1) throw ScenarioError("scenario horizon must be at least 1");
    if (phases.empty()) throw ScenarioError("scenario has no phases");
    int expected = 0;
    for (const auto& p : phases) {
        if (p.start != expected)
            throw ScenarioError("scenario phases must be contiguous from 0 (gap or overlap at t=" +
                                std::to_string(p.start) + ")");
        if (p.end <= p.start) throw ScenarioError("scenario phase has an empty range");
        expected = p.end;
        auto check_dist = [](const std::map<std::string, double>& d) {
            double total = 0.0;
            for (const auto& [id, w] : d) {
                if (!(w >= 0.0)) throw ScenarioError("negative probability for type '" + id + "'");
                total += w;
            }
            if (std::abs(total - 1.0) > 1e-9) throw ScenarioError("phase distribution does not sum to 1");
        };
        if (p.mode == PhaseMode::static_dist) {
            check_dist(p.dist);
            for (const auto& [state, d] : p.per_state_dist) check_dist(d);
        }
    }
    if (expected != horizon) throw ScenarioError("scenario phases do not cover [0, horizon)");
}

const ScenarioPhase& Scenario::phase_at(int t) const {
    for (const auto& p : phases)
        if (t >= p.start && t < p.end) return p;
    throw ScenarioError("timestep " + std::to_string(t) + " is outside every scenario phase");
}

std::vector<ResolvedPhase> resolve_scenario(const Scenario& scenario, const DomainInfo& domain) {
    scenario.validate();
    const std::size_t k = domain.type_count();
    auto to_vector = [&](const std::map<std::string, double>& d) {
        TypeDistribution v(k, 0.0);
        for (const auto& [id, w] : d) {
            try {
                v[domain.type_index(id)] = w;
            } catch (const DomainError&) {
                throw ScenarioError("scenario names attacker type '" + id + "' missing from the domain");
            }
        }
        return v;
    };
    std::vector<ResolvedPhase> out;
    for (const auto& p : scenario.phases) {
        ResolvedPhase r;
        r.start = p.start;
        r.end = p.end;
        r.mode = p.mode;
        r.dist = to_vector(p.dist);
        r.per_state.assign(domain.space().size(), std::nullopt);
        for (const auto& [label, d] : p.per_state_dist) {
            Config c;
            try {
                c = domain.space().parse(label);
            } catch (const DomainError& e) {
                throw ScenarioError(e.what());
            }
            r.per_state[c.index] = to_vector(d);
        }
        if (p.mode == PhaseMode::most_adverse) {
            r.candidates.assign(k, p.dist.empty());
            for (std::size_t t = 0; t < k; ++t)
                if (r.dist[t] > 0.0) r.candidates[t] = true;
        }
        out.push_back(std::move(r));
    }
    return out;
}

void AttackerView::record(Config s, Config a) {
    counts_.at(s.index * states_ + a.index) += 1;
    history_.emplace_back(s, a);
}

std::vector<double> AttackerView::estimated_policy(Config s) const {
    std::vector<double> p(states_);
    double total = 0.0;
    for (std::size_t a = 0; a < states_; ++a) {
        p[a] = static_cast<double>(count(s, Config{a})) + 1.0;
        total += p[a];
    }
    for (double& v : p) v /= total;
    return p;
}

double realized_reward(const DomainInfo& domain, Config s, Config a, std::size_t type, bool phi) {
    const Config target = next_state(domain.space(), s, a);
    const double attack = phi ? domain.loss(type, target) : 0.0;
    return domain.m() - attack - domain.alpha() * domain.switching_cost(s, a);
}

std::size_t most_adverse_select(const AttackerView& view, Config s, const DomainInfo& domain,
                                const std::vector<bool>& candidates) {
    const std::size_t n = domain.space().size();
    const auto pi = view.estimated_policy(s);
    std::size_t best = domain.type_count();
    double best_score = -INFINITY;
    for (std::size_t t = 0; t < domain.type_count(); ++t) {
        if (!candidates.empty() && !candidates[t]) continue;
        double score = 0.0;
        for (std::size_t a = 0; a < n; ++a) score += pi[a] * domain.mu(t, Config{a}) * domain.loss(t, Config{a});
        if (score > best_score) {
            best_score = score;
            best = t;
        }
    }
    if (best == domain.type_count()) throw ScenarioError("most-adverse phase has no candidate attacker types");
    return best;
}

AttackDraw sample_attack(const std::vector<ResolvedPhase>& phases, int t, Config s, Config s_next,
                         const AttackerView& view, const DomainInfo& domain, Rng& rng) {
    const ResolvedPhase* phase = nullptr;
    for (const auto& p : phases) {
        if (t >= p.start && t < p.end) {
            phase = &p;
            break;
        }
    }
    if (phase == nullptr) throw ScenarioError("timestep " + std::to_string(t) + " is outside every scenario phase");

    std::size_t type;
    if (phase->mode == PhaseMode::most_adverse) {
        type = most_adverse_select(view, s, domain, phase->candidates);
    } else {
        const auto& override_dist = phase->per_state.at(s_next.index);
        type = rng.categorical(override_dist ? *override_dist : phase->dist);
    }
    const bool phi = rng.bernoulli(domain.mu(type, s_next));
    return {type, phi};
}

Environment::Environment(DomainInfo domain, const Scenario& scenario)
    : domain_(std::move(domain)),
      phases_(resolve_scenario(scenario, domain_)),
      horizon_(scenario.horizon),
      view_(domain_.space().size()) {}

StepRecord Environment::step(Config s, Config a, Rng& rng) {
    const Config s_next = next_state(domain_.space(), s, a);
    const auto draw = sample_attack(phases_, t_, s, s_next, view_, domain_, rng);
    StepRecord rec{t_, s, a, draw.type, draw.phi, realized_reward(domain_, s, a, draw.type, draw.phi)};
    view_.record(s, a);
    log_.push_back(rec);
    ++t_;
    return rec;
}

namespace {

ConfigSpace web_space() {
    return ConfigSpace({{"language", {"PHP", "Python"}}, {"database", {"MySQL", "Postgres"}}});
}

// Flat order of web_space(): C1 = PHP|MySQL, C3 = PHP|Postgres, C2 = Python|MySQL, C4 = Python|Postgres.
// Tables below are written in C1..C4 order and permuted into flat order.
std::vector<double> from_c_order(const std::vector<double>& c) {
    return {c[0], c[2], c[1], c[3]};
}

std::vector<double> web_switching_costs() {
    const double table[4][4] = {{0, 20, 60, 100}, {20, 0, 90, 50}, {60, 90, 0, 20}, {100, 50, 20, 0}};
    const std::size_t flat_to_c[4] = {0, 2, 1, 3};
    std::vector<double> sc(16);
    for (std::size_t s = 0; s < 4; ++s)
        for (std::size_t a = 0; a < 4; ++a) sc[s * 4 + a] = table[flat_to_c[s]][flat_to_c[a]];
    return sc;
}

}  // namespace

DomainInfo make_web_app_domain() {
    std::vector<AttackerTypeSpec> types{
        {"MH", false, from_c_order({0.32, 0.32, 0.36, 0.36}), from_c_order({61, 43, 66, 29})},
        {"DH", false, from_c_order({0.7, 0.7, 0.65, 0.65}), from_c_order({43, 43, 50, 50})},
        {"unknown", true, from_c_order({0.78, 0.7, 0.87, 0.0}), from_c_order({100, 100, 100, 0})},
    };
    return DomainInfo(web_space(), std::move(types), web_switching_costs(), 200.0, 0.9);
}

DomainInfo make_web_dh_postgres_domain() {
    std::vector<AttackerTypeSpec> types{
        {"unknown", true, from_c_order({0.0, 0.0, 0.65, 0.65}), from_c_order({0, 0, 50, 50})},
    };
    return DomainInfo(web_space(), std::move(types), web_switching_costs(), 200.0, 0.9);
}

DomainInfo make_network_domain(Rng& rng) {
    ConfigSpace space({{"node0", {"online", "offline"}}, {"node1", {"online", "offline"}}});
    const std::size_t n = space.size();
    auto online = [&](Config c, std::size_t node) { return space.value_of(c, node) == 0; };

    std::vector<AttackerTypeSpec> types;
    for (std::size_t src = 0; src < 2; ++src) {
        for (std::size_t tgt = 0; tgt < 2; ++tgt) {
            const double mu = src == tgt ? rng.uniform(0.5, 0.6) : rng.uniform(0.2, 0.3);
            const double loss = rng.uniform(60.0, 70.0);
            AttackerTypeSpec t{std::to_string(src) + "-" + std::to_string(tgt), false, {}, {}};
            for (std::size_t c = 0; c < n; ++c) {
                const bool hit = online(Config{c}, tgt);
                t.mu.push_back(hit ? mu : 0.0);
                t.loss.push_back(hit ? loss : 0.0);
            }
            types.push_back(std::move(t));
        }
    }
    AttackerTypeSpec unknown{"unknown", true, {}, {}};
    for (std::size_t c = 0; c < n; ++c) {
        const bool hit = online(Config{c}, 0);
        unknown.mu.push_back(hit ? 1.0 : 0.0);
        unknown.loss.push_back(hit ? 100.0 : 0.0);
    }
    types.push_back(std::move(unknown));

    std::vector<double> sc(n * n, 0.0);
    for (std::size_t s = 0; s < n; ++s)
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t node = 0; node < 2; ++node)
                if (online(Config{s}, node) && !online(Config{a}, node)) sc[s * n + a] += 50.0;
    return DomainInfo(std::move(space), std::move(types), std::move(sc), 200.0, 0.9);
}

DomainInfo make_builtin_domain(const std::string& name, std::uint64_t seed) {
    if (name == "web") return make_web_app_domain();
    if (name == "web-3xsc") return make_web_app_domain().with_switching_scale(3.0);
    if (name == "web-dh-postgres") return make_web_dh_postgres_domain();
    if (name == "network" || name == "network-3xsc") {
        Rng rng(seed, 0x6e6574);
        auto d = make_network_domain(rng);
        return name == "network" ? d : d.with_switching_scale(3.0);
    }
    throw DomainError("unknown built-in domain '" + name + "'");
}

namespace {

using Dist = std::map<std::string, double>;

Scenario three_phase(PhaseMode mode, const Dist& outer, const Dist& middle) {
    return Scenario{1000, {{0, 330, mode, outer, {}}, {330, 660, mode, middle, {}}, {660, 1000, mode, outer, {}}}};
}

const Dist kWebInitial{{"MH", 0.5}, {"DH", 0.35}, {"unknown", 0.15}};
const Dist kWebUnknownWave{{"MH", 0.1}, {"DH", 0.0}, {"unknown", 0.9}};
const Dist kNetKnown{{"0-0", 0.2}, {"0-1", 0.3}, {"1-0", 0.3}, {"1-1", 0.2}};
const Dist kNetUnknownWave{{"unknown", 1.0}};

}  // namespace

BuiltinScenario builtin_scenario(const std::string& name) {
    if (name == "web-evolving") return {three_phase(PhaseMode::static_dist, kWebInitial, kWebUnknownWave), "web"};
    if (name == "web-evolving-3xsc")
        return {three_phase(PhaseMode::static_dist, kWebInitial, kWebUnknownWave), "web-3xsc"};
    if (name == "web-most-adverse")
        return {three_phase(PhaseMode::most_adverse, {{"MH", 1.0}, {"DH", 1.0}},
                            {{"MH", 1.0}, {"DH", 1.0}, {"unknown", 1.0}}),
                "web"};
    if (name == "web-dh-postgres")
        return {Scenario{1000, {{0, 1000, PhaseMode::static_dist, {{"unknown", 1.0}}, {}}}}, "web-dh-postgres"};
    if (name == "net-evolving") return {three_phase(PhaseMode::static_dist, kNetKnown, kNetUnknownWave), "network"};
    if (name == "net-evolving-3xsc")
        return {three_phase(PhaseMode::static_dist, kNetKnown, kNetUnknownWave), "network-3xsc"};
    if (name == "net-most-adverse")
        return {three_phase(PhaseMode::most_adverse, {{"0-0", 1.0}, {"0-1", 1.0}, {"1-0", 1.0}, {"1-1", 1.0}},
                            {{"0-0", 1.0}, {"0-1", 1.0}, {"1-0", 1.0}, {"1-1", 1.0}, {"unknown", 1.0}}),
                "network"};
    throw ScenarioError("unknown built-in scenario '" + name + "'");
}

std::vector<std::string> builtin_scenario_names() {
    return {"web-evolving",     "web-most-adverse",  "net-evolving",     "net-most-adverse",
            "web-dh-postgres",  "web-evolving-3xsc", "net-evolving-3xsc"};
}

double theorem1_reward(Config first_state, int t, Config y) {
    if (t < 1) throw DomainError("theorem1_reward: timesteps start at 1");
    return (first_state == y && t > 1) ? 0.0 : 1.0;
}

}  // namespace mtd
