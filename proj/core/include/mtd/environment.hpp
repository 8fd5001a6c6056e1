#pragma once

#include "mtd/domain.hpp"

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace mtd {

class Rng;

class ScenarioError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class PhaseMode { static_dist, most_adverse };

/// One stretch [start, end) of the attack landscape.
///
/// static_dist: the attacker type is drawn from `dist` (or from the entry of
/// `per_state_dist` for the attacked configuration, when present).
/// most_adverse: the attacker picks the most damaging type among the ids in
/// `dist` with positive weight (all types when `dist` is empty).
struct ScenarioPhase {
    int start = 0;
    int end = 0;
    PhaseMode mode = PhaseMode::static_dist;
    std::map<std::string, double> dist;
    std::map<std::string, std::map<std::string, double>> per_state_dist;
};

struct Scenario {
    int horizon = 0;
    std::vector<ScenarioPhase> phases;

    /// Phases must be sorted, contiguous and cover [0, horizon); static
    /// distributions must sum to 1.
    void validate() const;
    const ScenarioPhase& phase_at(int t) const;
};

/// Phase with type ids resolved against a domain.
struct ResolvedPhase {
    int start = 0;
    int end = 0;
    PhaseMode mode = PhaseMode::static_dist;
    TypeDistribution dist;
    std::vector<std::optional<TypeDistribution>> per_state;  // indexed by configuration
    std::vector<bool> candidates;                            // most_adverse only
};

std::vector<ResolvedPhase> resolve_scenario(const Scenario& scenario, const DomainInfo& domain);

/// Everything the attacker can observe: the defender's past (state, action) pairs.
class AttackerView {
public:
    explicit AttackerView(std::size_t states) : states_(states), counts_(states * states, 0) {}

    void record(Config s, Config a);
    std::size_t count(Config s, Config a) const { return counts_.at(s.index * states_ + a.index); }
    const std::vector<std::pair<Config, Config>>& history() const { return history_; }
    /// Empirical defender policy at s with add-one smoothing over actions.
    std::vector<double> estimated_policy(Config s) const;

private:
    std::size_t states_;
    std::vector<std::size_t> counts_;
    std::vector<std::pair<Config, Config>> history_;
};

struct StepRecord {
    int t = 0;
    Config state;
    Config action;
    std::size_t attacker_type = 0;
    bool phi = false;
    double reward = 0.0;
};

/// r = M - [phi] * l(type, a) - alpha * sc(s, a).
double realized_reward(const DomainInfo& domain, Config s, Config a, std::size_t type, bool phi);

/// Type maximizing sum_a pi_hat(a | s) * mu(type, a) * l(type, a) among the
/// candidates (all types when the mask is empty). Ties go to the earlier type.
std::size_t most_adverse_select(const AttackerView& view, Config s, const DomainInfo& domain,
                                const std::vector<bool>& candidates = {});

struct AttackDraw {
    std::size_t type;
    bool phi;
};

/// Draws the attacker type for timestep t and whether its attack on s_next succeeds.
AttackDraw sample_attack(const std::vector<ResolvedPhase>& phases, int t, Config s, Config s_next,
                         const AttackerView& view, const DomainInfo& domain, Rng& rng);

/// Simulated defender-attacker interaction for one run.
class Environment {
public:
    Environment(DomainInfo domain, const Scenario& scenario);

    /// Applies a at state s for the current timestep and advances the clock.
    StepRecord step(Config s, Config a, Rng& rng);

    int time() const { return t_; }
    const DomainInfo& domain() const { return domain_; }
    const AttackerView& view() const { return view_; }
    const std::vector<StepRecord>& log() const { return log_; }
    int horizon() const { return horizon_; }

private:
    DomainInfo domain_;
    std::vector<ResolvedPhase> phases_;
    int horizon_;
    AttackerView view_;
    std::vector<StepRecord> log_;
    int t_ = 0;
};

/// Web application: language {PHP, Python} x database {MySQL, Postgres},
/// attacker types MH, DH and unknown, M = 200, gamma = 0.9.
DomainInfo make_web_app_domain();

/// Two MTD-managed nodes, each online or offline. Local (src == tgt) types
/// have mu ~ U(0.5, 0.6), remote types mu ~ U(0.2, 0.3), all losses ~ U(60, 70),
/// drawn once from rng. The unknown type hits node 0 for 100 with certainty.
DomainInfo make_network_domain(Rng& rng);

/// Web application facing only an attacker the defender has no model of:
/// it breaks Postgres configurations (mu 0.65, loss 50) and never MySQL.
DomainInfo make_web_dh_postgres_domain();

/// Named domain: web, network, web-3xsc, network-3xsc, web-dh-postgres.
/// The seed only matters for the randomly drawn network parameters.
DomainInfo make_builtin_domain(const std::string& name, std::uint64_t seed);

struct BuiltinScenario {
    Scenario scenario;
    std::string domain;  // default domain name for this scenario
};

/// web-evolving, web-most-adverse, net-evolving, net-most-adverse,
/// web-dh-postgres, web-evolving-3xsc, net-evolving-3xsc.
BuiltinScenario builtin_scenario(const std::string& name);
std::vector<std::string> builtin_scenario_names();

/// Adaptive adversary against which every strategy has linear policy regret:
/// 0 from the second step on if the first configuration played was y, else 1.
double theorem1_reward(Config first_state, int t, Config y);

}  // namespace mtd
