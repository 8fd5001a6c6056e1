#include "mtd/alp.hpp"

#include "mtd/rng.hpp"

#include <json.hpp>
#include <numeric>

namespace mtd {

double BasisFunction::evaluate(const ConfigSpace& space, Config s) const {
    for (std::size_t k = 0; k < scope.size(); ++k)
        if (space.value_of(s, scope[k]) != values[k]) return 0.0;
    return 1.0;
}

std::string BasisFunction::describe(const ConfigSpace& space) const {
    if (is_bias()) return "bias";
    std::string out;
    for (std::size_t k = 0; k < scope.size(); ++k) {
        if (k > 0) out += ",";
        const auto& f = space.factor(scope[k]);
        out += f.name + "=" + f.values.at(values[k]);
    }
    return out;
}

BasisSet::BasisSet(std::vector<BasisFunction> functions) : functions_(std::move(functions)) {
    std::size_t biases = 0;
    for (const auto& b : functions_) {
        if (b.scope.size() != b.values.size()) throw DomainError("basis function scope/value mismatch");
        biases += b.is_bias();
    }
    if (biases != 1) throw DomainError("basis set must contain exactly one bias function");
}

BasisSet build_basis(const ConfigSpace& space) {
    std::vector<BasisFunction> fs{BasisFunction{}};
    for (std::size_t j = 0; j < space.factor_count(); ++j)
        for (std::size_t v = 0; v < space.factor(j).values.size(); ++v) fs.push_back({{j}, {v}});
    return BasisSet(std::move(fs));
}

BasisSet build_state_basis(const ConfigSpace& space) {
    std::vector<BasisFunction> fs{BasisFunction{}};
    std::vector<std::size_t> all(space.factor_count());
    std::iota(all.begin(), all.end(), std::size_t{0});
    for (std::size_t c = 0; c < space.size(); ++c) fs.push_back({all, space.decode(Config{c})});
    return BasisSet(std::move(fs));
}

double backprojection(const BasisFunction& b, const ConfigSpace& space, Config s, Config a) {
    return b.evaluate(space, next_state(space, s, a));
}

std::vector<double> uniform_theta(const ConfigSpace& space) {
    return std::vector<double>(space.size(), 1.0 / static_cast<double>(space.size()));
}

ALProblem build_alp(const DomainInfo& domain, const PosteriorTable& posterior, const BasisSet& basis,
                    std::vector<double> theta) {
    const auto& space = domain.space();
    const std::size_t n = space.size();
    const std::size_t k = basis.size();
    if (theta.empty()) theta = uniform_theta(space);
    if (theta.size() != n) throw DomainError("theta must weight every configuration");
    if (posterior.states() != n || posterior.types() != domain.type_count())
        throw DomainError("posterior table does not match the domain");

    ALProblem alp{basis, std::move(theta), {}, {}};
    alp.lp.objective.assign(k, 0.0);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t s = 0; s < n; ++s) alp.lp.objective[i] += alp.theta[s] * basis[i].evaluate(space, Config{s});

    const double gamma = domain.gamma();
    for (std::size_t si = 0; si < n; ++si) {
        for (std::size_t ai = 0; ai < n; ++ai) {
            const Config s{si}, a{ai};
            const Config target = next_state(space, s, a);
            const auto p = posterior.at(s, a);
            const double switching = domain.alpha() * domain.switching_cost(s, a);

            // phi = 1: each type weighted by mu * posterior with payoff M - l - alpha * sc
            double weight_success = 0.0;
            double payoff_success = 0.0;
            for (std::size_t t = 0; t < domain.type_count(); ++t) {
                const double w = domain.mu(t, target) * p[t];
                weight_success += w;
                payoff_success += w * (domain.m() - domain.loss(t, target) - switching);
            }
            // phi = 0: no attack loss
            const double weight_fail = 1.0 - weight_success;
            const double payoff_fail = weight_fail * (domain.m() - switching);

            std::vector<double> coeffs(k);
            for (std::size_t i = 0; i < k; ++i) {
                const double g = backprojection(basis[i], space, s, a);
                coeffs[i] = (weight_success + weight_fail) * (gamma * g - basis[i].evaluate(space, s));
            }
            const double constant = payoff_success + payoff_fail;
            alp.lp.add_row(std::move(coeffs), -constant);
            alp.reward_part.push_back(constant);
        }
    }
    return alp;
}

std::vector<double> solve_alp(const ALProblem& alp) {
    const auto sol = solve_lp(alp.lp);
    if (sol.status != LpStatus::optimal)
        throw AlpError("approximate LP is " + std::string(to_string(sol.status)) + " (" +
                       std::to_string(alp.lp.rows.size()) + " rows, " + std::to_string(alp.basis.size()) +
                       " basis functions)");
    return sol.x;
}

std::vector<double> approximate_values(const BasisSet& basis, const ConfigSpace& space, std::span<const double> w) {
    if (w.size() != basis.size()) throw DomainError("weight vector does not match the basis");
    std::vector<double> v(space.size(), 0.0);
    for (std::size_t s = 0; s < space.size(); ++s)
        for (std::size_t i = 0; i < basis.size(); ++i) v[s] += w[i] * basis[i].evaluate(space, Config{s});
    return v;
}

Policy extract_policy(std::span<const double> w, const DomainInfo& domain, const PosteriorTable& posterior,
                      const BasisSet& basis, Rng* tie_rng) {
    const auto& space = domain.space();
    const std::size_t n = space.size();
    if (w.size() != basis.size()) throw DomainError("weight vector does not match the basis");
    Policy policy;
    std::vector<double> q(n);
    for (std::size_t si = 0; si < n; ++si) {
        const Config s{si};
        for (std::size_t ai = 0; ai < n; ++ai) {
            const Config a{ai};
            double future = 0.0;
            for (std::size_t i = 0; i < basis.size(); ++i) future += w[i] * backprojection(basis[i], space, s, a);
            q[ai] = expected_reward(domain, s, a, posterior.at(s, a)) + domain.gamma() * future;
        }
        policy.actions.push_back(Config{argmax_with_ties(q, 1e-9, tie_rng)});
    }
    return policy;
}

std::vector<double> exact_value(const Policy& policy, const DomainInfo& domain, const PosteriorTable& posterior) {
    return evaluate_policy(reward_table(domain, posterior), policy, domain.gamma());
}

std::string alp_to_json(const ALProblem& alp, const DomainInfo& domain) {
    const auto& space = domain.space();
    const std::size_t n = space.size();
    nlohmann::ordered_json j;
    j["basis"] = nlohmann::ordered_json::array();
    for (const auto& b : alp.basis.functions()) j["basis"].push_back(b.describe(space));
    j["theta"] = alp.theta;
    j["objective"] = alp.lp.objective;
    j["rows"] = nlohmann::ordered_json::array();
    for (std::size_t r = 0; r < alp.lp.rows.size(); ++r) {
        nlohmann::ordered_json row;
        row["state"] = space.label(Config{r / n});
        row["action"] = space.label(Config{r % n});
        row["coeffs"] = alp.lp.rows[r].coeffs;
        row["bound"] = alp.lp.rows[r].bound;
        j["rows"].push_back(std::move(row));
    }
    return j.dump(2);
}

}  // namespace mtd
