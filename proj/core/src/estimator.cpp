#include "mtd/estimator.hpp"

#include <algorithm>
#include <json.hpp>

namespace mtd {

PosteriorTable::PosteriorTable(std::size_t states, std::size_t types)
    : states_(states), types_(types), data_(states * states * types, 0.0) {}

PosteriorTable PosteriorTable::uniform_over(const DomainInfo& domain, std::span<const double> dist) {
    if (dist.size() != domain.type_count()) throw DomainError("distribution size does not match types");
    const std::size_t n = domain.space().size();
    PosteriorTable table(n, dist.size());
    for (std::size_t s = 0; s < n; ++s)
        for (std::size_t a = 0; a < n; ++a) std::ranges::copy(dist, table.at(Config{s}, Config{a}).begin());
    return table;
}

std::span<const double> PosteriorTable::at(Config s, Config a) const {
    if (s.index >= states_ || a.index >= states_) throw DomainError("posterior index out of range");
    return {data_.data() + (s.index * states_ + a.index) * types_, types_};
}

std::span<double> PosteriorTable::at(Config s, Config a) {
    if (s.index >= states_ || a.index >= states_) throw DomainError("posterior index out of range");
    return {data_.data() + (s.index * states_ + a.index) * types_, types_};
}

ThreatEstimator::ThreatEstimator(std::size_t types, std::size_t states, double beta)
    : types_(types), states_(states), beta_(beta), counts_(types * states * states, 0.0) {
    if (!(beta >= 1.0)) throw DomainError("decay factor beta must be >= 1");
    if (types == 0 || states == 0) throw DomainError("estimator needs at least one type and state");
}

std::size_t ThreatEstimator::offset(std::size_t type, Config s, Config a) const {
    if (type >= types_ || s.index >= states_ || a.index >= states_)
        throw DomainError("estimator cell out of range");
    return (type * states_ + s.index) * states_ + a.index;
}

void ThreatEstimator::update(std::size_t type, Config s, Config a, bool success) {
    const std::size_t cell = offset(type, s, a);
    if (beta_ != 1.0) {
        for (double& n : counts_) n /= beta_;
    }
    if (success) counts_[cell] += 1.0;
}

double ThreatEstimator::count(std::size_t type, Config s, Config a) const {
    return counts_[offset(type, s, a)];
}

void ThreatEstimator::set_count(std::size_t type, Config s, Config a, double value) {
    if (!(value >= 0.0)) throw DomainError("counts must be nonnegative");
    counts_[offset(type, s, a)] = value;
}

std::string ThreatEstimator::to_json() const {
    nlohmann::json j;
    j["beta"] = beta_;
    j["types"] = types_;
    j["states"] = states_;
    j["counts"] = counts_;
    return j.dump();
}

ThreatEstimator ThreatEstimator::from_json(const std::string& text) {
    nlohmann::json j;
    std::vector<double> counts;
    std::size_t types = 0, states = 0;
    double beta = 0.0;
    try {
        j = nlohmann::json::parse(text);
        types = j.at("types").get<std::size_t>();
        states = j.at("states").get<std::size_t>();
        beta = j.at("beta").get<double>();
        counts = j.at("counts").get<std::vector<double>>();
    } catch (const nlohmann::json::exception& e) {
        throw DomainError(std::string("estimator JSON: ") + e.what());
    }
    ThreatEstimator est(types, states, beta);
    if (counts.size() != est.counts_.size()) throw DomainError("estimator JSON: count table has wrong size");
    if (std::ranges::any_of(counts, [](double v) { return !(v >= 0.0); }))
        throw DomainError("estimator JSON: negative count");
    est.counts_ = std::move(counts);
    return est;
}

double estimator_success_rate(const DomainInfo& domain, std::size_t type, Config target) {
    const double mu = domain.mu(type, target);
    return domain.type(type).is_unknown && mu > 0.0 ? 1.0 : mu;
}

TypeDistribution attacker_type_posterior(const ThreatEstimator& est, Config s, Config a,
                                         const DomainInfo& domain) {
    const std::size_t k = domain.type_count();
    if (est.types() != k || est.states() != domain.space().size())
        throw DomainError("estimator shape does not match the domain");
    const Config target = next_state(domain.space(), s, a);
    TypeDistribution p(k, 0.0);
    double total = 0.0;
    for (std::size_t t = 0; t < k; ++t) {
        const double rate = estimator_success_rate(domain, t, target);
        if (rate > 0.0) {
            p[t] = est.count(t, s, a) / rate;
            total += p[t];
        }
    }
    if (total > 0.0) {
        for (double& v : p) v /= total;
        return p;
    }
    std::size_t capable = 0;
    for (std::size_t t = 0; t < k; ++t) capable += estimator_success_rate(domain, t, target) > 0.0;
    if (capable == 0) return p;
    for (std::size_t t = 0; t < k; ++t)
        p[t] = estimator_success_rate(domain, t, target) > 0.0 ? 1.0 / static_cast<double>(capable) : 0.0;
    return p;
}

PosteriorTable posterior_snapshot(const ThreatEstimator& est, const DomainInfo& domain) {
    const std::size_t n = domain.space().size();
    PosteriorTable table(n, domain.type_count());
    for (std::size_t s = 0; s < n; ++s) {
        for (std::size_t a = 0; a < n; ++a) {
            const auto p = attacker_type_posterior(est, Config{s}, Config{a}, domain);
            std::ranges::copy(p, table.at(Config{s}, Config{a}).begin());
        }
    }
    return table;
}

double attack_success_prob(std::span<const double> posterior, Config s, Config a,
                           const DomainInfo& domain) {
    if (posterior.size() != domain.type_count()) throw DomainError("posterior size does not match types");
    const Config target = next_state(domain.space(), s, a);
    double p = 0.0;
    for (std::size_t t = 0; t < posterior.size(); ++t) p += domain.mu(t, target) * posterior[t];
    return std::clamp(p, 0.0, 1.0);
}

}  // namespace mtd
