#include "mtd/domain.hpp"

#include <cmath>
#include <set>

namespace mtd {

ConfigSpace::ConfigSpace(std::vector<FactorSpec> factors) : factors_(std::move(factors)) {
    if (factors_.empty()) throw DomainError("config space needs at least one factor");
    strides_.assign(factors_.size(), 1);
    size_ = 1;
    for (std::size_t j = factors_.size(); j-- > 0;) {
        const auto& f = factors_[j];
        if (f.values.empty()) throw DomainError("factor '" + f.name + "' has no values");
        std::set<std::string> seen(f.values.begin(), f.values.end());
        if (seen.size() != f.values.size())
            throw DomainError("factor '" + f.name + "' has duplicate values");
        for (const auto& v : f.values) {
            if (v.find('|') != std::string::npos)
                throw DomainError("factor value '" + v + "' contains the label separator '|'");
        }
        strides_[j] = size_;
        size_ *= f.values.size();
    }
}

void ConfigSpace::check(Config c) const {
    if (c.index >= size_)
        throw DomainError("configuration index " + std::to_string(c.index) + " out of range");
}

std::size_t ConfigSpace::value_of(Config c, std::size_t j) const {
    check(c);
    return (c.index / strides_.at(j)) % factors_[j].values.size();
}

std::vector<std::size_t> ConfigSpace::decode(Config c) const {
    std::vector<std::size_t> out(factors_.size());
    for (std::size_t j = 0; j < factors_.size(); ++j) out[j] = value_of(c, j);
    return out;
}

Config ConfigSpace::encode(std::span<const std::size_t> values) const {
    if (values.size() != factors_.size()) throw DomainError("encode: wrong number of factor values");
    std::size_t index = 0;
    for (std::size_t j = 0; j < values.size(); ++j) {
        if (values[j] >= factors_[j].values.size())
            throw DomainError("encode: value index out of range for factor '" + factors_[j].name + "'");
        index += values[j] * strides_[j];
    }
    return Config{index};
}

std::string ConfigSpace::label(Config c) const {
    std::string out;
    for (std::size_t j = 0; j < factors_.size(); ++j) {
        if (j > 0) out += '|';
        out += factors_[j].values[value_of(c, j)];
    }
    return out;
}

Config ConfigSpace::parse(std::string_view label) const {
    std::vector<std::size_t> values;
    std::size_t pos = 0;
    for (std::size_t j = 0; j < factors_.size(); ++j) {
        const std::size_t bar = label.find('|', pos);
        const bool last = j + 1 == factors_.size();
        if (last != (bar == std::string_view::npos))
            throw DomainError("malformed configuration label '" + std::string(label) + "'");
        const auto token = label.substr(pos, last ? std::string_view::npos : bar - pos);
        const auto& vals = factors_[j].values;
        std::size_t k = 0;
        while (k < vals.size() && vals[k] != token) ++k;
        if (k == vals.size())
            throw DomainError("unknown value '" + std::string(token) + "' for factor '" + factors_[j].name + "'");
        values.push_back(k);
        pos = bar + 1;
    }
    return encode(values);
}

std::optional<std::size_t> ConfigSpace::factor_index(std::string_view name) const {
    for (std::size_t j = 0; j < factors_.size(); ++j)
        if (factors_[j].name == name) return j;
    return std::nullopt;
}

DomainInfo::DomainInfo(ConfigSpace space, std::vector<AttackerTypeSpec> types,
                       std::vector<double> switching_cost, double m, double gamma, double alpha)
    : space_(std::move(space)),
      types_(std::move(types)),
      sc_(std::move(switching_cost)),
      m_(m),
      gamma_(gamma),
      alpha_(alpha) {
    const std::size_t n = space_.size();
    if (types_.empty()) throw DomainError("domain needs at least one attacker type");
    std::set<std::string> ids;
    for (std::size_t k = 0; k < types_.size(); ++k) {
        const auto& t = types_[k];
        if (!ids.insert(t.id).second) throw DomainError("duplicate attacker type id '" + t.id + "'");
        if (t.mu.size() != n || t.loss.size() != n)
            throw DomainError("attacker type '" + t.id + "' tables do not cover every configuration");
        for (std::size_t c = 0; c < n; ++c) {
            if (!(t.mu[c] >= 0.0 && t.mu[c] <= 1.0))
                throw DomainError("attacker type '" + t.id + "' has success rate outside [0, 1]");
            if (!(t.loss[c] >= 0.0)) throw DomainError("attacker type '" + t.id + "' has negative loss");
        }
        if (t.is_unknown) {
            if (unknown_) throw DomainError("at most one attacker type may be unknown");
            unknown_ = k;
        }
    }
    if (sc_.size() != n * n) throw DomainError("switching-cost table must be |S| x |A|");
    for (std::size_t s = 0; s < n; ++s) {
        for (std::size_t a = 0; a < n; ++a) {
            const double v = sc_[s * n + a];
            if (!(v >= 0.0)) throw DomainError("switching costs must be nonnegative");
            if (s == a && v != 0.0) throw DomainError("switching to the current configuration must cost 0");
        }
    }
    if (!(gamma_ >= 0.0 && gamma_ < 1.0)) throw DomainError("discount must lie in [0, 1)");
    if (!(alpha_ >= 0.0)) throw DomainError("switching-cost weight must be nonnegative");
    if (!std::isfinite(m_)) throw DomainError("baseline reward must be finite");
}

std::size_t DomainInfo::type_index(std::string_view id) const {
    for (std::size_t k = 0; k < types_.size(); ++k)
        if (types_[k].id == id) return k;
    throw DomainError("unknown attacker type id '" + std::string(id) + "'");
}

double DomainInfo::mu(std::size_t type, Config target) const {
    space_.check(target);
    return types_.at(type).mu[target.index];
}

double DomainInfo::loss(std::size_t type, Config target) const {
    space_.check(target);
    return types_.at(type).loss[target.index];
}

double DomainInfo::switching_cost(Config s, Config a) const {
    space_.check(s);
    space_.check(a);
    return sc_[s.index * space_.size() + a.index];
}

DomainInfo DomainInfo::with_alpha(double alpha) const {
    return DomainInfo(space_, types_, sc_, m_, gamma_, alpha);
}

DomainInfo DomainInfo::with_gamma(double gamma) const {
    return DomainInfo(space_, types_, sc_, m_, gamma, alpha_);
}

DomainInfo DomainInfo::with_switching_scale(double factor) const {
    auto sc = sc_;
    for (double& v : sc) v *= factor;
    return DomainInfo(space_, types_, std::move(sc), m_, gamma_, alpha_);
}

Config next_state(const ConfigSpace& space, Config s, Config a) {
    space.check(s);
    space.check(a);
    return a;
}

CvssParams cvss_to_params(double exploitability, double impact) {
    if (!(exploitability >= 0.0 && exploitability <= 10.0))
        throw DomainError("exploitability score must lie in [0, 10]");
    if (!(impact >= 0.0 && impact <= 10.0)) throw DomainError("impact score must lie in [0, 10]");
    return {0.1 * exploitability, 10.0 * impact};
}

namespace {

void check_posterior(const DomainInfo& domain, std::span<const double> posterior) {
    if (posterior.size() != domain.type_count())
        throw DomainError("posterior size does not match the number of attacker types");
}

}  // namespace

double attack_loss_given_success(const DomainInfo& domain, Config s, Config a,
                                 std::span<const double> posterior) {
    check_posterior(domain, posterior);
    const Config target = next_state(domain.space(), s, a);
    double num = 0.0;
    double den = 0.0;
    for (std::size_t k = 0; k < posterior.size(); ++k) {
        const double w = posterior[k] * domain.mu(k, target);
        num += w * domain.loss(k, target);
        den += w;
    }
    return den > 0.0 ? num / den : 0.0;
}

double expected_attack_loss(const DomainInfo& domain, Config s, Config a,
                            std::span<const double> posterior) {
    check_posterior(domain, posterior);
    const Config target = next_state(domain.space(), s, a);
    double total = 0.0;
    for (std::size_t k = 0; k < posterior.size(); ++k)
        total += posterior[k] * domain.mu(k, target) * domain.loss(k, target);
    return total;
}

double expected_reward(const DomainInfo& domain, Config s, Config a,
                       std::span<const double> posterior) {
    return domain.m() - expected_attack_loss(domain, s, a, posterior) -
           domain.alpha() * domain.switching_cost(s, a);
}

}  // namespace mtd
