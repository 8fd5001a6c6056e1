#pragma once

#include "mtd/domain.hpp"

#include <span>
#include <string>
#include <vector>

namespace mtd {

/// Attacker-type distribution for every (state, action) pair.
class PosteriorTable {
public:
    PosteriorTable(std::size_t states, std::size_t types);

    /// Same distribution at every (state, action).
    static PosteriorTable uniform_over(const DomainInfo& domain, std::span<const double> dist);

    std::span<const double> at(Config s, Config a) const;
    std::span<double> at(Config s, Config a);
    std::size_t states() const { return states_; }
    std::size_t types() const { return types_; }

private:
    std::size_t states_;
    std::size_t types_;
    std::vector<double> data_;
};

/// Temporally weighted attack-success counts n(type, state, action).
///
/// Every update divides all cells by beta (a global clock) and then adds one
/// to the cell of the observed success, if any.
class ThreatEstimator {
public:
    ThreatEstimator(std::size_t types, std::size_t states, double beta);

    void update(std::size_t type, Config s, Config a, bool success);

    double count(std::size_t type, Config s, Config a) const;
    void set_count(std::size_t type, Config s, Config a, double value);
    double beta() const { return beta_; }
    std::size_t types() const { return types_; }
    std::size_t states() const { return states_; }

    /// {"beta": b, "types": k, "states": n, "counts": [...]} with counts laid
    /// out type-major, then state, then action.
    std::string to_json() const;
    static ThreatEstimator from_json(const std::string& text);

private:
    std::size_t offset(std::size_t type, Config s, Config a) const;

    std::size_t types_;
    std::size_t states_;
    double beta_;
    std::vector<double> counts_;
};

/// Success rate the estimator divides by: the table value for known types and
/// 1 for the unknown type, whose true proficiency the defender cannot know.
/// Targets the unknown type cannot break at all stay at 0.
double estimator_success_rate(const DomainInfo& domain, std::size_t type, Config target);

/// Normalized n / mu over types; types with mu = 0 get no mass. With no
/// observed successes the result is uniform over the types able to succeed at
/// the target, or all zeros if none can.
TypeDistribution attacker_type_posterior(const ThreatEstimator& est, Config s, Config a,
                                         const DomainInfo& domain);

PosteriorTable posterior_snapshot(const ThreatEstimator& est, const DomainInfo& domain);

/// P(phi = 1 | s, a) = sum over types of mu * posterior, clamped to [0, 1].
double attack_success_prob(std::span<const double> posterior, Config s, Config a,
                           const DomainInfo& domain);

}  // namespace mtd
