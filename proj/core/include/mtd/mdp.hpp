#pragma once

#include "mtd/domain.hpp"
#include "mtd/estimator.hpp"

#include <span>
#include <vector>

namespace mtd {

class Rng;

/// Deterministic policy: one action (next configuration) per state.
struct Policy {
    std::vector<Config> actions;

    Config operator()(Config s) const { return actions.at(s.index); }
    std::size_t size() const { return actions.size(); }
    friend bool operator==(const Policy&, const Policy&) = default;
};

/// Expected one-step reward R(s, a) for every state-action pair.
class RewardTable {
public:
    explicit RewardTable(std::size_t states) : states_(states), r_(states * states, 0.0) {}

    double operator()(Config s, Config a) const { return r_[s.index * states_ + a.index]; }
    double& operator()(Config s, Config a) { return r_[s.index * states_ + a.index]; }
    std::size_t states() const { return states_; }
    /// Largest |R1 - R2| over all pairs.
    double max_abs_difference(const RewardTable& other) const;

private:
    std::size_t states_;
    std::vector<double> r_;
};

RewardTable reward_table(const DomainInfo& domain, const PosteriorTable& posterior);

/// Index of the largest value; values within tie_tol * max(1, |best|) of the
/// best count as tied and the lowest index wins, unless tie_rng is given, in
/// which case a tied index is drawn uniformly.
std::size_t argmax_with_ties(std::span<const double> values, double tie_tol = 1e-9, Rng* tie_rng = nullptr);

struct ValueIterationResult {
    std::vector<double> values;
    Policy policy;
    int sweeps = 0;
};

/// Optimal values of the deterministic-transition MDP, iterated until the
/// sup-norm change falls below tol.
ValueIterationResult value_iteration(const RewardTable& rewards, double gamma, double tol = 1e-10);

Policy greedy_policy(const RewardTable& rewards, std::span<const double> values, double gamma);

/// Values of a fixed policy; exact, using the cycle every deterministic chain ends in.
std::vector<double> evaluate_policy(const RewardTable& rewards, const Policy& policy, double gamma);

}  // namespace mtd
