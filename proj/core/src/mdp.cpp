#include "mtd/mdp.hpp"

#include "mtd/rng.hpp"

#include <algorithm>
#include <cmath>

namespace mtd {

double RewardTable::max_abs_difference(const RewardTable& other) const {
    if (other.states_ != states_) throw DomainError("reward tables have different sizes");
    double worst = 0.0;
    for (std::size_t i = 0; i < r_.size(); ++i) worst = std::max(worst, std::abs(r_[i] - other.r_[i]));
    return worst;
}

RewardTable reward_table(const DomainInfo& domain, const PosteriorTable& posterior) {
    const std::size_t n = domain.space().size();
    RewardTable table(n);
    for (std::size_t s = 0; s < n; ++s)
        for (std::size_t a = 0; a < n; ++a)
            table(Config{s}, Config{a}) =
                expected_reward(domain, Config{s}, Config{a}, posterior.at(Config{s}, Config{a}));
    return table;
}

std::size_t argmax_with_ties(std::span<const double> values, double tie_tol, Rng* tie_rng) {
    if (values.empty()) throw std::invalid_argument("argmax over an empty range");
    const double best = *std::ranges::max_element(values);
    const double cutoff = best - tie_tol * std::max(1.0, std::abs(best));
    std::vector<std::size_t> tied;
    for (std::size_t i = 0; i < values.size(); ++i)
        if (values[i] >= cutoff) tied.push_back(i);
    if (tie_rng == nullptr || tied.size() == 1) return tied.front();
    return tied[tie_rng->uniform_index(tied.size())];
}

ValueIterationResult value_iteration(const RewardTable& rewards, double gamma, double tol) {
    const std::size_t n = rewards.states();
    ValueIterationResult out;
    out.values.assign(n, 0.0);
    std::vector<double> next(n);
    // Bellman residual tol still leaves an error of tol * gamma / (1 - gamma); iterate past it.
    const double stop = tol * (1.0 - gamma);
    for (;;) {
        ++out.sweeps;
        double delta = 0.0;
        for (std::size_t s = 0; s < n; ++s) {
            double best = -INFINITY;
            for (std::size_t a = 0; a < n; ++a)
                best = std::max(best, rewards(Config{s}, Config{a}) + gamma * out.values[a]);
            next[s] = best;
            delta = std::max(delta, std::abs(best - out.values[s]));
        }
        out.values.swap(next);
        if (delta <= stop || out.sweeps > 1000000) break;
    }
    out.policy = greedy_policy(rewards, out.values, gamma);
    return out;
}

Policy greedy_policy(const RewardTable& rewards, std::span<const double> values, double gamma) {
    const std::size_t n = rewards.states();
    Policy policy;
    std::vector<double> q(n);
    for (std::size_t s = 0; s < n; ++s) {
        for (std::size_t a = 0; a < n; ++a) q[a] = rewards(Config{s}, Config{a}) + gamma * values[a];
        policy.actions.push_back(Config{argmax_with_ties(q)});
    }
    return policy;
}

std::vector<double> evaluate_policy(const RewardTable& rewards, const Policy& policy, double gamma) {
    const std::size_t n = rewards.states();
    if (policy.size() != n) throw DomainError("policy does not cover every state");
    std::vector<double> value(n, 0.0);
    std::vector<int> state(n, 0);  // 0 unvisited, 1 on current path, 2 solved
    for (std::size_t start = 0; start < n; ++start) {
        if (state[start] == 2) continue;
        std::vector<std::size_t> path;
        std::size_t s = start;
        while (state[s] == 0) {
            state[s] = 1;
            path.push_back(s);
            s = policy(Config{s}).index;
        }
        std::size_t stop = path.size();
        if (state[s] == 1) {
            // s closes a new cycle: V(c0) = sum_k gamma^k r_k / (1 - gamma^L)
            const auto first = static_cast<std::size_t>(std::ranges::find(path, s) - path.begin());
            double acc = 0.0;
            double disc = 1.0;
            for (std::size_t k = first; k < path.size(); ++k) {
                const std::size_t u = path[k];
                acc += disc * rewards(Config{u}, policy(Config{u}));
                disc *= gamma;
            }
            value[path[first]] = acc / (1.0 - disc);
            state[path[first]] = 2;
            for (std::size_t k = path.size(); k-- > first + 1;) {
                const std::size_t u = path[k];
                value[u] = rewards(Config{u}, policy(Config{u})) + gamma * value[policy(Config{u}).index];
                state[u] = 2;
            }
            stop = first;
        }
        for (std::size_t k = stop; k-- > 0;) {
            const std::size_t u = path[k];
            value[u] = rewards(Config{u}, policy(Config{u})) + gamma * value[policy(Config{u}).index];
            state[u] = 2;
        }
    }
    return value;
}

}  // namespace mtd
