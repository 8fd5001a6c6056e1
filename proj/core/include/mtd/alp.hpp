#pragma once

#include "mtd/domain.hpp"
#include "mtd/estimator.hpp"
#include "mtd/lp.hpp"
#include "mtd/mdp.hpp"

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace mtd {

class Rng;

class AlpError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Indicator over a subset of state factors. An empty scope is the bias
/// function, which is 1 everywhere.
struct BasisFunction {
    std::vector<std::size_t> scope;
    std::vector<std::size_t> values;

    bool is_bias() const { return scope.empty(); }
    double evaluate(const ConfigSpace& space, Config s) const;
    std::string describe(const ConfigSpace& space) const;
};

/// Ordered basis containing exactly one bias function.
class BasisSet {
public:
    explicit BasisSet(std::vector<BasisFunction> functions);

    std::size_t size() const { return functions_.size(); }
    const BasisFunction& operator[](std::size_t i) const { return functions_.at(i); }
    const std::vector<BasisFunction>& functions() const { return functions_; }

private:
    std::vector<BasisFunction> functions_;
};

/// Bias plus one indicator per (factor, value): 1 + sum_j |Dom(S^j)| functions.
BasisSet build_basis(const ConfigSpace& space);

/// Bias plus one indicator per full configuration. Spans every value function,
/// so the approximate program becomes the exact MDP linear program.
BasisSet build_state_basis(const ConfigSpace& space);

/// Expected value of basis function b in the successor of (s, a). Transitions
/// are deterministic with successor a, so this is b evaluated at a.
double backprojection(const BasisFunction& b, const ConfigSpace& space, Config s, Config a);

/// Uniform initial-state weights.
std::vector<double> uniform_theta(const ConfigSpace& space);

struct ALProblem {
    BasisSet basis;
    std::vector<double> theta;  // per configuration
    LpProblem lp;               // variables are the basis weights w
    /// Row k corresponds to (s, a) = (k / |S|, k % |S|); reward_part[k] is the
    /// w-independent part of C(s, a; w), i.e. the expected one-step reward.
    std::vector<double> reward_part;
};

/// Objective sum_s theta(s) V(s; w) and one constraint 0 >= C(s, a; w) per
/// (state, action), with C the expectation over the attack response of the
/// Bellman backup minus V(s; w).
ALProblem build_alp(const DomainInfo& domain, const PosteriorTable& posterior, const BasisSet& basis,
                    std::vector<double> theta = {});

/// Minimizing weight vector. Throws AlpError when the program is not optimal.
std::vector<double> solve_alp(const ALProblem& alp);

/// V(s; w) for every configuration.
std::vector<double> approximate_values(const BasisSet& basis, const ConfigSpace& space,
                                       std::span<const double> w);

/// Greedy policy: argmax_a R(s, a) + gamma * sum_i w_i g_i(s, a). Ties go to the
/// lowest action index unless tie_rng is supplied.
Policy extract_policy(std::span<const double> w, const DomainInfo& domain, const PosteriorTable& posterior,
                      const BasisSet& basis, Rng* tie_rng = nullptr);

/// Exact discounted values of a fixed policy under the posterior's rewards.
std::vector<double> exact_value(const Policy& policy, const DomainInfo& domain, const PosteriorTable& posterior);

/// Objective, rows and basis descriptions as a JSON document.
std::string alp_to_json(const ALProblem& alp, const DomainInfo& domain);

}  // namespace mtd
