#pragma once

#include <compare>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace mtd {

/// Raised for malformed domains and out-of-range configuration or type indices.
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A full system configuration, identified by its flat index in a ConfigSpace.
/// Actions are configurations too: an action names the configuration to switch to.
struct Config {
    std::size_t index = 0;

    friend auto operator<=>(const Config&, const Config&) = default;
};

struct FactorSpec {
    std::string name;
    std::vector<std::string> values;
};

/// Cartesian product of factor domains with a mixed-radix flat index.
/// The first factor is the most significant digit, so configurations
/// enumerate in the order (f0 = v0, f1 = v0), (f0 = v0, f1 = v1), ...
class ConfigSpace {
public:
    explicit ConfigSpace(std::vector<FactorSpec> factors);

    std::size_t size() const { return size_; }
    std::size_t factor_count() const { return factors_.size(); }
    const FactorSpec& factor(std::size_t j) const { return factors_.at(j); }
    const std::vector<FactorSpec>& factors() const { return factors_; }

    /// Value index of factor j in configuration c.
    std::size_t value_of(Config c, std::size_t j) const;
    std::vector<std::size_t> decode(Config c) const;
    Config encode(std::span<const std::size_t> values) const;

    /// Factor values joined by '|' in factor order, e.g. "PHP|MySQL".
    std::string label(Config c) const;
    Config parse(std::string_view label) const;
    std::optional<std::size_t> factor_index(std::string_view name) const;

    void check(Config c) const;

private:
    std::vector<FactorSpec> factors_;
    std::vector<std::size_t> strides_;
    std::size_t size_ = 0;
};

struct AttackerTypeSpec {
    std::string id;
    bool is_unknown = false;
    /// Attack success rate against each target configuration, in [0, 1].
    std::vector<double> mu;
    /// Unit-time system loss of a successful attack, as a nonnegative magnitude.
    std::vector<double> loss;
};

/// Distribution over the attacker types of a domain, indexed like DomainInfo::types().
using TypeDistribution = std::vector<double>;

/// Configuration universe, attacker types, switching costs and reward constants.
/// Immutable once constructed; the constructor enforces every table invariant.
class DomainInfo {
public:
    DomainInfo(ConfigSpace space, std::vector<AttackerTypeSpec> types,
               std::vector<double> switching_cost, double m, double gamma, double alpha = 1.0);

    const ConfigSpace& space() const { return space_; }
    const std::vector<AttackerTypeSpec>& types() const { return types_; }
    std::size_t type_count() const { return types_.size(); }
    const AttackerTypeSpec& type(std::size_t k) const { return types_.at(k); }
    std::optional<std::size_t> unknown_type() const { return unknown_; }
    std::size_t type_index(std::string_view id) const;

    double mu(std::size_t type, Config target) const;
    double loss(std::size_t type, Config target) const;
    double switching_cost(Config s, Config a) const;
    /// Row-major |S| x |A| switching-cost table.
    const std::vector<double>& switching_costs() const { return sc_; }

    double m() const { return m_; }
    double gamma() const { return gamma_; }
    double alpha() const { return alpha_; }

    DomainInfo with_alpha(double alpha) const;
    DomainInfo with_gamma(double gamma) const;
    DomainInfo with_switching_scale(double factor) const;

private:
    ConfigSpace space_;
    std::vector<AttackerTypeSpec> types_;
    std::vector<double> sc_;
    double m_;
    double gamma_;
    double alpha_;
    std::optional<std::size_t> unknown_;
};

/// Deterministic transition: the action is the next configuration.
Config next_state(const ConfigSpace& space, Config s, Config a);

struct CvssParams {
    double mu;
    double loss;
};

/// mu = 0.1 * ES and loss = 10 * IS for scores in [0, 10].
CvssParams cvss_to_params(double exploitability, double impact);

/// Mean loss of a successful attack on the successor of (s, a), weighting each
/// type by posterior * mu. Returns 0 when no type in the posterior can succeed.
double attack_loss_given_success(const DomainInfo& domain, Config s, Config a,
                                 std::span<const double> posterior);

/// Sum over types of posterior * mu * loss at the successor of (s, a).
double expected_attack_loss(const DomainInfo& domain, Config s, Config a,
                            std::span<const double> posterior);

/// M - expected_attack_loss - alpha * sc(s, a).
double expected_reward(const DomainInfo& domain, Config s, Config a,
                       std::span<const double> posterior);

}  // namespace mtd
