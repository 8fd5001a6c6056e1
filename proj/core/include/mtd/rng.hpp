#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace mtd {

/// Seeded pseudo-random source.
///
/// The engine (mt19937_64) is fully specified by the standard; the
/// distribution transforms below are written out by hand so that a given
/// seed yields the same stream with every standard library.
class Rng {
public:
    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

    /// Uniform on [0, 1) with 53 bits of resolution.
    double uniform01();
    double uniform(double lo, double hi);
    /// Uniform on {0, ..., n - 1}; n must be positive.
    std::size_t uniform_index(std::size_t n);
    bool bernoulli(double p);
    /// Exponential with the given rate (mean 1 / rate).
    double exponential(double rate);
    /// Draws an index with probability proportional to weights[i].
    /// Weights must be nonnegative with a positive sum.
    std::size_t categorical(std::span<const double> weights);

    std::uint64_t next_u64() { return engine_(); }

private:
    std::mt19937_64 engine_;
};

}  // namespace mtd
