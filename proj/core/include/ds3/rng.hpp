#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace ds3 {

/// splitmix64 finalizer. Used wherever independent seeds are derived from a
/// base seed; the exact mixing function is part of the reproducibility
/// contract documented in docs/file-formats.md.
std::uint64_t mix64(std::uint64_t z) noexcept;

/// FNV-1a 64-bit hash of a byte string.
std::uint64_t fnv1a64(std::string_view s) noexcept;

/// Seed for replication `rep` of scenario `scenario_id`:
///   mix64(mix64(base_seed ^ fnv1a64(scenario_id)) + rep).
/// All estimator kinds within a replication share this seed, so they see the
/// identical dataset.
std::uint64_t replication_seed(std::uint64_t base_seed, std::string_view scenario_id,
                               std::uint64_t rep) noexcept;

/// Deterministic random stream with a documented wire format:
///   - engine: std::mt19937_64 seeded with the given value;
///   - uniform01: ((next() >> 11) + 0.5) * 2^-53, always in (0,1);
///   - standard_normal: inverse standard-normal CDF applied to uniform01;
///   - bernoulli(p): uniform01() < p;
///   - bounded(n): unbiased rejection sampling on next() % n.
/// Consumers that promise bit-reproducible output must document the order in
/// which they draw from the stream.
class SeededRng {
public:
    explicit SeededRng(std::uint64_t seed) : gen_(seed) {}

    double uniform01();
    double standard_normal();
    bool bernoulli(double p);
    std::uint64_t bounded(std::uint64_t n);

private:
    std::mt19937_64 gen_;
};

}  // namespace ds3
