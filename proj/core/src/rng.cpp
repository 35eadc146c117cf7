#include "ds3/rng.hpp"

#include "ds3/distributions.hpp"
#include "ds3/error.hpp"

namespace ds3 {

std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t fnv1a64(std::string_view s) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t replication_seed(std::uint64_t base_seed, std::string_view scenario_id,
                               std::uint64_t rep) noexcept {
    return mix64(mix64(base_seed ^ fnv1a64(scenario_id)) + rep);
}

double SeededRng::uniform01() {
    // Top 53 bits, offset by half an ulp: never exactly 0 or 1.
    const std::uint64_t x = gen_();
    return (static_cast<double>(x >> 11) + 0.5) * 0x1.0p-53;
}

double SeededRng::standard_normal() { return normal_quantile(uniform01()); }

bool SeededRng::bernoulli(double p) { return uniform01() < p; }

std::uint64_t SeededRng::bounded(std::uint64_t n) {
    if (n == 0) throw DomainError("bounded draw requires n > 0");
    const std::uint64_t threshold = (-n) % n;  // 2^64 mod n
    for (;;) {
        const std::uint64_t x = gen_();
        if (x >= threshold) return x % n;
    }
}

}  // namespace ds3
