#pragma once

#include <cstdint>
#include <vector>

namespace spotdiff {

// Deterministic PRNG (xoshiro256++ seeded via splitmix64). The standard
// distributions are implementation-defined, so every draw used for dataset
// generation goes through this class to keep outputs identical across
// platforms and standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed = 0) {
        std::uint64_t x = seed;
        for (auto& w : state_) w = splitmix64(x);
    }

    static std::uint64_t splitmix64(std::uint64_t& x) {
        x += 0x9e3779b97f4a7c15ull;
        std::uint64_t z = x;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Uniform integer in [0, n). Rejection-sampled to avoid modulo bias.
    std::uint64_t range(std::uint64_t n) {
        if (n == 0) return 0;
        const std::uint64_t limit = ~0ull - (~0ull % n);
        std::uint64_t v = next_u64();
        while (v >= limit) v = next_u64();
        return v % n;
    }

    int index(std::size_t n) { return static_cast<int>(range(static_cast<std::uint64_t>(n))); }

    // Uniform double in [0, 1).
    double real() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double real(double lo, double hi) { return lo + (hi - lo) * real(); }

    bool coin(double p) { return real() < p; }

    template <typename T>
    const T& pick(const std::vector<T>& items) {
        return items[range(items.size())];
    }

    // Independent child stream; forking with distinct salts never aliases the
    // parent sequence.
    Rng fork(std::uint64_t salt) const {
        std::uint64_t x = state_[0] ^ (salt * 0x9e3779b97f4a7c15ull + 0x6a09e667f3bcc909ull);
        std::uint64_t mixed = splitmix64(x);
        x ^= state_[2] + salt;
        mixed ^= splitmix64(x);
        return Rng(mixed);
    }

private:
    static std::uint64_t rotl(std::uint64_t v, int k) { return (v << k) | (v >> (64 - k)); }
    std::uint64_t state_[4];
};

}  // namespace spotdiff
