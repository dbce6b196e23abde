// Deterministic random source for reproducible simulation runs.
//
// std::mt19937_64 has a portable, standard-mandated output sequence, but the
// std::*_distribution adaptors do not: two standard libraries may consume the
// engine differently for the same distribution.  Every helper here therefore
// maps raw engine output to the target range itself, so a (seed, call
// sequence) pair produces identical draws on any conforming toolchain.
#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

namespace disg {

class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next_u64() { return eng_(); }

    // Uniform double in [0, 1) with 53 random bits.
    double uniform01() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform index in [0, n).  Multiply-shift keeps the bias below 2^-64,
    // far under anything observable at simulation scale.
    std::size_t pick_index(std::size_t n) {
        if (n == 0) throw std::invalid_argument("Rng::pick_index: n must be positive");
        using u128 = unsigned __int128;
        return static_cast<std::size_t>((static_cast<u128>(next_u64()) * n) >> 64);
    }

    // Sample an index from a probability vector (entries >= 0, summing to ~1).
    // Walks the cumulative sum; any rounding shortfall goes to the last
    // positive entry so the function always returns a supported index.
    std::size_t sample_discrete(const std::vector<double>& probs) {
        if (probs.empty()) throw std::invalid_argument("Rng::sample_discrete: empty distribution");
        const double r = uniform01();
        double acc = 0.0;
        for (std::size_t i = 0; i < probs.size(); ++i) {
            acc += probs[i];
            if (r < acc) return i;
        }
        for (std::size_t i = probs.size(); i-- > 0;) {
            if (probs[i] > 0.0) return i;
        }
        return probs.size() - 1;
    }

private:
    std::mt19937_64 eng_;
};

} // namespace disg
