#pragma once

// Seeded, portable random generator (xoshiro256** seeded via splitmix64).
// All randomized components draw from this so runs replay bit-identically
// across platforms; nothing here touches std::uniform_* distributions.

#include <array>
#include <cstdint>

#include "ksum/exact.hpp"

namespace ksum {

class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t x = seed;
        for (auto& s : state_) {
            // splitmix64
            x += 0x9e3779b97f4a7c15ULL;
            std::uint64_t z = x;
            z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
            z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
            s = z ^ (z >> 31);
        }
    }

    std::uint64_t next() {
        auto rotl = [](std::uint64_t v, int k) { return (v << k) | (v >> (64 - k)); };
        std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
        std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Uniform in [0, bound), bound > 0, by rejection.
    std::uint64_t below(std::uint64_t bound) {
        const std::uint64_t limit = ~0ULL - (~0ULL % bound + 1) % bound;
        std::uint64_t v = next();
        while (v > limit) v = next();
        return v % bound;
    }

    // Uniform in [lo, hi] inclusive.
    long range(long lo, long hi) {
        return lo + static_cast<long>(below(static_cast<std::uint64_t>(hi - lo + 1)));
    }

    // Uniform in [0, bound) for arbitrary-precision bounds; chunked rejection.
    Integer below_big(const Integer& bound) {
        if (bound <= 0) return 0;
        if (mpz_fits_ulong_p(bound.get_mpz_t()))
            return Integer(static_cast<unsigned long>(below(bound.get_ui())));
        const std::size_t bits = mpz_sizeinbase(bound.get_mpz_t(), 2);
        const std::size_t words = (bits + 63) / 64;
        while (true) {
            Integer v = 0;
            for (std::size_t w = 0; w < words; ++w) {
                std::uint64_t word = next();
                v <<= 64;
                Integer chunk;
                mpz_import(chunk.get_mpz_t(), 1, 1, sizeof(word), 0, 0, &word);
                v |= chunk;
            }
            v >>= words * 64 - bits;
            if (v < bound) return v;
        }
    }

    Rng fork(std::uint64_t stream) { return Rng(next() ^ (stream * 0x9e3779b97f4a7c15ULL)); }

private:
    std::array<std::uint64_t, 4> state_;
};

} // namespace ksum
