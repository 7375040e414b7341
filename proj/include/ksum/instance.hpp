#pragma once

// Instance metadata and seeded instance generators. The hidden values only
// ever live inside a SignOracle; generators hand them over at construction.

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "ksum/exact.hpp"
#include "ksum/kernels.hpp"
#include "ksum/oracle.hpp"
#include "ksum/rng.hpp"
#include "ksum/tuples.hpp"

namespace ksum {

struct KSumInstance {
    int n = 0;
    int k = 0;
    std::vector<Rational> alpha;  // size k, entries nonzero
    Rational c;
    bool distinct = false;

    static KSumInstance pure(int n, int k, bool distinct = false) {
        KSumInstance inst;
        inst.n = n;
        inst.k = k;
        inst.alpha.assign(k, Rational(1));
        inst.c = 0;
        inst.distinct = distinct;
        return inst;
    }

    bool lifted() const { return sign_of(c) != 0; }
    int space_dim() const { return n + (lifted() ? 1 : 0); }

    bool uniform_alpha() const {
        for (const auto& a : alpha)
            if (a != alpha[0]) return false;
        return true;
    }

    void validate() const {
        if (k < 1) throw std::invalid_argument("k must be positive");
        if (n < k) throw std::invalid_argument("n >= k required");
        if (static_cast<int>(alpha.size()) != k) throw std::invalid_argument("|alpha| must be k");
        for (const auto& a : alpha)
            if (sign_of(a) == 0) throw std::invalid_argument("alpha entries must be nonzero");
        if (distinct) require_distinct_supported(classify_alpha(alpha), true);
    }
};

inline SignOracle make_oracle(const KSumInstance& inst, std::vector<Rational> values) {
    if (static_cast<int>(values.size()) != inst.n)
        throw std::invalid_argument("value count must equal n");
    return SignOracle(std::move(values), inst.lifted());
}

// --- generators ---------------------------------------------------------------

enum class GenProfile { Planted, None, Zeros, Duplicates, AdversarialNearDegenerate };

inline GenProfile gen_profile_from_string(const std::string& s) {
    if (s == "planted") return GenProfile::Planted;
    if (s == "none") return GenProfile::None;
    if (s == "zeros") return GenProfile::Zeros;
    if (s == "duplicates") return GenProfile::Duplicates;
    if (s == "adversarial-near-degenerate") return GenProfile::AdversarialNearDegenerate;
    throw std::invalid_argument("unknown profile: " + s);
}

namespace detail {

inline Rational random_value(Rng& rng) {
    long num = rng.range(1, 60);
    if (rng.below(2)) num = -num;
    long den = rng.range(1, 6);
    return make_rational(num, den);
}

inline std::vector<int> random_assignment(const KSumInstance& inst, Rng& rng) {
    std::vector<int> t(inst.k);
    if (inst.distinct) {
        // Floyd-style distinct draw, then sorted.
        std::vector<int> pool(inst.n);
        for (int i = 0; i < inst.n; ++i) pool[i] = i;
        for (int j = 0; j < inst.k; ++j) {
            int pick = static_cast<int>(rng.below(static_cast<std::uint64_t>(inst.n - j)));
            std::swap(pool[j], pool[j + pick]);
            t[j] = pool[j];
        }
        std::sort(t.begin(), t.end());
    } else {
        for (int j = 0; j < inst.k; ++j) t[j] = static_cast<int>(rng.below(inst.n));
        std::sort(t.begin(), t.end());
    }
    return t;
}

} // namespace detail

// Seeded values with the requested property. The "none" profile is verified
// solution-free by brute force, which caps n at 16 for that check.
inline std::vector<Rational> generate_values(const KSumInstance& inst, GenProfile profile, Rng& rng) {
    inst.validate();
    auto fresh = [&] {
        std::vector<Rational> v(inst.n);
        for (auto& x : v) x = detail::random_value(rng);
        return v;
    };
    switch (profile) {
        case GenProfile::Planted: {
            for (int attempt = 0; attempt < 1000; ++attempt) {
                std::vector<Rational> v = fresh();
                std::vector<int> t = detail::random_assignment(inst, rng);
                int target = t[inst.k - 1];
                Rational coef(0), rest = inst.c;
                for (int j = 0; j < inst.k; ++j) {
                    if (t[j] == target)
                        coef += inst.alpha[j];
                    else
                        rest += inst.alpha[j] * v[t[j]];
                }
                if (sign_of(coef) == 0) continue;
                v[target] = -rest / coef;
                return v;
            }
            throw std::runtime_error("planted generation failed");
        }
        case GenProfile::None: {
            if (inst.n > 16) throw std::invalid_argument("profile none is verified only up to n = 16");
            for (int attempt = 0; attempt < 1000; ++attempt) {
                std::vector<Rational> v = fresh();
                if (!brute_force_decide(v, inst.k, inst.alpha, inst.c, inst.distinct).yes) return v;
            }
            throw std::runtime_error("could not generate a solution-free instance");
        }
        case GenProfile::Zeros: {
            std::vector<Rational> v = fresh();
            long zeros = 1 + static_cast<long>(rng.below(2));
            for (long z = 0; z < zeros; ++z) v[rng.below(inst.n)] = 0;
            return v;
        }
        case GenProfile::Duplicates: {
            std::vector<Rational> v = fresh();
            long dups = 1 + static_cast<long>(rng.below(3));
            for (long d = 0; d < dups; ++d) {
                int from = static_cast<int>(rng.below(inst.n));
                int to = static_cast<int>(rng.below(inst.n - 1));
                if (to >= from) ++to;
                v[to] = v[from];
            }
            return v;
        }
        case GenProfile::AdversarialNearDegenerate: {
            // Several tuples sum to +/- 1/BIG instead of zero: every sign
            // decision sits next to a boundary.
            std::vector<Rational> v = fresh();
            Rational tiny = make_rational(1, 999983);
            long plants = 2 + static_cast<long>(rng.below(3));
            for (long p = 0; p < plants; ++p) {
                std::vector<int> t = detail::random_assignment(inst, rng);
                int target = t[inst.k - 1];
                Rational coef(0), rest = inst.c;
                for (int j = 0; j < inst.k; ++j) {
                    if (t[j] == target)
                        coef += inst.alpha[j];
                    else
                        rest += inst.alpha[j] * v[t[j]];
                }
                if (sign_of(coef) == 0) continue;
                Rational offset = rng.below(2) ? tiny : Rational(-tiny);
                v[target] = (offset - rest) / coef;
            }
            return v;
        }
    }
    throw std::logic_error("unreachable");
}

} // namespace ksum
