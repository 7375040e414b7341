#pragma once

// Uniform random sampling of canonical hyperplanes. Sorted tuples are drawn
// by walking the exact counting table (no rejection at the tuple level, no
// floating point), so draws are uniform and replay identically from a seed.

#include <set>
#include <span>
#include <stdexcept>
#include <vector>

#include "ksum/exact.hpp"
#include "ksum/geometry.hpp"
#include "ksum/rng.hpp"
#include "ksum/tuples.hpp"

namespace ksum {

// omega(m, l): number of nondecreasing l-tuples over m symbols.
// omega(m, 0) = 1; omega(m, l) = sum_{i=1..m} omega(i, l-1), which telescopes
// to omega(m-1, l) + omega(m, l-1). Column l is the cumulative distribution
// of the largest element, which is exactly what the sampler walks.
struct SamplingTable {
    int n = 0, k = 0;
    std::vector<std::vector<Integer>> omega;  // omega[m][l], 0 <= m <= n, 0 <= l <= k

    const Integer& at(int m, int l) const { return omega[m][l]; }
};

inline SamplingTable build_table(int n, int k) {
    if (n < 1 || k < 1) throw std::invalid_argument("build_table needs n,k >= 1");
    SamplingTable t;
    t.n = n;
    t.k = k;
    t.omega.assign(n + 1, std::vector<Integer>(k + 1));
    for (int m = 0; m <= n; ++m) t.omega[m][0] = 1;
    for (int l = 1; l <= k; ++l) {
        t.omega[0][l] = 0;
        for (int m = 1; m <= n; ++m) t.omega[m][l] = t.omega[m - 1][l] + t.omega[m][l - 1];
    }
    return t;
}

namespace detail {

// Smallest o in [1, m] with bound(o) > r (bound nondecreasing in o).
template <typename BoundFn>
int cdf_search(int m, const Integer& r, BoundFn bound) {
    int lo = 1, hi = m;
    while (lo < hi) {
        int mid = lo + (hi - lo) / 2;
        if (bound(mid) > r)
            hi = mid;
        else
            lo = mid + 1;
    }
    return lo;
}

} // namespace detail

// Uniform nondecreasing l-tuple over [0, m); every tuple has probability
// 1 / omega(m, l).
inline std::vector<int> draw_sorted_tuple(const SamplingTable& t, int m, int l, Rng& rng) {
    if (m > t.n || l > t.k) throw std::invalid_argument("table too small for draw");
    std::vector<int> out(l);
    int bound = m;
    for (int pos = l; pos >= 1; --pos) {
        Integer r = rng.below_big(t.at(bound, pos));
        int o = detail::cdf_search(bound, r, [&](int mid) { return t.at(mid, pos); });
        out[pos - 1] = o - 1;
        bound = o;
    }
    return out;
}

// Distinct-mode variant: uniform strictly increasing l-tuple over [0, m).
inline std::vector<int> draw_distinct_tuple(int m, int l, Rng& rng) {
    std::vector<int> out(l);
    int bound = m;
    for (int pos = l; pos >= 1; --pos) {
        Integer total = count_sorted_tuples(bound, pos, true);
        Integer r = rng.below_big(total);
        int o = detail::cdf_search(bound, r, [&](int mid) { return count_sorted_tuples(mid, pos, true); });
        out[pos - 1] = o - 1;
        bound = o - 1;
    }
    return out;
}

// One uniform assignment: an independent sorted-tuple draw per coefficient
// class, concatenated into the slot-aligned tuple.
inline std::vector<int> draw_assignment(const SamplingTable& t, int n, const AlphaPartition& p,
                                        bool distinct, Rng& rng) {
    require_distinct_supported(p, distinct);
    std::vector<int> slot_tuple(p.k);
    for (std::size_t c = 0; c < p.class_slots.size(); ++c) {
        const auto& slots = p.class_slots[c];
        std::vector<int> part = distinct ? draw_distinct_tuple(n, static_cast<int>(slots.size()), rng)
                                         : draw_sorted_tuple(t, n, static_cast<int>(slots.size()), rng);
        for (std::size_t j = 0; j < slots.size(); ++j) slot_tuple[slots[j]] = part[j];
    }
    return slot_tuple;
}

// `size` independent uniform draws over the canonical hyperplanes, distinct
// elements kept.
inline HyperplaneSet draw_net(int n, int k, std::span<const Rational> alpha, const Rational& c,
                              long size, Rng& rng, bool distinct = false, bool lifted = false) {
    if (size < 1) throw std::invalid_argument("net size must be >= 1");
    AlphaPartition p = classify_alpha(alpha);
    SamplingTable t = build_table(n, k);
    std::set<std::vector<int>> seen;
    HyperplaneSet net;
    int space_dim = n + (lifted ? 1 : 0);
    for (long i = 0; i < size; ++i) {
        std::vector<int> tuple = draw_assignment(t, n, p, distinct, rng);
        if (seen.insert(tuple).second)
            net.members.push_back(hyperplane_for_assignment(tuple, alpha, c, space_dim, lifted));
    }
    return net;
}

// Truncating fixed-point log2 (Q32 fraction); integer-only so the value is
// identical on every platform.
inline Integer log2_fixed_q32(unsigned long x) {
    if (x < 1) throw std::invalid_argument("log2 of non-positive value");
    const int K = 32;
    Integer u(static_cast<unsigned long>(x));
    int p = static_cast<int>(mpz_sizeinbase(u.get_mpz_t(), 2)) - 1;
    u <<= K;
    u >>= p;
    Integer result = Integer(p) << K;
    for (int i = 1; i <= K; ++i) {
        u = (u * u) >> K;
        if (mpz_sizeinbase(u.get_mpz_t(), 2) > static_cast<std::size_t>(K + 1)) {
            u >>= 1;
            result += Integer(1) << (K - i);
        }
    }
    return result;
}

// ceil(constant * (1/epsilon) * n^2 * log2(max(n,2))^2).
inline Integer net_size(int n, const Rational& epsilon, const Rational& constant) {
    if (sign_of(epsilon) <= 0 || epsilon > 1) throw std::invalid_argument("epsilon must be in (0,1]");
    if (sign_of(constant) <= 0) throw std::invalid_argument("net constant must be positive");
    Integer lam = log2_fixed_q32(static_cast<unsigned long>(std::max(n, 2)));
    Rational lam2(lam * lam, Integer(1) << 64);
    lam2.canonicalize();
    Rational total = constant * Rational(Integer(n) * Integer(n)) * lam2 / epsilon;
    Integer q;
    mpz_cdiv_q(q.get_mpz_t(), total.get_num().get_mpz_t(), total.get_den().get_mpz_t());
    return q;
}

// Spec-facing sampler configuration.
struct NetConfig {
    Rational epsilon;
    Rational constant = Rational(1);
    std::uint64_t rng_seed = 1;

    void validate() const {
        if (sign_of(epsilon) <= 0 || epsilon >= 1)
            throw std::invalid_argument("epsilon must be in (0,1)");
        if (sign_of(constant) <= 0) throw std::invalid_argument("net constant must be positive");
    }
};

} // namespace ksum
