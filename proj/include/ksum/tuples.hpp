#pragma once

// Canonical index tuples. A solution candidate is an assignment of input
// indices to the k coefficient slots; within every class of equal
// coefficients the indices are kept nondecreasing (strictly increasing in
// distinct mode), which quotients out slot permutations that do not change
// the linear form.

#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "ksum/exact.hpp"

namespace ksum {

struct AlphaPartition {
    std::vector<Rational> class_value;          // coefficient of each class
    std::vector<std::vector<int>> class_slots;  // original slot positions
    int k = 0;

    bool uniform() const { return class_value.size() <= 1; }
};

inline AlphaPartition classify_alpha(std::span<const Rational> alpha) {
    AlphaPartition p;
    p.k = static_cast<int>(alpha.size());
    for (int j = 0; j < p.k; ++j) {
        bool found = false;
        for (std::size_t c = 0; c < p.class_value.size(); ++c) {
            if (p.class_value[c] == alpha[j]) {
                p.class_slots[c].push_back(j);
                found = true;
                break;
            }
        }
        if (!found) {
            p.class_value.push_back(alpha[j]);
            p.class_slots.push_back({j});
        }
    }
    return p;
}

inline void require_distinct_supported(const AlphaPartition& p, bool distinct) {
    if (distinct && !p.uniform())
        throw std::invalid_argument("distinct mode requires uniform coefficients");
}

// Number of nondecreasing (or strictly increasing) length-len tuples over a
// universe of m elements.
inline Integer count_sorted_tuples(long m, int len, bool strict) {
    if (len == 0) return 1;
    if (m <= 0) return 0;
    return strict ? binomial(static_cast<unsigned long>(m), static_cast<unsigned long>(len))
                  : binomial(static_cast<unsigned long>(m + len - 1), static_cast<unsigned long>(len));
}

inline Integer count_assignments(long n, const AlphaPartition& p, bool distinct) {
    require_distinct_supported(p, distinct);
    Integer total = 1;
    for (const auto& slots : p.class_slots)
        total *= count_sorted_tuples(n, static_cast<int>(slots.size()), distinct);
    return total;
}

// Enumerates sorted tuples over [lo, hi) in lexicographic order.
// Returns false if the callback stopped the enumeration.
inline bool for_each_sorted_tuple(int lo, int hi, int len, bool strict,
                                  const std::function<bool(std::span<const int>)>& fn) {
    if (len == 0) {
        return fn({});
    }
    if (hi - lo < (strict ? len : 1)) return true;
    std::vector<int> t(len);
    for (int i = 0; i < len; ++i) t[i] = strict ? lo + i : lo;
    while (true) {
        if (!fn(t)) return false;
        int pos = len - 1;
        while (pos >= 0 && t[pos] == hi - 1 - (strict ? len - 1 - pos : 0)) --pos;
        if (pos < 0) return true;
        ++t[pos];
        for (int i = pos + 1; i < len; ++i) t[i] = strict ? t[i - 1] + 1 : t[pos];
    }
}

// Enumerates canonical assignments as slot-aligned k-tuples over [0, n).
inline bool for_each_assignment(int n, const AlphaPartition& p, bool distinct,
                                const std::function<bool(std::span<const int>)>& fn) {
    require_distinct_supported(p, distinct);
    const std::size_t nclasses = p.class_slots.size();
    std::vector<int> slot_tuple(p.k);
    std::function<bool(std::size_t)> rec = [&](std::size_t ci) -> bool {
        if (ci == nclasses) return fn(slot_tuple);
        const auto& slots = p.class_slots[ci];
        return for_each_sorted_tuple(0, n, static_cast<int>(slots.size()), distinct,
                                     [&](std::span<const int> t) {
                                         for (std::size_t j = 0; j < slots.size(); ++j)
                                             slot_tuple[slots[j]] = t[j];
                                         return rec(ci + 1);
                                     });
    };
    if (p.k == 0) return fn({});
    return rec(0);
}

inline Rational assignment_value(std::span<const Rational> values, std::span<const Rational> alpha,
                                 const Rational& c, std::span<const int> tuple) {
    Rational acc = c;
    for (std::size_t j = 0; j < tuple.size(); ++j) acc += alpha[j] * values[tuple[j]];
    return acc;
}

} // namespace ksum
