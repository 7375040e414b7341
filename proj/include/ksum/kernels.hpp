#pragma once

// Query-free computational kernels on explicit data: the classical baselines
// and the output-sensitive segment/containment routines the two-phase solver
// prunes with. All of them enumerate canonical assignments (per-class sorted
// tuples), so witness sets are deduplicated by construction.

#include <algorithm>
#include <functional>
#include <set>
#include <span>
#include <stdexcept>
#include <vector>

#include "ksum/exact.hpp"
#include "ksum/geometry.hpp"
#include "ksum/tuples.hpp"

namespace ksum {

struct DecisionResult {
    bool yes = false;
    std::vector<std::vector<int>> witnesses;  // canonical tuples, lexicographically sorted
};

struct KernelStats {
    long insertions = 0;           // ordered-set insertions, all sweeps
    long max_pass_insertions = 0;  // insertions in any single sweep pass
    long half_tuples = 0;          // number of ceil(k/2)-tuples built
};

inline bool tuple_all_distinct(std::span<const int> t) {
    for (std::size_t i = 0; i + 1 < t.size(); ++i)
        for (std::size_t j = i + 1; j < t.size(); ++j)
            if (t[i] == t[j]) return false;
    return true;
}

// Exhaustive scan over canonical assignments; the test oracle everything else
// is checked against.
inline DecisionResult brute_force_decide(std::span<const Rational> values, int k,
                                         std::span<const Rational> alpha, const Rational& c,
                                         bool distinct_mode) {
    if (static_cast<int>(alpha.size()) != k) throw std::invalid_argument("alpha size must be k");
    AlphaPartition p = classify_alpha(alpha);
    DecisionResult res;
    for_each_assignment(static_cast<int>(values.size()), p, distinct_mode,
                        [&](std::span<const int> t) {
                            if (sign_of(assignment_value(values, alpha, c, t)) == 0)
                                res.witnesses.emplace_back(t.begin(), t.end());
                            return true;
                        });
    std::sort(res.witnesses.begin(), res.witnesses.end());
    res.yes = !res.witnesses.empty();
    return res;
}

namespace detail {

// Half-assignment table: the first `take` slots of each class (in class-major
// order) go to the A half, the rest to B. Any A/B recombination is a valid
// canonical assignment after a per-class sorted merge.
struct HalfSplit {
    std::vector<int> a_sizes, b_sizes;  // per class
    int a_len = 0, b_len = 0;
};

inline HalfSplit split_classes(const AlphaPartition& p) {
    HalfSplit s;
    int h = (p.k + 1) / 2;
    int taken = 0;
    for (const auto& slots : p.class_slots) {
        int take = std::min<int>(static_cast<int>(slots.size()), h - taken);
        s.a_sizes.push_back(take);
        s.b_sizes.push_back(static_cast<int>(slots.size()) - take);
        taken += take;
    }
    s.a_len = h;
    s.b_len = p.k - h;
    return s;
}

struct HalfItem {
    Rational sum;
    std::vector<std::vector<int>> parts;  // per-class sorted index tuples
};

inline std::vector<HalfItem> build_half_items(std::span<const Rational> values,
                                              const AlphaPartition& p, std::span<const int> sizes,
                                              bool distinct) {
    const int n = static_cast<int>(values.size());
    std::vector<HalfItem> items;
    items.push_back({Rational(0), std::vector<std::vector<int>>(p.class_slots.size())});
    for (std::size_t ci = 0; ci < p.class_slots.size(); ++ci) {
        std::vector<HalfItem> next;
        for_each_sorted_tuple(0, n, sizes[ci], distinct, [&](std::span<const int> t) {
            Rational part(0);
            for (int idx : t) part += values[idx];
            part *= p.class_value[ci];
            for (const auto& base : items) {
                HalfItem item = base;
                item.sum += part;
                item.parts[ci].assign(t.begin(), t.end());
                next.push_back(std::move(item));
            }
            return true;
        });
        items = std::move(next);
    }
    return items;
}

inline std::vector<int> merge_halves(const AlphaPartition& p, const HalfItem& a, const HalfItem& b) {
    std::vector<int> slot_tuple(p.k);
    for (std::size_t ci = 0; ci < p.class_slots.size(); ++ci) {
        std::vector<int> merged(a.parts[ci].size() + b.parts[ci].size());
        std::merge(a.parts[ci].begin(), a.parts[ci].end(), b.parts[ci].begin(), b.parts[ci].end(),
                   merged.begin());
        const auto& slots = p.class_slots[ci];
        for (std::size_t j = 0; j < slots.size(); ++j) slot_tuple[slots[j]] = merged[j];
    }
    return slot_tuple;
}

} // namespace detail

// Meet in the middle: sort the ceil(k/2)-wise and floor(k/2)-wise sums and
// sweep the sorted tables for pairs adding to -c.
inline DecisionResult meet_in_middle_decide(std::span<const Rational> values, int k,
                                            std::span<const Rational> alpha, const Rational& c,
                                            bool distinct_mode = false) {
    if (static_cast<int>(alpha.size()) != k) throw std::invalid_argument("alpha size must be k");
    AlphaPartition p = classify_alpha(alpha);
    require_distinct_supported(p, distinct_mode);
    detail::HalfSplit split = detail::split_classes(p);
    auto a_items = detail::build_half_items(values, p, split.a_sizes, distinct_mode);
    auto b_items = detail::build_half_items(values, p, split.b_sizes, distinct_mode);
    auto by_sum = [](const detail::HalfItem& x, const detail::HalfItem& y) {
        return cmp(x.sum, y.sum) < 0;
    };
    std::sort(a_items.begin(), a_items.end(), by_sum);
    std::sort(b_items.begin(), b_items.end(), by_sum);

    std::set<std::vector<int>> found;
    // ascending over A, descending over B, emitting equal-sum group products
    std::size_t bi = b_items.size();
    std::size_t ai = 0;
    while (ai < a_items.size() && bi > 0) {
        Rational need = -c - a_items[ai].sum;
        while (bi > 0 && cmp(b_items[bi - 1].sum, need) > 0) --bi;
        if (bi == 0) break;
        if (cmp(b_items[bi - 1].sum, need) == 0) {
            std::size_t aj = ai;
            while (aj < a_items.size() && cmp(a_items[aj].sum, a_items[ai].sum) == 0) ++aj;
            std::size_t bj = bi;
            while (bj > 0 && cmp(b_items[bj - 1].sum, need) == 0) --bj;
            for (std::size_t x = ai; x < aj; ++x)
                for (std::size_t y = bj; y < bi; ++y) {
                    std::vector<int> tuple = detail::merge_halves(p, a_items[x], b_items[y]);
                    if (distinct_mode && !tuple_all_distinct(tuple)) continue;
                    found.insert(std::move(tuple));
                }
            ai = aj;
        } else {
            ++ai;
        }
    }
    DecisionResult res;
    res.witnesses.assign(found.begin(), found.end());
    res.yes = !res.witnesses.empty();
    return res;
}

// --- integer k-SUM ----------------------------------------------------------

// All canonical k-multisets over [0,n) whose value sums hit `target`,
// enumerated meet-in-the-middle style over big integers. The A half holds the
// ceil(k/2) smallest positions, so a pair is reported exactly once via the
// canonical-split filter max(A) <= min(B).
inline std::vector<std::vector<int>> integer_ksum_enumerate(std::span<const Integer> values, int k,
                                                            const Integer& target,
                                                            bool distinct_mode = false,
                                                            bool stop_at_first = false) {
    const int n = static_cast<int>(values.size());
    const int h = (k + 1) / 2, l = k - h;
    struct Item {
        Integer sum;
        std::vector<int> tuple;
    };
    auto build = [&](int len) {
        std::vector<Item> items;
        for_each_sorted_tuple(0, n, len, distinct_mode, [&](std::span<const int> t) {
            Integer s(0);
            for (int idx : t) s += values[idx];
            items.push_back({std::move(s), {t.begin(), t.end()}});
            return true;
        });
        std::sort(items.begin(), items.end(),
                  [](const Item& x, const Item& y) { return cmp(x.sum, y.sum) < 0; });
        return items;
    };
    auto a_items = build(h);
    auto b_items = l == h ? a_items : build(l);

    std::vector<std::vector<int>> out;
    std::size_t bi = b_items.size();
    std::size_t ai = 0;
    while (ai < a_items.size() && bi > 0) {
        Integer need = target - a_items[ai].sum;
        while (bi > 0 && cmp(b_items[bi - 1].sum, need) > 0) --bi;
        if (bi == 0) break;
        if (cmp(b_items[bi - 1].sum, need) == 0) {
            std::size_t aj = ai;
            while (aj < a_items.size() && cmp(a_items[aj].sum, a_items[ai].sum) == 0) ++aj;
            std::size_t bj = bi;
            while (bj > 0 && cmp(b_items[bj - 1].sum, need) == 0) --bj;
            for (std::size_t x = ai; x < aj; ++x)
                for (std::size_t y = bj; y < bi; ++y) {
                    const auto& A = a_items[x].tuple;
                    const auto& B = b_items[y].tuple;
                    if (l > 0) {
                        if (distinct_mode ? A.back() >= B.front() : A.back() > B.front()) continue;
                    }
                    std::vector<int> tuple;
                    tuple.reserve(k);
                    tuple.insert(tuple.end(), A.begin(), A.end());
                    tuple.insert(tuple.end(), B.begin(), B.end());
                    out.push_back(std::move(tuple));
                    if (stop_at_first) return out;
                }
            ai = aj;
        } else {
            ++ai;
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

// Decision form: do any k of the integers sum to zero.
inline bool integer_ksum(std::span<const Integer> values, int k, bool distinct_mode = false) {
    return !integer_ksum_enumerate(values, k, Integer(0), distinct_mode, true).empty();
}

// --- double k-SUM ------------------------------------------------------------

// Sorted half-tuple sums of one endpoint: value/tuple-id pairs in
// nondecreasing order plus the inverse rank permutation.
struct SortedSums {
    std::vector<std::pair<Rational, int>> sums;
    std::vector<int> rank_of;  // tuple id -> rank

    static SortedSums build(std::span<const Rational> values) {
        SortedSums s;
        s.sums.reserve(values.size());
        for (std::size_t i = 0; i < values.size(); ++i) s.sums.emplace_back(values[i], static_cast<int>(i));
        std::sort(s.sums.begin(), s.sums.end(), [](const auto& a, const auto& b) {
            int c = cmp(a.first, b.first);
            return c != 0 ? c < 0 : a.second < b.second;
        });
        s.rank_of.assign(values.size(), 0);
        for (std::size_t r = 0; r < s.sums.size(); ++r) s.rank_of[s.sums[r].second] = static_cast<int>(r);
        return s;
    }
};

// Staircase sweep over the half-tuple tables. Tables and per-vertex sums are
// built once; each vertex pair is then enumerated in O(N log N + Z)
// ordered-set operations (N = number of half-tuples). Per-point offsets
// support lifted instances; zero for pure k-SUM.
class SegmentSweeper {
public:
    SegmentSweeper(std::span<const Point> points, int k, std::span<const Rational> offsets,
                   bool distinct_mode, KernelStats* stats = nullptr)
        : k_(k), h_((k + 1) / 2), l_(k - h_), distinct_(distinct_mode), stats_(stats) {
        if (points.empty()) throw std::invalid_argument("sweeper needs points");
        const int n = points[0].dim();
        for_each_sorted_tuple(0, n, h_, distinct_, [&](std::span<const int> t) {
            a_tuples_.emplace_back(t.begin(), t.end());
            return true;
        });
        if (l_ == h_) {
            b_tuples_ = a_tuples_;
        } else {
            for_each_sorted_tuple(0, n, l_, distinct_, [&](std::span<const int> t) {
                b_tuples_.emplace_back(t.begin(), t.end());
                return true;
            });
        }
        per_vertex_.resize(points.size());
        for (std::size_t v = 0; v < points.size(); ++v) {
            auto& pv = per_vertex_[v];
            pv.offset = v < offsets.size() ? offsets[v] : Rational(0);
            pv.a_sums = sums_at(points[v], a_tuples_);
            pv.b_sums = l_ == h_ ? pv.a_sums : sums_at(points[v], b_tuples_);
            pv.a_sorted = SortedSums::build(pv.a_sums);
            pv.b_asc.resize(pv.b_sums.size());
            for (std::size_t i = 0; i < pv.b_asc.size(); ++i) pv.b_asc[i] = static_cast<int>(i);
            std::sort(pv.b_asc.begin(), pv.b_asc.end(), [&](int x, int y) {
                int c = cmp(pv.b_sums[x], pv.b_sums[y]);
                return c != 0 ? c < 0 : x < y;
            });
        }
        if (stats_) stats_->half_tuples += static_cast<long>(a_tuples_.size());
    }

    long half_tuple_count() const { return static_cast<long>(a_tuples_.size()); }

    // Canonical k-tuples whose sums take strictly opposite signs at vertices
    // v1 and v2: the hyperplanes crossing the open segment.
    void enumerate_pair(int v1, int v2, const std::function<void(std::span<const int>)>& emit) const {
        pass(v1, v2, emit);
        pass(v2, v1, emit);
    }

private:
    struct PerVertex {
        Rational offset;
        std::vector<Rational> a_sums, b_sums;
        SortedSums a_sorted;
        std::vector<int> b_asc;
    };

    static std::vector<Rational> sums_at(const Point& p, const std::vector<std::vector<int>>& tuples) {
        std::vector<Rational> out;
        out.reserve(tuples.size());
        for (const auto& t : tuples) {
            Rational s(0);
            for (int idx : t) s += p.coords[idx];
            out.push_back(std::move(s));
        }
        return out;
    }

    // Pairs with offset+sum < 0 at `neg` and > 0 at `pos`. B is swept in
    // descending neg-order so the eligible A set grows monotonically; the
    // eligible report range is a rank suffix in the pos-order.
    void pass(int neg, int pos, const std::function<void(std::span<const int>)>& emit) const {
        const PerVertex& pn = per_vertex_[neg];
        const PerVertex& pp = per_vertex_[pos];
        std::set<int> active;  // ranks in pp.a_sorted order
        std::size_t inserted = 0;
        std::vector<int> scratch(k_);
        for (auto it = pn.b_asc.rbegin(); it != pn.b_asc.rend(); ++it) {
            int b = *it;
            Rational thresh_neg = -pn.offset - pn.b_sums[b];
            while (inserted < pn.a_sorted.sums.size() &&
                   cmp(pn.a_sorted.sums[inserted].first, thresh_neg) < 0) {
                int tuple_id = pn.a_sorted.sums[inserted].second;
                active.insert(pp.a_sorted.rank_of[tuple_id]);
                ++inserted;
            }
            if (active.empty()) continue;
            Rational thresh_pos = -pp.offset - pp.b_sums[b];
            int first_rank = static_cast<int>(
                std::upper_bound(pp.a_sorted.sums.begin(), pp.a_sorted.sums.end(), thresh_pos,
                                 [](const Rational& v, const auto& e) { return cmp(v, e.first) < 0; }) -
                pp.a_sorted.sums.begin());
            for (auto ait = active.lower_bound(first_rank); ait != active.end(); ++ait) {
                const auto& A = a_tuples_[pp.a_sorted.sums[*ait].second];
                const auto& B = b_tuples_[b];
                if (l_ > 0) {
                    if (distinct_ ? A.back() >= B.front() : A.back() > B.front()) continue;
                }
                std::copy(A.begin(), A.end(), scratch.begin());
                std::copy(B.begin(), B.end(), scratch.begin() + h_);
                emit(scratch);
            }
        }
        if (stats_) {
            long n_ins = static_cast<long>(inserted);
            stats_->insertions += n_ins;
            stats_->max_pass_insertions = std::max(stats_->max_pass_insertions, n_ins);
        }
    }

    int k_, h_, l_;
    bool distinct_;
    KernelStats* stats_;
    std::vector<std::vector<int>> a_tuples_, b_tuples_;
    std::vector<PerVertex> per_vertex_;
};

// Enumerates canonical k-tuples whose coordinate sums take strictly opposite
// signs at the two points, i.e. the k-SUM hyperplanes crossing the open
// segment between them.
inline std::vector<std::vector<int>> double_ksum_enumerate(const Point& p1, const Point& p2, int k,
                                                           const Rational& c1 = Rational(0),
                                                           const Rational& c2 = Rational(0),
                                                           bool distinct_mode = false,
                                                           KernelStats* stats = nullptr) {
    if (p1.dim() != p2.dim()) throw std::invalid_argument("double k-SUM points must share a dimension");
    std::vector<Point> pts{p1, p2};
    std::vector<Rational> offs{c1, c2};
    SegmentSweeper sweeper(pts, k, offs, distinct_mode, stats);
    std::vector<std::vector<int>> out;
    sweeper.enumerate_pair(0, 1, [&](std::span<const int> t) { out.emplace_back(t.begin(), t.end()); });
    std::sort(out.begin(), out.end());
    return out;
}

// --- multiple k-SUM -----------------------------------------------------------

// Digit-packed encoding: one big integer per input index, whose i-th digit in
// base 2Uk+1 is the (shifted) integerized coordinate of point i. Digit sums of
// k terms stay below the base, so packed sums decide all points at once.
struct EncodedInstance {
    Integer digits_base;           // 2Uk + 1
    Integer bound;                 // U
    std::vector<Integer> packed;   // one per input index
    Integer packed_target;
    int digits = 0;

    std::vector<std::vector<Integer>> unpack() const {
        std::vector<std::vector<Integer>> out(packed.size(), std::vector<Integer>(digits));
        for (std::size_t j = 0; j < packed.size(); ++j) {
            Integer v = packed[j];
            for (int i = digits - 1; i >= 0; --i) {
                Integer digit = v % digits_base;
                out[j][i] = digit - bound;  // undo the +U shift
                v /= digits_base;
            }
        }
        return out;
    }
};

struct CarryOverflow : std::logic_error {
    CarryOverflow() : std::logic_error("digit encoding would carry") {}
};

// targets[i] is the required coordinate sum at point i (zero for the pure
// hyperplane-containment question).
inline EncodedInstance encode_points(std::span<const Point> points, int k,
                                     std::span<const Rational> targets) {
    const int d = static_cast<int>(points.size());
    if (d < 1) throw std::invalid_argument("multiple k-SUM needs at least one point");
    const int n = points[0].dim();
    for (const auto& p : points)
        if (p.dim() != n) throw std::invalid_argument("points must share a dimension");

    // Per-point scaling: each point's row of digits is integerized with its
    // own denominator lcm, which keeps digits small.
    std::vector<std::vector<Integer>> zeta(d, std::vector<Integer>(n));
    std::vector<Integer> row_target(d);
    Integer max_abs = 1;
    for (int i = 0; i < d; ++i) {
        Integer lcm_i = 1;
        for (int j = 0; j < n; ++j)
            mpz_lcm(lcm_i.get_mpz_t(), lcm_i.get_mpz_t(), points[i].coords[j].get_den().get_mpz_t());
        mpz_lcm(lcm_i.get_mpz_t(), lcm_i.get_mpz_t(), targets[i].get_den().get_mpz_t());
        for (int j = 0; j < n; ++j) {
            const Rational& v = points[i].coords[j];
            zeta[i][j] = v.get_num() * (lcm_i / v.get_den());
            Integer a = abs(zeta[i][j]);
            if (a > max_abs) max_abs = a;
        }
        row_target[i] = targets[i].get_num() * (lcm_i / targets[i].get_den());
        Integer ta = abs(row_target[i]);
        Integer ceil_div;
        mpz_cdiv_q_ui(ceil_div.get_mpz_t(), ta.get_mpz_t(), static_cast<unsigned long>(k));
        if (ceil_div > max_abs) max_abs = ceil_div;
    }

    EncodedInstance enc;
    enc.bound = max_abs;
    enc.digits_base = 2 * enc.bound * k + 1;
    enc.digits = d;
    enc.packed.assign(n, Integer(0));
    Integer two_u = 2 * enc.bound;
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < n; ++j) {
            Integer digit = zeta[i][j] + enc.bound;
            if (digit < 0 || digit > two_u) throw CarryOverflow{};
            enc.packed[j] = enc.packed[j] * enc.digits_base + digit;
        }
        Integer tdigit = row_target[i] + enc.bound * k;
        if (tdigit < 0 || tdigit >= enc.digits_base) throw CarryOverflow{};
        enc.packed_target = enc.packed_target * enc.digits_base + tdigit;
    }
    return enc;
}

struct MultipleKsumResult {
    bool yes = false;
    std::vector<std::vector<int>> tuples;  // every containing canonical tuple
};

// Is there a k-SUM hyperplane whose coordinate sums meet the per-point
// targets at all points simultaneously; enumerates all such tuples.
inline MultipleKsumResult multiple_ksum_decide(std::span<const Point> points, int k,
                                               std::span<const Rational> targets = {},
                                               bool distinct_mode = false,
                                               bool stop_at_first = false) {
    std::vector<Rational> zero_targets;
    if (targets.empty()) {
        zero_targets.assign(points.size(), Rational(0));
        targets = zero_targets;
    }
    EncodedInstance enc = encode_points(points, k, targets);
    MultipleKsumResult res;
    res.tuples = integer_ksum_enumerate(enc.packed, k, enc.packed_target, distinct_mode, stop_at_first);
    res.yes = !res.tuples.empty();
    return res;
}

} // namespace ksum
