#pragma once

// Blocking scheme: sort the input with 2-term comparison queries, split the
// sorted sequence into b consecutive blocks, and decompose the search into
// one subproblem per grid cell the target hyperplane can pass through. Every
// query of a cell's subproblem touches at most k * ceil(n/b) distinct inputs,
// and every solution tuple is attributed to exactly one cell.

#include <functional>
#include <set>
#include <span>
#include <vector>

#include "ksum/exact.hpp"
#include "ksum/instance.hpp"
#include "ksum/oracle.hpp"
#include "ksum/solver.hpp"
#include "ksum/tuples.hpp"

namespace ksum {

struct BlockPartition {
    int b = 0;
    std::vector<int> sorted_order;             // position in query-sorted order -> input index
    std::vector<int> block_of;                 // input index -> block id
    std::vector<std::pair<int, int>> blocks;   // block id -> [lo, hi) in sorted positions
    std::vector<int> separators;               // sorted positions starting blocks 1..b-1
                                               // (thresholds exist only as orderings)
    std::vector<std::vector<int>> cells;       // hit cells, filled by enumerate_hit_cells
};

namespace detail {

// Bottom-up merge sort driven by 2-term sign queries; stable on ties so
// duplicate values split into blocks deterministically.
inline std::vector<int> query_sort(SignOracle& oracle, int n) {
    std::vector<int> order(n), scratch(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    for (int width = 1; width < n; width *= 2) {
        for (int lo = 0; lo < n; lo += 2 * width) {
            int mid = std::min(lo + width, n), hi = std::min(lo + 2 * width, n);
            int a = lo, b = mid, o = lo;
            while (a < mid && b < hi) {
                int s = oracle.ask(
                    LinearQuery::of({{order[a], Rational(1)}, {order[b], Rational(-1)}}), "sort");
                bool a_first = s < 0 || (s == 0 && order[a] < order[b]);
                scratch[o++] = a_first ? order[a++] : order[b++];
            }
            while (a < mid) scratch[o++] = order[a++];
            while (b < hi) scratch[o++] = order[b++];
            for (int i = lo; i < hi; ++i) order[i] = scratch[i];
        }
    }
    return order;
}

} // namespace detail

// Sorts with O(n log n) 2-linear queries and assigns consecutive blocks of
// size ceil(n/b) or floor(n/b).
inline BlockPartition build_partition(SignOracle& oracle, int n, int b) {
    if (b < 1 || b > n) throw std::invalid_argument("need 1 <= b <= n");
    BlockPartition part;
    part.b = b;
    part.sorted_order = detail::query_sort(oracle, n);
    part.block_of.assign(n, 0);
    int base = n / b, extra = n % b, pos = 0;
    for (int j = 0; j < b; ++j) {
        int size = base + (j < extra ? 1 : 0);
        part.blocks.emplace_back(pos, pos + size);
        if (j > 0) part.separators.push_back(pos);
        for (int i = pos; i < pos + size; ++i) part.block_of[part.sorted_order[i]] = j;
        pos += size;
    }
    return part;
}

namespace detail {

// Extreme elements of a block are known positions of the sorted order.
inline int block_min_index(const BlockPartition& p, int j) { return p.sorted_order[p.blocks[j].first]; }
inline int block_max_index(const BlockPartition& p, int j) {
    return p.sorted_order[p.blocks[j].second - 1];
}

} // namespace detail

// All nondecreasing block k-tuples whose value box can contain the target
// level set: corner sums are compared against zero with <= k-term queries on
// block extremes, and the lexicographic search prunes whole subtrees whose
// widest completion is sign-definite, so the cost is proportional to the
// number of hit cells rather than b^k.
inline std::vector<std::vector<int>> enumerate_hit_cells(const BlockPartition& part,
                                                         SignOracle& oracle,
                                                         const KSumInstance& inst,
                                                         long* cells_tested = nullptr) {
    const Rational a = inst.alpha[0];
    const int k = inst.k, b = part.b;
    std::vector<std::vector<int>> hit;
    std::vector<int> prefix;

    // sign of a * (prefix corners + (k - t) * bound element) + c
    auto corner_sign = [&](bool use_min, int completion_block) {
        std::vector<std::pair<int, Rational>> terms;
        for (int j : prefix) {
            int idx = use_min ? detail::block_min_index(part, j) : detail::block_max_index(part, j);
            terms.emplace_back(idx, a);
        }
        int rem = k - static_cast<int>(prefix.size());
        if (rem > 0) {
            int idx = use_min ? detail::block_min_index(part, completion_block)
                              : detail::block_max_index(part, completion_block);
            terms.emplace_back(idx, a * Rational(rem));
        }
        return oracle.ask(LinearQuery::of(std::move(terms), inst.c), "cell-test");
    };

    std::function<void(int)> dfs = [&](int lowest_block) {
        if (static_cast<int>(prefix.size()) == k) {
            if (cells_tested) ++(*cells_tested);
            int s1 = corner_sign(true, 0), s2 = corner_sign(false, 0);
            if (s1 * s2 <= 0) hit.push_back(prefix);
            return;
        }
        for (int j = lowest_block; j < b; ++j) {
            prefix.push_back(j);
            // widest completion: all-min from block j vs all-max from the last block
            int s1 = corner_sign(true, j), s2 = corner_sign(false, b - 1);
            if (s1 * s2 <= 0) dfs(j);
            prefix.pop_back();
        }
    };
    dfs(0);
    return hit;
}

// Full blocked driver: per hit cell, solve the subproblem restricted to the
// union of its blocks with the hyperplane universe narrowed to tuples whose
// block pattern equals the cell, then attribute witnesses.
inline SolverReport solve_blocked(SignOracle& oracle, const KSumInstance& inst, int b,
                                  const SolveConfig& cfg) {
    try {
        inst.validate();
        if (!inst.uniform_alpha())
            throw SolverError("blocked mode requires uniform coefficients");
        if (b < 1 || b > inst.n) throw SolverError("need 1 <= b <= n blocks");
    } catch (const std::exception& e) {
        return detail::error_report(oracle, cfg.rng_seed, e.what());
    }

    Rng rng(cfg.rng_seed);
    detail::SolveOutcome out;
    BlockedStats stats;
    stats.b = b;
    try {
        BlockPartition part = build_partition(oracle, inst.n, b);
        std::vector<std::vector<int>> cells =
            enumerate_hit_cells(part, oracle, inst, &stats.cells_tested);
        part.cells = cells;
        stats.cells_hit = static_cast<long>(cells.size());

        for (std::size_t ci = 0; ci < cells.size(); ++ci) {
            const auto& cell = cells[ci];
            std::vector<int> mult(b, 0);
            for (int j : cell) ++mult[j];

            // sub-index space: ascending sorted positions of the blocks present
            std::vector<int> sub_to_orig;
            std::vector<std::pair<int, int>> sub_ranges(b, {0, 0});
            for (int j = 0; j < b; ++j) {
                if (mult[j] == 0) continue;
                int lo = static_cast<int>(sub_to_orig.size());
                for (int p = part.blocks[j].first; p < part.blocks[j].second; ++p)
                    sub_to_orig.push_back(part.sorted_order[p]);
                sub_ranges[j] = {lo, static_cast<int>(sub_to_orig.size())};
            }

            // materialize the cell-restricted universe: per-block sorted
            // tuples with the cell's multiplicities, concatenated
            KSumInstance sub = inst;
            sub.n = static_cast<int>(sub_to_orig.size());
            const int sub_dim = sub.space_dim();
            std::vector<Hyperplane> cell_planes;
            std::vector<int> tuple;
            std::function<bool(int)> enumerate_blocks = [&](int j) -> bool {
                if (j == b) {
                    cell_planes.push_back(
                        hyperplane_for_assignment(tuple, sub.alpha, sub.c, sub_dim, sub.lifted()));
                    return true;
                }
                if (mult[j] == 0) return enumerate_blocks(j + 1);
                return for_each_sorted_tuple(sub_ranges[j].first, sub_ranges[j].second, mult[j],
                                             inst.distinct, [&](std::span<const int> t) {
                                                 std::size_t mark = tuple.size();
                                                 tuple.insert(tuple.end(), t.begin(), t.end());
                                                 bool ok = enumerate_blocks(j + 1);
                                                 tuple.resize(mark);
                                                 return ok;
                                             });
            };
            enumerate_blocks(0);
            if (cell_planes.empty()) continue;

            SignOracle sub_oracle = oracle.subscope(sub_to_orig, sub.lifted());
            sub_oracle.normalize();
            detail::SolveOutcome sub_out;
            if (!detail::handle_degenerate(sub_oracle, sub, cell_planes, sub_out)) {
                std::vector<Hyperplane> sub_boundary = boundary_set(sub_dim);
                std::vector<const Hyperplane*> bptr;
                for (const auto& h : sub_boundary) bptr.push_back(&h);
                std::vector<int> bsig = locate_in_net(sub_oracle, bptr);
                Rng sub_rng = rng.fork(ci + 1);
                detail::solve_explicit(sub_oracle, sub, cfg, std::move(cell_planes), sub_boundary,
                                       bsig, sub_rng, sub_out);
            }

            long attributed = 0;
            for (const auto& w : sub_out.witnesses) {
                std::vector<int> orig(w.size());
                for (std::size_t t = 0; t < w.size(); ++t) orig[t] = sub_to_orig[w[t]];
                std::sort(orig.begin(), orig.end());
                // attribution: the witness's block pattern must equal the cell
                std::vector<int> pattern(b, 0);
                for (int idx : orig) ++pattern[part.block_of[idx]];
                if (pattern != mult) continue;
                if (!out.witnesses.insert(orig).second)
                    throw SolverError("witness attributed to two cells");
                ++attributed;
            }
            stats.per_cell.emplace_back(cell, attributed);
            out.rounds += sub_out.rounds;
            out.retries += sub_out.retries;
            out.objective_retries += sub_out.objective_retries;
            for (auto& row : sub_out.per_round) out.per_round.push_back(std::move(row));
            if (!cfg.enumerate_all && !out.witnesses.empty()) break;
        }
    } catch (const std::exception& e) {
        return detail::error_report(oracle, cfg.rng_seed, e.what());
    }
    SolverReport r = detail::finish_report(oracle, out, cfg.rng_seed);
    r.blocked = std::move(stats);
    return r;
}

} // namespace ksum
