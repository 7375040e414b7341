#pragma once

// Exact-rational vertex finding for arrangement cells. The cell is given by
// sign constraints around the hidden point; this solves
//   maximize objective . x  subject to  sig_i * (offset_i + normal_i . x) >= 0
// (equality when sig_i = 0) and returns an optimal vertex.
//
// The method is a dual-simplex active-set walk: cells always contain the
// bounding cube rows, so the cube corner aligned with the objective is a
// dual-feasible start and no feasibility phase is needed. Violated rows are
// priced most-violated-first; Bland's lowest-index rule takes over after a
// run of degenerate pivots, which is what guarantees termination.

#include <algorithm>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "ksum/exact.hpp"
#include "ksum/geometry.hpp"

namespace ksum {

struct CellConstraint {
    const Hyperplane* plane;
    int sig;  // -1, 0, +1
};

struct CellInfeasible : std::runtime_error {
    CellInfeasible() : std::runtime_error("cell constraints are inconsistent") {}
};

struct LpPrecondition : std::invalid_argument {
    explicit LpPrecondition(const std::string& w) : std::invalid_argument(w) {}
};

struct VertexResult {
    Point vertex;
    std::vector<int> tight_rows;  // >= dim linearly independent tight constraints
};

struct LpStats {
    long pivots = 0;
    long scans = 0;
};

namespace detail {

class DualSimplex {
public:
    DualSimplex(std::span<const CellConstraint> rows, std::span<const Rational> objective, int dim)
        : rows_(rows), w_(objective.begin(), objective.end()), dim_(dim) {
        if (static_cast<int>(w_.size()) != dim_) throw LpPrecondition("objective dimension mismatch");
        basis_.assign(dim_, -1);
        fixed_in_basis_.assign(dim_, false);
        minv_.assign(dim_, std::vector<Rational>(dim_));
        rhs_.assign(dim_, Rational(0));
        lambda_.assign(dim_, Rational(0));
        v_.coords.assign(dim_, Rational(0));
    }

    VertexResult run(LpStats* stats) {
        init_cube_corner();
        long degenerate_run = 0;
        bool bland = false;
        long pivots = 0;
        std::vector<int> queue;
        while (true) {
            if (queue.empty()) {
                scan_violated(queue, bland);
                if (stats) ++stats->scans;
                if (queue.empty()) break;
            }
            int r = queue.back();
            queue.pop_back();
            Rational val = rows_[r].plane->value_at(v_);
            if (!is_violated(r, val)) continue;
            bool degenerate = pivot(r, val);
            ++pivots;
            if (stats) ++stats->pivots;
            degenerate_run = degenerate ? degenerate_run + 1 : 0;
            if (degenerate_run > 50) bland = true;
            if (bland) queue.clear();  // re-scan in index order every pivot
            if (pivots > 2'000'000) throw std::runtime_error("vertex_of_cell: pivot limit exceeded");
        }
        return finish();
    }

private:
    bool is_violated(int r, const Rational& val) const {
        int s = sign_of(val);
        if (rows_[r].sig == 0) return s != 0 && !in_basis(r);
        return s * rows_[r].sig < 0;
    }

    bool in_basis(int r) const {
        for (int b : basis_)
            if (b == r) return true;
        return false;
    }

    void dense_outward(int r, int orient, std::vector<Rational>& out) const {
        out.assign(dim_, Rational(0));
        for (const auto& [i, c] : rows_[r].plane->normal) out[i] = c * (-orient);
    }

    void init_cube_corner() {
        // One singleton-normal row per axis, outward-aligned with the
        // objective; the boundary set guarantees such rows exist.
        std::vector<int> chosen(dim_, -1), orient(dim_, 0);
        for (int r = 0; r < static_cast<int>(rows_.size()); ++r) {
            const auto& nrm = rows_[r].plane->normal;
            if (nrm.size() != 1) continue;
            int axis = nrm[0].first;
            if (chosen[axis] >= 0 && rows_[chosen[axis]].sig == 0) continue;
            int ws = sign_of(w_[axis]);
            if (ws == 0) throw LpPrecondition("objective orthogonal to a cube axis");
            int coeff_sign = sign_of(nrm[0].second);
            if (rows_[r].sig == 0) {
                chosen[axis] = r;
                orient[axis] = -ws * coeff_sign;  // free multiplier; align outward anyway
            } else if (-rows_[r].sig * coeff_sign == ws && chosen[axis] < 0) {
                chosen[axis] = r;
                orient[axis] = rows_[r].sig;
            }
        }
        for (int a = 0; a < dim_; ++a)
            if (chosen[a] < 0)
                throw LpPrecondition("cell is not bounded by the cube on every axis");

        for (int a = 0; a < dim_; ++a) {
            int r = chosen[a];
            basis_[a] = r;
            fixed_in_basis_[a] = rows_[r].sig == 0;
            const auto& e = rows_[r].plane->normal[0];
            // column a of M is outward = -orient * coeff * e_axis
            Rational entry = e.second * (-orient[a]);
            minv_[a].assign(dim_, Rational(0));
            minv_[a][e.first] = Rational(1) / entry;  // row a of M^-1
            rhs_[a] = Rational(orient[a]) * rows_[r].plane->offset;
        }
        recompute_point();
        recompute_lambda();
    }

    void scan_violated(std::vector<int>& queue, bool bland) {
        struct Cand {
            Rational mag;
            int row;
        };
        std::vector<Cand> cands;
        for (int r = 0; r < static_cast<int>(rows_.size()); ++r) {
            Rational val = rows_[r].plane->value_at(v_);
            if (is_violated(r, val)) cands.push_back({abs(val), r});
        }
        if (bland) {
            std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) { return a.row > b.row; });
        } else {
            // queue is popped from the back: most violated last
            std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
                int c = cmp(a.mag, b.mag);
                return c != 0 ? c < 0 : a.row > b.row;
            });
        }
        queue.clear();
        for (const auto& c : cands) queue.push_back(c.row);
    }

    // Brings violated row r into the basis; returns whether the step was
    // degenerate (zero dual step length).
    bool pivot(int r, const Rational& val) {
        int orient = rows_[r].sig != 0 ? rows_[r].sig : (sign_of(val) < 0 ? +1 : -1);
        std::vector<Rational> outward;
        dense_outward(r, orient, outward);

        // mu = M^-1 * outward
        std::vector<Rational> mu(dim_, Rational(0));
        for (int i = 0; i < dim_; ++i) {
            Rational acc(0);
            for (int j = 0; j < dim_; ++j)
                if (sign_of(outward[j]) != 0) acc += minv_[i][j] * outward[j];
            mu[i] = std::move(acc);
        }

        // Dual ratio test over non-fixed basis positions with mu > 0.
        int leave = -1;
        std::optional<Rational> best;
        for (int i = 0; i < dim_; ++i) {
            if (fixed_in_basis_[i] || sign_of(mu[i]) <= 0) continue;
            Rational t = lambda_[i] / mu[i];
            if (!best || cmp(t, *best) < 0 ||
                (cmp(t, *best) == 0 && basis_[i] < basis_[leave])) {
                best = t;
                leave = i;
            }
        }
        if (leave < 0) throw CellInfeasible{};
        Rational tstar = *best;
        bool degenerate = sign_of(tstar) == 0;

        // eta update of M^-1: replace column `leave` of M by `outward`.
        Rational piv = mu[leave];
        for (auto& x : minv_[leave]) x /= piv;
        for (int i = 0; i < dim_; ++i) {
            if (i == leave || sign_of(mu[i]) == 0) continue;
            for (int j = 0; j < dim_; ++j)
                if (sign_of(minv_[leave][j]) != 0) minv_[i][j] -= mu[i] * minv_[leave][j];
        }

        for (int i = 0; i < dim_; ++i)
            if (i != leave && sign_of(mu[i]) != 0) lambda_[i] -= tstar * mu[i];
        lambda_[leave] = tstar;

        basis_[leave] = r;
        fixed_in_basis_[leave] = rows_[r].sig == 0;
        rhs_[leave] = Rational(orient) * rows_[r].plane->offset;
        recompute_point();
        return degenerate;
    }

    void recompute_point() {
        for (int j = 0; j < dim_; ++j) {
            Rational acc(0);
            for (int i = 0; i < dim_; ++i)
                if (sign_of(rhs_[i]) != 0) acc += minv_[i][j] * rhs_[i];
            v_.coords[j] = std::move(acc);
        }
    }

    void recompute_lambda() {
        for (int i = 0; i < dim_; ++i) {
            Rational acc(0);
            for (int j = 0; j < dim_; ++j)
                if (sign_of(w_[j]) != 0) acc += minv_[i][j] * w_[j];
            lambda_[i] = std::move(acc);
        }
    }

    VertexResult finish() {
        // Deterministic tight set: greedy lowest-index independent rows,
        // maintained in echelon form so each candidate costs one reduction.
        std::vector<std::vector<Rational>> ech;
        std::vector<int> pivot_col;
        std::vector<int> tight;
        for (int r = 0; r < static_cast<int>(rows_.size()) && static_cast<int>(tight.size()) < dim_; ++r) {
            if (sign_of(rows_[r].plane->value_at(v_)) != 0) continue;
            std::vector<Rational> dense(dim_);
            for (const auto& [i, c] : rows_[r].plane->normal) dense[i] = c;
            for (std::size_t e = 0; e < ech.size(); ++e) {
                int pc = pivot_col[e];
                if (sign_of(dense[pc]) == 0) continue;
                Rational f = dense[pc] / ech[e][pc];
                for (int j = 0; j < dim_; ++j)
                    if (sign_of(ech[e][j]) != 0) dense[j] -= f * ech[e][j];
            }
            int pc = -1;
            for (int j = 0; j < dim_; ++j)
                if (sign_of(dense[j]) != 0) { pc = j; break; }
            if (pc < 0) continue;
            pivot_col.push_back(pc);
            ech.push_back(std::move(dense));
            tight.push_back(r);
        }
        if (static_cast<int>(tight.size()) < dim_)
            throw std::runtime_error("vertex_of_cell: tight set rank deficient");
        return {std::move(v_), std::move(tight)};
    }

    std::span<const CellConstraint> rows_;
    std::vector<Rational> w_;
    int dim_;
    std::vector<int> basis_;
    std::vector<bool> fixed_in_basis_;
    std::vector<std::vector<Rational>> minv_;  // minv_[i] = row i of M^-1
    std::vector<Rational> rhs_;
    std::vector<Rational> lambda_;
    Point v_;
};

} // namespace detail

// Exact optimal vertex of the (closed) cell. Requires the cube rows on every
// axis (bounded cell) and an objective non-orthogonal to the constraint
// normals; throws CellInfeasible when the sign data is inconsistent.
inline VertexResult vertex_of_cell(std::span<const CellConstraint> rows,
                                   std::span<const Rational> objective, int space_dim,
                                   LpStats* stats = nullptr) {
    detail::DualSimplex lp(rows, objective, space_dim);
    return lp.run(stats);
}

} // namespace ksum
