#pragma once

// Builds a simplex inscribed in the cell of the hidden point, using only
// linear queries on the original input. Each level finds a cell vertex by
// exact LP (query-free), ray-shoots from it through the hidden point to find
// the first hyperplane(s) hit, and recurses on that facet with the hit
// hyperplanes moved into the equality set.
//
// The hidden projection points q^(s) are never materialized. Queries about
// them are multiplied through by the accumulated product of ray denominators,
// whose sign is tracked from answered queries, so every issued question stays
// linear in the original input.

#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "ksum/exact.hpp"
#include "ksum/geometry.hpp"
#include "ksum/linalg.hpp"
#include "ksum/lp.hpp"
#include "ksum/oracle.hpp"
#include "ksum/rng.hpp"

namespace ksum {

struct InconsistentSigma : std::runtime_error {
    explicit InconsistentSigma(const std::string& w) : std::runtime_error(w) {}
};

struct CellContext {
    std::vector<const Hyperplane*> inequalities;  // not containing the point
    std::vector<int> signs;                       // matching nonzero sigma values
    std::vector<const Hyperplane*> equalities;    // general position, containing it
};

// Rewrite state for one recursion level: the products F = prod d.(q - nu) and
// F*q^(s), kept as explicit affine forms of the normalized input, plus the
// known sign of F.
struct RayShootState {
    std::vector<std::vector<Rational>> q_rows;  // row j: coefficients of (F q)_j
    std::vector<Rational> q_beta;               // constant parts of (F q)_j
    std::vector<Rational> f_row;                // coefficients of F
    Rational f_beta;
    int f_sign = +1;
    int depth = 0;
    std::vector<int> factor_signs;

    static RayShootState initial(int dim) {
        RayShootState s;
        s.q_rows.assign(dim, std::vector<Rational>(dim));
        s.q_beta.assign(dim, Rational(0));
        for (int j = 0; j < dim; ++j) s.q_rows[j][j] = 1;
        s.f_row.assign(dim, Rational(0));
        s.f_beta = 1;
        return s;
    }
};

struct BuildStats {
    long queries = 0;
    long initial_inequalities = 0;
    int depth = 0;
    long objective_retries = 0;
    std::vector<std::size_t> level_inequalities;  // |I| entering each level
    std::vector<std::size_t> level_equalities;    // |E| entering each level
};

// Greedy maximal extension of E by candidates whose normals increase rank.
inline std::vector<const Hyperplane*> extend_general_position(
    std::span<const Hyperplane* const> equalities, std::span<const Hyperplane* const> candidates,
    int dim) {
    std::vector<std::vector<Rational>> ech;
    std::vector<int> pivot_col;
    auto try_add = [&](const Hyperplane* h) {
        std::vector<Rational> dense(dim);
        for (const auto& [i, c] : h->normal) dense[i] = c;
        for (std::size_t e = 0; e < ech.size(); ++e) {
            int pc = pivot_col[e];
            if (sign_of(dense[pc]) == 0) continue;
            Rational f = dense[pc] / ech[e][pc];
            for (int j = 0; j < dim; ++j)
                if (sign_of(ech[e][j]) != 0) dense[j] -= f * ech[e][j];
        }
        for (int j = 0; j < dim; ++j) {
            if (sign_of(dense[j]) != 0) {
                pivot_col.push_back(j);
                ech.push_back(std::move(dense));
                return true;
            }
        }
        return false;
    };
    std::vector<const Hyperplane*> out(equalities.begin(), equalities.end());
    for (const Hyperplane* h : equalities)
        if (!try_add(h)) throw InconsistentSigma("equality set is not in general position");
    for (const Hyperplane* h : candidates)
        if (try_add(h)) out.push_back(h);
    return out;
}

namespace detail {

struct RayCandidate {
    int idx;        // position in ctx.inequalities
    Rational a;     // -(offset + normal.nu), nonzero
    Rational beta;  // -normal.nu
    int g_sign;     // sign of normal.(q - nu), nonzero for candidates
};

class SimplexBuilder {
public:
    SimplexBuilder(SignOracle& oracle, CellContext ctx, Rng& rng, BuildStats* stats)
        : oracle_(oracle), ctx_(std::move(ctx)), rng_(rng), stats_(stats), dim_(oracle.space_dim()) {}

    Simplex build() {
        long q0 = oracle_.transcript().total;
        std::size_t forms_mark = oracle_.registered_count();
        if (stats_) stats_->initial_inequalities = static_cast<long>(ctx_.inequalities.size());
        RayShootState state = RayShootState::initial(dim_);
        Simplex out;
        while (true) {
            if (stats_) {
                stats_->level_inequalities.push_back(ctx_.inequalities.size());
                stats_->level_equalities.push_back(ctx_.equalities.size());
            }
            if (static_cast<int>(ctx_.equalities.size()) == dim_) {
                out.vertices.push_back(forced_point());
                break;
            }
            Point nu = cell_vertex();
            ray_shoot_level(nu, state);
            out.vertices.push_back(std::move(nu));
            state.depth += 1;
            if (state.depth > dim_) throw InconsistentSigma("recursion exceeded the dimension");
        }
        if (stats_) {
            stats_->queries += oracle_.transcript().total - q0;
            stats_->depth = state.depth;
        }
        oracle_.drop_forms_from(forms_mark);
        return out;
    }

private:
    Point forced_point() {
        const int e = dim_;
        Matrix m(e, e);
        std::vector<Rational> rhs(e);
        for (int r = 0; r < e; ++r) {
            for (const auto& [i, c] : ctx_.equalities[r]->normal) m.at(r, i) = c;
            rhs[r] = -ctx_.equalities[r]->offset;
        }
        Point p;
        p.coords = solve_linear_system(m, rhs);
        return p;
    }

    Point cell_vertex() {
        std::vector<CellConstraint> rows;
        rows.reserve(ctx_.equalities.size() + ctx_.inequalities.size() + 2 * dim_);
        for (const Hyperplane* h : ctx_.equalities) rows.push_back({h, 0});
        for (std::size_t i = 0; i < ctx_.inequalities.size(); ++i)
            rows.push_back({ctx_.inequalities[i], ctx_.signs[i]});
        // The cell sits inside the normalized cube; the closed cube rows are
        // implied, and re-adding them keeps the LP's corner start available
        // even after cube rows were consumed by the recursion.
        if (cube_.empty()) cube_ = boundary_set(dim_);
        for (const auto& h : cube_) rows.push_back({&h, -h.side});
        std::vector<const Hyperplane*> normals;
        normals.reserve(rows.size());
        for (const auto& r : rows) normals.push_back(r.plane);
        long retries = 0;
        std::vector<Rational> objective = pick_objective(normals, dim_, rng_, &retries);
        if (stats_) stats_->objective_retries += retries;
        try {
            return vertex_of_cell(rows, objective, dim_).vertex;
        } catch (const CellInfeasible&) {
            throw InconsistentSigma("cell LP infeasible: sigma data inconsistent");
        }
    }

    // Registers this level's rewrite forms; returns the base row id.
    std::size_t register_level(const RayShootState& s) {
        std::vector<std::pair<std::vector<Rational>, Rational>> rows;
        rows.reserve(dim_ + 1);
        for (int j = 0; j < dim_; ++j) rows.emplace_back(s.q_rows[j], s.q_beta[j]);
        rows.emplace_back(s.f_row, s.f_beta);
        return oracle_.register_forms(rows);
    }

    // Combo for F * (normal.(q^(s) - nu)) = normal.(F q) + beta * F.
    static void direction_combo(const Hyperplane* h, const Rational& beta, std::size_t base, int dim,
                                std::vector<std::pair<std::size_t, Rational>>& out) {
        out.clear();
        for (const auto& [i, c] : h->normal) out.emplace_back(base + i, c);
        out.emplace_back(base + dim, beta);
    }

    void ray_shoot_level(const Point& nu, RayShootState& state) {
        std::size_t base = register_level(state);
        std::vector<RayCandidate> cands;
        std::vector<std::pair<std::size_t, Rational>> combo, combo2;
        for (std::size_t i = 0; i < ctx_.inequalities.size(); ++i) {
            const Hyperplane* h = ctx_.inequalities[i];
            Rational val = h->value_at(nu);
            if (sign_of(val) == 0) continue;  // passes through nu, lambda = 0
            Rational beta = val - h->offset;  // normal.nu
            beta = -beta;
            direction_combo(h, beta, base, dim_, combo);
            int g_sign = state.f_sign * oracle_.ask_combo(combo, "simplex");
            if (g_sign == 0) continue;  // ray parallel to h
            Rational a = -val;
            if (sign_of(a) != g_sign) continue;  // lambda < 0
            cands.push_back({static_cast<int>(i), std::move(a), std::move(beta), g_sign});
        }
        if (cands.empty())
            throw InconsistentSigma("ray shoot found no hyperplane ahead: sigma data inconsistent");

        // Running minimum with exact tie collection; a single three-valued
        // sign query compares two lambdas.
        std::size_t champ = 0;
        std::vector<std::size_t> ties;
        for (std::size_t i = 1; i < cands.size(); ++i) {
            const auto& ci = cands[i];
            const auto& cc = cands[champ];
            // sign(lambda_i - lambda_champ) =
            //   sign(A_i g_c - A_c g_i) * g_sign_i * g_sign_c
            combo.clear();
            direction_combo(ctx_.inequalities[cc.idx], cc.beta, base, dim_, combo);
            for (auto& [row, coeff] : combo) coeff *= ci.a;
            direction_combo(ctx_.inequalities[ci.idx], ci.beta, base, dim_, combo2);
            for (auto& [row, coeff] : combo2) combo.emplace_back(row, coeff * -cc.a);
            int raw = state.f_sign * oracle_.ask_combo(combo, "simplex");
            int rel = raw * ci.g_sign * cc.g_sign;
            if (rel < 0) {
                champ = i;
                ties.clear();  // ties were against a strictly larger lambda
            } else if (rel == 0) {
                ties.push_back(i);
            }
        }
        // champ only ever moves to a strictly smaller lambda and clears the
        // tie list, so every surviving tie is against the final champion.
        std::vector<std::size_t> hit{champ};
        hit.insert(hit.end(), ties.begin(), ties.end());

        advance_state(nu, cands[champ], state);
        apply_hit_set(hit, cands);
    }

    // state' for q^(s+1) = nu + (A/g) (q^(s) - nu), multiplying through by g:
    //   F'      = g F           = d.(F q) + beta F
    //   F' q'   = (F g) nu + A (F q) - A nu F
    void advance_state(const Point& nu, const detail::RayCandidate& theta, RayShootState& s) {
        const Hyperplane* h = ctx_.inequalities[theta.idx];
        std::vector<Rational> f_row(dim_);
        Rational f_beta = theta.beta * s.f_beta;
        for (int j = 0; j < dim_; ++j) f_row[j] = theta.beta * s.f_row[j];
        for (const auto& [i, c] : h->normal) {
            for (int j = 0; j < dim_; ++j) f_row[j] += c * s.q_rows[i][j];
            f_beta += c * s.q_beta[i];
        }
        std::vector<std::vector<Rational>> q_rows(dim_, std::vector<Rational>(dim_));
        std::vector<Rational> q_beta(dim_);
        for (int j = 0; j < dim_; ++j) {
            const Rational& nuj = nu.coords[j];
            for (int x = 0; x < dim_; ++x)
                q_rows[j][x] = nuj * (f_row[x] - theta.a * s.f_row[x]) + theta.a * s.q_rows[j][x];
            q_beta[j] = nuj * (f_beta - theta.a * s.f_beta) + theta.a * s.q_beta[j];
        }
        s.q_rows = std::move(q_rows);
        s.q_beta = std::move(q_beta);
        s.f_row = std::move(f_row);
        s.f_beta = std::move(f_beta);
        s.f_sign *= theta.g_sign;
        s.factor_signs.push_back(theta.g_sign);
        normalize_scale(s);
    }

    // Divides every form by the common content; a single positive scalar on
    // (F, F q) keeps all signs and ratios intact and bounds coefficient
    // growth across levels.
    static void normalize_scale(RayShootState& s) {
        Integer den_lcm = 1;
        auto lcm_in = [&](const Rational& r) {
            mpz_lcm(den_lcm.get_mpz_t(), den_lcm.get_mpz_t(), r.get_den().get_mpz_t());
        };
        for (const auto& row : s.q_rows)
            for (const auto& x : row) lcm_in(x);
        for (const auto& x : s.q_beta) lcm_in(x);
        for (const auto& x : s.f_row) lcm_in(x);
        lcm_in(s.f_beta);
        Integer content = 0;
        auto gcd_in = [&](const Rational& r) {
            if (sign_of(r) == 0) return;
            Integer scaled = r.get_num() * (den_lcm / r.get_den());
            mpz_gcd(content.get_mpz_t(), content.get_mpz_t(), scaled.get_mpz_t());
        };
        for (const auto& row : s.q_rows)
            for (const auto& x : row) gcd_in(x);
        for (const auto& x : s.q_beta) gcd_in(x);
        for (const auto& x : s.f_row) gcd_in(x);
        gcd_in(s.f_beta);
        if (sign_of(content) == 0) return;
        Rational scale = make_rational(den_lcm, content);
        if (scale == 1) return;
        for (auto& row : s.q_rows)
            for (auto& x : row) x *= scale;
        for (auto& x : s.q_beta) x *= scale;
        for (auto& x : s.f_row) x *= scale;
        s.f_beta *= scale;
    }

    void apply_hit_set(std::span<const std::size_t> hit, std::span<const detail::RayCandidate> cands) {
        std::vector<const Hyperplane*> theta_planes;
        std::vector<bool> drop(ctx_.inequalities.size(), false);
        for (std::size_t t : hit) {
            drop[cands[t].idx] = true;
            theta_planes.push_back(ctx_.inequalities[cands[t].idx]);
        }
        ctx_.equalities = extend_general_position(ctx_.equalities, theta_planes, dim_);
        std::vector<const Hyperplane*> keep;
        std::vector<int> keep_signs;
        for (std::size_t i = 0; i < ctx_.inequalities.size(); ++i) {
            if (drop[i]) continue;
            keep.push_back(ctx_.inequalities[i]);
            keep_signs.push_back(ctx_.signs[i]);
        }
        ctx_.inequalities = std::move(keep);
        ctx_.signs = std::move(keep_signs);
    }

    SignOracle& oracle_;
    CellContext ctx_;
    Rng& rng_;
    BuildStats* stats_;
    int dim_;
    std::vector<Hyperplane> cube_;
};

} // namespace detail

// Algorithm entry point: a simplex whose vertices are vertices of the cell
// described by ctx, containing the hidden point in its relative interior.
// Uses O(dim * |inequalities|) linear queries.
inline Simplex build_simplex(SignOracle& oracle, CellContext ctx, Rng& rng,
                             BuildStats* stats = nullptr) {
    if (!oracle.normalized()) throw OracleError("build_simplex requires a normalized oracle");
    detail::SimplexBuilder b(oracle, std::move(ctx), rng, stats);
    return b.build();
}

} // namespace ksum
