#pragma once

// Point-location solver: locate the hidden input among the k-SUM hyperplanes
// by repeated net draw, cell location, simplex construction and pruning, with
// a verified fraction bound per round (net redraw on failure, so correctness
// never depends on the net constant). A two-phase mode defers pruning of the
// full implicit arrangement to query-free segment/containment kernels.

#include <deque>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "ksum/exact.hpp"
#include "ksum/geometry.hpp"
#include "ksum/instance.hpp"
#include "ksum/kernels.hpp"
#include "ksum/lp.hpp"
#include "ksum/net_sampling.hpp"
#include "ksum/oracle.hpp"
#include "ksum/rng.hpp"
#include "ksum/simplex_build.hpp"

namespace ksum {

// Refuse to materialize implicit hyperplane sets beyond this.
inline constexpr long kMaterializeGuard = 10'000'000;

struct SolveConfig {
    Rational epsilon = Rational(1, 2);
    Rational net_constant = Rational(1);
    long base_case_threshold = 64;
    int max_retries = 32;
    std::uint64_t rng_seed = 1;
    bool enumerate_all = true;  // false: may stop at the first witness
};

struct RoundRow {
    Integer before;
    Integer after;
    long net = 0;
};

struct BlockedStats {
    int b = 0;
    long cells_tested = 0;
    long cells_hit = 0;
    std::vector<std::pair<std::vector<int>, long>> per_cell;  // cell tuple -> witness count
};

struct SolverReport {
    bool ok = true;
    std::string error;
    bool yes = false;
    std::vector<std::vector<int>> witnesses;
    long rounds = 0;
    long retries = 0;
    std::vector<RoundRow> per_round;
    std::uint64_t seed = 0;
    long objective_retries = 0;
    QueryTranscript transcript;
    std::optional<BlockedStats> blocked;
};

struct SolverError : std::runtime_error {
    explicit SolverError(const std::string& w) : std::runtime_error(w) {}
};

// One sigma query per hyperplane, phase-tagged.
inline std::vector<int> locate_in_net(SignOracle& oracle, std::span<const Hyperplane* const> planes,
                                      std::string_view phase = "net-location") {
    std::vector<int> sigmas(planes.size());
    for (std::size_t i = 0; i < planes.size(); ++i)
        sigmas[i] = oracle.ask_affine_sparse(planes[i]->normal, planes[i]->offset, phase);
    return sigmas;
}

namespace detail {

struct SolveOutcome {
    std::set<std::vector<int>> witnesses;
    long rounds = 0;
    long retries = 0;
    std::vector<RoundRow> per_round;
    long objective_retries = 0;
    bool early_stop = false;
};

struct SolveExtras {
    std::vector<Simplex> saved_simplices;
    std::deque<std::pair<Hyperplane, int>> survivors;  // base-case members with nonzero sigma
};

inline long net_size_clamped(int n, const Rational& eps, const Rational& constant) {
    Integer sz = net_size(n, eps, constant);
    if (sz > Integer(kMaterializeGuard)) return kMaterializeGuard;
    return sz.get_si();
}

inline std::vector<Hyperplane> materialize_instance(const KSumInstance& inst) {
    Integer cnt = count_implicit(inst.n, inst.alpha, inst.distinct);
    if (cnt > Integer(kMaterializeGuard))
        throw SolverError("instance too large to materialize (" + to_string(cnt) +
                          " hyperplanes); this mode maintains the list explicitly");
    return enumerate_implicit(inst.n, inst.k, inst.alpha, inst.c, inst.distinct, inst.lifted())
        .members;
}

// All-zero input: every assignment evaluates to c, so the answer is forced.
inline bool handle_degenerate(SignOracle& oracle, const KSumInstance& inst,
                              const std::vector<Hyperplane>& hs, SolveOutcome& out) {
    if (!oracle.certificate().degenerate) return false;
    if (sign_of(inst.c) == 0)
        for (const auto& h : hs) out.witnesses.insert(h.tuple);
    out.per_round.push_back({Integer(static_cast<long>(hs.size())), Integer(0), 0});
    out.rounds += 1;
    return true;
}

// The naive driver on an explicit hyperplane list. Boundary sigmas are
// queried once by the caller and shared across rounds.
inline void solve_explicit(SignOracle& oracle, const KSumInstance& inst, const SolveConfig& cfg,
                           std::vector<Hyperplane> current, std::span<const Hyperplane> boundary,
                           std::span<const int> boundary_sigma, Rng& rng, SolveOutcome& out,
                           SolveExtras* extras = nullptr) {
    const int dim = oracle.space_dim();
    const long eff_base =
        std::max(cfg.base_case_threshold, net_size_clamped(inst.n, cfg.epsilon, cfg.net_constant));

    while (true) {
        const long cnt = static_cast<long>(current.size());
        if (cnt <= eff_base) {
            // Base case: one k-linear query per surviving hyperplane beats
            // drawing a net at least this large.
            for (const auto& h : current) {
                int s = oracle.ask_affine_sparse(h.normal, h.offset, "base-case");
                if (s == 0) {
                    out.witnesses.insert(h.tuple);
                    if (!cfg.enumerate_all) {
                        out.early_stop = true;
                        break;
                    }
                } else if (extras) {
                    extras->survivors.emplace_back(h, s);
                }
            }
            out.per_round.push_back({Integer(cnt), Integer(0), 0});
            out.rounds += 1;
            return;
        }

        const long net_target = net_size_clamped(inst.n, cfg.epsilon, cfg.net_constant);
        int attempt = 0;
        while (true) {
            // Net: independent uniform draws over the current set, distinct kept.
            std::set<int> picked;
            for (long d = 0; d < net_target; ++d)
                picked.insert(static_cast<int>(rng.below(static_cast<std::uint64_t>(cnt))));
            std::vector<const Hyperplane*> net_planes;
            net_planes.reserve(picked.size() + boundary.size());
            for (int idx : picked) net_planes.push_back(&current[idx]);

            std::vector<int> net_sigma = locate_in_net(oracle, net_planes);
            CellContext ctx;
            std::vector<const Hyperplane*> zero_pool;
            for (std::size_t i = 0; i < boundary.size(); ++i) {
                if (boundary_sigma[i] == 0)
                    zero_pool.push_back(&boundary[i]);
                else {
                    ctx.inequalities.push_back(&boundary[i]);
                    ctx.signs.push_back(boundary_sigma[i]);
                }
            }
            for (std::size_t i = 0; i < net_planes.size(); ++i) {
                if (net_sigma[i] == 0) {
                    out.witnesses.insert(net_planes[i]->tuple);
                    zero_pool.push_back(net_planes[i]);
                } else {
                    ctx.inequalities.push_back(net_planes[i]);
                    ctx.signs.push_back(net_sigma[i]);
                }
            }
            if (!cfg.enumerate_all && !out.witnesses.empty()) {
                out.early_stop = true;
                return;
            }
            ctx.equalities = extend_general_position({}, zero_pool, dim);

            BuildStats bstats;
            Simplex simplex = build_simplex(oracle, std::move(ctx), rng, &bstats);
            out.objective_retries += bstats.objective_retries;

            // Prune: keep interior crossers, output containing hyperplanes.
            // (Containment means sigma = 0 no matter whether the round is
            // accepted, so witnesses are recorded either way.)
            std::vector<int> cross_idx;
            for (std::size_t i = 0; i < current.size(); ++i) {
                switch (simplex_relation(current[i], simplex)) {
                    case SimplexRelation::ContainsSimplex:
                        out.witnesses.insert(current[i].tuple);
                        break;
                    case SimplexRelation::CrossesInterior:
                        cross_idx.push_back(static_cast<int>(i));
                        break;
                    case SimplexRelation::AvoidsInterior:
                        break;
                }
            }
            Rational frac = Rational(static_cast<long>(cross_idx.size())) -
                            cfg.epsilon * Rational(cnt);
            if (sign_of(frac) <= 0) {
                if (extras) extras->saved_simplices.push_back(simplex);
                out.per_round.push_back(
                    {Integer(cnt), Integer(static_cast<long>(cross_idx.size())),
                     static_cast<long>(net_planes.size())});
                out.rounds += 1;
                std::vector<Hyperplane> kept;
                kept.reserve(cross_idx.size());
                for (int i : cross_idx) kept.push_back(std::move(current[i]));
                current = std::move(kept);
                break;
            }
            out.retries += 1;
            if (++attempt > cfg.max_retries)
                throw SolverError("net verification failed " + std::to_string(attempt) + " times");
        }
        if (!cfg.enumerate_all && !out.witnesses.empty()) {
            out.early_stop = true;
            return;
        }
    }
}

// Exact bounding description of a (possibly lower-dimensional) simplex that
// contains the hidden point in its relative interior: the affine hull as
// equality hyperplanes plus one relative-facet hyperplane per vertex, with
// the interior side known from the opposite vertex. No queries.
inline void append_simplex_bounds(const Simplex& s, int dim, std::deque<Hyperplane>& storage,
                                  CellContext& ctx, std::vector<const Hyperplane*>& zero_pool) {
    const auto& vs = s.vertices;
    const int m = static_cast<int>(vs.size()) - 1;
    auto push_plane = [&](std::vector<Rational> dense, Rational offset, int sig) {
        Hyperplane h;
        h.kind = Hyperplane::Kind::Derived;
        h.offset = std::move(offset);
        for (int i = 0; i < dim; ++i)
            if (sign_of(dense[i]) != 0) h.normal.emplace_back(i, std::move(dense[i]));
        if (h.normal.empty()) return;
        storage.push_back(std::move(h));
        if (sig == 0) {
            zero_pool.push_back(&storage.back());
        } else {
            ctx.inequalities.push_back(&storage.back());
            ctx.signs.push_back(sig);
        }
    };

    if (m == 0) {
        // A point: the hidden point is exactly here; pin every axis.
        for (int j = 0; j < dim; ++j) {
            std::vector<Rational> dense(dim);
            dense[j] = 1;
            push_plane(std::move(dense), Rational(-vs[0].coords[j]), 0);
        }
        return;
    }

    std::vector<std::vector<Rational>> hull_dirs(m, std::vector<Rational>(dim));
    for (int i = 1; i <= m; ++i)
        for (int j = 0; j < dim; ++j) hull_dirs[i - 1][j] = vs[i].coords[j] - vs[0].coords[j];

    for (const auto& w : null_space(hull_dirs, dim)) {
        Rational off(0);
        for (int j = 0; j < dim; ++j) off -= w[j] * vs[0].coords[j];
        push_plane(w, std::move(off), 0);
    }

    // Facet opposite vertex j: the unique (up to scale) direction within the
    // hull orthogonal to the facet, via the Gram system over hull directions.
    for (int j = 0; j <= m; ++j) {
        int anchor = j == 0 ? 1 : 0;
        std::vector<std::vector<Rational>> gram;
        for (int t = 0; t <= m; ++t) {
            if (t == j || t == anchor) continue;
            std::vector<Rational> row(m);
            for (int i = 1; i <= m; ++i) {
                Rational acc(0);
                for (int x = 0; x < dim; ++x)
                    acc += hull_dirs[i - 1][x] * (vs[t].coords[x] - vs[anchor].coords[x]);
                row[i - 1] = std::move(acc);
            }
            gram.push_back(std::move(row));
        }
        auto lambdas = null_space(gram, m);
        if (lambdas.size() != 1)
            throw SolverError("degenerate saved simplex: facet normal not unique");
        std::vector<Rational> w(dim);
        for (int i = 1; i <= m; ++i)
            if (sign_of(lambdas[0][i - 1]) != 0)
                for (int x = 0; x < dim; ++x) w[x] += lambdas[0][i - 1] * hull_dirs[i - 1][x];
        Rational off(0);
        for (int x = 0; x < dim; ++x) off -= w[x] * vs[anchor].coords[x];
        Rational at_j = off;
        for (int x = 0; x < dim; ++x) at_j += w[x] * vs[j].coords[x];
        int sig = sign_of(at_j);
        if (sig == 0) throw SolverError("degenerate saved simplex: vertex on its own facet");
        push_plane(std::move(w), std::move(off), sig);
    }
}

inline SolverReport finish_report(SignOracle& oracle, const SolveOutcome& out, std::uint64_t seed) {
    SolverReport r;
    r.yes = !out.witnesses.empty();
    r.witnesses.assign(out.witnesses.begin(), out.witnesses.end());
    r.rounds = out.rounds;
    r.retries = out.retries;
    r.per_round = out.per_round;
    r.seed = seed;
    r.objective_retries = out.objective_retries;
    r.transcript = oracle.transcript();
    return r;
}

inline SolverReport error_report(SignOracle& oracle, std::uint64_t seed, const std::string& what) {
    SolverReport r;
    r.ok = false;
    r.error = what;
    r.seed = seed;
    r.transcript = oracle.transcript();
    return r;
}

} // namespace detail

// Meiser mode: materializes the implicit arrangement once, then runs the
// net / locate / simplex / verified-prune loop to the base case.
inline SolverReport solve(SignOracle& oracle, const KSumInstance& inst, const SolveConfig& cfg) {
    inst.validate();
    Rng rng(cfg.rng_seed);
    detail::SolveOutcome out;
    try {
        std::vector<Hyperplane> all = detail::materialize_instance(inst);
        oracle.normalize();
        if (!detail::handle_degenerate(oracle, inst, all, out)) {
            const int dim = oracle.space_dim();
            std::vector<Hyperplane> boundary = boundary_set(dim);
            std::vector<const Hyperplane*> bptr;
            for (const auto& b : boundary) bptr.push_back(&b);
            std::vector<int> bsig = locate_in_net(oracle, bptr);
            detail::solve_explicit(oracle, inst, cfg, std::move(all), boundary, bsig, rng, out);
        }
    } catch (const std::exception& e) {
        return detail::error_report(oracle, cfg.rng_seed, e.what());
    }
    return detail::finish_report(oracle, out, cfg.rng_seed);
}

// Two-phase mode: phase 1 locates the input within one large net N
// (eps = 1/ceil(n^(k/2))), saving every accepted simplex; phase 2 builds one
// simplex avoiding all of N from the saved simplices' bounding hyperplanes
// plus the phase-1 survivors; phase 3 prunes the full implicit arrangement
// against it with the query-free segment/containment kernels; phase 4 solves
// the small remainder.
inline SolverReport solve_two_phase(SignOracle& oracle, const KSumInstance& inst,
                                    const SolveConfig& cfg) {
    inst.validate();
    Rng rng(cfg.rng_seed);
    detail::SolveOutcome out;
    try {
        if (!inst.uniform_alpha())
            throw SolverError("two-phase mode requires uniform coefficients");
        oracle.normalize();
        if (oracle.certificate().degenerate) {
            std::vector<Hyperplane> all = detail::materialize_instance(inst);
            detail::handle_degenerate(oracle, inst, all, out);
            return detail::finish_report(oracle, out, cfg.rng_seed);
        }

        const int dim = oracle.space_dim();
        const Integer total = count_implicit(inst.n, inst.alpha, inst.distinct);
        // eps = 1 / ceil(n^(k/2))
        Integer nk = int_pow(Integer(inst.n), static_cast<unsigned long>(inst.k));
        Integer root;
        mpz_sqrt(root.get_mpz_t(), nk.get_mpz_t());
        if (root * root < nk) root += 1;
        if (root < 2) root = 2;
        Rational eps2 = make_rational(Integer(1), root);
        Integer big_net = net_size(inst.n, eps2, cfg.net_constant);

        std::vector<Hyperplane> boundary = boundary_set(dim);
        std::vector<const Hyperplane*> bptr;
        for (const auto& b : boundary) bptr.push_back(&b);
        std::vector<int> bsig = locate_in_net(oracle, bptr);

        const Rational uniform_a = inst.alpha[0];
        int attempt = 0;
        while (true) {
            // --- phase 1: locate within the large net ---
            std::vector<Hyperplane> net;
            if (big_net >= total) {
                net = detail::materialize_instance(inst);
            } else {
                if (big_net > Integer(kMaterializeGuard))
                    throw SolverError("phase-1 net too large (" + to_string(big_net) + ")");
                net = draw_net(inst.n, inst.k, inst.alpha, inst.c, big_net.get_si(), rng,
                               inst.distinct, inst.lifted())
                          .members;
            }
            detail::SolveExtras extras;
            detail::solve_explicit(oracle, inst, cfg, net, boundary, bsig, rng, out, &extras);
            if (!cfg.enumerate_all && !out.witnesses.empty()) break;

            // --- phase 2: one simplex avoiding every net member ---
            std::deque<Hyperplane> derived;
            CellContext ctx;
            std::vector<const Hyperplane*> zero_pool;
            for (std::size_t i = 0; i < boundary.size(); ++i) {
                if (bsig[i] == 0)
                    zero_pool.push_back(&boundary[i]);
                else {
                    ctx.inequalities.push_back(&boundary[i]);
                    ctx.signs.push_back(bsig[i]);
                }
            }
            for (const auto& s : extras.saved_simplices)
                detail::append_simplex_bounds(s, dim, derived, ctx, zero_pool);
            for (const auto& [h, s] : extras.survivors) {
                ctx.inequalities.push_back(&h);
                ctx.signs.push_back(s);
            }
            for (const auto& w : out.witnesses) {
                derived.push_back(
                    hyperplane_for_assignment(w, inst.alpha, inst.c, dim, inst.lifted()));
                zero_pool.push_back(&derived.back());
            }
            ctx.equalities = extend_general_position({}, zero_pool, dim);
            BuildStats bstats;
            Simplex final_simplex = build_simplex(oracle, std::move(ctx), rng, &bstats);
            out.objective_retries += bstats.objective_retries;

            // --- phase 3: query-free pruning of the full arrangement ---
            long queries_before = oracle.transcript().total;
            std::vector<Point> pts;
            std::vector<Rational> offs;
            for (const auto& v : final_simplex.vertices) {
                Point p;
                p.coords.assign(v.coords.begin(), v.coords.begin() + inst.n);
                pts.push_back(std::move(p));
                offs.push_back(inst.lifted() ? Rational(inst.c * v.coords[inst.n] / uniform_a)
                                             : Rational(0));
            }
            std::set<std::vector<int>> crossing;
            SegmentSweeper sweeper(pts, inst.k, offs, inst.distinct);
            for (std::size_t i = 0; i < pts.size(); ++i)
                for (std::size_t j = i + 1; j < pts.size(); ++j)
                    sweeper.enumerate_pair(static_cast<int>(i), static_cast<int>(j),
                                           [&](std::span<const int> t) {
                                               crossing.emplace(t.begin(), t.end());
                                           });
            std::vector<Rational> targets;
            for (const auto& o : offs) targets.push_back(-o);
            MultipleKsumResult containing =
                multiple_ksum_decide(pts, inst.k, targets, inst.distinct);
            for (auto& t : containing.tuples) out.witnesses.insert(std::move(t));
            if (oracle.transcript().total != queries_before)
                throw SolverError("pruning phase issued queries");

            Rational frac =
                Rational(static_cast<long>(crossing.size())) - eps2 * Rational(total);
            if (sign_of(frac) <= 0) {
                out.per_round.push_back({total, Integer(static_cast<long>(crossing.size())),
                                         static_cast<long>(net.size())});
                out.rounds += 1;

                // --- phase 4: solve the remainder ---
                std::vector<Hyperplane> rest;
                for (const auto& t : crossing)
                    rest.push_back(
                        hyperplane_for_assignment(t, inst.alpha, inst.c, dim, inst.lifted()));
                detail::solve_explicit(oracle, inst, cfg, std::move(rest), boundary, bsig, rng,
                                       out);
                break;
            }
            out.retries += 1;
            if (++attempt > cfg.max_retries)
                throw SolverError("two-phase verification failed " + std::to_string(attempt) +
                                  " times");
        }
    } catch (const std::exception& e) {
        return detail::error_report(oracle, cfg.rng_seed, e.what());
    }
    return detail::finish_report(oracle, out, cfg.rng_seed);
}

// Open-book baselines.
inline SolverReport run_brute(SignOracle& oracle, const KSumInstance& inst) {
    inst.validate();
    const auto& values = oracle.open_book_read(OpenBookAccess{});
    DecisionResult d = brute_force_decide(values, inst.k, inst.alpha, inst.c, inst.distinct);
    SolverReport r;
    r.yes = d.yes;
    r.witnesses = std::move(d.witnesses);
    r.transcript = oracle.transcript();
    return r;
}

inline SolverReport run_meet_in_middle(SignOracle& oracle, const KSumInstance& inst) {
    inst.validate();
    const auto& values = oracle.open_book_read(OpenBookAccess{});
    DecisionResult d = meet_in_middle_decide(values, inst.k, inst.alpha, inst.c, inst.distinct);
    SolverReport r;
    r.yes = d.yes;
    r.witnesses = std::move(d.witnesses);
    r.transcript = oracle.transcript();
    return r;
}

} // namespace ksum
