// Acceptance suite: one pass/fail line per criterion, exit code = number of
// failed criteria. Long-running; prints progress to stderr.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <map>
#include <set>
#include <vector>

#include "ksum/blocking.hpp"
#include "ksum/net_sampling.hpp"
#include "ksum/simplex_build.hpp"
#include "ksum/solver.hpp"

using namespace ksum;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;

void report(int criterion, bool pass, const std::string& what) {
    if (!pass) ++failures;
    std::printf("criterion %2d: %s  %s\n", criterion, pass ? "PASS" : "FAIL", what.c_str());
    std::fflush(stdout);
}

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

constexpr std::string_view kSizeExempt[] = {"sort", "normalize"};

struct SuiteData {
    long instances = 0;
    long failures_equivalence = 0;
    long open_book_violations = 0;
    long size_cap_violations = 0;
    long blocked_runs = 0;
    long attribution_violations = 0;
    long accepted_rounds = 0;
    long fraction_violations = 0;
    long total_rounds = 0;
    long total_retries = 0;
    double elapsed = 0;
};

SuiteData run_equivalence_suite() {
    SuiteData data;
    auto t0 = Clock::now();
    const int ks[] = {3, 4, 5};
    const int ns[] = {6, 7, 8, 9, 10, 11, 12, 13, 14};
    const GenProfile profiles[] = {GenProfile::Planted, GenProfile::None, GenProfile::Zeros,
                                   GenProfile::Duplicates};
    const std::uint64_t base_seed = 20240808;

    for (long i = 0; i < 500; ++i) {
        int k = ks[i % 3];
        int n = ns[(i / 3) % 9];
        GenProfile profile = profiles[(i / 27) % 4];
        std::uint64_t seed = base_seed + static_cast<std::uint64_t>(i) * 7919;

        KSumInstance inst = KSumInstance::pure(n, k);
        Rng gen(seed);
        std::vector<Rational> values = generate_values(inst, profile, gen);
        ++data.instances;

        SolveConfig cfg;
        cfg.rng_seed = seed;

        SignOracle ob = make_oracle(inst, values);
        SolverReport brute = run_brute(ob, inst);

        auto absorb = [&](const SolverReport& r, bool oracle_mode, int cap) {
            bool agree = r.ok && r.yes == brute.yes && r.witnesses == brute.witnesses;
            if (!agree) ++data.failures_equivalence;
            if (oracle_mode && r.transcript.open_book_reads != 0) ++data.open_book_violations;
            if (r.transcript.max_terms_excluding(kSizeExempt) > cap) ++data.size_cap_violations;
            for (const auto& row : r.per_round) {
                ++data.total_rounds;
                if (row.net == 0) continue;
                ++data.accepted_rounds;
                if (Rational(row.after) > cfg.epsilon * Rational(row.before))
                    ++data.fraction_violations;
            }
            data.total_retries += r.retries;
        };

        {
            SignOracle o = make_oracle(inst, values);
            SolverReport r = run_meet_in_middle(o, inst);
            if (!(r.ok && r.yes == brute.yes && r.witnesses == brute.witnesses))
                ++data.failures_equivalence;
        }
        {
            SignOracle o = make_oracle(inst, values);
            absorb(solve(o, inst, cfg), true, n);
        }
        {
            SignOracle o = make_oracle(inst, values);
            absorb(solve_two_phase(o, inst, cfg), true, n);
        }
        for (int b : {2, 3}) {
            SignOracle o = make_oracle(inst, values);
            SolverReport r = solve_blocked(o, inst, b, cfg);
            ++data.blocked_runs;
            absorb(r, true, k * ((n + b - 1) / b));
            if (r.blocked) {
                long attributed = 0;
                for (const auto& [cell, cnt] : r.blocked->per_cell) attributed += cnt;
                // witnesses are a set; exactly-once means attribution counts
                // add up with no duplicate discarded on the way in
                if (attributed != static_cast<long>(r.witnesses.size()))
                    ++data.attribution_violations;
            }
        }
        if (i % 25 == 24) std::fprintf(stderr, "  equivalence suite: %ld/500 (%.0fs)\n", i + 1,
                                       seconds_since(t0));
    }
    data.elapsed = seconds_since(t0);
    return data;
}

void criterion_5() {
    Rng rng(505);
    long cases = 0, mismatches = 0, insertion_violations = 0;
    while (cases < 200) {
        int k = static_cast<int>(rng.range(2, 4));
        int n = static_cast<int>(rng.range(k, 10));
        Point p1, p2;
        for (int i = 0; i < n; ++i) {
            p1.coords.push_back(make_rational(rng.range(-9, 9), rng.range(1, 3)));
            p2.coords.push_back(make_rational(rng.range(-9, 9), rng.range(1, 3)));
        }
        if (p1 == p2) continue;
        ++cases;
        KernelStats stats;
        auto got = double_ksum_enumerate(p1, p2, k, Rational(0), Rational(0), false, &stats);
        std::vector<std::vector<int>> expect;
        for_each_sorted_tuple(0, n, k, false, [&](std::span<const int> t) {
            Rational s1(0), s2(0);
            for (int i : t) {
                s1 += p1.coords[i];
                s2 += p2.coords[i];
            }
            if (sign_of(s1) * sign_of(s2) < 0) expect.emplace_back(t.begin(), t.end());
            return true;
        });
        if (got != expect) ++mismatches;
        if (stats.max_pass_insertions > stats.half_tuples) ++insertion_violations;
    }
    report(5, mismatches == 0 && insertion_violations == 0,
           "double k-SUM kernel: " + std::to_string(cases) + " cases, " +
               std::to_string(mismatches) + " mismatches, " +
               std::to_string(insertion_violations) + " insertion-bound violations");
}

void criterion_6() {
    Rng rng(606);
    long cases = 0, mismatches = 0, carries = 0;
    while (cases < 200) {
        int k = static_cast<int>(rng.range(2, 4));
        int n = static_cast<int>(rng.range(k, 8));
        int d = static_cast<int>(rng.range(1, 3));
        std::vector<Point> pts(d);
        for (auto& p : pts)
            for (int i = 0; i < n; ++i)
                p.coords.push_back(make_rational(rng.range(-9, 9), rng.range(1, 3)));
        std::vector<Rational> targets(d, Rational(0));
        if (rng.below(2)) {  // plant a containing tuple half the time
            std::vector<int> t(k);
            for (auto& x : t) x = static_cast<int>(rng.below(n));
            for (int i = 0; i < d; ++i)
                for (int idx : t) targets[i] += pts[i].coords[idx];
        }
        ++cases;
        bool got;
        try {
            got = multiple_ksum_decide(pts, k, targets).yes;
        } catch (const CarryOverflow&) {
            ++carries;
            continue;
        }
        bool expect = false;
        for_each_sorted_tuple(0, n, k, false, [&](std::span<const int> t) {
            for (int i = 0; i < d; ++i) {
                Rational s(0);
                for (int idx : t) s += pts[i].coords[idx];
                if (s != targets[i]) return true;
            }
            expect = true;
            return false;
        });
        if (got != expect) ++mismatches;
    }
    report(6, mismatches == 0 && carries == 0,
           "multiple k-SUM kernel: " + std::to_string(cases) + " cases, " +
               std::to_string(mismatches) + " mismatches, " + std::to_string(carries) +
               " carry assertions");
}

void criterion_7() {
    auto table = build_table(12, 6);
    bool omega_ok = true;
    for (int n = 1; n <= 12 && omega_ok; ++n)
        for (int k = 1; k <= 6; ++k)
            if (table.at(n, k) !=
                binomial(static_cast<unsigned long>(n + k - 1), static_cast<unsigned long>(k))) {
                omega_ok = false;
                break;
            }
    Rng rng(42);
    std::map<std::vector<int>, long> counts;
    for (long i = 0; i < 70000; ++i) ++counts[draw_sorted_tuple(table, 5, 3, rng)];
    long worst = 0;
    bool uniform_ok = counts.size() == 35;
    for (const auto& [tuple, c] : counts) worst = std::max(worst, std::labs(c - 2000));
    uniform_ok = uniform_ok && worst <= 220;
    report(7, omega_ok && uniform_ok,
           "sampling: omega table exact, 70000 draws, worst deviation " + std::to_string(worst) +
               " (allowed 220)");
}

void criterion_9() {
    Rng master(909);
    long runs = 0, containment_failures = 0, soundness_failures = 0, budget_violations = 0;
    const long locked_constant = 4;
    while (runs < 100) {
        int n = static_cast<int>(master.range(2, 6));
        int k = static_cast<int>(master.range(2, std::min(n, 3)));
        KSumInstance inst = KSumInstance::pure(n, k);
        Rng gen = master.fork(runs);
        std::vector<Rational> values =
            generate_values(inst, master.below(2) ? GenProfile::Planted : GenProfile::Duplicates,
                            gen);
        SignOracle oracle = make_oracle(inst, values);
        oracle.normalize();
        if (oracle.certificate().degenerate) continue;
        ++runs;

        auto all = enumerate_implicit(inst.n, inst.k, inst.alpha, inst.c, false).members;
        std::vector<Hyperplane> planes;
        std::set<int> picked;
        long want = master.range(1, static_cast<long>(all.size()));
        for (long i = 0; i < want; ++i)
            picked.insert(static_cast<int>(master.below(all.size())));
        for (int i : picked) planes.push_back(all[i]);
        for (auto& b : boundary_set(oracle.space_dim())) planes.push_back(std::move(b));

        CellContext ctx;
        std::vector<const Hyperplane*> zero_pool;
        for (const auto& h : planes) {
            int sg = oracle.ask_affine_sparse(h.normal, h.offset, "net-location");
            if (sg == 0)
                zero_pool.push_back(&h);
            else {
                ctx.inequalities.push_back(&h);
                ctx.signs.push_back(sg);
            }
        }
        ctx.equalities = extend_general_position({}, zero_pool, oracle.space_dim());
        auto ineqs = ctx.inequalities;
        auto sigs = ctx.signs;
        auto eqs = ctx.equalities;

        long q0 = oracle.transcript().total;
        Rng rng = master.fork(5000 + runs);
        BuildStats stats;
        Simplex s = build_simplex(oracle, std::move(ctx), rng, &stats);
        long issued = oracle.transcript().total - q0;
        if (issued > locked_constant * oracle.space_dim() *
                         std::max<long>(1, static_cast<long>(ineqs.size())))
            ++budget_violations;

        for (const auto& v : s.vertices) {
            for (std::size_t i = 0; i < ineqs.size(); ++i) {
                int sg = sigma(*ineqs[i], v);
                if (sg != 0 && sg != sigs[i]) ++soundness_failures;
            }
            for (const auto* e : eqs)
                if (sigma(*e, v) != 0) ++soundness_failures;
        }

        // exact barycentric containment of the normalized hidden point
        std::vector<Rational> u = values;
        Rational big(0);
        for (const auto& x : u)
            if (cmp(abs(x), big) > 0) big = abs(x);
        for (auto& x : u) x /= big;
        const int dim = oracle.space_dim();
        const int m = static_cast<int>(s.vertices.size());
        std::vector<std::vector<Rational>> rows;
        for (int j = 0; j < dim; ++j) {
            std::vector<Rational> row(m + 1);
            for (int v = 0; v < m; ++v) row[v] = s.vertices[v].coords[j];
            row[m] = u[j];
            rows.push_back(std::move(row));
        }
        rows.emplace_back(m + 1, Rational(1));
        std::vector<int> pivots;
        echelonize(rows, &pivots);
        bool inside = true;
        std::vector<Rational> lambda(m, Rational(0));
        for (std::size_t p = 0; p < pivots.size(); ++p) {
            if (pivots[p] == m) inside = false;
            else lambda[pivots[p]] = rows[p][m] / rows[p][pivots[p]];
        }
        if (inside)
            for (int v = 0; v < m; ++v)
                if (sign_of(lambda[v]) <= 0) inside = false;
        if (inside) {
            for (int j = 0; j < dim && inside; ++j) {
                Rational acc(0);
                for (int v = 0; v < m; ++v) acc += lambda[v] * s.vertices[v].coords[j];
                if (acc != u[j]) inside = false;
            }
        }
        if (!inside) ++containment_failures;
    }
    report(9, containment_failures == 0 && soundness_failures == 0 && budget_violations == 0,
           "simplex soundness: 100 runs, " + std::to_string(containment_failures) +
               " containment / " + std::to_string(soundness_failures) + " cell / " +
               std::to_string(budget_violations) + " budget violations (C=4)");
}

void criterion_10() {
    const std::map<int, long> locked = {{8, 361}, {12, 1412}, {16, 3939}, {20, 8934}};
    bool ok = true;
    std::string detail;
    for (const auto& [n, baseline] : locked) {
        KSumInstance inst = KSumInstance::pure(n, 4);
        Rng gen(900 + n);
        std::vector<Rational> values = generate_values(inst, GenProfile::Planted, gen);
        SignOracle oracle = make_oracle(inst, values);
        SolveConfig cfg;
        cfg.rng_seed = 1;
        SolverReport r = solve(oracle, inst, cfg);
        bool within = r.ok && r.transcript.total * 5 <= baseline * 6 &&
                      r.transcript.total * 6 >= baseline * 5;
        if (!within) ok = false;
        detail += " n=" + std::to_string(n) + ":" + std::to_string(r.transcript.total) + "/" +
                  std::to_string(baseline);
    }
    report(10, ok, "query-count regression (1.2x of locked baseline):" + detail);
}

} // namespace

int main() {
    std::fprintf(stderr, "running equivalence suite (criteria 1-4, 8)...\n");
    SuiteData d = run_equivalence_suite();

    report(1, d.failures_equivalence == 0 && d.elapsed < 600.0,
           "oracle equivalence: " + std::to_string(d.instances) + " instances x 6 modes, " +
               std::to_string(d.failures_equivalence) + " disagreements, " +
               std::to_string(d.elapsed).substr(0, 5) + "s (< 600s)");
    report(2, d.open_book_violations == 0,
           "query-model purity: " + std::to_string(d.open_book_violations) +
               " open-book reads in oracle-mode runs");
    report(3, d.size_cap_violations == 0,
           "query-size caps: " + std::to_string(d.size_cap_violations) + " violations");
    report(4, d.attribution_violations == 0,
           "exactly-once attribution: " + std::to_string(d.blocked_runs) + " blocked runs, " +
               std::to_string(d.attribution_violations) + " violations");

    criterion_5();
    criterion_6();
    criterion_7();

    {
        double retry_rate =
            d.total_rounds == 0 ? 0.0
                                : 100.0 * static_cast<double>(d.total_retries) /
                                      static_cast<double>(d.total_rounds);
        bool pass = d.fraction_violations == 0;
        std::string note = "accepted rounds " + std::to_string(d.accepted_rounds) + ", fraction violations " +
                           std::to_string(d.fraction_violations) + ", retry rate " +
                           std::to_string(retry_rate).substr(0, 4) + "%";
        if (retry_rate > 5.0) note += " (above 5%: retune the net constant)";
        report(8, pass, "Las Vegas contract: " + note);
    }

    criterion_9();
    criterion_10();

    std::printf("%s: %d criteria failed\n", failures == 0 ? "ALL PASS" : "RESULT", failures);
    return failures;
}
