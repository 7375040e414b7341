#include <catch2/catch.hpp>

#include <set>

#include "ksum/kernels.hpp"
#include "ksum/rng.hpp"

using namespace ksum;

namespace {

std::vector<Rational> ones(int k) { return std::vector<Rational>(k, Rational(1)); }

std::vector<Rational> rvals(Rng& rng, int n, long num = 12, long den = 3) {
    std::vector<Rational> v(n);
    for (auto& x : v) x = make_rational(rng.range(-num, num), rng.range(1, den));
    return v;
}

Point rpoint(Rng& rng, int n) {
    Point p;
    p.coords = rvals(rng, n, 6, 3);
    return p;
}

// brute-force oracle for the segment kernel
std::vector<std::vector<int>> brute_segment(const Point& p1, const Point& p2, int k,
                                            const Rational& c1, const Rational& c2, bool distinct) {
    std::vector<std::vector<int>> out;
    for_each_sorted_tuple(0, p1.dim(), k, distinct, [&](std::span<const int> t) {
        Rational s1 = c1, s2 = c2;
        for (int i : t) {
            s1 += p1.coords[i];
            s2 += p2.coords[i];
        }
        if (sign_of(s1) * sign_of(s2) < 0) out.emplace_back(t.begin(), t.end());
        return true;
    });
    return out;
}

// brute-force oracle for the containment kernel
bool brute_multiple(std::span<const Point> pts, int k, std::span<const Rational> targets,
                    bool distinct) {
    bool found = false;
    for_each_sorted_tuple(0, pts[0].dim(), k, distinct, [&](std::span<const int> t) {
        for (std::size_t i = 0; i < pts.size(); ++i) {
            Rational s(0);
            for (int idx : t) s += pts[i].coords[idx];
            if (s != targets[i]) return true;
        }
        found = true;
        return false;
    });
    return found;
}

} // namespace

TEST_CASE("brute force examples") {
    std::vector<Rational> v{Rational(1), Rational(2), Rational(-3)};
    auto r = brute_force_decide(v, 3, ones(3), Rational(0), false);
    CHECK(r.yes);
    REQUIRE(r.witnesses.size() == 1);
    CHECK(r.witnesses[0] == std::vector<int>{0, 1, 2});

    std::vector<Rational> v2{Rational(1), Rational(2), Rational(4)};
    CHECK_FALSE(brute_force_decide(v2, 3, ones(3), Rational(0), true).yes);

    std::vector<Rational> zeros(4, Rational(0));
    auto rz = brute_force_decide(zeros, 2, ones(2), Rational(0), false);
    CHECK(rz.yes);
    CHECK(rz.witnesses.size() == 10);  // all multisets
}

TEST_CASE("meet in the middle equals brute force") {
    std::vector<Rational> v{Rational(1), Rational(2), Rational(-3)};
    CHECK(meet_in_middle_decide(v, 3, ones(3), Rational(0)).yes);

    Rng rng(31);
    for (int rep = 0; rep < 200; ++rep) {
        int k = static_cast<int>(rng.range(2, 5));
        int n = static_cast<int>(rng.range(k, 9));
        bool distinct = rng.below(2) == 1;
        std::vector<Rational> alpha(k);
        bool uniform = distinct || rng.below(2) == 1;
        for (int j = 0; j < k; ++j)
            alpha[j] = uniform ? Rational(1) : Rational(rng.range(1, 3));
        Rational c = rng.below(2) ? Rational(0) : make_rational(rng.range(-3, 3), 1);
        auto values = rvals(rng, n, 6, 2);
        auto expect = brute_force_decide(values, k, alpha, c, distinct);
        auto got = meet_in_middle_decide(values, k, alpha, c, distinct);
        REQUIRE(got.yes == expect.yes);
        REQUIRE(got.witnesses == expect.witnesses);
    }

    // n == k: single tuple, consistent with direct evaluation
    std::vector<Rational> tight{Rational(2), Rational(-1), Rational(-1)};
    CHECK(meet_in_middle_decide(tight, 3, ones(3), Rational(0), true).yes);
}

TEST_CASE("integer k-SUM") {
    std::vector<Integer> a{Integer(5), Integer(-5)};
    CHECK(integer_ksum(a, 2));
    std::vector<Integer> b{Integer(1), Integer(1), Integer(1)};
    CHECK_FALSE(integer_ksum(b, 3));

    Rng rng(47);
    for (int rep = 0; rep < 150; ++rep) {
        int k = static_cast<int>(rng.range(2, 4));
        int n = static_cast<int>(rng.range(k, 8));
        std::vector<Integer> vals(n);
        std::vector<Rational> as_rat(n);
        for (int i = 0; i < n; ++i) {
            long x = rng.range(-8, 8);
            vals[i] = x;
            as_rat[i] = x;
        }
        bool expect = brute_force_decide(as_rat, k, ones(k), Rational(0), false).yes;
        CHECK(integer_ksum(vals, k) == expect);
    }

    // 64-bit-scale values, half with a planted zero triple
    for (int rep = 0; rep < 40; ++rep) {
        int n = static_cast<int>(rng.range(3, 8));
        std::vector<Integer> vals(n);
        for (auto& v : vals) {
            Integer hi(static_cast<unsigned long>(rng.next() >> 2));
            v = rng.below(2) ? hi : Integer(-hi);
        }
        if (rng.below(2)) vals[n - 1] = -(vals[0] + vals[1]);
        std::vector<Rational> as_rat(vals.begin(), vals.end());
        bool expect = brute_force_decide(as_rat, 3, ones(3), Rational(0), false).yes;
        CHECK(integer_ksum(vals, 3) == expect);
    }
}

TEST_CASE("segment kernel examples") {
    Point p1, p2;
    p1.coords = {Rational(1), Rational(-1)};
    p2.coords = {Rational(1), Rational(1)};
    auto out = double_ksum_enumerate(p1, p2, 2);
    REQUIRE(out.size() == 1);
    CHECK(out[0] == std::vector<int>{1, 1});

    CHECK(double_ksum_enumerate(p1, p1, 2).empty());

    // a zero sum at one endpoint is excluded (strict signs)
    Point q1, q2;
    q1.coords = {Rational(1), Rational(-1)};
    q2.coords = {Rational(2), Rational(1)};
    auto out2 = double_ksum_enumerate(q1, q2, 2);
    for (const auto& t : out2) CHECK(t != std::vector<int>{0, 1});

    Point bad;
    bad.coords = {Rational(1)};
    CHECK_THROWS_AS(double_ksum_enumerate(p1, bad, 2), std::invalid_argument);
}

TEST_CASE("segment kernel equals brute force and bounds insertions") {
    Rng rng(53);
    for (int rep = 0; rep < 200; ++rep) {
        int k = static_cast<int>(rng.range(2, 4));
        int n = static_cast<int>(rng.range(k, 10));
        bool distinct = rng.below(4) == 0;
        Point p1 = rpoint(rng, n), p2 = rpoint(rng, n);
        if (p1 == p2) continue;
        Rational c1 = rng.below(2) ? Rational(0) : Rational(rng.range(-2, 2));
        Rational c2 = rng.below(2) ? Rational(0) : Rational(rng.range(-2, 2));
        KernelStats stats;
        auto got = double_ksum_enumerate(p1, p2, k, c1, c2, distinct, &stats);
        auto expect = brute_segment(p1, p2, k, c1, c2, distinct);
        REQUIRE(got == expect);
        // each sweep pass inserts every half-tuple at most once
        CHECK(stats.max_pass_insertions <= stats.half_tuples);
        CHECK(stats.insertions <= 2 * stats.half_tuples);
    }
}

TEST_CASE("containment kernel examples") {
    Point single;
    single.coords = {Rational(1), Rational(-1), Rational(0)};
    auto r = multiple_ksum_decide(std::vector<Point>{single}, 2);
    CHECK(r.yes);
    CHECK(r.tuples == std::vector<std::vector<int>>{{0, 1}, {2, 2}});

    Point a, b;
    a.coords = {Rational(1), Rational(0)};
    b.coords = {Rational(0), Rational(1)};
    CHECK_FALSE(multiple_ksum_decide(std::vector<Point>{a, b}, 2).yes);

    CHECK_THROWS_AS(multiple_ksum_decide(std::vector<Point>{}, 2), std::invalid_argument);
}

TEST_CASE("containment kernel equals brute force; no digit carries") {
    Rng rng(61);
    for (int rep = 0; rep < 200; ++rep) {
        int k = static_cast<int>(rng.range(2, 4));
        int n = static_cast<int>(rng.range(k, 8));
        int d = static_cast<int>(rng.range(1, 3));
        std::vector<Point> pts;
        for (int i = 0; i < d; ++i) pts.push_back(rpoint(rng, n));
        // half the cases get a planted containing tuple to exercise YES
        std::vector<Rational> targets(d, Rational(0));
        if (rng.below(2)) {
            std::vector<int> t(k);
            for (auto& x : t) x = static_cast<int>(rng.below(n));
            std::sort(t.begin(), t.end());
            for (int i = 0; i < d; ++i) {
                targets[i] = 0;
                for (int idx : t) targets[i] += pts[i].coords[idx];
            }
        }
        MultipleKsumResult got;
        try {
            got = multiple_ksum_decide(pts, k, targets);
        } catch (const CarryOverflow&) {
            FAIL("carry-free encoding violated");
        }
        CHECK(got.yes == brute_multiple(pts, k, targets, false));
    }
}

TEST_CASE("encoding round trip recovers the integerized coordinates") {
    Rng rng(67);
    for (int rep = 0; rep < 50; ++rep) {
        int n = static_cast<int>(rng.range(2, 6));
        int d = static_cast<int>(rng.range(1, 3));
        std::vector<Point> pts;
        for (int i = 0; i < d; ++i) pts.push_back(rpoint(rng, n));
        std::vector<Rational> targets(d, Rational(0));
        EncodedInstance enc = encode_points(pts, 3, targets);
        auto digits = enc.unpack();
        REQUIRE(static_cast<int>(digits.size()) == n);
        for (int i = 0; i < d; ++i) {
            Integer lcm_i = 1;
            for (int j = 0; j < n; ++j)
                mpz_lcm(lcm_i.get_mpz_t(), lcm_i.get_mpz_t(),
                        pts[i].coords[j].get_den().get_mpz_t());
            for (int j = 0; j < n; ++j) {
                Integer zeta = pts[i].coords[j].get_num() * (lcm_i / pts[i].coords[j].get_den());
                REQUIRE(digits[j][i] == zeta);
            }
        }
    }
}

TEST_CASE("sorted sums are ordered with a consistent rank permutation") {
    std::vector<Rational> vals{Rational(3), Rational(-1), Rational(3), Rational(0)};
    auto s = SortedSums::build(vals);
    for (std::size_t i = 1; i < s.sums.size(); ++i)
        CHECK(cmp(s.sums[i - 1].first, s.sums[i].first) <= 0);
    for (std::size_t i = 0; i < vals.size(); ++i)
        CHECK(s.sums[s.rank_of[i]].second == static_cast<int>(i));
}
