#include <catch2/catch.hpp>

#include "ksum/geometry.hpp"
#include "ksum/io_json.hpp"
#include "ksum/net_sampling.hpp"
#include "ksum/rng.hpp"

using namespace ksum;

namespace {

Point pt(std::vector<long> v) {
    Point p;
    for (long x : v) p.coords.emplace_back(x);
    return p;
}

Hyperplane plane(std::vector<std::pair<int, long>> terms, long offset = 0) {
    Hyperplane h;
    for (auto [i, c] : terms)
        if (c != 0) h.normal.emplace_back(i, Rational(c));
    h.offset = offset;
    return h;
}

std::vector<Rational> ones(int k) { return std::vector<Rational>(k, Rational(1)); }

} // namespace

TEST_CASE("sigma on explicit points") {
    CHECK(sigma(plane({{0, 1}, {1, 1}}), pt({1, -1, 7})) == 0);
    CHECK(sigma(plane({{0, 1}}, -1), pt({0, 5})) == -1);
    CHECK(sigma(plane({{0, 1}, {1, 2}}, -3), pt({1, 1})) == 0);
}

TEST_CASE("segment crossing classification") {
    auto h = plane({{0, 1}});
    CHECK(segment_crossing(h, pt({-1}), pt({1})) == SegmentRelation::CrossesOpenInterior);
    CHECK(segment_crossing(h, pt({0}), pt({1})) == SegmentRelation::Touches);
    CHECK(segment_crossing(h, pt({1}), pt({2})) == SegmentRelation::Disjoint);
    CHECK(segment_crossing(plane({{1, 1}}), pt({0, 0}), pt({1, 0})) == SegmentRelation::ContainsBoth);
    CHECK_THROWS_AS(segment_crossing(h, pt({1}), pt({1})), std::invalid_argument);
}

TEST_CASE("segment crossing is symmetric") {
    Rng rng(5);
    for (int rep = 0; rep < 100; ++rep) {
        int n = static_cast<int>(rng.range(1, 4));
        Point a, b;
        for (int i = 0; i < n; ++i) {
            a.coords.emplace_back(rng.range(-5, 5));
            b.coords.emplace_back(rng.range(-5, 5));
        }
        if (a == b) continue;
        Hyperplane h;
        for (int i = 0; i < n; ++i)
            if (rng.below(2)) h.normal.emplace_back(i, Rational(rng.range(-3, 3)));
        if (h.normal.empty()) h.normal.emplace_back(0, Rational(1));
        h.offset = rng.range(-3, 3);
        CHECK(segment_crossing(h, a, b) == segment_crossing(h, b, a));
    }
}

TEST_CASE("simplex relation examples") {
    Simplex seg;
    seg.vertices = {pt({1, 1}), pt({2, 2})};
    CHECK(simplex_relation(plane({{0, 1}, {1, 1}}), seg) == SimplexRelation::AvoidsInterior);

    Simplex tri;
    tri.vertices = {pt({-1, 0}), pt({1, 0}), pt({0, 1})};
    CHECK(simplex_relation(plane({{0, 1}}), tri) == SimplexRelation::CrossesInterior);

    Simplex on;
    on.vertices = {pt({0, 0}), pt({0, 1})};
    CHECK(simplex_relation(plane({{0, 1}}), on) == SimplexRelation::ContainsSimplex);
}

TEST_CASE("simplex relation agrees with the edge-based brute force") {
    Rng rng(17);
    for (int rep = 0; rep < 200; ++rep) {
        int n = static_cast<int>(rng.range(2, 4));
        int verts = static_cast<int>(rng.range(2, n + 1));
        Simplex s;
        for (int v = 0; v < verts; ++v) {
            Point p;
            for (int i = 0; i < n; ++i) p.coords.emplace_back(rng.range(-4, 4));
            bool dup = false;
            for (const auto& q : s.vertices) dup |= q == p;
            if (dup) {
                --v;
                continue;
            }
            s.vertices.push_back(std::move(p));
        }
        Hyperplane h;
        for (int i = 0; i < n; ++i)
            if (rng.below(2)) h.normal.emplace_back(i, Rational(rng.range(-3, 3)));
        if (h.normal.empty()) h.normal.emplace_back(0, Rational(1));
        h.offset = rng.range(-2, 2);

        // independent route: all vertices on h <=> contains; some open edge
        // crossed <=> crosses interior
        bool all_zero = true, edge_cross = false;
        for (const auto& v : s.vertices) all_zero &= sigma(h, v) == 0;
        for (std::size_t i = 0; i < s.vertices.size(); ++i)
            for (std::size_t j = i + 1; j < s.vertices.size(); ++j)
                edge_cross |= segment_crossing(h, s.vertices[i], s.vertices[j]) ==
                              SegmentRelation::CrossesOpenInterior;
        SimplexRelation expect = all_zero ? SimplexRelation::ContainsSimplex
                                 : edge_cross ? SimplexRelation::CrossesInterior
                                              : SimplexRelation::AvoidsInterior;
        CHECK(simplex_relation(h, s) == expect);
    }
}

TEST_CASE("implicit enumeration counts") {
    auto rep = enumerate_implicit(3, 2, ones(2), Rational(0), false);
    CHECK(rep.members.size() == 6);
    CHECK(rep.provenance == HyperplaneSet::Provenance::ImplicitKSum);
    CHECK(enumerate_implicit(3, 2, ones(2), Rational(0), true).members.size() == 3);
    auto single = enumerate_implicit(3, 3, ones(3), Rational(0), true);
    REQUIRE(single.members.size() == 1);
    CHECK(single.members[0].tuple == std::vector<int>{0, 1, 2});
    CHECK(count_implicit(10, ones(4), false) == binomial(13, 4));
    CHECK(count_implicit(10, ones(4), true) == binomial(10, 4));

    // cross-module check against the sampler's counting table
    auto table = build_table(9, 4);
    for (int n = 2; n <= 9; ++n)
        for (int k = 2; k <= 4; ++k) {
            CHECK(count_implicit(n, ones(k), false) == table.at(n, k));
            CHECK(enumerate_implicit(n, k, ones(k), Rational(0), false).members.size() ==
                  table.at(n, k).get_ui());
        }
}

TEST_CASE("hyperplane coefficients accumulate over repeated indices") {
    std::vector<int> tuple{1, 1};
    auto h = hyperplane_for_assignment(tuple, ones(2), Rational(0), 3, false);
    REQUIRE(h.normal.size() == 1);
    CHECK(h.normal[0].first == 1);
    CHECK(h.normal[0].second == 2);
    CHECK(h.kind == Hyperplane::Kind::KSum);

    // lifted: the constant rides on the extra coordinate
    auto hl = hyperplane_for_assignment(tuple, ones(2), Rational(5), 4, true);
    CHECK(hl.normal.back().first == 3);
    CHECK(hl.normal.back().second == 5);
    CHECK(sign_of(hl.offset) == 0);
}

TEST_CASE("heterogeneous coefficients enumerate per class") {
    std::vector<Rational> alpha{Rational(1), Rational(2)};
    auto set = enumerate_implicit(3, 2, alpha, Rational(0), false);
    // independent draws per class: 3 * 3 assignments
    CHECK(set.members.size() == 9);
    CHECK(count_implicit(3, alpha, false) == 9);
}

TEST_CASE("pick_objective avoids orthogonality and zero coordinates") {
    Rng rng(3);
    Hyperplane diff = plane({{0, 1}, {1, -1}});
    Hyperplane e0 = plane({{0, 1}});
    std::vector<const Hyperplane*> normals{&diff, &e0};
    long retries = 0;
    auto w = pick_objective(normals, 2, rng, &retries);
    REQUIRE(w.size() == 2);
    for (const auto& c : w) CHECK(sign_of(c) != 0);
    CHECK(sign_of(w[0] - w[1]) != 0);
    CHECK(sign_of(w[0]) != 0);
    // empty list: any nonzero vector works
    auto w2 = pick_objective({}, 3, rng);
    for (const auto& c : w2) CHECK(sign_of(c) != 0);
}

TEST_CASE("boundary set covers every axis twice") {
    auto b = boundary_set(3);
    REQUIRE(b.size() == 6);
    CHECK(sigma(b[0], pt({0, 9, 9})) == -1);  // x0 = +1 side
    CHECK(sigma(b[1], pt({0, 9, 9})) == 1);   // x0 = -1 side
}

TEST_CASE("geometry serializes with rational strings") {
    auto h = hyperplane_for_assignment(std::vector<int>{0, 2}, ones(2), Rational(0), 3, false);
    Json j = hyperplane_to_json(h);
    CHECK(j["terms"]["1"] == "1");
    CHECK(j["tag"]["ksum"][0] == 1);
    Simplex s;
    s.vertices = {pt({1, 2}), pt({-1, 0})};
    Json js = simplex_to_json(s);
    CHECK(js["vertices"][0][0] == "1");
}
