#pragma once

// Arrangement geometry: hyperplanes with sparse normals, explicit rational
// points, simplices, and the exact position predicates the solvers prune
// with. Everything here is query-free; it only ever touches explicit data.

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "ksum/exact.hpp"
#include "ksum/linalg.hpp"
#include "ksum/rng.hpp"
#include "ksum/tuples.hpp"

namespace ksum {

using SparseVec = std::vector<std::pair<int, Rational>>;

struct Point {
    std::vector<Rational> coords;

    int dim() const { return static_cast<int>(coords.size()); }
    bool operator==(const Point& o) const { return coords == o.coords; }
};

inline Rational dot(const SparseVec& v, const Point& p) {
    Rational acc(0);
    for (const auto& [i, c] : v) acc += c * p.coords[i];
    return acc;
}

struct Hyperplane {
    enum class Kind { KSum, Boundary, Derived };

    SparseVec normal;   // sorted by index, no zero entries
    Rational offset;
    Kind kind = Kind::Derived;
    std::vector<int> tuple;  // canonical index tuple (KSum)
    int axis = -1;           // Boundary: x_axis = side
    int side = 0;

    Rational value_at(const Point& p) const { return offset + dot(normal, p); }
};

// Sign of the hyperplane's affine form at an explicit point.
inline int sigma(const Hyperplane& h, const Point& p) { return sign_of(h.value_at(p)); }

struct Simplex {
    std::vector<Point> vertices;  // pairwise distinct, affinely independent
};

enum class SegmentRelation { CrossesOpenInterior, Touches, Disjoint, ContainsBoth };

inline SegmentRelation segment_crossing(const Hyperplane& h, const Point& a, const Point& b) {
    if (a == b) throw std::invalid_argument("segment endpoints must differ");
    int sa = sigma(h, a), sb = sigma(h, b);
    if (sa == 0 && sb == 0) return SegmentRelation::ContainsBoth;
    if (sa == 0 || sb == 0) return SegmentRelation::Touches;
    return sa != sb ? SegmentRelation::CrossesOpenInterior : SegmentRelation::Disjoint;
}

enum class SimplexRelation { ContainsSimplex, CrossesInterior, AvoidsInterior };

// Classification from vertex signs: contains iff every vertex lies on h,
// crosses iff two vertices take opposite strict signs, avoids otherwise.
inline SimplexRelation simplex_relation(const Hyperplane& h, const Simplex& s) {
    bool pos = false, neg = false, all_zero = true;
    for (const auto& v : s.vertices) {
        int sg = sigma(h, v);
        if (sg != 0) all_zero = false;
        pos |= sg > 0;
        neg |= sg < 0;
        if (pos && neg) return SimplexRelation::CrossesInterior;
    }
    return all_zero ? SimplexRelation::ContainsSimplex : SimplexRelation::AvoidsInterior;
}

struct HyperplaneSet {
    enum class Provenance { Explicit, ImplicitKSum };

    std::vector<Hyperplane> members;
    Provenance provenance = Provenance::Explicit;
};

// Builds the hyperplane of one canonical assignment. In lifted space the
// instance constant rides on the extra always-one coordinate so the equation
// stays homogeneous; otherwise it is the affine offset.
inline Hyperplane hyperplane_for_assignment(std::span<const int> tuple,
                                            std::span<const Rational> alpha, const Rational& c,
                                            int space_dim, bool lifted) {
    std::vector<Rational> dense(space_dim);
    for (std::size_t j = 0; j < tuple.size(); ++j) dense[tuple[j]] += alpha[j];
    Hyperplane h;
    h.kind = Hyperplane::Kind::KSum;
    h.tuple.assign(tuple.begin(), tuple.end());
    if (lifted)
        dense[space_dim - 1] += c;
    else
        h.offset = c;
    for (int i = 0; i < space_dim; ++i)
        if (sign_of(dense[i]) != 0) h.normal.emplace_back(i, dense[i]);
    return h;
}

// One canonical hyperplane per assignment (per-class sorted index tuples).
inline HyperplaneSet enumerate_implicit(int n, int k, std::span<const Rational> alpha,
                                        const Rational& c, bool distinct, bool lifted = false) {
    if (n < k && distinct) throw std::invalid_argument("n >= k required in distinct mode");
    AlphaPartition p = classify_alpha(alpha);
    int space_dim = n + (lifted ? 1 : 0);
    HyperplaneSet set;
    set.provenance = HyperplaneSet::Provenance::ImplicitKSum;
    for_each_assignment(n, p, distinct, [&](std::span<const int> t) {
        set.members.push_back(hyperplane_for_assignment(t, alpha, c, space_dim, lifted));
        return true;
    });
    return set;
}

inline Integer count_implicit(int n, std::span<const Rational> alpha, bool distinct) {
    return count_assignments(n, classify_alpha(alpha), distinct);
}

// The 2*D bounding hyperplanes x_i = +/-1 of the normalized cube.
inline std::vector<Hyperplane> boundary_set(int space_dim) {
    std::vector<Hyperplane> b;
    b.reserve(2 * space_dim);
    for (int i = 0; i < space_dim; ++i) {
        for (int side : {+1, -1}) {
            Hyperplane h;
            h.kind = Hyperplane::Kind::Boundary;
            h.axis = i;
            h.side = side;
            h.normal.emplace_back(i, Rational(1));
            h.offset = Rational(-side);
            b.push_back(std::move(h));
        }
    }
    return b;
}

// Small random integer objective, verified non-orthogonal to every supplied
// normal (exact dot products); the coordinate range widens if rejections pile
// up. Coordinates are never zero, so the boundary normals are covered too.
inline std::vector<Rational> pick_objective(std::span<const Hyperplane* const> normals, int space_dim,
                                            Rng& rng, long* retries = nullptr) {
    long radius = 3;
    for (long attempt = 0;; ++attempt) {
        if (attempt > 0 && attempt % 20 == 0) radius *= 2;
        std::vector<Rational> w(space_dim);
        for (auto& c : w) {
            long v = rng.range(1, radius);
            c = Rational(rng.below(2) ? v : -v);
        }
        bool ok = true;
        for (const Hyperplane* h : normals) {
            Rational acc(0);
            for (const auto& [i, c] : h->normal) acc += c * w[i];
            if (sign_of(acc) == 0) { ok = false; break; }
        }
        if (ok) {
            if (retries) *retries += attempt;
            return w;
        }
    }
}

} // namespace ksum
