#include <catch2/catch.hpp>

#include "ksum/exact.hpp"
#include "ksum/linalg.hpp"
#include "ksum/rng.hpp"

using namespace ksum;

namespace {

Rational random_rational(Rng& rng, long num_range = 9, long den_range = 4) {
    long num = rng.range(-num_range, num_range);
    long den = rng.range(1, den_range);
    return make_rational(num, den);
}

Matrix random_matrix(Rng& rng, int n) {
    Matrix m(n, n);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) m.at(r, c) = random_rational(rng);
    return m;
}

// Independent oracle: cofactor expansion along the first row.
Rational cofactor_det(const Matrix& m) {
    const int n = m.rows();
    if (n == 1) return m.at(0, 0);
    Rational acc(0);
    for (int c = 0; c < n; ++c) {
        if (sign_of(m.at(0, c)) == 0) continue;
        Matrix minor(n - 1, n - 1);
        for (int r = 1; r < n; ++r) {
            int cc = 0;
            for (int col = 0; col < n; ++col) {
                if (col == c) continue;
                minor.at(r - 1, cc++) = m.at(r, col);
            }
        }
        Rational term = m.at(0, c) * cofactor_det(minor);
        acc += (c % 2 == 0) ? term : Rational(-term);
    }
    return acc;
}

} // namespace

TEST_CASE("rational arithmetic basics") {
    CHECK(rat_add(parse_rational("1/2"), parse_rational("1/3")) == parse_rational("5/6"));
    CHECK(parse_rational("2/4") == make_rational(1, 2));
    CHECK(parse_rational("2/4").get_den() == 2);
    CHECK(rat_cmp(parse_rational("-3/7"), parse_rational("-2/5")) < 0);
    CHECK(rat_mul(make_rational(2, 3), make_rational(3, 2)) == 1);
    CHECK(rat_div(make_rational(1, 2), make_rational(1, 4)) == 2);
    CHECK_THROWS_AS(rat_div(Rational(1), Rational(0)), DivisionByZero);
}

TEST_CASE("parsing accepts p, p/q and decimals, rejects junk") {
    CHECK(parse_rational("7") == 7);
    CHECK(parse_rational("-12/8") == make_rational(-3, 2));
    CHECK(parse_rational("0.25") == make_rational(1, 4));
    CHECK(parse_rational("-1.5") == make_rational(-3, 2));
    CHECK(parse_rational(".5") == make_rational(1, 2));
    CHECK_THROWS_AS(parse_rational("1e5"), ParseError);
    CHECK_THROWS_AS(parse_rational("abc"), ParseError);
    CHECK_THROWS_AS(parse_rational("1/0"), ParseError);
    CHECK(looks_like_decimal("0.25"));
    CHECK_FALSE(looks_like_decimal("1/4"));
}

TEST_CASE("bit size telemetry") {
    CHECK(bit_size_telemetry(Rational(1)) == std::pair<std::size_t, std::size_t>{1, 1});
    CHECK(bit_size_telemetry(make_rational(5, 3)) == std::pair<std::size_t, std::size_t>{3, 2});
    CHECK(bit_size_telemetry(Rational(1024)) == std::pair<std::size_t, std::size_t>{11, 1});
}

TEST_CASE("results stay in reduced canonical form") {
    Rng rng(11);
    for (int i = 0; i < 300; ++i) {
        Rational a = random_rational(rng), b = random_rational(rng);
        Rational ops[] = {a + b, a * b, a - b};
        for (const auto& r : ops) {
            CHECK(r.get_den() > 0);
            Integer g;
            mpz_gcd(g.get_mpz_t(), r.get_num().get_mpz_t(), r.get_den().get_mpz_t());
            CHECK(g == 1);
        }
    }
}

TEST_CASE("determinant examples") {
    CHECK(determinant(Matrix::identity(3)) == 1);
    Matrix m(2, 2);
    m.at(0, 0) = 1;
    m.at(0, 1) = 2;
    m.at(1, 0) = 3;
    m.at(1, 1) = 4;
    CHECK(determinant(m) == -2);
    Matrix dup(3, 3);
    for (int c = 0; c < 3; ++c) {
        dup.at(0, c) = c + 1;
        dup.at(1, c) = c + 1;
        dup.at(2, c) = 2 * c - 1;
    }
    CHECK(determinant(dup) == 0);
    Matrix rect(2, 3);
    CHECK_THROWS_AS(determinant(rect), NonSquareMatrix);
}

TEST_CASE("determinant matches cofactor expansion") {
    Rng rng(23);
    for (int i = 0; i < 200; ++i) {
        int n = static_cast<int>(rng.range(1, 5));
        Matrix m = random_matrix(rng, n);
        CHECK(determinant(m) == cofactor_det(m));
    }
}

TEST_CASE("linear system examples") {
    std::vector<Rational> v{make_rational(3, 2), Rational(-7), make_rational(1, 3)};
    auto x = solve_linear_system(Matrix::identity(3), v);
    CHECK(x == v);

    Matrix a(2, 2);
    a.at(0, 0) = 1;
    a.at(0, 1) = 1;
    a.at(1, 0) = 1;
    a.at(1, 1) = -1;
    std::vector<Rational> b{Rational(3), Rational(1)};
    auto sol = solve_linear_system(a, b);
    CHECK(sol[0] == 2);
    CHECK(sol[1] == 1);

    Matrix s(2, 2);
    s.at(0, 0) = 1;
    s.at(0, 1) = 1;
    s.at(1, 0) = 2;
    s.at(1, 1) = 2;
    std::vector<Rational> off{Rational(1), Rational(3)};
    try {
        solve_linear_system(s, off);
        FAIL("expected SingularSystem");
    } catch (const SingularSystem& e) {
        CHECK(e.rank == 1);
    }
}

TEST_CASE("random systems solve exactly and Cramer-consistently") {
    Rng rng(37);
    int solved = 0;
    while (solved < 500) {
        int n = static_cast<int>(rng.range(1, 6));
        Matrix a = random_matrix(rng, n);
        Rational det = determinant(a);
        if (sign_of(det) == 0) continue;
        std::vector<Rational> b(n);
        for (auto& v : b) v = random_rational(rng);
        auto x = solve_linear_system(a, b);

        // a * x == b with no tolerance
        for (int r = 0; r < n; ++r) {
            Rational acc(0);
            for (int c = 0; c < n; ++c) acc += a.at(r, c) * x[c];
            REQUIRE(acc == b[r]);
        }
        // x_i * det(A) == det(A_i)
        for (int i = 0; i < n; ++i) {
            Matrix ai = a;
            for (int r = 0; r < n; ++r) ai.at(r, i) = b[r];
            REQUIRE(x[i] * det == determinant(ai));
        }
        ++solved;
    }
}

TEST_CASE("rank and null space helpers") {
    std::vector<std::vector<Rational>> rows{{Rational(1), Rational(2), Rational(3)},
                                            {Rational(2), Rational(4), Rational(6)},
                                            {Rational(0), Rational(1), Rational(0)}};
    CHECK(rank_of(rows) == 2);
    auto ns = null_space(rows, 3);
    REQUIRE(ns.size() == 1);
    // the kernel vector is orthogonal to every row
    for (const auto& r : rows) {
        Rational acc(0);
        for (int j = 0; j < 3; ++j) acc += r[j] * ns[0][j];
        CHECK(sign_of(acc) == 0);
    }
}
