#pragma once

// Dense exact-rational matrices, fraction-free determinants and linear-system
// solving. Sizes here are small (arrangement dimension), so the emphasis is
// on exactness and determinism, not pivoting strategies.

#include <span>
#include <stdexcept>
#include <vector>

#include "ksum/exact.hpp"

namespace ksum {

struct NonSquareMatrix : std::invalid_argument {
    NonSquareMatrix() : std::invalid_argument("matrix is not square") {}
};

struct SingularSystem : std::runtime_error {
    int rank;
    explicit SingularSystem(int r)
        : std::runtime_error("singular linear system (rank " + std::to_string(r) + ")"), rank(r) {}
};

class Matrix {
public:
    Matrix(int rows, int cols) : rows_(rows), cols_(cols), a_(static_cast<std::size_t>(rows) * cols) {}

    static Matrix identity(int n) {
        Matrix m(n, n);
        for (int i = 0; i < n; ++i) m.at(i, i) = 1;
        return m;
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    Rational& at(int r, int c) { return a_[static_cast<std::size_t>(r) * cols_ + c]; }
    const Rational& at(int r, int c) const { return a_[static_cast<std::size_t>(r) * cols_ + c]; }

private:
    int rows_, cols_;
    std::vector<Rational> a_;
};

namespace detail {

// Clears denominators row by row; returns the integer matrix and the product
// of the row scale factors (always positive).
inline std::vector<std::vector<Integer>> integerize_rows(const Matrix& m, Integer& scale_product) {
    scale_product = 1;
    std::vector<std::vector<Integer>> out(m.rows(), std::vector<Integer>(m.cols()));
    for (int r = 0; r < m.rows(); ++r) {
        Integer l = 1;
        for (int c = 0; c < m.cols(); ++c)
            mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), m.at(r, c).get_den().get_mpz_t());
        for (int c = 0; c < m.cols(); ++c) {
            const Rational& v = m.at(r, c);
            out[r][c] = v.get_num() * (l / v.get_den());
        }
        scale_product *= l;
    }
    return out;
}

} // namespace detail

// Bareiss fraction-free elimination; exact, with integer intermediates after
// per-row denominator clearing.
inline Rational determinant(const Matrix& m) {
    if (m.rows() != m.cols()) throw NonSquareMatrix{};
    const int n = m.rows();
    if (n == 0) return Rational(1);
    Integer scale;
    auto a = detail::integerize_rows(m, scale);
    Integer prev = 1;
    int sign = 1;
    for (int k = 0; k < n - 1; ++k) {
        int pivot = -1;
        for (int r = k; r < n; ++r)
            if (sign_of(a[r][k]) != 0) { pivot = r; break; }
        if (pivot < 0) return Rational(0);
        if (pivot != k) { std::swap(a[pivot], a[k]); sign = -sign; }
        for (int i = k + 1; i < n; ++i) {
            for (int j = k + 1; j < n; ++j) {
                Integer t = a[i][j] * a[k][k] - a[i][k] * a[k][j];
                mpz_divexact(t.get_mpz_t(), t.get_mpz_t(), prev.get_mpz_t());
                a[i][j] = t;
            }
            a[i][k] = 0;
        }
        prev = a[k][k];
    }
    Rational det = make_rational(a[n - 1][n - 1], scale);
    return sign < 0 ? Rational(-det) : det;
}

// Row echelon over rationals, in place. Returns the rank; pivot columns (in
// order) are appended to pivot_cols when provided.
inline int echelonize(std::vector<std::vector<Rational>>& rows, std::vector<int>* pivot_cols = nullptr) {
    if (rows.empty()) return 0;
    const int ncols = static_cast<int>(rows[0].size());
    int rr = 0;
    for (int c = 0; c < ncols && rr < static_cast<int>(rows.size()); ++c) {
        int p = -1;
        for (int r = rr; r < static_cast<int>(rows.size()); ++r)
            if (sign_of(rows[r][c]) != 0) { p = r; break; }
        if (p < 0) continue;
        std::swap(rows[p], rows[rr]);
        for (int r = 0; r < static_cast<int>(rows.size()); ++r) {
            if (r == rr || sign_of(rows[r][c]) == 0) continue;
            Rational f = rows[r][c] / rows[rr][c];
            for (int j = c; j < ncols; ++j) rows[r][j] -= f * rows[rr][j];
        }
        if (pivot_cols) pivot_cols->push_back(c);
        ++rr;
    }
    return rr;
}

// Solves a*x = b for square nonsingular a (Bareiss forward elimination, exact
// back substitution). Throws SingularSystem carrying the rank otherwise.
inline std::vector<Rational> solve_linear_system(const Matrix& a_in, std::span<const Rational> b) {
    if (a_in.rows() != a_in.cols()) throw NonSquareMatrix{};
    const int n = a_in.rows();
    if (static_cast<int>(b.size()) != n) throw std::invalid_argument("rhs size mismatch");
    if (n == 0) return {};

    // Augmented integer matrix [A|b], row-scaled.
    Matrix aug(n, n + 1);
    for (int r = 0; r < n; ++r) {
        for (int c = 0; c < n; ++c) aug.at(r, c) = a_in.at(r, c);
        aug.at(r, n) = b[r];
    }
    Integer scale;
    auto m = detail::integerize_rows(aug, scale);

    Integer prev = 1;
    for (int k = 0; k < n; ++k) {
        int pivot = -1;
        for (int r = k; r < n; ++r)
            if (sign_of(m[r][k]) != 0) { pivot = r; break; }
        if (pivot < 0) {
            std::vector<std::vector<Rational>> rows(n, std::vector<Rational>(n));
            for (int r = 0; r < n; ++r)
                for (int c = 0; c < n; ++c) rows[r][c] = a_in.at(r, c);
            throw SingularSystem(echelonize(rows));
        }
        if (pivot != k) std::swap(m[pivot], m[k]);
        for (int i = k + 1; i < n; ++i) {
            for (int j = k + 1; j <= n; ++j) {
                Integer t = m[i][j] * m[k][k] - m[i][k] * m[k][j];
                mpz_divexact(t.get_mpz_t(), t.get_mpz_t(), prev.get_mpz_t());
                m[i][j] = t;
            }
            m[i][k] = 0;
        }
        prev = m[k][k];
    }

    std::vector<Rational> x(n);
    for (int i = n - 1; i >= 0; --i) {
        Rational acc(m[i][n]);
        for (int j = i + 1; j < n; ++j) acc -= Rational(m[i][j]) * x[j];
        x[i] = acc / Rational(m[i][i]);
    }
    return x;
}

inline int rank_of(std::vector<std::vector<Rational>> rows) {
    return echelonize(rows);
}

// Basis of {x : rows * x = 0}.
inline std::vector<std::vector<Rational>> null_space(std::vector<std::vector<Rational>> rows, int ncols) {
    std::vector<int> pivots;
    if (rows.empty()) rows.push_back(std::vector<Rational>(ncols));
    echelonize(rows, &pivots);
    std::vector<bool> is_pivot(ncols, false);
    for (int c : pivots) is_pivot[c] = true;
    std::vector<std::vector<Rational>> basis;
    for (int freec = 0; freec < ncols; ++freec) {
        if (is_pivot[freec]) continue;
        std::vector<Rational> v(ncols);
        v[freec] = 1;
        for (int pi = static_cast<int>(pivots.size()) - 1; pi >= 0; --pi) {
            int pc = pivots[pi];
            Rational acc(0);
            for (int j = pc + 1; j < ncols; ++j)
                if (sign_of(v[j]) != 0) acc += rows[pi][j] * v[j];
            if (sign_of(acc) != 0) v[pc] = -acc / rows[pi][pc];
        }
        basis.push_back(std::move(v));
    }
    return basis;
}

} // namespace ksum
