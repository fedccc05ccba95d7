#ifndef PFAFFCC_MATRIX_HPP
#define PFAFFCC_MATRIX_HPP

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <type_traits>
#include <ostream>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "scalar.hpp"

namespace pfaffcc
{

// Square skew-symmetric matrix storing only the strict upper triangle.
// Indices are 0-based.
template <typename S>
class SkewMatrix
{
public:
    SkewMatrix(std::size_t n, const S &zero) : m_n(n), m_zero(zero), m_upper(n * (n - 1) / 2, zero)
    {
        if (n < 1) throw ValidationError("skew matrix must have order at least 1");
    }
    explicit SkewMatrix(std::size_t n) requires std::is_constructible_v<S, int> : SkewMatrix(n, S(0)) {}

    // Build from the strict upper triangle listed row by row.
    static SkewMatrix from_upper(std::size_t n, std::vector<S> upper, const S &zero)
    {
        if (upper.size() != n * (n - 1) / 2) throw ValidationError("upper triangle has the wrong length");
        SkewMatrix m(n, zero);
        m.m_upper = std::move(upper);
        return m;
    }
    static SkewMatrix from_upper(std::size_t n, std::vector<S> upper) requires std::is_constructible_v<S, int>
    {
        return from_upper(n, std::move(upper), S(0));
    }

    std::size_t size() const { return m_n; }
    const S &zero() const { return m_zero; }

    S operator()(std::size_t i, std::size_t j) const
    {
        if (i == j) return m_zero;
        if (i < j) return m_upper[index(i, j)];
        return -m_upper[index(j, i)];
    }

    // Entry (i, j) with i < j.
    const S &upper(std::size_t i, std::size_t j) const { return m_upper[index(i, j)]; }
    void set(std::size_t i, std::size_t j, S value)
    {
        if (i == j) throw ValidationError("diagonal of a skew matrix is fixed at zero");
        if (i < j) {
            m_upper[index(i, j)] = std::move(value);
        } else {
            m_upper[index(j, i)] = -value;
        }
    }

    std::span<const S> upper_entries() const { return m_upper; }

    // Submatrix on the kept indices, in increasing order.
    SkewMatrix restrict_to(const std::vector<std::size_t> &keep) const
    {
        SkewMatrix r(keep.size(), m_zero);
        for (std::size_t a = 0; a < keep.size(); ++a)
            for (std::size_t b = a + 1; b < keep.size(); ++b) r.set(a, b, (*this)(keep[a], keep[b]));
        return r;
    }

    // Exchange rows i, j and columns i, j.
    SkewMatrix swapped(std::size_t i, std::size_t j) const
    {
        std::vector<std::size_t> perm(m_n);
        for (std::size_t k = 0; k < m_n; ++k) perm[k] = k;
        std::swap(perm[i], perm[j]);
        SkewMatrix r(m_n, m_zero);
        for (std::size_t a = 0; a < m_n; ++a)
            for (std::size_t b = a + 1; b < m_n; ++b) r.set(a, b, (*this)(perm[a], perm[b]));
        return r;
    }

private:
    std::size_t index(std::size_t i, std::size_t j) const
    {
        // row i holds entries (i, i+1) .. (i, n-1)
        return i * (2 * m_n - i - 1) / 2 + (j - i - 1);
    }

    std::size_t m_n;
    S m_zero;
    std::vector<S> m_upper;
};

// Debug print: one line per row of the upper triangle.
template <typename S>
std::ostream &operator<<(std::ostream &os, const SkewMatrix<S> &m)
{
    for (std::size_t i = 0; i + 1 < m.size(); ++i) {
        os << '[';
        for (std::size_t j = i + 1; j < m.size(); ++j) {
            if (j > i + 1) os << ", ";
            if constexpr (std::is_same_v<S, Rational> || std::is_floating_point_v<S>) {
                os << format_scalar(m.upper(i, j));
            } else {
                os << m.upper(i, j);
            }
        }
        os << "]\n";
    }
    return os;
}

// Row-major dense matrix over a field.
template <typename S>
class DenseMatrix
{
public:
    DenseMatrix(std::size_t rows, std::size_t cols) : m_rows(rows), m_cols(cols), m_data(rows * cols, S(0)) {}

    static DenseMatrix from_skew(const SkewMatrix<S> &a)
    {
        DenseMatrix m(a.size(), a.size());
        for (std::size_t i = 0; i < a.size(); ++i)
            for (std::size_t j = 0; j < a.size(); ++j) m(i, j) = a(i, j);
        return m;
    }

    std::size_t rows() const { return m_rows; }
    std::size_t cols() const { return m_cols; }
    S &operator()(std::size_t i, std::size_t j) { return m_data[i * m_cols + j]; }
    const S &operator()(std::size_t i, std::size_t j) const { return m_data[i * m_cols + j]; }

    DenseMatrix without(std::size_t row, std::size_t col) const
    {
        DenseMatrix r(m_rows - 1, m_cols - 1);
        for (std::size_t i = 0, ri = 0; i < m_rows; ++i) {
            if (i == row) continue;
            for (std::size_t j = 0, rj = 0; j < m_cols; ++j) {
                if (j == col) continue;
                r(ri, rj++) = (*this)(i, j);
            }
            ++ri;
        }
        return r;
    }

    DenseMatrix without_column(std::size_t col) const
    {
        DenseMatrix r(m_rows, m_cols - 1);
        for (std::size_t i = 0; i < m_rows; ++i)
            for (std::size_t j = 0, rj = 0; j < m_cols; ++j)
                if (j != col) r(i, rj++) = (*this)(i, j);
        return r;
    }

    std::vector<S> operator*(const std::vector<S> &x) const
    {
        if (x.size() != m_cols) throw ValidationError("matrix-vector size mismatch");
        std::vector<S> y(m_rows, S(0));
        for (std::size_t i = 0; i < m_rows; ++i)
            for (std::size_t j = 0; j < m_cols; ++j) y[i] += (*this)(i, j) * x[j];
        return y;
    }

    friend DenseMatrix operator*(const DenseMatrix &a, const DenseMatrix &b)
    {
        if (a.m_cols != b.m_rows) throw ValidationError("matrix product size mismatch");
        DenseMatrix c(a.m_rows, b.m_cols);
        for (std::size_t i = 0; i < a.m_rows; ++i)
            for (std::size_t k = 0; k < a.m_cols; ++k)
                for (std::size_t j = 0; j < b.m_cols; ++j) c(i, j) += a(i, k) * b(k, j);
        return c;
    }

private:
    std::size_t m_rows, m_cols;
    std::vector<S> m_data;
};

namespace detail
{

// Pivot choice: largest magnitude for floating point, first nonzero otherwise.
template <typename S>
std::optional<std::size_t> pick_pivot(const DenseMatrix<S> &m, std::size_t col, std::size_t from)
{
    std::optional<std::size_t> best;
    for (std::size_t r = from; r < m.rows(); ++r) {
        if constexpr (is_float_v<S>) {
            if (m(r, col) != 0 && (!best || std::fabs(m(r, col)) > std::fabs(m(*best, col)))) best = r;
        } else {
            if (m(r, col) != 0) return r;
        }
    }
    return best;
}

} // namespace detail

// Determinant by Bareiss fraction-free elimination (exact for rationals and
// integers; with partial pivoting for floating point).
template <typename S>
S determinant(DenseMatrix<S> m)
{
    if (m.rows() != m.cols()) throw ValidationError("determinant of a non-square matrix");
    const std::size_t n = m.rows();
    if (n == 0) return S(1);
    S prev(1);
    int sign = 1;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        auto p = detail::pick_pivot(m, k, k);
        if (!p) return S(0);
        if (*p != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(m(k, j), m(*p, j));
            sign = -sign;
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            for (std::size_t j = k + 1; j < n; ++j) {
                S v = m(i, j) * m(k, k) - m(i, k) * m(k, j);
                m(i, j) = v / prev;
            }
            m(i, k) = S(0);
        }
        prev = m(k, k);
    }
    S d = m(n - 1, n - 1);
    return sign < 0 ? S(-d) : d;
}

// Solves the square system A x = b by Gaussian elimination; nullopt when A is
// singular (exactly for rationals, below pivot_tol relative to the largest
// entry for floating point).
template <typename S>
std::optional<std::vector<S>> solve_linear(DenseMatrix<S> a, std::vector<S> b, double pivot_tol = 1e-14)
{
    const std::size_t n = a.rows();
    if (a.cols() != n || b.size() != n) throw ValidationError("solve_linear size mismatch");
    double scale = 0;
    if constexpr (is_float_v<S>) {
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) scale = std::max(scale, std::fabs(a(i, j)));
    }
    for (std::size_t k = 0; k < n; ++k) {
        auto p = detail::pick_pivot(a, k, k);
        if (!p) return std::nullopt;
        if constexpr (is_float_v<S>) {
            if (std::fabs(a(*p, k)) <= pivot_tol * scale) return std::nullopt;
        }
        if (*p != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(*p, j));
            std::swap(b[k], b[*p]);
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            if (a(i, k) == 0) continue;
            S f = a(i, k) / a(k, k);
            for (std::size_t j = k; j < n; ++j) a(i, j) -= f * a(k, j);
            b[i] -= f * b[k];
        }
    }
    std::vector<S> x(n, S(0));
    for (std::size_t k = n; k-- > 0;) {
        S s = b[k];
        for (std::size_t j = k + 1; j < n; ++j) s -= a(k, j) * x[j];
        x[k] = s / a(k, k);
    }
    return x;
}

} // namespace pfaffcc

#endif
