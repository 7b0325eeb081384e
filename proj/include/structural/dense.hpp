#pragma once

// Small dense linear algebra, templated on the scalar backend. Sizes here
// never exceed a few dozen, so clarity wins over blocking.

#include "structural/errors.hpp"
#include "structural/scalar.hpp"

#include <cstddef>
#include <utility>
#include <vector>

namespace structural {

template <Real T>
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, T(0.0)) {}

    static Matrix identity(std::size_t n)
    {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) {
            m(i, i) = T(1.0);
        }
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    const std::vector<T>& data() const { return data_; }

    T& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const T& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    Matrix transposed() const
    {
        Matrix t(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i) {
            for (std::size_t j = 0; j < cols_; ++j) {
                t(j, i) = (*this)(i, j);
            }
        }
        return t;
    }

    friend Matrix operator*(const Matrix& a, const Matrix& b)
    {
        if (a.cols_ != b.rows_) {
            throw InternalError("matrix product: shape mismatch");
        }
        Matrix c(a.rows_, b.cols_);
        for (std::size_t i = 0; i < a.rows_; ++i) {
            for (std::size_t k = 0; k < a.cols_; ++k) {
                const T aik = a(i, k);
                for (std::size_t j = 0; j < b.cols_; ++j) {
                    c(i, j) += aik * b(k, j);
                }
            }
        }
        return c;
    }

    template <Real U>
    Matrix<U> cast() const
    {
        Matrix<U> m(rows_, cols_);
        for (std::size_t i = 0; i < rows_; ++i) {
            for (std::size_t j = 0; j < cols_; ++j) {
                if constexpr (std::same_as<U, T>) {
                    m(i, j) = (*this)(i, j);
                } else if constexpr (std::same_as<U, double>) {
                    m(i, j) = num::to_double((*this)(i, j));
                } else {
                    m(i, j) = U((*this)(i, j));
                }
            }
        }
        return m;
    }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<T> data_;
};

// Full Householder QR of an m x n matrix (m >= n): A = Q R with Q m x m
// orthogonal. Columns n..m-1 of Q span the orthogonal complement of
// range(A).
template <Real T>
std::pair<Matrix<T>, Matrix<T>> householder_qr(const Matrix<T>& a)
{
    const std::size_t m = a.rows();
    const std::size_t n = a.cols();
    Matrix<T> r = a;
    Matrix<T> q = Matrix<T>::identity(m);
    std::vector<T> v(m);
    for (std::size_t k = 0; k < n && k < m; ++k) {
        T norm2(0.0);
        for (std::size_t i = k; i < m; ++i) {
            norm2 += r(i, k) * r(i, k);
        }
        if (!(norm2 > T(0.0))) {
            continue;
        }
        T alpha = num::sqrt(norm2);
        if (r(k, k) > T(0.0)) {
            alpha = -alpha;
        }
        for (std::size_t i = 0; i < m; ++i) {
            v[i] = T(0.0);
        }
        v[k] = r(k, k) - alpha;
        for (std::size_t i = k + 1; i < m; ++i) {
            v[i] = r(i, k);
        }
        T vnorm2(0.0);
        for (std::size_t i = k; i < m; ++i) {
            vnorm2 += v[i] * v[i];
        }
        if (!(vnorm2 > T(0.0))) {
            continue;
        }
        const T scale = T(2.0) / vnorm2;
        // R <- H R
        for (std::size_t j = 0; j < n; ++j) {
            T dot(0.0);
            for (std::size_t i = k; i < m; ++i) {
                dot += v[i] * r(i, j);
            }
            dot *= scale;
            for (std::size_t i = k; i < m; ++i) {
                r(i, j) -= dot * v[i];
            }
        }
        // Q <- Q H
        for (std::size_t i = 0; i < m; ++i) {
            T dot(0.0);
            for (std::size_t l = k; l < m; ++l) {
                dot += q(i, l) * v[l];
            }
            dot *= scale;
            for (std::size_t l = k; l < m; ++l) {
                q(i, l) -= dot * v[l];
            }
        }
    }
    return {q, r};
}

// LU factorisation with partial pivoting.
template <Real T>
class LU {
public:
    explicit LU(const Matrix<T>& a) : lu_(a), piv_(a.rows())
    {
        const std::size_t n = a.rows();
        if (a.cols() != n) {
            throw InternalError("LU of a non-square matrix");
        }
        for (std::size_t i = 0; i < n; ++i) {
            piv_[i] = i;
        }
        for (std::size_t k = 0; k < n; ++k) {
            std::size_t p = k;
            T best = num::abs(lu_(k, k));
            for (std::size_t i = k + 1; i < n; ++i) {
                const T c = num::abs(lu_(i, k));
                if (c > best) {
                    best = c;
                    p = i;
                }
            }
            if (!(best > T(0.0))) {
                singular_ = true;
                return;
            }
            if (p != k) {
                for (std::size_t j = 0; j < n; ++j) {
                    std::swap(lu_(k, j), lu_(p, j));
                }
                std::swap(piv_[k], piv_[p]);
            }
            for (std::size_t i = k + 1; i < n; ++i) {
                const T f = lu_(i, k) / lu_(k, k);
                lu_(i, k) = f;
                for (std::size_t j = k + 1; j < n; ++j) {
                    lu_(i, j) -= f * lu_(k, j);
                }
            }
        }
    }

    bool singular() const { return singular_; }

    std::vector<T> solve(const std::vector<T>& b) const
    {
        if (singular_) {
            throw DomainError("singular matrix");
        }
        const std::size_t n = lu_.rows();
        std::vector<T> x(n);
        for (std::size_t i = 0; i < n; ++i) {
            x[i] = b[piv_[i]];
        }
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < i; ++j) {
                x[i] -= lu_(i, j) * x[j];
            }
        }
        for (std::size_t ii = n; ii-- > 0;) {
            for (std::size_t j = ii + 1; j < n; ++j) {
                x[ii] -= lu_(ii, j) * x[j];
            }
            x[ii] /= lu_(ii, ii);
        }
        return x;
    }

    Matrix<T> solve(const Matrix<T>& b) const
    {
        Matrix<T> x(b.rows(), b.cols());
        std::vector<T> col(b.rows());
        for (std::size_t j = 0; j < b.cols(); ++j) {
            for (std::size_t i = 0; i < b.rows(); ++i) {
                col[i] = b(i, j);
            }
            const std::vector<T> s = solve(col);
            for (std::size_t i = 0; i < b.rows(); ++i) {
                x(i, j) = s[i];
            }
        }
        return x;
    }

    Matrix<T> inverse() const { return solve(Matrix<T>::identity(lu_.rows())); }

private:
    Matrix<T> lu_;
    std::vector<std::size_t> piv_;
    bool singular_ = false;
};

template <Real T>
T norm1(const Matrix<T>& a)
{
    T best(0.0);
    for (std::size_t j = 0; j < a.cols(); ++j) {
        T s(0.0);
        for (std::size_t i = 0; i < a.rows(); ++i) {
            s += num::abs(a(i, j));
        }
        best = num::max(best, s);
    }
    return best;
}

// 1-norm condition number via the explicit inverse; infinity if singular.
template <Real T>
double condition1(const Matrix<T>& a)
{
    LU<T> lu(a);
    if (lu.singular()) {
        return std::numeric_limits<double>::infinity();
    }
    return num::to_double(norm1(a) * norm1(lu.inverse()));
}

} // namespace structural
