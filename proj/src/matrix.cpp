#include "epsplit/matrix.hpp"

#include <cmath>
#include <stdexcept>

namespace epsplit {

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n, 0.0);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Matrix Matrix::from_rows(const std::vector<Vector>& rows) {
    if (rows.empty()) return Matrix();
    Matrix m(rows.size(), rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != m.cols_) {
            throw std::invalid_argument("Matrix::from_rows: ragged rows");
        }
        for (std::size_t j = 0; j < m.cols_; ++j) m(i, j) = rows[i][j];
    }
    return m;
}

Vector Matrix::apply(const Vector& x) const {
    if (x.size() != cols_) {
        throw std::invalid_argument("Matrix::apply: dimension mismatch");
    }
    Vector r(rows_, 0.0);
    for (std::size_t i = 0; i < rows_; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < cols_; ++j) s += data_[i * cols_ + j] * x[j];
        r[i] = s;
    }
    return r;
}

Matrix Matrix::transpose() const {
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i) {
        for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    }
    return t;
}

Matrix Matrix::plus(const Matrix& other) const {
    if (rows_ != other.rows_ || cols_ != other.cols_) {
        throw std::invalid_argument("Matrix::plus: shape mismatch");
    }
    Matrix r = *this;
    for (std::size_t i = 0; i < data_.size(); ++i) r.data_[i] += other.data_[i];
    return r;
}

Matrix Matrix::scaled(double a) const {
    Matrix r = *this;
    for (double& v : r.data_) v *= a;
    return r;
}

bool Matrix::is_symmetric(double tol) const {
    if (!is_square()) return false;
    for (std::size_t i = 0; i < rows_; ++i) {
        for (std::size_t j = i + 1; j < cols_; ++j) {
            if (std::abs((*this)(i, j) - (*this)(j, i)) > tol) return false;
        }
    }
    return true;
}

double Matrix::inf_norm() const {
    double worst = 0.0;
    for (std::size_t i = 0; i < rows_; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < cols_; ++j) s += std::abs((*this)(i, j));
        worst = std::max(worst, s);
    }
    return worst;
}

LuFactorization::LuFactorization(const Matrix& a) {
    if (!a.is_square()) {
        throw std::invalid_argument("LuFactorization: matrix must be square");
    }
    n_ = a.rows();
    lu_.resize(n_ * n_);
    perm_.resize(n_);
    for (std::size_t i = 0; i < n_; ++i) {
        perm_[i] = i;
        for (std::size_t j = 0; j < n_; ++j) lu_[i * n_ + j] = a(i, j);
    }
    for (std::size_t col = 0; col < n_; ++col) {
        std::size_t pivot = col;
        double best = std::abs(lu_[perm_[col] * n_ + col]);
        for (std::size_t r = col + 1; r < n_; ++r) {
            const double v = std::abs(lu_[perm_[r] * n_ + col]);
            if (v > best) {
                best = v;
                pivot = r;
            }
        }
        if (best == 0.0) {
            singular_ = true;
            return;
        }
        std::swap(perm_[col], perm_[pivot]);
        const double d = lu_[perm_[col] * n_ + col];
        for (std::size_t r = col + 1; r < n_; ++r) {
            double* row = &lu_[perm_[r] * n_];
            const double factor = row[col] / d;
            row[col] = factor;
            const double* prow = &lu_[perm_[col] * n_];
            for (std::size_t j = col + 1; j < n_; ++j) row[j] -= factor * prow[j];
        }
    }
}

Vector LuFactorization::solve(const Vector& rhs) const {
    if (singular_) {
        throw std::runtime_error("LuFactorization::solve: singular matrix");
    }
    if (rhs.size() != n_) {
        throw std::invalid_argument("LuFactorization::solve: dimension mismatch");
    }
    Vector y(n_);
    for (std::size_t i = 0; i < n_; ++i) {
        double s = rhs[perm_[i]];
        const double* row = &lu_[perm_[i] * n_];
        for (std::size_t j = 0; j < i; ++j) s -= row[j] * y[j];
        y[i] = s;
    }
    for (std::size_t ii = n_; ii-- > 0;) {
        const double* row = &lu_[perm_[ii] * n_];
        double s = y[ii];
        for (std::size_t j = ii + 1; j < n_; ++j) s -= row[j] * y[j];
        y[ii] = s / row[ii];
    }
    return y;
}

double symmetric_min_eigenvalue(const Matrix& a) {
    if (!a.is_square()) {
        throw std::invalid_argument("symmetric_min_eigenvalue: matrix must be square");
    }
    const std::size_t n = a.rows();
    if (n == 0) return 0.0;
    // Work on a copy; classic cyclic Jacobi, plenty for desk-scale n.
    Matrix m = a;
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) off += m(p, q) * m(p, q);
        }
        if (off < 1e-30) break;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = m(p, q);
                if (std::abs(apq) < 1e-300) continue;
                const double theta = (m(q, q) - m(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double mkp = m(k, p);
                    const double mkq = m(k, q);
                    m(k, p) = c * mkp - s * mkq;
                    m(k, q) = s * mkp + c * mkq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double mpk = m(p, k);
                    const double mqk = m(q, k);
                    m(p, k) = c * mpk - s * mqk;
                    m(q, k) = s * mpk + c * mqk;
                }
            }
        }
    }
    double lo = m(0, 0);
    for (std::size_t i = 1; i < n; ++i) lo = std::min(lo, m(i, i));
    return lo;
}

}  // namespace epsplit
