#ifndef EPSPLIT_MATRIX_HPP
#define EPSPLIT_MATRIX_HPP

#include <cstddef>
#include <vector>

#include "epsplit/vec.hpp"

namespace epsplit {

/// Small dense row-major matrix. The solver works at desk scale, so a plain
/// O(n^3) factorization is all the linear algebra the library needs.
class Matrix {
  public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);

    static Matrix identity(std::size_t n);
    static Matrix from_rows(const std::vector<Vector>& rows);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    Vector apply(const Vector& x) const;
    Matrix transpose() const;
    Matrix plus(const Matrix& other) const;
    Matrix scaled(double a) const;

    bool is_square() const { return rows_ == cols_; }
    bool is_symmetric(double tol = 1e-12) const;

    /// Max row sum of absolute values (induced infinity norm).
    double inf_norm() const;

  private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/// LU factorization with partial pivoting of a square matrix, reused across
/// solves (resolvents factor I + cM once and back-substitute per apply).
class LuFactorization {
  public:
    explicit LuFactorization(const Matrix& a);

    Vector solve(const Vector& rhs) const;
    bool singular() const { return singular_; }

  private:
    std::size_t n_ = 0;
    std::vector<double> lu_;
    std::vector<std::size_t> perm_;
    bool singular_ = false;
};

/// Smallest eigenvalue of a symmetric matrix via cyclic Jacobi rotations.
/// Used to validate monotonicity of affine operators at construction.
double symmetric_min_eigenvalue(const Matrix& a);

}  // namespace epsplit

#endif  // EPSPLIT_MATRIX_HPP
