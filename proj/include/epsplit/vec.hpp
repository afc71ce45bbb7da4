#ifndef EPSPLIT_VEC_HPP
#define EPSPLIT_VEC_HPP

#include <cstddef>
#include <string>
#include <vector>

namespace epsplit {

/// Point in R^n. Dimension is fixed per problem instance; mixed-dimension
/// operations throw.
using Vector = std::vector<double>;

/// Throws std::invalid_argument unless x and y have the same dimension.
void require_same_dim(const Vector& x, const Vector& y, const char* where);

/// Euclidean inner product <x, y>.
double inner(const Vector& x, const Vector& y);

double norm_sq(const Vector& x);
double norm(const Vector& x);

/// ||x - y||.
double dist(const Vector& x, const Vector& y);

bool is_finite(const Vector& x);

Vector add(const Vector& x, const Vector& y);
Vector sub(const Vector& x, const Vector& y);
Vector scale(double a, const Vector& x);

/// x + a * y.
Vector axpy(const Vector& x, double a, const Vector& y);

/// gamma * x + (1 - gamma) * y.
Vector convex_combination(double gamma, const Vector& x, const Vector& y);

Vector zeros(std::size_t n);

/// ||gamma x + (1-gamma) y - z||^2 minus its three-term expansion
///   gamma ||x-z||^2 + (1-gamma) ||y-z||^2 - gamma (1-gamma) ||x-y||^2.
/// Mathematically zero for any x, y, z and gamma in [0, 1]; exposed for
/// direct numerical verification.
double three_point_identity_residual(const Vector& x, const Vector& y,
                                     const Vector& z, double gamma);

std::string format_vector(const Vector& x);

}  // namespace epsplit

#endif  // EPSPLIT_VEC_HPP
