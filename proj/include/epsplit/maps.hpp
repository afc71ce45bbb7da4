#ifndef EPSPLIT_MAPS_HPP
#define EPSPLIT_MAPS_HPP

#include <memory>
#include <vector>

#include "epsplit/convex_set.hpp"
#include "epsplit/matrix.hpp"
#include "epsplit/vec.hpp"

namespace epsplit {

/// Affine monotone operator A(x) = M x + q with M + M^T positive
/// semidefinite (validated at construction via a symmetric eigensolve).
class MonotoneOperator {
  public:
    /// General monotone affine operator (PSD-plus-skew M).
    static MonotoneOperator linear(Matrix m, Vector q);

    /// Gradient of the convex quadratic z -> 1/2 z^T Q z + <q, z>; Q must be
    /// symmetric PSD. The resolvent then minimizes a quadratic, i.e. its
    /// fixed points are the argmins.
    static MonotoneOperator convex_quadratic_gradient(Matrix q_matrix, Vector q);

    std::size_t dim() const { return q_.size(); }
    Vector apply(const Vector& x) const;
    const Matrix& matrix() const { return m_; }
    const Vector& offset() const { return q_; }

  private:
    MonotoneOperator(Matrix m, Vector q) : m_(std::move(m)), q_(std::move(q)) {}
    Matrix m_;
    Vector q_;
};

/// Resolvent J_{cA}(x) = (I + cA)^{-1} x: the unique z with x in z + c A(z).
/// Single-valued, firmly nonexpansive; Fix(J) = zeros of A.
Vector resolvent(const MonotoneOperator& op, double c, const Vector& x);

/// 1-Lipschitz self-map. Variants: identity, projection onto a convex set,
/// averaged combination sum_i mu_i T_i (mu_i > 0, sum mu_i = 1, whose fixed
/// points are the common fixed points of the T_i), and resolvents of
/// monotone operators.
class NonexpansiveMap {
  public:
    static NonexpansiveMap identity(std::size_t dim);
    static NonexpansiveMap projection(ConvexSet set);
    static NonexpansiveMap averaged(Vector weights, std::vector<NonexpansiveMap> maps);
    static NonexpansiveMap resolvent(MonotoneOperator op, double c);

    std::size_t dim() const;
    Vector apply(const Vector& x) const;
    std::string describe() const;

  private:
    struct Impl;
    explicit NonexpansiveMap(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
    std::shared_ptr<const Impl> impl_;
};

/// ||T(x) - x||, the quantity the Mann iteration drives to zero.
double fixed_point_residual(const NonexpansiveMap& map, const Vector& x);

}  // namespace epsplit

#endif  // EPSPLIT_MAPS_HPP
