#ifndef EPSPLIT_CONVEX_SET_HPP
#define EPSPLIT_CONVEX_SET_HPP

#include <memory>
#include <utility>
#include <vector>

#include "epsplit/vec.hpp"

namespace epsplit {

/// Relative membership tolerance: x counts as a member of S when
/// dist(x, S) <= kMembershipTol * (1 + ||x||).
inline constexpr double kMembershipTol = 1e-12;

/// Nonempty closed convex set with an exact Euclidean projection.
///
/// Variants: Box, Ball, Halfspace {x : <a,x> <= b}, scaled probability
/// Simplex, Product of sets over consecutive coordinate blocks, and the
/// whole space. Instances are immutable values; copying shares the
/// representation.
class ConvexSet {
  public:
    static ConvexSet box(Vector lo, Vector hi);
    static ConvexSet ball(Vector center, double radius);
    /// Stored unnormalized; the projection divides by ||a||^2 lazily.
    static ConvexSet halfspace(Vector a, double b);
    /// { x >= 0 : sum x_i = scale }.
    static ConvexSet simplex(std::size_t dim, double scale);
    static ConvexSet product(std::vector<ConvexSet> parts);
    static ConvexSet whole_space(std::size_t dim);

    std::size_t dim() const;

    /// Nearest point of the set in Euclidean norm. Exact closed form for
    /// every variant (the simplex uses the O(n log n) sorting algorithm).
    Vector project(const Vector& x) const;

    bool contains(const Vector& x, double tol = kMembershipTol) const;

    /// Distance ||project(x) - x||.
    double distance(const Vector& x) const;

    bool bounded() const;

    /// Axis-aligned box enclosing the set; throws std::domain_error when
    /// unbounded.
    std::pair<Vector, Vector> bounding_box() const;

    /// True when the set constrains coordinates independently (box, whole
    /// space, or a product of such); separable prox subproblems then have
    /// per-coordinate closed forms.
    bool box_like() const;

    /// Per-coordinate bounds for box-like sets (+-infinity on free
    /// coordinates); throws std::domain_error otherwise.
    std::pair<Vector, Vector> coordinate_bounds() const;

    std::string describe() const;

  private:
    struct Impl;
    explicit ConvexSet(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
    std::shared_ptr<const Impl> impl_;
};

}  // namespace epsplit

#endif  // EPSPLIT_CONVEX_SET_HPP
