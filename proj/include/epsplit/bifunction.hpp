#ifndef EPSPLIT_BIFUNCTION_HPP
#define EPSPLIT_BIFUNCTION_HPP

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>

#include "epsplit/convex_set.hpp"
#include "epsplit/matrix.hpp"
#include "epsplit/vec.hpp"

namespace epsplit {

/// Equilibrium bifunction f(x, y): zero on the diagonal, convex and
/// subdifferentiable in y. Supplies one subgradient of f(x, .) wherever the
/// prox machinery asks for it, and a closed-form prox when the family and the
/// constraint set admit one.
class Bifunction {
  public:
    class Impl {
      public:
        virtual ~Impl() = default;
        virtual std::size_t dim() const = 0;
        virtual double value(const Vector& x, const Vector& y) const = 0;
        /// Some g in the subdifferential of f(x, .) at y.
        virtual Vector partial_subgradient(const Vector& x, const Vector& y) const = 0;
        /// Lipschitz bound of grad_y f(x, .) when smooth; nullopt flags a
        /// nonsmooth family (routes the generic solver to subgradient mode).
        virtual std::optional<double> smoothness_bound(const Vector&) const {
            return std::nullopt;
        }
        /// argmin_y { lambda f(base, y) + 1/2 ||y - anchor||^2 : y in set }
        /// when available in closed form.
        virtual std::optional<Vector> closed_form_prox(const Vector&, const Vector&, double,
                                                       const ConvexSet&) const {
            return std::nullopt;
        }
        virtual std::string describe() const = 0;
    };

    explicit Bifunction(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}

    std::size_t dim() const { return impl_->dim(); }
    double value(const Vector& x, const Vector& y) const;
    /// g in the diagonal subdifferential of f(x, .) at x.
    Vector diag_subgradient(const Vector& x) const;
    Vector partial_subgradient(const Vector& x, const Vector& y) const;
    std::optional<double> smoothness_bound(const Vector& x) const;
    std::optional<Vector> closed_form_prox(const Vector& base, const Vector& anchor,
                                           double lambda, const ConvexSet& set) const;
    std::string describe() const { return impl_->describe(); }
    const Impl& impl() const { return *impl_; }

    /// f identically zero (prox degenerates to a projection).
    static Bifunction zero(std::size_t dim);

    /// f(x, y) = <M x + q, y - x>, the bifunction form of the variational
    /// inequality with affine operator F(x) = M x + q. Prox is a single
    /// projection for any constraint set.
    static Bifunction vi_linear(Matrix m, Vector q);

    /// f(x, y) = sum_i [ q_i/2 (y_i^2 - x_i^2) + l_i(x) (y_i - x_i) ] with
    /// affine l(x) = L x + d and q >= 0 componentwise. Per-coordinate prox
    /// over box-like sets.
    static Bifunction separable_quadratic(Vector q, Matrix linear, Vector offset);

    /// Family-aware sum: diagonal-quadratic summands combine into one
    /// diagonal-quadratic (preserving closed-form proxes).
    static std::optional<Bifunction> try_sum(const Bifunction& f1, const Bifunction& f2);

  private:
    std::shared_ptr<const Impl> impl_;
};

/// f = f1 + f2, the structure Algorithm-style prox splitting exploits: the
/// two components are proxed separately, never their sum.
struct SplitBifunction {
    Bifunction f1;
    Bifunction f2;

    std::size_t dim() const { return f1.dim(); }
    double value(const Vector& x, const Vector& y) const;

    /// The lumped bifunction f1 + f2 (used by the fixed-stepsize stopping
    /// residual). Family-aware; falls back to a generic additive wrapper.
    Bifunction combined() const;
};

/// Nash game with concave-quadratic payoffs
///   phi_i(x) = x_i (a_i - sum_j b_ij x_j) - c_i x_i,   b_ii > 0.
struct QuadraticGame {
    Vector a;
    Matrix b;
    Vector c;

    std::size_t players() const { return a.size(); }
    void validate() const;
    double payoff(std::size_t i, const Vector& x) const;
};

/// Nikaido-Isoda bifunction of the game, split into the revenue-difference
/// part (f1) and the cost-difference part (f2). Equilibria of the game are
/// exactly the points with f(x*, y) >= 0 for all feasible y.
SplitBifunction nikaido_isoda(const QuadraticGame& game);

/// Same bifunction lumped into f1 with f2 = 0.
SplitBifunction nikaido_isoda_lumped(const QuadraticGame& game);

enum class MonotonicityVerdict { consistent_with_monotone, consistent_with_pseudo_monotone, violated };

struct MonotonicityReport {
    int samples = 0;
    double max_symmetric_sum = 0.0;  // max of f(x,y) + f(y,x)
    int pseudo_violations = 0;       // f(x,y) >= 0 but f(y,x) > 0
    MonotonicityVerdict verdict = MonotonicityVerdict::consistent_with_monotone;
};

std::string to_string(MonotonicityVerdict v);

/// Samples pairs from C (via projection of box samples) and classifies the
/// observed monotonicity. "violated" is conclusive; the other verdicts are
/// evidence only. Unbounded C requires an explicit sampling box.
MonotonicityReport probe_monotonicity(
    const Bifunction& f, const ConvexSet& set, int samples, std::uint64_t seed,
    const std::optional<std::pair<Vector, Vector>>& sampling_box = std::nullopt);

}  // namespace epsplit

#endif  // EPSPLIT_BIFUNCTION_HPP
