#ifndef EPSPLIT_PROX_HPP
#define EPSPLIT_PROX_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>

#include "epsplit/bifunction.hpp"
#include "epsplit/convex_set.hpp"
#include "epsplit/vec.hpp"

namespace epsplit {

/// One strongly convex subproblem
///   argmin_y { lambda f(base, y) + 1/2 ||y - anchor||^2 : y in set }.
/// base freezes the first argument of the bifunction; anchor is the
/// proximity center (the current iterate for the y-step, y^k for the z-step).
struct ProxRequest {
    Bifunction f;
    Vector base;
    Vector anchor;
    double lambda = 1.0;
    ConvexSet set;
    double inner_tol = 1e-10;
    int inner_max_iters = 10000;
    /// Seeds the certificate probes (and only them); derived from the outer
    /// iteration index so error reports reproduce.
    std::uint64_t seed = 0;

    void validate() const;
};

struct ProxResult {
    Vector point;
    /// Worst relative violation of the optimality variational inequality
    ///   <y - anchor + lambda g_y, s - y> >= 0
    /// over the probe points s in C, scaled per unit probe distance and per
    /// unit gradient magnitude. At the exact minimizer this is zero up to
    /// roundoff.
    double certificate = 0.0;
    int inner_iterations = 0;
    bool used_closed_form = false;
};

/// Raised when the generic inner solver cannot certify the subproblem
/// solution within its iteration budget; carries the best iterate found.
class InnerSolveError : public std::runtime_error {
  public:
    InnerSolveError(std::string message, Vector best, double certificate)
        : std::runtime_error(std::move(message)), best_point(std::move(best)),
          certificate(certificate) {}
    Vector best_point;
    double certificate;
};

/// Objective handed to the generic engine: subgradients of a 1-strongly
/// convex function, plus a Lipschitz bound of the smooth part's gradient
/// when one exists (nullopt switches to subgradient mode).
struct InnerObjective {
    std::function<Vector(const Vector&)> subgradient;
    std::optional<double> smooth_lipschitz;
};

struct InnerSolveStats {
    int iterations = 0;
};

/// Projected (sub)gradient minimization over C. Smooth mode uses the fixed
/// step 1/(1 + L) and stops when the step shrinks below tol * (1 + ||y||);
/// nonsmooth mode runs averaged projected subgradient for the full budget.
Vector inner_solve(const InnerObjective& objective, const ConvexSet& set, Vector start,
                   double inner_tol, int inner_max_iters, InnerSolveStats* stats = nullptr);

/// Certificate used by prox_step and the verification suite.
double prox_certificate(const Bifunction& f, const Vector& base, const Vector& anchor,
                        double lambda, const ConvexSet& set, const Vector& y,
                        std::uint64_t seed);

/// Solves the subproblem through the bifunction's closed-form prox when
/// present, otherwise through inner_solve warm-started at the anchor.
/// Throws InnerSolveError when the result cannot be certified to inner_tol.
ProxResult prox_step(const ProxRequest& request);

}  // namespace epsplit

#endif  // EPSPLIT_PROX_HPP
