#ifndef EPSPLIT_PROBLEMS_HPP
#define EPSPLIT_PROBLEMS_HPP

#include <optional>
#include <string>
#include <vector>

#include "epsplit/bifunction.hpp"
#include "epsplit/convex_set.hpp"
#include "epsplit/maps.hpp"
#include "epsplit/solver.hpp"

namespace epsplit {

/// A ready-to-solve triple (f1 + f2, C, T) plus ground truth when an
/// independent oracle can produce one.
struct ProblemInstance {
    std::string name;
    std::size_t dimension = 0;
    SplitBifunction split;
    ConvexSet set;
    NonexpansiveMap map;
    std::optional<Vector> oracle_solution;
    std::string oracle_provenance;

    Problem problem() const { return Problem{split, set, map}; }
};

/// Checks an attached oracle before any solver run: fixed-point residual of
/// T at most fp_tol and sampled equilibrium optimality
/// min_y f(x*, y) >= -ep_tol.
void validate_instance(const ProblemInstance& instance, double fp_tol = 1e-8,
                       double ep_tol = 1e-6, int samples = 256, std::uint64_t seed = 17);

enum class NiSplit { revenue_cost, lumped };

struct CournotProblem {
    QuadraticGame game;
    Vector action_lo;
    Vector action_hi;
};

/// Plain Nash-Cournot game over the action box: T = identity.
ProblemInstance build_cournot(const CournotProblem& cournot,
                              NiSplit split = NiSplit::revenue_cost);

struct LinearConstraint {
    Vector a;
    double b = 0.0;
};

/// Jointly constrained game: equilibrium conditions over the action box plus
/// halfspace constraints <a_j, x> <= b_j handled through T = averaged
/// halfspace projections. No constraints reduces exactly to build_cournot.
ProblemInstance build_sep_game(const CournotProblem& cournot,
                               const std::vector<LinearConstraint>& constraints,
                               const Vector& weights, NiSplit split = NiSplit::revenue_cost);

/// Equilibrium problem over an intersection of convex sets: T = averaged
/// projections onto the C_i, while the prox subproblems run over a simple
/// enclosing box (the method's point is never projecting onto the
/// intersection itself). The box is computed from bounded C_i or supplied
/// explicitly; a witness point, when given, is checked to lie in every C_i.
ProblemInstance build_intersection_ep(
    SplitBifunction split, const std::vector<ConvexSet>& sets, const Vector& weights,
    const std::optional<std::pair<Vector, Vector>>& prox_box = std::nullopt,
    const std::optional<Vector>& witness = std::nullopt);

/// Equilibrium problem plus monotone inclusions 0 in M_i(x): T = averaged
/// resolvents (I + c M_i)^{-1}.
ProblemInstance build_inclusion_ep(SplitBifunction split,
                                   const std::vector<MonotoneOperator>& operators, double c,
                                   const Vector& weights, ConvexSet set);

/// Damped best-response iteration for the Cournot game, run to residual
/// 1e-12; independent of the splitting solver. Requires the best-response
/// map to be a contraction (sum_{j != i} |b_ij| < 2 b_ii).
Vector cournot_oracle(const CournotProblem& cournot);

/// Best-response iteration with each player's action clamped to the feasible
/// interval induced by the halfspace constraints; residual 1e-10.
Vector constrained_cournot_oracle(const CournotProblem& cournot,
                                  const std::vector<LinearConstraint>& constraints);

}  // namespace epsplit

#endif  // EPSPLIT_PROBLEMS_HPP
