#include "epsplit/problems.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "epsplit/rng.hpp"

namespace epsplit {

namespace {

constexpr double kOracleTol = 1e-12;
constexpr double kConstrainedOracleTol = 1e-10;

void require_br_contraction(const QuadraticGame& game) {
    // |d BR_i / d x_j| = |b_ij| / (2 b_ii); an infinity-norm contraction
    // needs row sums below one.
    for (std::size_t i = 0; i < game.players(); ++i) {
        double off = 0.0;
        for (std::size_t j = 0; j < game.players(); ++j) {
            if (j != i) off += std::abs(game.b(i, j));
        }
        if (!(off < 2.0 * game.b(i, i))) {
            throw std::invalid_argument(
                "cournot_oracle: best-response map is not a contraction (need "
                "sum_{j!=i} |b_ij| < 2 b_ii); oracle invalid, instance rejected");
        }
    }
}

Vector best_response(const QuadraticGame& game, const Vector& x, const Vector& lo,
                     const Vector& hi, const std::vector<LinearConstraint>& constraints) {
    const std::size_t n = game.players();
    Vector br(n);
    for (std::size_t i = 0; i < n; ++i) {
        double others = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (j != i) others += game.b(i, j) * x[j];
        }
        double lo_i = lo[i];
        double hi_i = hi[i];
        // Halfspace constraints restrict player i's slice given x_{-i}.
        for (const auto& cons : constraints) {
            double rest = 0.0;
            for (std::size_t l = 0; l < n; ++l) {
                if (l != i) rest += cons.a[l] * x[l];
            }
            const double coeff = cons.a[i];
            if (coeff > 0.0) {
                hi_i = std::min(hi_i, (cons.b - rest) / coeff);
            } else if (coeff < 0.0) {
                lo_i = std::max(lo_i, (cons.b - rest) / coeff);
            }
        }
        if (lo_i > hi_i) {
            throw std::runtime_error(
                "constrained_cournot_oracle: empty best-response interval for player " +
                std::to_string(i));
        }
        const double unconstrained = (game.a[i] - others - game.c[i]) / (2.0 * game.b(i, i));
        br[i] = std::min(std::max(unconstrained, lo_i), hi_i);
    }
    return br;
}

Vector joint_project(Vector x, const Vector& lo, const Vector& hi,
                     const std::vector<LinearConstraint>& constraints) {
    // Cyclic projections onto the box and each halfspace; identity on
    // already-feasible points, so it does not disturb a converged iterate.
    for (int round = 0; round < 200; ++round) {
        bool feasible = true;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double clamped = std::min(std::max(x[i], lo[i]), hi[i]);
            if (clamped != x[i]) feasible = false;
            x[i] = clamped;
        }
        for (const auto& cons : constraints) {
            const double excess = inner(cons.a, x) - cons.b;
            if (excess > 1e-14 * (1.0 + std::abs(cons.b))) {
                feasible = false;
                x = axpy(x, -excess / norm_sq(cons.a), cons.a);
            }
        }
        if (feasible) return x;
    }
    throw std::runtime_error("cournot oracle: could not reach a jointly feasible point");
}

Vector br_iterate(const QuadraticGame& game, const Vector& lo, const Vector& hi,
                  const std::vector<LinearConstraint>& constraints, double damping,
                  double tol) {
    Vector x(game.players());
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = 0.5 * (lo[i] + hi[i]);
    x = joint_project(std::move(x), lo, hi, constraints);
    for (long it = 0; it < 200000; ++it) {
        x = joint_project(std::move(x), lo, hi, constraints);
        const Vector br = best_response(game, x, lo, hi, constraints);
        const Vector next = convex_combination(damping, br, x);
        const double step = dist(next, x);
        x = next;
        if (step <= tol * (1.0 + norm(x))) return x;
    }
    throw std::runtime_error("cournot oracle: best-response iteration did not settle");
}

bool symmetric_two_player(const QuadraticGame& game) {
    if (game.players() != 2) return false;
    const double b = game.b(0, 0);
    for (std::size_t i = 0; i < 2; ++i) {
        for (std::size_t j = 0; j < 2; ++j) {
            if (game.b(i, j) != b) return false;
        }
    }
    return game.a[0] == game.a[1];
}

}  // namespace

Vector cournot_oracle(const CournotProblem& cournot) {
    cournot.game.validate();
    require_br_contraction(cournot.game);
    Vector x = br_iterate(cournot.game, cournot.action_lo, cournot.action_hi, {}, 1.0,
                          kOracleTol);

    if (symmetric_two_player(cournot.game)) {
        // Closed form x_i* = (a - 2 c_i + c_j) / (3 b) for the interior case.
        const double a = cournot.game.a[0];
        const double b = cournot.game.b(0, 0);
        Vector closed(2);
        closed[0] = (a - 2.0 * cournot.game.c[0] + cournot.game.c[1]) / (3.0 * b);
        closed[1] = (a - 2.0 * cournot.game.c[1] + cournot.game.c[0]) / (3.0 * b);
        bool interior = true;
        for (std::size_t i = 0; i < 2; ++i) {
            if (closed[i] < cournot.action_lo[i] || closed[i] > cournot.action_hi[i]) {
                interior = false;
            }
        }
        if (interior && dist(closed, x) > 1e-9 * (1.0 + norm(closed))) {
            throw std::runtime_error(
                "cournot_oracle: best-response result disagrees with the closed form");
        }
    }
    return x;
}

Vector constrained_cournot_oracle(const CournotProblem& cournot,
                                  const std::vector<LinearConstraint>& constraints) {
    cournot.game.validate();
    require_br_contraction(cournot.game);
    for (const auto& cons : constraints) {
        if (cons.a.size() != cournot.game.players()) {
            throw std::invalid_argument("constrained_cournot_oracle: constraint dimension");
        }
    }
    return br_iterate(cournot.game, cournot.action_lo, cournot.action_hi, constraints, 0.5,
                      kConstrainedOracleTol);
}

void validate_instance(const ProblemInstance& instance, double fp_tol, double ep_tol,
                       int samples, std::uint64_t seed) {
    const std::size_t n = instance.dimension;
    if (instance.split.f1.dim() != n || instance.split.f2.dim() != n ||
        instance.set.dim() != n || instance.map.dim() != n) {
        throw std::invalid_argument("ProblemInstance: inconsistent dimensions");
    }
    if (!instance.oracle_solution) return;
    const Vector& star = *instance.oracle_solution;
    if (star.size() != n) {
        throw std::invalid_argument("ProblemInstance: oracle dimension mismatch");
    }

    const double fp_res = fixed_point_residual(instance.map, star);
    if (fp_res > fp_tol) {
        throw std::invalid_argument("ProblemInstance '" + instance.name +
                                    "': oracle fixed-point residual " + std::to_string(fp_res) +
                                    " exceeds " + std::to_string(fp_tol));
    }

    Rng rng(derive_seed(seed, 0x696e7374ULL));
    Vector lo, hi;
    if (instance.set.bounded()) {
        std::tie(lo, hi) = instance.set.bounding_box();
    }
    double min_value = std::numeric_limits<double>::infinity();
    for (int s = 0; s < samples; ++s) {
        Vector y = instance.set.bounded()
                       ? instance.set.project(rng.uniform_vector(lo, hi))
                       : instance.set.project(axpy(star, 1.0, rng.normal_vector(n, 4.0)));
        min_value = std::min(min_value, instance.split.value(star, y));
    }
    if (min_value < -ep_tol) {
        throw std::invalid_argument("ProblemInstance '" + instance.name +
                                    "': sampled equilibrium optimality failed, min f(x*, y) = " +
                                    std::to_string(min_value));
    }
}

ProblemInstance build_cournot(const CournotProblem& cournot, NiSplit split) {
    cournot.game.validate();
    const std::size_t n = cournot.game.players();
    if (cournot.action_lo.size() != n || cournot.action_hi.size() != n) {
        throw std::invalid_argument("build_cournot: action box dimension mismatch");
    }
    ProblemInstance instance{
        "cournot",
        n,
        split == NiSplit::revenue_cost ? nikaido_isoda(cournot.game)
                                       : nikaido_isoda_lumped(cournot.game),
        ConvexSet::box(cournot.action_lo, cournot.action_hi),
        NonexpansiveMap::identity(n),
        std::nullopt,
        ""};
    instance.oracle_solution = cournot_oracle(cournot);
    instance.oracle_provenance = "damped best-response iteration at 1e-12";
    validate_instance(instance);
    return instance;
}

ProblemInstance build_sep_game(const CournotProblem& cournot,
                               const std::vector<LinearConstraint>& constraints,
                               const Vector& weights, NiSplit split) {
    if (constraints.empty()) {
        // Degenerate split-equilibrium game: the averaged projection map is
        // empty, so it is replaced by the identity and the instance reduces
        // exactly to the plain Cournot build.
        return build_cournot(cournot, split);
    }
    cournot.game.validate();
    const std::size_t n = cournot.game.players();
    std::vector<NonexpansiveMap> projections;
    projections.reserve(constraints.size());
    for (const auto& cons : constraints) {
        projections.push_back(
            NonexpansiveMap::projection(ConvexSet::halfspace(cons.a, cons.b)));
    }
    ProblemInstance instance{
        "sep_game",
        n,
        split == NiSplit::revenue_cost ? nikaido_isoda(cournot.game)
                                       : nikaido_isoda_lumped(cournot.game),
        ConvexSet::box(cournot.action_lo, cournot.action_hi),
        NonexpansiveMap::averaged(weights, std::move(projections)),
        std::nullopt,
        ""};
    instance.oracle_solution = constrained_cournot_oracle(cournot, constraints);
    instance.oracle_provenance = "projected best-response iteration at 1e-10";
    // The oracle is the jointly-constrained equilibrium: it is a fixed point
    // of T, and its equilibrium optimality holds over C intersected with the
    // constraint halfspaces (checked by the dedicated test suite), not over
    // the whole action box.
    const double fp_res = fixed_point_residual(instance.map, *instance.oracle_solution);
    if (fp_res > 1e-8) {
        throw std::invalid_argument("build_sep_game: oracle violates the constraints, residual " +
                                    std::to_string(fp_res));
    }
    return instance;
}

ProblemInstance build_intersection_ep(
    SplitBifunction split, const std::vector<ConvexSet>& sets, const Vector& weights,
    const std::optional<std::pair<Vector, Vector>>& prox_box,
    const std::optional<Vector>& witness) {
    if (sets.empty()) throw std::invalid_argument("build_intersection_ep: no sets");
    const std::size_t n = sets.front().dim();
    for (const auto& s : sets) {
        if (s.dim() != n) {
            throw std::invalid_argument("build_intersection_ep: set dimension mismatch");
        }
    }
    if (witness) {
        for (std::size_t i = 0; i < sets.size(); ++i) {
            if (!sets[i].contains(*witness, 1e-9)) {
                throw std::invalid_argument(
                    "build_intersection_ep: witness point is not in set " + std::to_string(i));
            }
        }
    }

    Vector lo, hi;
    if (prox_box) {
        std::tie(lo, hi) = *prox_box;
        if (lo.size() != n || hi.size() != n) {
            throw std::invalid_argument("build_intersection_ep: prox box dimension mismatch");
        }
    } else {
        lo.assign(n, std::numeric_limits<double>::infinity());
        hi.assign(n, -std::numeric_limits<double>::infinity());
        for (const auto& s : sets) {
            if (!s.bounded()) {
                throw std::invalid_argument(
                    "build_intersection_ep: unbounded component set; supply an explicit "
                    "prox box");
            }
            auto [slo, shi] = s.bounding_box();
            for (std::size_t i = 0; i < n; ++i) {
                lo[i] = std::min(lo[i], slo[i]);
                hi[i] = std::max(hi[i], shi[i]);
            }
        }
    }

    std::vector<NonexpansiveMap> projections;
    projections.reserve(sets.size());
    for (const auto& s : sets) projections.push_back(NonexpansiveMap::projection(s));

    return ProblemInstance{"intersection_ep",
                           n,
                           std::move(split),
                           ConvexSet::box(std::move(lo), std::move(hi)),
                           NonexpansiveMap::averaged(weights, std::move(projections)),
                           std::nullopt,
                           ""};
}

ProblemInstance build_inclusion_ep(SplitBifunction split,
                                   const std::vector<MonotoneOperator>& operators, double c,
                                   const Vector& weights, ConvexSet set) {
    if (operators.empty()) throw std::invalid_argument("build_inclusion_ep: no operators");
    const std::size_t n = set.dim();
    std::vector<NonexpansiveMap> resolvents;
    resolvents.reserve(operators.size());
    for (const auto& op : operators) {
        if (op.dim() != n) {
            throw std::invalid_argument("build_inclusion_ep: operator dimension mismatch");
        }
        resolvents.push_back(NonexpansiveMap::resolvent(op, c));
    }
    return ProblemInstance{"inclusion_ep",
                           n,
                           std::move(split),
                           std::move(set),
                           NonexpansiveMap::averaged(weights, std::move(resolvents)),
                           std::nullopt,
                           ""};
}

}  // namespace epsplit
