#include "epsplit/prox.hpp"

#include <algorithm>
#include <cmath>

#include "epsplit/rng.hpp"

namespace epsplit {

void ProxRequest::validate() const {
    if (!(lambda > 0.0)) throw std::invalid_argument("ProxRequest: lambda must be > 0");
    if (!(inner_tol > 0.0)) throw std::invalid_argument("ProxRequest: inner_tol must be > 0");
    if (inner_max_iters < 1) {
        throw std::invalid_argument("ProxRequest: inner_max_iters must be >= 1");
    }
    const std::size_t n = set.dim();
    if (base.size() != n || anchor.size() != n || f.dim() != n) {
        throw std::invalid_argument("ProxRequest: dimension mismatch");
    }
}

Vector inner_solve(const InnerObjective& objective, const ConvexSet& set, Vector start,
                   double inner_tol, int inner_max_iters, InnerSolveStats* stats) {
    if (!(inner_tol > 0.0)) throw std::invalid_argument("inner_solve: inner_tol must be > 0");
    Vector y = set.project(std::move(start));

    if (objective.smooth_lipschitz) {
        // Strong convexity modulus is 1 by construction, so the fixed step
        // 1/(1 + L_smooth) contracts linearly.
        const double t = 1.0 / (1.0 + std::max(0.0, *objective.smooth_lipschitz));
        for (int it = 0; it < inner_max_iters; ++it) {
            const Vector g = objective.subgradient(y);
            Vector next = set.project(axpy(y, -t, g));
            const double step = dist(next, y);
            y = std::move(next);
            if (stats) stats->iterations = it + 1;
            if (step <= inner_tol * (1.0 + norm(y))) return y;
        }
        throw InnerSolveError("inner_solve: iteration cap " +
                                  std::to_string(inner_max_iters) +
                                  " exceeded before reaching tolerance",
                              y, -1.0);
    }

    // Nonsmooth: projected subgradient with iterate averaging, steps
    // 2/(k+2) for modulus-1 strong convexity.
    Vector averaged = y;
    double weight_sum = 0.0;
    for (int it = 0; it < inner_max_iters; ++it) {
        const Vector g = objective.subgradient(y);
        const double t = 2.0 / static_cast<double>(it + 2);
        y = set.project(axpy(y, -t, g));
        const double w = static_cast<double>(it + 1);
        if (weight_sum == 0.0) {
            averaged = y;
        } else {
            const double mix = w / (weight_sum + w);
            averaged = convex_combination(mix, y, averaged);
        }
        weight_sum += w;
        if (stats) stats->iterations = it + 1;
    }
    return averaged;
}

double prox_certificate(const Bifunction& f, const Vector& base, const Vector& anchor,
                        double lambda, const ConvexSet& set, const Vector& y,
                        std::uint64_t seed) {
    // Gradient of the subproblem objective at y.
    const Vector g_y = f.partial_subgradient(base, y);
    Vector grad = sub(y, anchor);
    for (std::size_t i = 0; i < grad.size(); ++i) grad[i] += lambda * g_y[i];
    const double grad_scale = 1.0 + norm(grad);

    Rng rng(derive_seed(seed, 0x63657274ULL));
    constexpr int kProbes = 32;
    // Probe radii sweep local to global neighborhoods of y.
    const double radii[4] = {1e-3, 1e-1, 1.0, 10.0};
    const std::size_t n = y.size();
    Vector direction(n);
    Vector probe(n);
    double worst = 0.0;
    for (int p = 0; p < kProbes; ++p) {
        const double r = radii[p % 4] * (1.0 + norm(y));
        for (std::size_t i = 0; i < n; ++i) direction[i] = rng.uniform(-1.0, 1.0);
        for (std::size_t i = 0; i < n; ++i) probe[i] = y[i] + r * direction[i];
        const Vector s = set.project(probe);
        const Vector d = sub(s, y);
        const double dn = norm(d);
        if (dn == 0.0) continue;
        const double violation = -inner(grad, d) / ((1.0 + dn) * grad_scale);
        worst = std::max(worst, violation);
    }
    return worst;
}

ProxResult prox_step(const ProxRequest& request) {
    request.validate();
    ProxResult result;

    if (auto closed = request.f.closed_form_prox(request.base, request.anchor, request.lambda,
                                                 request.set)) {
        result.point = std::move(*closed);
        result.used_closed_form = true;
        result.certificate =
            prox_certificate(request.f, request.base, request.anchor, request.lambda,
                             request.set, result.point, request.seed);
        return result;
    }

    InnerObjective objective;
    const Bifunction f = request.f;
    const Vector base = request.base;
    const Vector anchor = request.anchor;
    const double lambda = request.lambda;
    objective.subgradient = [&f, &base, &anchor, lambda](const Vector& y) {
        Vector g = f.partial_subgradient(base, y);
        for (std::size_t i = 0; i < g.size(); ++i) g[i] = lambda * g[i] + (y[i] - anchor[i]);
        return g;
    };
    if (auto l = f.smoothness_bound(base)) {
        objective.smooth_lipschitz = lambda * *l;
    }

    // The certificate is measured against inner_tol, so the step-based
    // termination below it must run tighter than inner_tol itself.
    double solve_tol = request.inner_tol;
    if (objective.smooth_lipschitz) {
        solve_tol /= 16.0 * (1.0 + *objective.smooth_lipschitz) * (1.0 + norm(anchor));
    }

    InnerSolveStats stats;
    Vector y;
    try {
        y = inner_solve(objective, request.set, request.anchor, solve_tol,
                        request.inner_max_iters, &stats);
    } catch (const InnerSolveError& err) {
        const double cert = prox_certificate(request.f, request.base, request.anchor,
                                             request.lambda, request.set, err.best_point,
                                             request.seed);
        throw InnerSolveError(std::string(err.what()) + " (certificate " +
                                  std::to_string(cert) + ")",
                              err.best_point, cert);
    }

    result.point = std::move(y);
    result.inner_iterations = stats.iterations;
    result.certificate = prox_certificate(request.f, request.base, request.anchor,
                                          request.lambda, request.set, result.point,
                                          request.seed);
    if (result.certificate > request.inner_tol) {
        throw InnerSolveError("prox_step: inner solver finished but certificate " +
                                  std::to_string(result.certificate) +
                                  " exceeds inner_tol " + std::to_string(request.inner_tol),
                              result.point, result.certificate);
    }
    return result;
}

}  // namespace epsplit
