#include <doctest.h>

#include <cmath>

#include "epsplit/prox.hpp"
#include "epsplit/rng.hpp"
#include "oracles.hpp"

using namespace epsplit;

namespace {

// Nonsmooth test family f(x, y) = w * (||y||_1 - ||x||_1): convex in y,
// zero on the diagonal, no closed-form prox registered.
class L1Bifunction final : public Bifunction::Impl {
  public:
    L1Bifunction(std::size_t n, double w) : n_(n), w_(w) {}
    std::size_t dim() const override { return n_; }
    double value(const Vector& x, const Vector& y) const override {
        double s = 0.0;
        for (std::size_t i = 0; i < n_; ++i) s += std::abs(y[i]) - std::abs(x[i]);
        return w_ * s;
    }
    Vector partial_subgradient(const Vector&, const Vector& y) const override {
        Vector g(n_);
        for (std::size_t i = 0; i < n_; ++i) {
            g[i] = y[i] > 0.0 ? w_ : (y[i] < 0.0 ? -w_ : 0.0);
        }
        return g;
    }
    std::string describe() const override { return "l1"; }

  private:
    std::size_t n_;
    double w_;
};

ProxRequest make_request(Bifunction f, Vector base, Vector anchor, double lambda,
                         ConvexSet set) {
    return ProxRequest{std::move(f), std::move(base), std::move(anchor), lambda,
                       std::move(set)};
}

}  // namespace

TEST_CASE("prox closed forms from the operation examples") {
    // vi_linear with F(x) = (2,2) at base = anchor = (1,1), lambda = 1/2 over
    // [0,10]^2: projection of anchor - lambda F = (0,0).
    const Bifunction f =
        Bifunction::vi_linear(Matrix(2, 2, 0.0), {2.0, 2.0});
    const auto res = prox_step(make_request(f, {1.0, 1.0}, {1.0, 1.0}, 0.5,
                                            ConvexSet::box({0.0, 0.0}, {10.0, 10.0})));
    CHECK(res.used_closed_form);
    CHECK(dist(res.point, {0.0, 0.0}) == 0.0);
    CHECK(res.certificate <= 1e-10);

    // f = 0 reduces to a pure projection of the anchor.
    const auto proj = prox_step(make_request(Bifunction::zero(2), {5.0, 5.0}, {-3.0, 4.0}, 1.0,
                                             ConvexSet::box({0.0, 0.0}, {10.0, 10.0})));
    CHECK(dist(proj.point, {0.0, 4.0}) == 0.0);

    // Scalar separable quadratic: (1 + lambda q) y = anchor - lambda l.
    const Bifunction sep = Bifunction::separable_quadratic({2.0}, Matrix(1, 1, 0.0), {-4.0});
    const auto scalar =
        prox_step(make_request(sep, {0.0}, {0.0}, 1.0, ConvexSet::whole_space(1)));
    CHECK(scalar.point[0] == doctest::Approx(4.0 / 3.0).epsilon(1e-14));
    const double grid = oracles::grid_search_min(
        [](double y) { return 1.0 * (y * y - 4.0 * y) + 0.5 * y * y; }, 0.0, 4.0, 1e-6);
    CHECK(std::abs(scalar.point[0] - grid) < 1e-5);
}

TEST_CASE("prox request validation") {
    const Bifunction f = Bifunction::zero(2);
    auto req = make_request(f, {0.0, 0.0}, {0.0, 0.0}, 1.0,
                            ConvexSet::box({0.0, 0.0}, {1.0, 1.0}));
    req.lambda = 0.0;
    CHECK_THROWS_AS(prox_step(req), std::invalid_argument);
    req.lambda = 1.0;
    req.base = {0.0};
    CHECK_THROWS_AS(prox_step(req), std::invalid_argument);
}

TEST_CASE("inner_solve on the pure proximity objective converges in one effective step") {
    const Vector v{2.0, -1.0};
    InnerObjective objective;
    objective.subgradient = [&v](const Vector& y) { return sub(y, v); };
    objective.smooth_lipschitz = 0.0;
    InnerSolveStats stats;
    const Vector y = inner_solve(objective, ConvexSet::whole_space(2), {100.0, 100.0}, 1e-12,
                                 100, &stats);
    CHECK(dist(y, v) < 1e-12);
    CHECK(stats.iterations <= 2);
}

TEST_CASE("inner_solve matches a direct linear solve on random quadratics") {
    Rng rng(3131);
    for (int t = 0; t < 100; ++t) {
        // Objective 1/2 y^T (I + D) y - b^T y with diagonal D >= 0.
        const std::size_t n = 1 + (rng.next_u64() % 4);
        Vector d(n);
        for (auto& v : d) v = rng.uniform(0.0, 3.0);
        const Vector b = rng.normal_vector(n, 2.0);
        InnerObjective objective;
        objective.subgradient = [&](const Vector& y) {
            Vector g(y.size());
            for (std::size_t i = 0; i < y.size(); ++i) g[i] = (1.0 + d[i]) * y[i] - b[i];
            return g;
        };
        double lmax = 0.0;
        for (double v : d) lmax = std::max(lmax, v);
        objective.smooth_lipschitz = lmax;

        const double inner_tol = 1e-10;
        const Vector y = inner_solve(objective, ConvexSet::whole_space(n),
                                     rng.normal_vector(n, 5.0), inner_tol, 10000);
        Matrix a(n, n, 0.0);
        for (std::size_t i = 0; i < n; ++i) a(i, i) = 1.0 + d[i];
        const Vector exact = oracles::independent_solve(a, b);
        CHECK(dist(y, exact) <= 10.0 * inner_tol * (1.0 + norm(exact)));
    }
}

TEST_CASE("ball-constrained quadratic lands on the boundary at the KKT point") {
    // Unconstrained minimizer far outside the unit ball.
    const Vector qdiag{1.0, 2.0};
    const Vector lvec{-6.0, -8.0};
    const Vector v{0.5, 0.25};
    const double lambda = 0.8;
    const ConvexSet ball = ConvexSet::ball({0.0, 0.0}, 1.0);

    const Bifunction f = Bifunction::separable_quadratic(qdiag, Matrix(2, 2, 0.0), lvec);
    // No closed form over a ball: the generic engine must run.
    const auto res = prox_step(make_request(f, v, v, lambda, ball));
    CHECK_FALSE(res.used_closed_form);
    CHECK(std::abs(norm(res.point) - 1.0) <= 1e-8);

    const Vector kkt = oracles::ball_constrained_quadratic(qdiag, lvec, v, lambda, 1.0);
    CHECK(dist(res.point, kkt) <= 1e-8);
    CHECK(res.certificate <= 1e-10);
}

TEST_CASE("closed-form and generic paths agree across random requests") {
    Rng rng(717);
    const double inner_tol = 1e-10;
    for (int t = 0; t < 500; ++t) {
        const std::size_t n = 1 + (rng.next_u64() % 4);
        const bool vi_family = (t % 2) == 0;
        Matrix lmat(n, n);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) lmat(i, j) = rng.normal();
        }
        Vector offset = rng.normal_vector(n, 2.0);
        Vector qdiag(n, 0.0);
        if (!vi_family) {
            for (auto& q : qdiag) q = rng.uniform(0.0, 3.0);
        }
        const Bifunction f = vi_family
                                 ? Bifunction::vi_linear(lmat, offset)
                                 : Bifunction::separable_quadratic(qdiag, lmat, offset);
        Vector lo(n), hi(n);
        for (std::size_t i = 0; i < n; ++i) {
            lo[i] = rng.uniform(-6.0, 0.0);
            hi[i] = lo[i] + rng.uniform(0.5, 8.0);
        }
        const ConvexSet box = ConvexSet::box(lo, hi);
        const Vector base = rng.uniform_vector(lo, hi);
        const Vector anchor = rng.uniform_vector(lo, hi);
        const double lambda = rng.uniform(0.05, 1.0);

        auto closed_req = make_request(f, base, anchor, lambda, box);
        closed_req.seed = t;
        const auto closed = prox_step(closed_req);
        REQUIRE(closed.used_closed_form);

        // Re-run through the generic engine by hiding the closed form.
        InnerObjective objective;
        objective.subgradient = [&](const Vector& y) {
            Vector g = f.partial_subgradient(base, y);
            for (std::size_t i = 0; i < n; ++i) g[i] = lambda * g[i] + (y[i] - anchor[i]);
            return g;
        };
        objective.smooth_lipschitz = lambda * f.smoothness_bound(base).value();
        const double solve_tol =
            inner_tol / (16.0 * (1.0 + *objective.smooth_lipschitz) * (1.0 + norm(anchor)));
        const Vector generic = inner_solve(objective, box, anchor, solve_tol, 20000);

        CHECK(dist(closed.point, generic) <= 10.0 * inner_tol * (1.0 + norm(closed.point)));
        CHECK(box.distance(closed.point) <= 1e-10);
        CHECK(box.distance(generic) <= 1e-10);
        CHECK(closed.certificate <= inner_tol);
        CHECK(prox_certificate(f, base, anchor, lambda, box, generic, 99) <= inner_tol);
    }
}

TEST_CASE("strong-convexity descent certificate at the returned point") {
    Rng rng(808);
    const ConvexSet box = ConvexSet::box({-5.0, -5.0}, {5.0, 5.0});
    const Bifunction f = Bifunction::separable_quadratic(
        {1.5, 0.5}, Matrix(2, 2, 0.25), {0.5, -1.0});
    for (int t = 0; t < 50; ++t) {
        const Vector base = rng.uniform_vector({-5.0, -5.0}, {5.0, 5.0});
        const Vector anchor = rng.uniform_vector({-5.0, -5.0}, {5.0, 5.0});
        const double lambda = rng.uniform(0.1, 1.0);
        const auto res = prox_step(make_request(f, base, anchor, lambda, box));
        const Vector& y = res.point;
        const double fy = lambda * f.value(base, y) + 0.5 * norm_sq(sub(y, anchor));
        for (int s = 0; s < 100; ++s) {
            const Vector x = box.project(rng.normal_vector(2, 4.0));
            const double fx = lambda * f.value(base, x) + 0.5 * norm_sq(sub(x, anchor));
            CHECK(fx >= fy + 0.5 * norm_sq(sub(x, y)) - 1e-6);
        }
    }
}

TEST_CASE("nonsmooth family runs through the subgradient engine") {
    const std::size_t n = 2;
    const Bifunction l1(std::make_shared<L1Bifunction>(n, 0.75));
    const ConvexSet box = ConvexSet::box({-2.0, -2.0}, {2.0, 2.0});
    const Vector anchor{1.5, -0.2};

    // Soft-thresholding is the exact answer over a large box:
    // y_i = sign(a_i) max(|a_i| - lambda w, 0).
    const double lambda = 1.0;
    Vector expected(n);
    const double thresh = lambda * 0.75;
    for (std::size_t i = 0; i < n; ++i) {
        const double a = anchor[i];
        expected[i] = (a > thresh) ? a - thresh : ((a < -thresh) ? a + thresh : 0.0);
    }

    InnerObjective objective;
    objective.subgradient = [&](const Vector& y) {
        Vector g = l1.partial_subgradient(anchor, y);
        for (std::size_t i = 0; i < n; ++i) g[i] = lambda * g[i] + (y[i] - anchor[i]);
        return g;
    };
    // No smoothness bound: the engine must take the averaging branch.
    const Vector y = inner_solve(objective, box, anchor, 1e-6, 200000);
    CHECK(dist(y, expected) <= 2e-2);

    // prox_step cannot certify a kinky solution with a single subgradient;
    // it must surface the failure and carry its best iterate.
    auto req = make_request(l1, anchor, anchor, lambda, box);
    req.inner_tol = 1e-10;
    req.inner_max_iters = 2000;
    CHECK_THROWS_AS(prox_step(req), InnerSolveError);
    try {
        prox_step(req);
    } catch (const InnerSolveError& err) {
        CHECK(err.best_point.size() == n);
        CHECK(err.certificate > 1e-10);
    }
}

TEST_CASE("smooth engine failure carries the best iterate") {
    const Bifunction f = Bifunction::separable_quadratic({2.0, 2.0}, Matrix(2, 2, 0.0),
                                                         {-3.0, 3.0});
    // Ball set forces the generic path; absurd iteration cap forces failure.
    auto req = make_request(f, {0.0, 0.0}, {5.0, 5.0}, 1.0, ConvexSet::ball({0.0, 0.0}, 1.0));
    req.inner_max_iters = 1;
    req.inner_tol = 1e-14;
    CHECK_THROWS_AS(prox_step(req), InnerSolveError);
}
