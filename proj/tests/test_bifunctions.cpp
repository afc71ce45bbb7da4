#include <doctest.h>

#include <cmath>

#include "epsplit/bifunction.hpp"
#include "epsplit/rng.hpp"
#include "oracles.hpp"

using namespace epsplit;

namespace {

Matrix mat2(double a, double b, double c, double d) {
    Matrix m(2, 2);
    m(0, 0) = a;
    m(0, 1) = b;
    m(1, 0) = c;
    m(1, 1) = d;
    return m;
}

QuadraticGame symmetric_cournot(double a, double b, Vector c) {
    QuadraticGame game;
    const std::size_t n = c.size();
    game.a = Vector(n, a);
    game.b = Matrix(n, n, b);
    game.c = std::move(c);
    return game;
}

// Families exercised by the shared property sweeps.
struct Family {
    std::string name;
    Bifunction f;
};

std::vector<Family> family_zoo() {
    std::vector<Family> fams;
    fams.push_back({"zero", Bifunction::zero(2)});
    fams.push_back({"vi_identity", Bifunction::vi_linear(Matrix::identity(2), {0.0, 0.0})});
    fams.push_back({"vi_skew", Bifunction::vi_linear(mat2(0.0, 1.0, -1.0, 0.0), {0.5, -0.25})});
    fams.push_back({"sepquad",
                    Bifunction::separable_quadratic({2.0, 0.5}, mat2(0.0, 1.0, 1.0, 0.0),
                                                    {-4.0, 1.0})});
    const SplitBifunction ni = nikaido_isoda(symmetric_cournot(10.0, 1.0, {1.0, 1.0}));
    fams.push_back({"ni_revenue", ni.f1});
    fams.push_back({"ni_cost", ni.f2});
    fams.push_back({"ni_sum", ni.combined()});
    return fams;
}

}  // namespace

TEST_CASE("vi_linear values") {
    const Bifunction f = Bifunction::vi_linear(Matrix::identity(2), {0.0, 0.0});
    CHECK(f.value({1.0, 1.0}, {2.0, 2.0}) == doctest::Approx(2.0));
    CHECK(f.value({3.0, -1.0}, {3.0, -1.0}) == 0.0);

    // Skew part contributes nothing to the symmetrized value.
    const Bifunction skew = Bifunction::vi_linear(mat2(0.0, 2.0, -2.0, 0.0), {0.0, 0.0});
    Rng rng(7);
    for (int t = 0; t < 200; ++t) {
        const Vector x = rng.normal_vector(2, 3.0);
        const Vector y = rng.normal_vector(2, 3.0);
        CHECK(std::abs(skew.value(x, y) + skew.value(y, x)) < 1e-12 * (1.0 + norm_sq(x) + norm_sq(y)));
    }
}

TEST_CASE("separable_quadratic rejects negative curvature and matches its prox example") {
    CHECK_THROWS_AS(
        Bifunction::separable_quadratic({-1.0}, Matrix(1, 1, 0.0), {0.0}),
        std::invalid_argument);

    // q = 2, l = -4 constant, anchor 0, lambda 1, whole space: minimizer of
    // lambda(q y^2/2 - 4y) + y^2/2, i.e. (1 + lambda q) y = anchor - lambda l = 4.
    const Bifunction f = Bifunction::separable_quadratic({2.0}, Matrix(1, 1, 0.0), {-4.0});
    const auto prox = f.closed_form_prox({0.0}, {0.0}, 1.0, ConvexSet::whole_space(1));
    REQUIRE(prox.has_value());
    CHECK((*prox)[0] == doctest::Approx(4.0 / 3.0).epsilon(1e-14));

    // Cross-check against a fine grid search.
    const double grid = oracles::grid_search_min(
        [](double y) { return (y * y - 4.0 * y) + 0.5 * y * y; }, 0.0, 4.0, 1e-6);
    CHECK(std::abs(grid - 4.0 / 3.0) < 1e-5);
}

TEST_CASE("q = 0 separable quadratic degenerates to vi_linear with F = l") {
    const Matrix lmat = mat2(1.0, 0.5, -0.25, 2.0);
    const Vector d{0.3, -0.7};
    const Bifunction sep = Bifunction::separable_quadratic({0.0, 0.0}, lmat, d);
    const Bifunction vi = Bifunction::vi_linear(lmat, d);
    Rng rng(13);
    for (int t = 0; t < 200; ++t) {
        const Vector x = rng.normal_vector(2, 4.0);
        const Vector y = rng.normal_vector(2, 4.0);
        CHECK(sep.value(x, y) == doctest::Approx(vi.value(x, y)).epsilon(1e-13));
        CHECK(dist(sep.diag_subgradient(x), vi.diag_subgradient(x)) < 1e-13);
    }
}

TEST_CASE("diagonal normalization and subgradient inequality across families") {
    Rng rng(404);
    const ConvexSet box = ConvexSet::box({-10.0, -10.0}, {10.0, 10.0});
    for (const auto& fam : family_zoo()) {
        CAPTURE(fam.name);
        for (int t = 0; t < 1000; ++t) {
            const Vector x = box.project(rng.normal_vector(2, 6.0));
            const Vector y = box.project(rng.normal_vector(2, 6.0));
            const double scale = 1.0 + norm_sq(x) + norm_sq(y);

            // f(x, x) = 0.
            CHECK(std::abs(fam.f.value(x, x)) <= 1e-12 * scale);

            // Convexity in y through the diagonal subgradient:
            // f(x, y) >= <g(x), y - x>.
            const Vector g = fam.f.diag_subgradient(x);
            CHECK(fam.f.value(x, y) >= inner(g, sub(y, x)) - 1e-10 * scale);

            // The partial subgradient supports f(x, .) everywhere.
            const Vector gy = fam.f.partial_subgradient(x, y);
            const Vector y2 = box.project(rng.normal_vector(2, 6.0));
            CHECK(fam.f.value(x, y2) - fam.f.value(x, y) >=
                  inner(gy, sub(y2, y)) - 1e-10 * (scale + norm_sq(y2)));
        }
    }
}

TEST_CASE("split bifunction additivity and family-aware combination") {
    const SplitBifunction ni = nikaido_isoda(symmetric_cournot(10.0, 1.0, {1.0, 4.0}));
    const Bifunction total = ni.combined();
    Rng rng(21);
    for (int t = 0; t < 500; ++t) {
        const Vector x = rng.uniform_vector({0.0, 0.0}, {10.0, 10.0});
        const Vector y = rng.uniform_vector({0.0, 0.0}, {10.0, 10.0});
        const double split_value = ni.value(x, y);
        CHECK(std::abs(split_value - ni.f1.value(x, y) - ni.f2.value(x, y)) <= 1e-12);
        CHECK(total.value(x, y) ==
              doctest::Approx(split_value).epsilon(1e-13));
    }
    // The combined family keeps a closed-form prox over boxes.
    CHECK(total
              .closed_form_prox({5.0, 5.0}, {5.0, 5.0}, 1.0,
                                ConvexSet::box({0.0, 0.0}, {10.0, 10.0}))
              .has_value());
}

TEST_CASE("nikaido_isoda equilibrium sign characterization") {
    // Symmetric two-player Cournot: closed-form equilibrium (3, 3).
    const QuadraticGame game = symmetric_cournot(10.0, 1.0, {1.0, 1.0});
    const SplitBifunction ni = nikaido_isoda(game);
    const Vector star{3.0, 3.0};
    Rng rng(777);
    double min_val = 1e300;
    for (int t = 0; t < 1000; ++t) {
        const Vector y = rng.uniform_vector({0.0, 0.0}, {10.0, 10.0});
        min_val = std::min(min_val, ni.value(star, y));
    }
    CHECK(min_val >= -1e-8);

    // f(x, x) = 0 since replacing a coordinate by itself changes nothing.
    for (int t = 0; t < 100; ++t) {
        const Vector x = rng.uniform_vector({0.0, 0.0}, {10.0, 10.0});
        CHECK(std::abs(ni.value(x, x)) <= 1e-12 * (1.0 + norm_sq(x)));
    }
}

TEST_CASE("single-player game reduces to scalar concave maximization") {
    QuadraticGame game;
    game.a = {10.0};
    game.b = Matrix(1, 1, 1.0);
    game.c = {2.0};
    const SplitBifunction ni = nikaido_isoda(game);
    // max phi(x) = x(10 - x) - 2x at x* = 4.
    const Vector star{4.0};
    Rng rng(31);
    for (int t = 0; t < 200; ++t) {
        const Vector y = rng.uniform_vector({0.0}, {10.0});
        CHECK(ni.value(star, y) >= -1e-12);
    }
}

TEST_CASE("nikaido_isoda validates own-action concavity") {
    QuadraticGame game;
    game.a = {10.0, 10.0};
    game.b = mat2(0.0, 1.0, 1.0, 1.0);  // b_00 = 0 breaks concavity
    game.c = {1.0, 1.0};
    CHECK_THROWS_AS(nikaido_isoda(game), std::invalid_argument);
}

TEST_CASE("nikaido_isoda value equals the payoff-difference definition") {
    QuadraticGame game;
    game.a = {10.0, 8.0, 12.0};
    game.b = Matrix(3, 3, 0.5);
    game.b(0, 0) = 2.0;
    game.b(1, 1) = 1.5;
    game.b(2, 2) = 3.0;
    game.c = {1.0, 0.5, 2.0};
    const SplitBifunction ni = nikaido_isoda(game);
    Rng rng(99);
    for (int t = 0; t < 300; ++t) {
        const Vector x = rng.uniform_vector({0.0, 0.0, 0.0}, {5.0, 5.0, 5.0});
        const Vector y = rng.uniform_vector({0.0, 0.0, 0.0}, {5.0, 5.0, 5.0});
        double expected = 0.0;
        for (std::size_t i = 0; i < 3; ++i) {
            Vector replaced = x;
            replaced[i] = y[i];
            expected += game.payoff(i, x) - game.payoff(i, replaced);
        }
        CHECK(ni.value(x, y) == doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("probe_monotonicity classifies the canonical examples") {
    const ConvexSet box = ConvexSet::box({-1.0, -1.0}, {1.0, 1.0});

    // F = I is strongly monotone: f(x,y) + f(y,x) = -||x-y||^2.
    const auto mono = probe_monotonicity(
        Bifunction::vi_linear(Matrix::identity(2), {0.0, 0.0}), box, 500, 5);
    CHECK(mono.verdict == MonotonicityVerdict::consistent_with_monotone);
    CHECK(mono.max_symmetric_sum <= 0.0);

    // F = -I is anti-monotone on the box.
    const auto anti = probe_monotonicity(
        Bifunction::vi_linear(Matrix::identity(2).scaled(-1.0), {0.0, 0.0}), box, 500, 5);
    CHECK(anti.verdict == MonotonicityVerdict::violated);
    CHECK(anti.pseudo_violations > 0);

    // f(x, y) = phi(y) - phi(x) is monotone with equality.
    const auto equal = probe_monotonicity(
        Bifunction::separable_quadratic({1.0, 3.0}, Matrix(2, 2, 0.0), {0.5, -0.5}), box, 500,
        5);
    CHECK(equal.verdict == MonotonicityVerdict::consistent_with_monotone);
    CHECK(std::abs(equal.max_symmetric_sum) <= 1e-12);
}

TEST_CASE("probe_monotonicity needs a sampling region on unbounded sets") {
    const Bifunction f = Bifunction::vi_linear(Matrix::identity(2), {0.0, 0.0});
    CHECK_THROWS_AS(probe_monotonicity(f, ConvexSet::whole_space(2), 100, 1),
                    std::domain_error);
    const auto report = probe_monotonicity(
        f, ConvexSet::whole_space(2), 100, 1,
        std::make_pair(Vector{-2.0, -2.0}, Vector{2.0, 2.0}));
    CHECK(report.verdict == MonotonicityVerdict::consistent_with_monotone);
    CHECK_THROWS_AS(probe_monotonicity(f, ConvexSet::box({0.0, 0.0}, {1.0, 1.0}), 0, 1),
                    std::invalid_argument);
}

TEST_CASE("pseudo-monotone but not monotone family is classified in between") {
    // Scalar VI with F(x) = 2 - x on [0, 1]: F stays positive, so
    // f(x,y) = F(x)(y-x) is pseudo-monotone, but F decreases, so
    // f(x,y) + f(y,x) = (y-x)^2 > 0 breaks monotonicity.
    const Bifunction f = Bifunction::vi_linear(Matrix(1, 1, -1.0), {2.0});
    const auto report =
        probe_monotonicity(f, ConvexSet::box({0.0}, {1.0}), 4000, 11);
    CHECK(report.verdict == MonotonicityVerdict::consistent_with_pseudo_monotone);
    CHECK(report.max_symmetric_sum > 0.0);
    CHECK(report.pseudo_violations == 0);
}

TEST_CASE("probe flags the Cournot game bifunction on the full action box") {
    // The Nikaido-Isoda sum of the linear Cournot game is not
    // pseudo-monotone over the whole box (e.g. x=(5,0), y=(0,5) gives
    // f(x,y) = f(y,x) = 25), even though f(., x*) <= 0 holds everywhere,
    // which is the property the convergence argument actually uses.
    const SplitBifunction ni = nikaido_isoda(symmetric_cournot(10.0, 1.0, {1.0, 1.0}));
    const auto report = probe_monotonicity(ni.combined(),
                                           ConvexSet::box({0.0, 0.0}, {10.0, 10.0}), 4000, 11);
    CHECK(report.verdict == MonotonicityVerdict::violated);

    // f(x, (3,3)) = -(x1 + x2 - 6)^2 algebraically.
    Rng rng(5150);
    for (int t = 0; t < 500; ++t) {
        const Vector x = rng.uniform_vector({0.0, 0.0}, {10.0, 10.0});
        const double expected = -(x[0] + x[1] - 6.0) * (x[0] + x[1] - 6.0);
        CHECK(ni.value(x, {3.0, 3.0}) == doctest::Approx(expected).epsilon(1e-12));
    }
}
