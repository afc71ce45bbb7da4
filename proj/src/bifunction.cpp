#include "epsplit/bifunction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "epsplit/rng.hpp"

namespace epsplit {

namespace {

/// Host family for every built-in bifunction:
///   f(x, y) = sum_i [ q_i/2 (y_i^2 - x_i^2) + l_i(x) (y_i - x_i) ],
/// with l(x) = L x + d and q >= 0. Linear-in-y members (q = 0) admit a
/// projection prox over any set; quadratic members a per-coordinate prox over
/// box-like sets. Closed under addition, which keeps the lumped stopping
/// residual in closed form.
class DiagonalQuadraticImpl final : public Bifunction::Impl {
  public:
    DiagonalQuadraticImpl(Vector q, Matrix linear, Vector offset, std::string label)
        : q_(std::move(q)), linear_(std::move(linear)), offset_(std::move(offset)),
          label_(std::move(label)) {
        const std::size_t n = q_.size();
        if (offset_.size() != n || linear_.rows() != n || linear_.cols() != n) {
            throw std::invalid_argument(label_ + ": inconsistent dimensions");
        }
        for (double qi : q_) {
            if (qi < 0.0) {
                throw std::invalid_argument(label_ +
                                            ": negative diagonal curvature (nonconvex in y)");
            }
        }
        max_q_ = 0.0;
        for (double qi : q_) max_q_ = std::max(max_q_, qi);
    }

    std::size_t dim() const override { return q_.size(); }

    Vector linear_term(const Vector& x) const { return add(linear_.apply(x), offset_); }

    double value(const Vector& x, const Vector& y) const override {
        require_same_dim(x, y, "DiagonalQuadratic::value");
        const Vector l = linear_term(x);
        double s = 0.0;
        for (std::size_t i = 0; i < q_.size(); ++i) {
            s += 0.5 * q_[i] * (y[i] * y[i] - x[i] * x[i]) + l[i] * (y[i] - x[i]);
        }
        return s;
    }

    Vector partial_subgradient(const Vector& x, const Vector& y) const override {
        Vector g = linear_term(x);
        for (std::size_t i = 0; i < q_.size(); ++i) g[i] += q_[i] * y[i];
        return g;
    }

    std::optional<double> smoothness_bound(const Vector&) const override { return max_q_; }

    std::optional<Vector> closed_form_prox(const Vector& base, const Vector& anchor,
                                           double lambda, const ConvexSet& set) const override {
        const Vector l = linear_term(base);
        if (max_q_ == 0.0) {
            // Linear in y: argmin is a projection of a gradient step.
            return set.project(axpy(anchor, -lambda, l));
        }
        if (!set.box_like()) return std::nullopt;
        auto [lo, hi] = set.coordinate_bounds();
        Vector y(q_.size());
        for (std::size_t i = 0; i < q_.size(); ++i) {
            const double unconstrained = (anchor[i] - lambda * l[i]) / (1.0 + lambda * q_[i]);
            y[i] = std::min(std::max(unconstrained, lo[i]), hi[i]);
        }
        return y;
    }

    std::string describe() const override { return label_; }

    const Vector& qdiag() const { return q_; }
    const Matrix& linear() const { return linear_; }
    const Vector& offset() const { return offset_; }

  private:
    Vector q_;
    Matrix linear_;
    Vector offset_;
    std::string label_;
    double max_q_ = 0.0;
};

class SumImpl final : public Bifunction::Impl {
  public:
    SumImpl(Bifunction f1, Bifunction f2) : f1_(std::move(f1)), f2_(std::move(f2)) {
        if (f1_.dim() != f2_.dim()) {
            throw std::invalid_argument("Bifunction sum: dimension mismatch");
        }
    }

    std::size_t dim() const override { return f1_.dim(); }

    double value(const Vector& x, const Vector& y) const override {
        return f1_.value(x, y) + f2_.value(x, y);
    }

    Vector partial_subgradient(const Vector& x, const Vector& y) const override {
        return add(f1_.partial_subgradient(x, y), f2_.partial_subgradient(x, y));
    }

    std::optional<double> smoothness_bound(const Vector& x) const override {
        const auto a = f1_.smoothness_bound(x);
        const auto b = f2_.smoothness_bound(x);
        if (a && b) return *a + *b;
        return std::nullopt;
    }

    std::string describe() const override {
        return f1_.describe() + " + " + f2_.describe();
    }

  private:
    Bifunction f1_, f2_;
};

}  // namespace

double Bifunction::value(const Vector& x, const Vector& y) const { return impl_->value(x, y); }

Vector Bifunction::diag_subgradient(const Vector& x) const {
    return impl_->partial_subgradient(x, x);
}

Vector Bifunction::partial_subgradient(const Vector& x, const Vector& y) const {
    return impl_->partial_subgradient(x, y);
}

std::optional<double> Bifunction::smoothness_bound(const Vector& x) const {
    return impl_->smoothness_bound(x);
}

std::optional<Vector> Bifunction::closed_form_prox(const Vector& base, const Vector& anchor,
                                                   double lambda, const ConvexSet& set) const {
    return impl_->closed_form_prox(base, anchor, lambda, set);
}

Bifunction Bifunction::zero(std::size_t dim) {
    return Bifunction(std::make_shared<DiagonalQuadraticImpl>(
        Vector(dim, 0.0), Matrix(dim, dim, 0.0), Vector(dim, 0.0), "zero"));
}

Bifunction Bifunction::vi_linear(Matrix m, Vector q) {
    const std::size_t n = q.size();
    if (!m.is_square() || m.rows() != n) {
        throw std::invalid_argument("vi_linear: M must be n x n with n = dim(q)");
    }
    return Bifunction(std::make_shared<DiagonalQuadraticImpl>(Vector(n, 0.0), std::move(m),
                                                              std::move(q), "vi_linear"));
}

Bifunction Bifunction::separable_quadratic(Vector q, Matrix linear, Vector offset) {
    return Bifunction(std::make_shared<DiagonalQuadraticImpl>(
        std::move(q), std::move(linear), std::move(offset), "separable_quadratic"));
}

std::optional<Bifunction> Bifunction::try_sum(const Bifunction& f1, const Bifunction& f2) {
    const auto* a = dynamic_cast<const DiagonalQuadraticImpl*>(&f1.impl());
    const auto* b = dynamic_cast<const DiagonalQuadraticImpl*>(&f2.impl());
    if (!a || !b || a->dim() != b->dim()) return std::nullopt;
    return Bifunction(std::make_shared<DiagonalQuadraticImpl>(
        add(a->qdiag(), b->qdiag()), a->linear().plus(b->linear()),
        add(a->offset(), b->offset()), "sum(" + a->describe() + ", " + b->describe() + ")"));
}

double SplitBifunction::value(const Vector& x, const Vector& y) const {
    return f1.value(x, y) + f2.value(x, y);
}

Bifunction SplitBifunction::combined() const {
    if (auto s = Bifunction::try_sum(f1, f2)) return *s;
    return Bifunction(std::make_shared<SumImpl>(f1, f2));
}

void QuadraticGame::validate() const {
    const std::size_t n = a.size();
    if (n == 0) throw std::invalid_argument("QuadraticGame: no players");
    if (c.size() != n || b.rows() != n || b.cols() != n) {
        throw std::invalid_argument("QuadraticGame: inconsistent dimensions");
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (!(b(i, i) > 0.0)) {
            throw std::invalid_argument("QuadraticGame: b_ii must be > 0 (player " +
                                        std::to_string(i) + ")");
        }
    }
}

double QuadraticGame::payoff(std::size_t i, const Vector& x) const {
    double price = a[i];
    for (std::size_t j = 0; j < x.size(); ++j) price -= b(i, j) * x[j];
    return x[i] * price - c[i] * x[i];
}

SplitBifunction nikaido_isoda(const QuadraticGame& game) {
    game.validate();
    const std::size_t n = game.players();
    // Revenue part: phi_i^rev(x) = x_i (a_i - sum_j b_ij x_j). Summing the
    // single-coordinate replacements gives a diagonal quadratic with
    //   q_i = 2 b_ii,   l(x) = B_off x - a.
    Vector q1(n);
    Matrix off(n, n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        q1[i] = 2.0 * game.b(i, i);
        for (std::size_t j = 0; j < n; ++j) {
            if (j != i) off(i, j) = game.b(i, j);
        }
    }
    Bifunction revenue = Bifunction::separable_quadratic(q1, off, scale(-1.0, game.a));
    // Cost part: phi_i^cost(x) = -c_i x_i, whose replacement sum is linear.
    Bifunction cost = Bifunction::separable_quadratic(Vector(n, 0.0), Matrix(n, n, 0.0), game.c);
    return SplitBifunction{revenue, cost};
}

SplitBifunction nikaido_isoda_lumped(const QuadraticGame& game) {
    SplitBifunction split = nikaido_isoda(game);
    Bifunction total = Bifunction::try_sum(split.f1, split.f2).value();
    return SplitBifunction{total, Bifunction::zero(game.players())};
}

std::string to_string(MonotonicityVerdict v) {
    switch (v) {
        case MonotonicityVerdict::consistent_with_monotone:
            return "consistent-with-monotone";
        case MonotonicityVerdict::consistent_with_pseudo_monotone:
            return "consistent-with-pseudo-monotone";
        default:
            return "violated";
    }
}

MonotonicityReport probe_monotonicity(
    const Bifunction& f, const ConvexSet& set, int samples, std::uint64_t seed,
    const std::optional<std::pair<Vector, Vector>>& sampling_box) {
    if (samples < 1) throw std::invalid_argument("probe_monotonicity: samples must be >= 1");
    Vector lo, hi;
    if (sampling_box) {
        lo = sampling_box->first;
        hi = sampling_box->second;
        if (lo.size() != set.dim() || hi.size() != set.dim()) {
            throw std::invalid_argument("probe_monotonicity: sampling box dimension mismatch");
        }
    } else if (set.bounded()) {
        std::tie(lo, hi) = set.bounding_box();
    } else {
        throw std::domain_error(
            "probe_monotonicity: set is unbounded; provide an explicit sampling box");
    }

    Rng rng(derive_seed(seed, 0x70726f6265ULL));
    MonotonicityReport report;
    report.samples = samples;
    report.max_symmetric_sum = -std::numeric_limits<double>::infinity();
    double magnitude = 1.0;
    for (int s = 0; s < samples; ++s) {
        const Vector x = set.project(rng.uniform_vector(lo, hi));
        const Vector y = set.project(rng.uniform_vector(lo, hi));
        const double fxy = f.value(x, y);
        const double fyx = f.value(y, x);
        report.max_symmetric_sum = std::max(report.max_symmetric_sum, fxy + fyx);
        magnitude = std::max({magnitude, std::abs(fxy), std::abs(fyx)});
        const double tol = 1e-10 * magnitude;
        if (fxy >= -tol && fyx > tol) ++report.pseudo_violations;
    }
    const double tol = 1e-10 * magnitude;
    if (report.max_symmetric_sum <= tol) {
        report.verdict = MonotonicityVerdict::consistent_with_monotone;
    } else if (report.pseudo_violations == 0) {
        report.verdict = MonotonicityVerdict::consistent_with_pseudo_monotone;
    } else {
        report.verdict = MonotonicityVerdict::violated;
    }
    return report;
}

}  // namespace epsplit
