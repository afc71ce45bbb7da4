#include "epsplit/maps.hpp"

#include <cmath>
#include <stdexcept>
#include <variant>

namespace epsplit {

namespace {

void require_monotone(const Matrix& m, const char* what) {
    // Monotonicity of x -> Mx + q is PSD-ness of the symmetric part.
    const Matrix sym = m.plus(m.transpose()).scaled(0.5);
    const double min_eig = symmetric_min_eigenvalue(sym);
    const double scale = std::max(1.0, sym.inf_norm());
    if (min_eig < -1e-10 * scale) {
        throw std::invalid_argument(std::string(what) +
                                    ": symmetric part has negative eigenvalue " +
                                    std::to_string(min_eig));
    }
}

struct IdentityData {
    std::size_t n;
};
struct ProjectionData {
    ConvexSet set;
};
struct AveragedData {
    Vector weights;
    std::vector<NonexpansiveMap> maps;
};
struct ResolventData {
    MonotoneOperator op;
    double c;
    LuFactorization factor;  // of I + cM
};

}  // namespace

MonotoneOperator MonotoneOperator::linear(Matrix m, Vector q) {
    if (!m.is_square() || m.rows() != q.size()) {
        throw std::invalid_argument("MonotoneOperator::linear: M must be n x n with n = dim(q)");
    }
    require_monotone(m, "MonotoneOperator::linear");
    return MonotoneOperator(std::move(m), std::move(q));
}

MonotoneOperator MonotoneOperator::convex_quadratic_gradient(Matrix q_matrix, Vector q) {
    if (!q_matrix.is_square() || q_matrix.rows() != q.size()) {
        throw std::invalid_argument(
            "MonotoneOperator::convex_quadratic_gradient: Q must be n x n with n = dim(q)");
    }
    if (!q_matrix.is_symmetric(1e-10 * std::max(1.0, q_matrix.inf_norm()))) {
        throw std::invalid_argument(
            "MonotoneOperator::convex_quadratic_gradient: Q must be symmetric");
    }
    require_monotone(q_matrix, "MonotoneOperator::convex_quadratic_gradient");
    return MonotoneOperator(std::move(q_matrix), std::move(q));
}

Vector MonotoneOperator::apply(const Vector& x) const { return add(m_.apply(x), q_); }

Vector resolvent(const MonotoneOperator& op, double c, const Vector& x) {
    if (!(c > 0.0)) throw std::invalid_argument("resolvent: c must be > 0");
    // Solve (I + cM) z = x - c q.
    Matrix a = Matrix::identity(op.dim()).plus(op.matrix().scaled(c));
    LuFactorization lu(a);
    if (lu.singular()) {
        throw std::runtime_error("resolvent: singular system (operator is not monotone?)");
    }
    return lu.solve(axpy(x, -c, op.offset()));
}

struct NonexpansiveMap::Impl {
    std::variant<IdentityData, ProjectionData, AveragedData, ResolventData> v;
};

NonexpansiveMap NonexpansiveMap::identity(std::size_t dim) {
    if (dim == 0) throw std::invalid_argument("NonexpansiveMap::identity: empty dimension");
    auto impl = std::make_shared<Impl>();
    impl->v = IdentityData{dim};
    return NonexpansiveMap(impl);
}

NonexpansiveMap NonexpansiveMap::projection(ConvexSet set) {
    auto impl = std::make_shared<Impl>();
    impl->v = ProjectionData{std::move(set)};
    return NonexpansiveMap(impl);
}

NonexpansiveMap NonexpansiveMap::averaged(Vector weights, std::vector<NonexpansiveMap> maps) {
    if (weights.size() != maps.size() || maps.empty()) {
        throw std::invalid_argument("NonexpansiveMap::averaged: weights and maps must pair up");
    }
    double sum = 0.0;
    for (double w : weights) {
        if (!(w > 0.0)) {
            throw std::invalid_argument("NonexpansiveMap::averaged: weights must be > 0");
        }
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-12) {
        throw std::invalid_argument("NonexpansiveMap::averaged: weights must sum to 1");
    }
    const std::size_t n = maps.front().dim();
    for (const auto& m : maps) {
        if (m.dim() != n) {
            throw std::invalid_argument("NonexpansiveMap::averaged: dimension mismatch");
        }
    }
    auto impl = std::make_shared<Impl>();
    impl->v = AveragedData{std::move(weights), std::move(maps)};
    return NonexpansiveMap(impl);
}

NonexpansiveMap NonexpansiveMap::resolvent(MonotoneOperator op, double c) {
    if (!(c > 0.0)) throw std::invalid_argument("NonexpansiveMap::resolvent: c must be > 0");
    Matrix a = Matrix::identity(op.dim()).plus(op.matrix().scaled(c));
    LuFactorization lu(a);
    if (lu.singular()) {
        throw std::runtime_error("NonexpansiveMap::resolvent: singular system");
    }
    auto impl = std::make_shared<Impl>();
    impl->v = ResolventData{std::move(op), c, std::move(lu)};
    return NonexpansiveMap(impl);
}

std::size_t NonexpansiveMap::dim() const {
    return std::visit(
        [](const auto& d) -> std::size_t {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, IdentityData>) return d.n;
            if constexpr (std::is_same_v<T, ProjectionData>) return d.set.dim();
            if constexpr (std::is_same_v<T, AveragedData>) return d.maps.front().dim();
            if constexpr (std::is_same_v<T, ResolventData>) return d.op.dim();
        },
        impl_->v);
}

Vector NonexpansiveMap::apply(const Vector& x) const {
    if (x.size() != dim()) {
        throw std::invalid_argument("NonexpansiveMap::apply: dimension mismatch");
    }
    return std::visit(
        [&x](const auto& d) -> Vector {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, IdentityData>) {
                return x;
            } else if constexpr (std::is_same_v<T, ProjectionData>) {
                return d.set.project(x);
            } else if constexpr (std::is_same_v<T, AveragedData>) {
                // Sub-evaluations are independent; the sum runs in index
                // order so results do not depend on evaluation schedule.
                std::vector<Vector> parts(d.maps.size());
                for (std::size_t i = 0; i < d.maps.size(); ++i) parts[i] = d.maps[i].apply(x);
                Vector r(x.size(), 0.0);
                for (std::size_t i = 0; i < parts.size(); ++i) {
                    for (std::size_t j = 0; j < r.size(); ++j) r[j] += d.weights[i] * parts[i][j];
                }
                return r;
            } else {
                return d.factor.solve(axpy(x, -d.c, d.op.offset()));
            }
        },
        impl_->v);
}

std::string NonexpansiveMap::describe() const {
    return std::visit(
        [](const auto& d) -> std::string {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, IdentityData>) return "identity";
            if constexpr (std::is_same_v<T, ProjectionData>) {
                return "projection(" + d.set.describe() + ")";
            }
            if constexpr (std::is_same_v<T, AveragedData>) {
                std::string s = "averaged(";
                for (std::size_t i = 0; i < d.maps.size(); ++i) {
                    if (i) s += ", ";
                    s += d.maps[i].describe();
                }
                return s + ")";
            }
            return "resolvent";
        },
        impl_->v);
}

double fixed_point_residual(const NonexpansiveMap& map, const Vector& x) {
    return dist(map.apply(x), x);
}

}  // namespace epsplit
