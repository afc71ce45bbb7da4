#include "epsplit/convex_set.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <variant>

namespace epsplit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct BoxData {
    Vector lo, hi;
};
struct BallData {
    Vector center;
    double radius;
};
struct HalfspaceData {
    Vector a;
    double b;
    double a_norm_sq;
};
struct SimplexData {
    std::size_t n;
    double scale;
};
struct ProductData {
    std::vector<ConvexSet> parts;
    std::vector<std::size_t> offsets;  // start index of each block
    std::size_t total_dim;
};
struct WholeSpaceData {
    std::size_t n;
};

Vector project_simplex(const Vector& x, double scale) {
    // Sorting-based exact projection onto { y >= 0 : sum y = scale }.
    const std::size_t n = x.size();
    Vector u = x;
    std::sort(u.begin(), u.end(), std::greater<double>());
    double cumsum = 0.0;
    double tau = 0.0;
    std::size_t rho = 0;
    for (std::size_t j = 0; j < n; ++j) {
        cumsum += u[j];
        const double t = (cumsum - scale) / static_cast<double>(j + 1);
        if (u[j] - t > 0.0) {
            rho = j + 1;
            tau = t;
        }
    }
    (void)rho;
    Vector p(n);
    for (std::size_t i = 0; i < n; ++i) p[i] = std::max(x[i] - tau, 0.0);
    return p;
}

}  // namespace

struct ConvexSet::Impl {
    std::variant<BoxData, BallData, HalfspaceData, SimplexData, ProductData, WholeSpaceData> v;
};

ConvexSet ConvexSet::box(Vector lo, Vector hi) {
    require_same_dim(lo, hi, "ConvexSet::box");
    if (lo.empty()) throw std::invalid_argument("ConvexSet::box: empty dimension");
    for (std::size_t i = 0; i < lo.size(); ++i) {
        if (!(lo[i] <= hi[i])) {
            throw std::invalid_argument("ConvexSet::box: lo > hi at coordinate " +
                                        std::to_string(i));
        }
    }
    auto impl = std::make_shared<Impl>();
    impl->v = BoxData{std::move(lo), std::move(hi)};
    return ConvexSet(impl);
}

ConvexSet ConvexSet::ball(Vector center, double radius) {
    if (center.empty()) throw std::invalid_argument("ConvexSet::ball: empty dimension");
    if (!(radius > 0.0)) throw std::invalid_argument("ConvexSet::ball: radius must be > 0");
    auto impl = std::make_shared<Impl>();
    impl->v = BallData{std::move(center), radius};
    return ConvexSet(impl);
}

ConvexSet ConvexSet::halfspace(Vector a, double b) {
    const double nsq = norm_sq(a);
    if (a.empty() || nsq == 0.0) {
        throw std::invalid_argument("ConvexSet::halfspace: normal vector must be nonzero");
    }
    auto impl = std::make_shared<Impl>();
    impl->v = HalfspaceData{std::move(a), b, nsq};
    return ConvexSet(impl);
}

ConvexSet ConvexSet::simplex(std::size_t dim, double scale) {
    if (dim == 0) throw std::invalid_argument("ConvexSet::simplex: empty dimension");
    if (!(scale > 0.0)) throw std::invalid_argument("ConvexSet::simplex: scale must be > 0");
    auto impl = std::make_shared<Impl>();
    impl->v = SimplexData{dim, scale};
    return ConvexSet(impl);
}

ConvexSet ConvexSet::product(std::vector<ConvexSet> parts) {
    if (parts.empty()) throw std::invalid_argument("ConvexSet::product: no components");
    std::vector<std::size_t> offsets;
    std::size_t total = 0;
    for (const auto& p : parts) {
        offsets.push_back(total);
        total += p.dim();
    }
    auto impl = std::make_shared<Impl>();
    impl->v = ProductData{std::move(parts), std::move(offsets), total};
    return ConvexSet(impl);
}

ConvexSet ConvexSet::whole_space(std::size_t dim) {
    if (dim == 0) throw std::invalid_argument("ConvexSet::whole_space: empty dimension");
    auto impl = std::make_shared<Impl>();
    impl->v = WholeSpaceData{dim};
    return ConvexSet(impl);
}

std::size_t ConvexSet::dim() const {
    return std::visit(
        [](const auto& d) -> std::size_t {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, BoxData>) return d.lo.size();
            if constexpr (std::is_same_v<T, BallData>) return d.center.size();
            if constexpr (std::is_same_v<T, HalfspaceData>) return d.a.size();
            if constexpr (std::is_same_v<T, SimplexData>) return d.n;
            if constexpr (std::is_same_v<T, ProductData>) return d.total_dim;
            if constexpr (std::is_same_v<T, WholeSpaceData>) return d.n;
        },
        impl_->v);
}

Vector ConvexSet::project(const Vector& x) const {
    if (x.size() != dim()) {
        throw std::invalid_argument("ConvexSet::project: dimension mismatch");
    }
    return std::visit(
        [&x](const auto& d) -> Vector {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, BoxData>) {
                Vector p(x.size());
                for (std::size_t i = 0; i < x.size(); ++i) {
                    p[i] = std::min(std::max(x[i], d.lo[i]), d.hi[i]);
                }
                return p;
            } else if constexpr (std::is_same_v<T, BallData>) {
                const Vector r = sub(x, d.center);
                const double rn = norm(r);
                if (rn <= d.radius) return x;
                return axpy(d.center, d.radius / rn, r);
            } else if constexpr (std::is_same_v<T, HalfspaceData>) {
                const double excess = inner(d.a, x) - d.b;
                if (excess <= 0.0) return x;
                return axpy(x, -excess / d.a_norm_sq, d.a);
            } else if constexpr (std::is_same_v<T, SimplexData>) {
                return project_simplex(x, d.scale);
            } else if constexpr (std::is_same_v<T, ProductData>) {
                Vector p(x.size());
                for (std::size_t b = 0; b < d.parts.size(); ++b) {
                    const std::size_t off = d.offsets[b];
                    const std::size_t nb = d.parts[b].dim();
                    Vector block(x.begin() + off, x.begin() + off + nb);
                    Vector pb = d.parts[b].project(block);
                    std::copy(pb.begin(), pb.end(), p.begin() + off);
                }
                return p;
            } else {
                return x;  // whole space
            }
        },
        impl_->v);
}

bool ConvexSet::contains(const Vector& x, double tol) const {
    return distance(x) <= tol * (1.0 + norm(x));
}

double ConvexSet::distance(const Vector& x) const { return dist(project(x), x); }

bool ConvexSet::bounded() const {
    return std::visit(
        [](const auto& d) -> bool {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, BoxData>) return true;
            if constexpr (std::is_same_v<T, BallData>) return true;
            if constexpr (std::is_same_v<T, SimplexData>) return true;
            if constexpr (std::is_same_v<T, ProductData>) {
                for (const auto& p : d.parts) {
                    if (!p.bounded()) return false;
                }
                return true;
            }
            return false;
        },
        impl_->v);
}

std::pair<Vector, Vector> ConvexSet::bounding_box() const {
    if (!bounded()) {
        throw std::domain_error("ConvexSet::bounding_box: set is unbounded");
    }
    return std::visit(
        [](const auto& d) -> std::pair<Vector, Vector> {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, BoxData>) {
                return {d.lo, d.hi};
            } else if constexpr (std::is_same_v<T, BallData>) {
                Vector lo(d.center.size()), hi(d.center.size());
                for (std::size_t i = 0; i < d.center.size(); ++i) {
                    lo[i] = d.center[i] - d.radius;
                    hi[i] = d.center[i] + d.radius;
                }
                return {lo, hi};
            } else if constexpr (std::is_same_v<T, SimplexData>) {
                return {Vector(d.n, 0.0), Vector(d.n, d.scale)};
            } else if constexpr (std::is_same_v<T, ProductData>) {
                Vector lo(d.total_dim), hi(d.total_dim);
                for (std::size_t b = 0; b < d.parts.size(); ++b) {
                    auto [plo, phi] = d.parts[b].bounding_box();
                    std::copy(plo.begin(), plo.end(), lo.begin() + d.offsets[b]);
                    std::copy(phi.begin(), phi.end(), hi.begin() + d.offsets[b]);
                }
                return {lo, hi};
            } else {
                throw std::domain_error("ConvexSet::bounding_box: set is unbounded");
            }
        },
        impl_->v);
}

bool ConvexSet::box_like() const {
    return std::visit(
        [](const auto& d) -> bool {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, BoxData>) return true;
            if constexpr (std::is_same_v<T, WholeSpaceData>) return true;
            if constexpr (std::is_same_v<T, ProductData>) {
                for (const auto& p : d.parts) {
                    if (!p.box_like()) return false;
                }
                return true;
            }
            return false;
        },
        impl_->v);
}

std::pair<Vector, Vector> ConvexSet::coordinate_bounds() const {
    if (!box_like()) {
        throw std::domain_error("ConvexSet::coordinate_bounds: set is not box-like");
    }
    return std::visit(
        [](const auto& d) -> std::pair<Vector, Vector> {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, BoxData>) {
                return {d.lo, d.hi};
            } else if constexpr (std::is_same_v<T, WholeSpaceData>) {
                return {Vector(d.n, -kInf), Vector(d.n, kInf)};
            } else if constexpr (std::is_same_v<T, ProductData>) {
                Vector lo(d.total_dim), hi(d.total_dim);
                for (std::size_t b = 0; b < d.parts.size(); ++b) {
                    auto [plo, phi] = d.parts[b].coordinate_bounds();
                    std::copy(plo.begin(), plo.end(), lo.begin() + d.offsets[b]);
                    std::copy(phi.begin(), phi.end(), hi.begin() + d.offsets[b]);
                }
                return {lo, hi};
            } else {
                throw std::domain_error("ConvexSet::coordinate_bounds: set is not box-like");
            }
        },
        impl_->v);
}

std::string ConvexSet::describe() const {
    return std::visit(
        [](const auto& d) -> std::string {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, BoxData>) return "box";
            if constexpr (std::is_same_v<T, BallData>) return "ball";
            if constexpr (std::is_same_v<T, HalfspaceData>) return "halfspace";
            if constexpr (std::is_same_v<T, SimplexData>) return "simplex";
            if constexpr (std::is_same_v<T, ProductData>) {
                std::string s = "product(";
                for (std::size_t i = 0; i < d.parts.size(); ++i) {
                    if (i) s += ", ";
                    s += d.parts[i].describe();
                }
                return s + ")";
            }
            return "whole_space";
        },
        impl_->v);
}

}  // namespace epsplit
