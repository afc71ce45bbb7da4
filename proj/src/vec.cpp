#include "epsplit/vec.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace epsplit {

void require_same_dim(const Vector& x, const Vector& y, const char* where) {
    if (x.size() != y.size()) {
        throw std::invalid_argument(std::string(where) + ": dimension mismatch (" +
                                    std::to_string(x.size()) + " vs " +
                                    std::to_string(y.size()) + ")");
    }
}

double inner(const Vector& x, const Vector& y) {
    require_same_dim(x, y, "inner");
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
    return s;
}

double norm_sq(const Vector& x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return s;
}

double norm(const Vector& x) { return std::sqrt(norm_sq(x)); }

double dist(const Vector& x, const Vector& y) {
    require_same_dim(x, y, "dist");
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - y[i];
        s += d * d;
    }
    return std::sqrt(s);
}

bool is_finite(const Vector& x) {
    for (double v : x) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

Vector add(const Vector& x, const Vector& y) {
    require_same_dim(x, y, "add");
    Vector r(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) r[i] = x[i] + y[i];
    return r;
}

Vector sub(const Vector& x, const Vector& y) {
    require_same_dim(x, y, "sub");
    Vector r(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) r[i] = x[i] - y[i];
    return r;
}

Vector scale(double a, const Vector& x) {
    Vector r(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) r[i] = a * x[i];
    return r;
}

Vector axpy(const Vector& x, double a, const Vector& y) {
    require_same_dim(x, y, "axpy");
    Vector r(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) r[i] = x[i] + a * y[i];
    return r;
}

Vector convex_combination(double gamma, const Vector& x, const Vector& y) {
    require_same_dim(x, y, "convex_combination");
    Vector r(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) r[i] = gamma * x[i] + (1.0 - gamma) * y[i];
    return r;
}

Vector zeros(std::size_t n) { return Vector(n, 0.0); }

double three_point_identity_residual(const Vector& x, const Vector& y,
                                     const Vector& z, double gamma) {
    require_same_dim(x, y, "three_point_identity_residual");
    require_same_dim(x, z, "three_point_identity_residual");
    const Vector comb = convex_combination(gamma, x, y);
    const double lhs = norm_sq(sub(comb, z));
    const double rhs = gamma * norm_sq(sub(x, z)) + (1.0 - gamma) * norm_sq(sub(y, z)) -
                       gamma * (1.0 - gamma) * norm_sq(sub(x, y));
    return lhs - rhs;
}

std::string format_vector(const Vector& x) {
    std::string out = "(";
    char buf[40];
    for (std::size_t i = 0; i < x.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.17g", x[i]);
        out += buf;
        if (i + 1 < x.size()) out += ", ";
    }
    out += ")";
    return out;
}

}  // namespace epsplit
