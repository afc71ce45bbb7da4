#ifndef EPSPLIT_RNG_HPP
#define EPSPLIT_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>

#include "epsplit/vec.hpp"

namespace epsplit {

/// Mixes seed components into a single stream seed (splitmix64 step).
/// Runs stay reproducible while sub-streams (per iteration, per prox call)
/// remain decorrelated.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0);

/// Deterministic random source. Doubles are produced from raw engine bits so
/// that the stream never depends on standard-library distribution internals.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform in [0, 1).
    double uniform01() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Standard normal via Box-Muller (fresh pair each call, second value cached).
    double normal() {
        if (have_cached_) {
            have_cached_ = false;
            return cached_;
        }
        double u1 = uniform01();
        while (u1 <= 0.0) u1 = uniform01();
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        cached_ = r * std::sin(a);
        have_cached_ = true;
        return r * std::cos(a);
    }

    std::uint64_t next_u64() { return engine_(); }

    Vector uniform_vector(const Vector& lo, const Vector& hi) {
        require_same_dim(lo, hi, "Rng::uniform_vector");
        Vector r(lo.size());
        for (std::size_t i = 0; i < r.size(); ++i) r[i] = uniform(lo[i], hi[i]);
        return r;
    }

    Vector normal_vector(std::size_t n, double sigma = 1.0) {
        Vector r(n);
        for (std::size_t i = 0; i < n; ++i) r[i] = sigma * normal();
        return r;
    }

  private:
    std::mt19937_64 engine_;
    double cached_ = 0.0;
    bool have_cached_ = false;
};

}  // namespace epsplit

#endif  // EPSPLIT_RNG_HPP
