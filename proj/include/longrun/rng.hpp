#pragma once

// Counter-based random streams: every path owns a stream derived from
// (seed, path_index) alone, so estimates do not depend on scheduling or the
// degree of parallelism.  The generator evaluates a bijective 64-bit mix at
// key + counter * golden_gamma (splitmix-style), which makes draws a pure
// function of (seed, path, counter).

#include <cmath>
#include <cstdint>

#include "longrun/errors.hpp"

namespace longrun {

namespace rng_detail {

inline constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ull;

inline constexpr std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ull;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBull;
    z ^= z >> 31;
    return z;
}

}  // namespace rng_detail

class PathRng {
  public:
    PathRng(std::uint64_t seed, std::uint64_t path_index)
        : key_(rng_detail::mix64(seed + rng_detail::kGamma) ^
               rng_detail::mix64(path_index * 0xD1342543DE82EF95ull + 0x2545F4914F6CDD1Dull)) {}

    std::uint64_t next_u64() { return rng_detail::mix64(key_ + (++counter_) * rng_detail::kGamma); }

    // uniform on (0, 1)
    double uniform() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    double normal() {
        const double u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
    }

    // Marsaglia-Tsang for alpha >= 1, boosted by u^(1/alpha) below 1.
    double gamma(double alpha) {
        if (!(alpha > 0.0)) throw SimulationError("gamma: alpha must be positive");
        if (alpha < 1.0) {
            const double u = uniform();
            return gamma(alpha + 1.0) * std::pow(u, 1.0 / alpha);
        }
        const double d = alpha - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        while (true) {
            double x, v;
            do {
                x = normal();
                v = 1.0 + c * x;
            } while (v <= 0.0);
            v = v * v * v;
            const double u = uniform();
            if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
            if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
        }
    }

    double chi_squared(double dof) { return 2.0 * gamma(0.5 * dof); }

    std::uint64_t poisson(double mean) {
        if (mean < 0.0) throw SimulationError("poisson: negative mean");
        if (mean == 0.0) return 0;
        if (mean < 64.0) {
            const double limit = std::exp(-mean);
            std::uint64_t n = 0;
            double prod = uniform();
            while (prod > limit) {
                ++n;
                prod *= uniform();
            }
            return n;
        }
        // normal approximation for large means (diagnostic sampling only)
        const double g = std::round(mean + std::sqrt(mean) * normal());
        return g <= 0.0 ? 0 : static_cast<std::uint64_t>(g);
    }

    // chi-squared with dof degrees of freedom and noncentrality lambda
    double noncentral_chi_squared(double dof, double lambda) {
        if (!(dof > 0.0) || lambda < 0.0)
            throw SimulationError("noncentral_chi_squared: invalid parameters");
        if (dof > 1.0) {
            const double z = normal() + std::sqrt(lambda);
            return z * z + (dof > 1.0 + 1e-14 ? chi_squared(dof - 1.0) : 0.0);
        }
        const std::uint64_t n = poisson(0.5 * lambda);
        return chi_squared(dof + 2.0 * static_cast<double>(n));
    }

  private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace longrun
