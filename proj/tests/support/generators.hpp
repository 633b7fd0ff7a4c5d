#pragma once

// Seeded samplers for property tests.

#include "flexflip/elastica.hpp"

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace gen {

class EndpointSampler {
public:
    explicit EndpointSampler(std::uint64_t seed) : rng_(seed) {}

    /// Polar sample r in [0.4, 0.9] L, angle in [1, 20] deg: the sector the
    /// flexing fingertip sweeps.
    flexflip::Vec2 lower_sector(double length = 1.0) {
        const double r = uniform(0.4, 0.9) * length;
        const double a = uniform(1.0, 20.0) * std::numbers::pi / 180.0;
        return {r * std::cos(a), r * std::sin(a)};
    }

    /// Uniform over the open quarter disk 0 < px, 0 < pz, |p| < 0.95 L.
    flexflip::Vec2 quarter_disk(double length = 1.0) {
        for (;;) {
            const flexflip::Vec2 p(uniform(0.02, 0.95), uniform(0.02, 0.95));
            if (p.norm() < 0.95) return p * length;
        }
    }

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }

    std::mt19937_64& engine() { return rng_; }

private:
    std::mt19937_64 rng_;
};

}  // namespace gen
