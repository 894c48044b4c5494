#pragma once

// Deterministic random fields.  Gaussian draws go through an explicit
// Box-Muller transform on top of mt19937_64 so that sequences are
// bit-identical across platforms and standard libraries.

#include <cstdint>
#include <random>

#include "field.hpp"

namespace kdvbbm {

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double uniform() {
        // 53-bit mantissa in [0, 1)
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        spare_ = r * std::sin(two_pi * u2);
        has_spare_ = true;
        return r * std::cos(two_pi * u2);
    }

    std::uint64_t raw() { return engine_(); }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

// Random real field with coefficients ~ N(0,1)/(1+k^2)^{decay/2}.
inline SpectralField random_field(int order, Rng& rng, double decay = 1.0) {
    SpectralField u(order);
    u(0) = rng.normal();
    for (int k = 1; k <= order; ++k) {
        const double scale = std::pow(1.0 + static_cast<double>(k) * k, -0.5 * decay);
        const complexd z(rng.normal(), rng.normal());
        u(k) = scale * z / std::sqrt(2.0);
        u(-k) = std::conj(u(k));
    }
    return u;
}

// Same shape rescaled to a prescribed H^s norm.
inline SpectralField random_field_with_norm(int order, Rng& rng, double target_norm,
                                            double s = 1.0, double decay = 1.0) {
    SpectralField u = random_field(order, rng, decay);
    const double n = sobolev_norm(u, s);
    if (n == 0.0) {
        u = make_cosine(order, 1.0);
        return (target_norm / sobolev_norm(u, s)) * u;
    }
    return (target_norm / n) * u;
}

} // namespace kdvbbm
