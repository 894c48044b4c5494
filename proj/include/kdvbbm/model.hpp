#pragma once

// Model family on the torus, written in mild (Helmholtz-inverted) form
//     u_t = L u + N(u),
// where L is the diagonal linear part (phases -i ω_k) and N collects the
// quadratic/flux nonlinearity and the damping term:
//
//   drift_dispersion:  u_t + (c+1)u_x - c u_xxx - u_txx + u u_x = 0
//                      L = -iω_k(c),  N(u) = A(u^2/2)
//   pointwise_flux:    u_t - u_txx + [f(u)]_x = 0
//                      L = 0,        N(u) = A f(u)   (f applied on a grid)
//   nonlocal_quadratic: u_t - u_txx + u_x + λ(u ⊛ u)_x = 0
//                      L = -iω_k(0), N(u) = A(λ u ⊛ u)
//   linear:            N(u) = 0 (plus damping, if any)
//
// Damping (subtracted inside N so L stays diagonal):
//   feedback:        (1-∂_x^2)^{-1} [ a (1-∂_x^2)(a u) ]
//   multiplicative:  (1-∂_x^2)^{-1} (a u)
// with every product Galerkin-truncated to the working band.

#include <functional>
#include <optional>

#include "operators.hpp"

namespace kdvbbm {

enum class Nonlinearity { linear, drift_dispersion, pointwise_flux, nonlocal_quadratic };
enum class DampingType { none, feedback, multiplicative };

struct ModelParams {
    double c = 0.0;
    Nonlinearity nonlinearity = Nonlinearity::drift_dispersion;
    std::function<double(double)> flux;      // pointwise_flux only
    double lambda = 0.0;                     // nonlocal_quadratic coupling
    DampingType damping = DampingType::none;
    std::optional<SpectralField> profile;    // damping profile a (real)
    int flux_grid = 0;                       // 0: default 4(K+1) points
};

inline double model_frequency(const ModelParams& p, int k) {
    switch (p.nonlinearity) {
        case Nonlinearity::pointwise_flux: return 0.0;
        case Nonlinearity::nonlocal_quadratic: return mode_frequency(k, 0.0);
        default: return mode_frequency(k, p.c);
    }
}

inline std::vector<double> model_frequencies(const ModelParams& p, int order) {
    std::vector<double> w(2 * static_cast<std::size_t>(order) + 1);
    for (int k = -order; k <= order; ++k)
        w[static_cast<std::size_t>(k + order)] = model_frequency(p, k);
    return w;
}

inline SpectralField damping_profile_at(const ModelParams& p, int order) {
    if (!p.profile) throw InvalidArgument("damping requested without a profile");
    if (!p.profile->is_hermitian(1e-10))
        throw InvalidArgument("damping profile must be a real field");
    return p.profile->resampled(order);
}

// Nonlinear + damping part of the mild right-hand side (everything except
// the diagonal linear phases).
inline SpectralField rhs_mild(const SpectralField& u, const ModelParams& p) {
    const int K = u.order();
    SpectralField out(K);
    switch (p.nonlinearity) {
        case Nonlinearity::linear:
            break;
        case Nonlinearity::drift_dispersion: {
            SpectralField sq = pointwise_product(u, u);
            out += dispersion_generator(0.5 * sq);
            break;
        }
        case Nonlinearity::pointwise_flux: {
            if (!p.flux) throw InvalidArgument("pointwise_flux model needs a flux function");
            const int N = p.flux_grid > 0 ? p.flux_grid : 4 * (K + 1);
            if (N < 4 * K + 1)
                throw InvalidArgument("flux grid too coarse for alias-free quadratic flux");
            std::vector<double> vals = synthesize(u, N);
            for (auto& v : vals) v = p.flux(v);
            out += dispersion_generator(analyze(vals, K));
            break;
        }
        case Nonlinearity::nonlocal_quadratic: {
            out += dispersion_generator(p.lambda * torus_convolution(u, u));
            break;
        }
    }
    switch (p.damping) {
        case DampingType::none:
            break;
        case DampingType::feedback: {
            const SpectralField a = damping_profile_at(p, K);
            SpectralField w = pointwise_product(a, u);
            w = helmholtz_forward(w);
            w = pointwise_product(a, w);
            out -= helmholtz_inverse(w);
            break;
        }
        case DampingType::multiplicative: {
            const SpectralField a = damping_profile_at(p, K);
            out -= helmholtz_inverse(pointwise_product(a, u));
            break;
        }
    }
    return out;
}

// Instantaneous dissipation density in the H^1 energy balance,
//   d/dt ||u||_{H^1}^2 = -2 * dissipation_density(u).
// feedback:        ||P_K(a u)||_{H^1}^2
// multiplicative:  2π Re Σ conj(û_k) (a u)ˆ_k   ( = ∫ a u^2 )
inline double dissipation_density(const SpectralField& u, const SpectralField& a,
                                  DampingType type) {
    switch (type) {
        case DampingType::none:
            return 0.0;
        case DampingType::feedback: {
            const double n = sobolev_norm(pointwise_product(a, u), 1.0);
            return n * n;
        }
        case DampingType::multiplicative:
            return l2_inner(pointwise_product(a, u), u).real();
    }
    return 0.0;
}

} // namespace kdvbbm
