#pragma once

// Analytic-in-time expansion of the mild drift-free flow
//     u_t = A(u + u^2/2),    A = -(1-∂_x^2)^{-1}∂_x.
// Matching powers of t in u(t) = Σ v_n t^n gives the recursion
//     v_0 = u_0,
//     v_n = (1/n) A( v_{n-1} + (1/2) Σ_{l=0}^{n-1} P_K(v_l v_{n-1-l}) ).
// With ||A||_{H^1} = 1/2 and a product bound ||P_K(uv)|| <= C1 ||u|| ||v||,
// the series converges for |t| < 1/(1 + 4 C1 ||u_0||_{H^1}); the returned
// radius uses an empirically estimated C1 with a 1.2 safety factor.

#include "integrator.hpp"
#include "random.hpp"

namespace kdvbbm {

// Empirical H^1 bound for the Galerkin product at truncation `order`:
// max over random unit pairs of ||P_K(uv)||_{H^1}, inflated by `safety`.
inline double product_h1_bound(int order, int n_pairs = 1000, std::uint64_t seed = 2026,
                               double safety = 1.2) {
    Rng rng(seed);
    double worst = 0.0;
    for (int i = 0; i < n_pairs; ++i) {
        const SpectralField u = random_field_with_norm(order, rng, 1.0, 1.0, 1.0);
        const SpectralField v = random_field_with_norm(order, rng, 1.0, 1.0, 1.0);
        worst = std::max(worst, sobolev_norm(pointwise_product(u, v), 1.0));
    }
    return safety * worst;
}

struct TaylorSeries {
    std::vector<SpectralField> coefficients; // v_0 .. v_n
    double radius_estimate = 0.0;
    double product_bound = 0.0;

    SpectralField partial_sum(double t) const {
        SpectralField acc(coefficients.at(0).order());
        // Horner evaluation, highest order first.
        for (std::size_t i = coefficients.size(); i-- > 0;) {
            acc *= t;
            acc += coefficients[i];
        }
        return acc;
    }
};

inline TaylorSeries taylor_flow(const SpectralField& u0, int n_max,
                                double product_bound = 0.0) {
    if (n_max < 0) throw InvalidArgument("expansion order must be >= 0");
    TaylorSeries ts;
    ts.product_bound = product_bound > 0.0 ? product_bound : product_h1_bound(u0.order());
    ts.coefficients.reserve(static_cast<std::size_t>(n_max) + 1);
    ts.coefficients.push_back(u0);
    for (int n = 1; n <= n_max; ++n) {
        SpectralField arg = ts.coefficients[static_cast<std::size_t>(n - 1)];
        for (int l = 0; l < n; ++l)
            arg += 0.5 * pointwise_product(ts.coefficients[static_cast<std::size_t>(l)],
                                           ts.coefficients[static_cast<std::size_t>(n - 1 - l)]);
        ts.coefficients.push_back((1.0 / n) * dispersion_generator(arg));
    }
    ts.radius_estimate = 1.0 / (1.0 + 4.0 * ts.product_bound * sobolev_norm(u0, 1.0));
    return ts;
}

} // namespace kdvbbm
