#pragma once

// Diagonal Fourier multipliers and coefficient-space products.
//
// The regularized transport operator
//     A = -(1 - ∂_x^2)^{-1} ∂_x,        symbol  -ik/(1+k^2),
// generates the linear group of the family; the drift-c variant
//     v_t + (c+1)v_x - c v_xxx - v_txx = 0
// has the unitary group W_c(t) with symbol
//     exp(-i t ω_k),   ω_k = (c k^3 + (c+1) k)/(k^2 + 1) = k σ(k),
//     σ(k) = (c k^2 + c + 1)/(1 + k^2).
// All multipliers preserve Hermitian symmetry because their symbols obey
// m(-k) = conj(m(k)).
//
// Products are computed by direct coefficient convolution, which is the
// exact (alias-free) Galerkin product: pointwise_product truncates back to
// the common band, convolve_full keeps the whole band K_u + K_v.

#include <algorithm>
#include <cmath>

#include "field.hpp"

namespace kdvbbm {

// ω_k for drift parameter c.
inline double mode_frequency(int k, double c) {
    const double kd = static_cast<double>(k);
    return (c * kd * kd * kd + (c + 1.0) * kd) / (kd * kd + 1.0);
}

// Diagonal multiplier m(k), k in [-order, order].
struct LinearSymbol {
    int order = 0;
    std::vector<complexd> values; // index k + order

    complexd& operator()(int k) { return values[static_cast<std::size_t>(k + order)]; }
    const complexd& operator()(int k) const { return values[static_cast<std::size_t>(k + order)]; }

    SpectralField apply(const SpectralField& u) const {
        if (u.order() != order) throw InvalidArgument("symbol/field order mismatch");
        SpectralField out(order);
        for (int k = -order; k <= order; ++k) out(k) = (*this)(k)*u(k);
        return out;
    }
};

inline LinearSymbol identity_symbol(int order) {
    LinearSymbol s{order, std::vector<complexd>(2 * static_cast<std::size_t>(order) + 1, 1.0)};
    return s;
}

// W_c(t): unimodular phases exp(-i t ω_k), computed directly from (t, c)
// so long-horizon evaluation carries no accumulated stepping error.
inline LinearSymbol group_symbol(double t, double c, int order) {
    LinearSymbol s{order, std::vector<complexd>(2 * static_cast<std::size_t>(order) + 1)};
    for (int k = -order; k <= order; ++k)
        s(k) = std::polar(1.0, -t * mode_frequency(k, c));
    return s;
}

// Phases exp(-i t ω_k) for an explicit frequency table (index k + order).
inline LinearSymbol group_symbol_from(const std::vector<double>& freqs, double t) {
    const int order = (static_cast<int>(freqs.size()) - 1) / 2;
    LinearSymbol s{order, std::vector<complexd>(freqs.size())};
    for (int k = -order; k <= order; ++k)
        s(k) = std::polar(1.0, -t * freqs[static_cast<std::size_t>(k + order)]);
    return s;
}

// (1 - ∂_x^2)^{-1}: divide by 1 + k^2.
inline SpectralField helmholtz_inverse(const SpectralField& u) {
    SpectralField out(u.order());
    for (int k = -u.order(); k <= u.order(); ++k)
        out(k) = u(k) / (1.0 + static_cast<double>(k) * k);
    return out;
}

// (1 - ∂_x^2): multiply by 1 + k^2.
inline SpectralField helmholtz_forward(const SpectralField& u) {
    SpectralField out(u.order());
    for (int k = -u.order(); k <= u.order(); ++k)
        out(k) = u(k) * (1.0 + static_cast<double>(k) * k);
    return out;
}

// (1 - ∂_x^2)^p for real p.
inline SpectralField sobolev_scale(const SpectralField& u, double p) {
    SpectralField out(u.order());
    for (int k = -u.order(); k <= u.order(); ++k)
        out(k) = u(k) * std::pow(1.0 + static_cast<double>(k) * k, p);
    return out;
}

inline SpectralField derivative(const SpectralField& u) {
    SpectralField out(u.order());
    for (int k = -u.order(); k <= u.order(); ++k)
        out(k) = complexd(0.0, static_cast<double>(k)) * u(k);
    return out;
}

// A u = -(1 - ∂_x^2)^{-1} u_x; H^s operator norm is 1/2 (attained at k = ±1).
inline SpectralField dispersion_generator(const SpectralField& u) {
    SpectralField out(u.order());
    for (int k = -u.order(); k <= u.order(); ++k) {
        const double kd = static_cast<double>(k);
        out(k) = complexd(0.0, -kd / (1.0 + kd * kd)) * u(k);
    }
    return out;
}

// Periodic convolution (u ⊛ v)(x) = ∫ u(x-y)v(y) dy: coefficients 2π û_k v̂_k.
inline SpectralField torus_convolution(const SpectralField& u, const SpectralField& v) {
    u.check_same_order(v);
    SpectralField out(u.order());
    for (int k = -u.order(); k <= u.order(); ++k) out(k) = two_pi * u(k) * v(k);
    return out;
}

// Full product: (uv)ˆ_k = Σ_j û_j v̂_{k-j} on the band |k| <= K_u + K_v (exact).
inline SpectralField convolve_full(const SpectralField& u, const SpectralField& v) {
    const int Ku = u.order(), Kv = v.order();
    SpectralField out(Ku + Kv);
    for (int k = -(Ku + Kv); k <= Ku + Kv; ++k) {
        complexd acc = 0.0;
        const int jlo = std::max(-Ku, k - Kv);
        const int jhi = std::min(Ku, k + Kv);
        for (int j = jlo; j <= jhi; ++j) acc += u(j) * v(k - j);
        out(k) = acc;
    }
    return out;
}

// Galerkin product: full convolution truncated back to the common band.
inline SpectralField pointwise_product(const SpectralField& u, const SpectralField& v) {
    u.check_same_order(v);
    const int K = u.order();
    SpectralField out(K);
    for (int k = -K; k <= K; ++k) {
        complexd acc = 0.0;
        const int jlo = std::max(-K, k - K);
        const int jhi = std::min(K, k + K);
        for (int j = jlo; j <= jhi; ++j) acc += u(j) * v(k - j);
        out(k) = acc;
    }
    return out;
}

// Frame change along x = ct.  forward: u(x,t) -> v(x,t) = u(x - ct, t)
// (phases e^{-ikct}); backward undoes it.  forward ∘ backward = identity.
enum class FrameDirection { forward, backward };

inline SpectralField moving_frame(const SpectralField& u, double t, double c,
                                  FrameDirection dir) {
    const double sign = (dir == FrameDirection::forward) ? -1.0 : 1.0;
    SpectralField out(u.order());
    for (int k = -u.order(); k <= u.order(); ++k)
        out(k) = std::polar(1.0, sign * k * c * t) * u(k);
    return out;
}

} // namespace kdvbbm
