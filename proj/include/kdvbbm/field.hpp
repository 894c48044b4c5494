#pragma once

// Truncated Fourier representation of real 2π-periodic fields.
//
// Convention:   û_k = (1/2π) ∫_0^{2π} u(x) e^{-ikx} dx,
//               u(x) = Σ_{|k|<=K} û_k e^{ikx},
// so a real field satisfies û_{-k} = conj(û_k).  All operators in this
// library act on the coefficient vector (û_{-K}, ..., û_K).
//
// Norms:  ||u||_{H^s}^2 = 2π Σ_k (1+k^2)^s |û_k|^2  (equals the integral
// Sobolev norm for band-limited fields; s may be any real number).

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "errors.hpp"

namespace kdvbbm {

using complexd = std::complex<double>;

inline constexpr double two_pi = 2.0 * std::numbers::pi;

class SpectralField {
public:
    SpectralField() : order_(0), coeffs_(1) {}

    explicit SpectralField(int order)
        : order_(order), coeffs_(2 * static_cast<std::size_t>(order) + 1) {
        if (order < 0) throw InvalidArgument("truncation order must be >= 0");
    }

    int order() const { return order_; }
    int size() const { return 2 * order_ + 1; }

    // Coefficient of e^{ikx}; k in [-order, order].
    complexd& operator()(int k) { return coeffs_[static_cast<std::size_t>(k + order_)]; }
    const complexd& operator()(int k) const { return coeffs_[static_cast<std::size_t>(k + order_)]; }

    const std::vector<complexd>& coefficients() const { return coeffs_; }
    std::vector<complexd>& coefficients() { return coeffs_; }

    bool is_hermitian(double tol = 1e-12) const {
        for (int k = 1; k <= order_; ++k) {
            const complexd d = (*this)(-k) - std::conj((*this)(k));
            if (std::abs(d) > tol) return false;
        }
        return std::abs((*this)(0).imag()) <= tol;
    }

    // Projects onto the real subspace: û_{-k} <- conj(û_k) averaged.
    void symmetrize() {
        (*this)(0) = complexd((*this)(0).real(), 0.0);
        for (int k = 1; k <= order_; ++k) {
            const complexd avg = 0.5 * ((*this)(k) + std::conj((*this)(-k)));
            (*this)(k) = avg;
            (*this)(-k) = std::conj(avg);
        }
    }

    // Truncates or zero-pads to a new order.
    SpectralField resampled(int new_order) const {
        SpectralField out(new_order);
        const int m = std::min(order_, new_order);
        for (int k = -m; k <= m; ++k) out(k) = (*this)(k);
        return out;
    }

    // Reflection x -> -x (coefficient reversal).
    SpectralField reflected() const {
        SpectralField out(order_);
        for (int k = -order_; k <= order_; ++k) out(k) = (*this)(-k);
        return out;
    }

    SpectralField& operator+=(const SpectralField& o) {
        check_same_order(o);
        for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += o.coeffs_[i];
        return *this;
    }
    SpectralField& operator-=(const SpectralField& o) {
        check_same_order(o);
        for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= o.coeffs_[i];
        return *this;
    }
    SpectralField& operator*=(complexd z) {
        for (auto& c : coeffs_) c *= z;
        return *this;
    }

    friend SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
    friend SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
    friend SpectralField operator*(double z, SpectralField a) { return a *= z; }
    friend SpectralField operator*(complexd z, SpectralField a) { return a *= z; }

    void check_same_order(const SpectralField& o) const {
        if (o.order_ != order_)
            throw InvalidArgument("truncation orders differ: " + std::to_string(order_) +
                                  " vs " + std::to_string(o.order_));
    }

private:
    int order_;
    std::vector<complexd> coeffs_;
};

// <u, v>_{H^s} = 2π Σ (1+k^2)^s û_k conj(v̂_k).
inline complexd sobolev_inner(const SpectralField& u, const SpectralField& v, double s) {
    u.check_same_order(v);
    complexd acc = 0.0;
    for (int k = -u.order(); k <= u.order(); ++k) {
        const double kk = static_cast<double>(k) * k;
        acc += std::pow(1.0 + kk, s) * u(k) * std::conj(v(k));
    }
    return two_pi * acc;
}

inline complexd l2_inner(const SpectralField& u, const SpectralField& v) {
    u.check_same_order(v);
    complexd acc = 0.0;
    for (int k = -u.order(); k <= u.order(); ++k) acc += u(k) * std::conj(v(k));
    return two_pi * acc;
}

inline double sobolev_norm(const SpectralField& u, double s) {
    double acc = 0.0;
    for (int k = -u.order(); k <= u.order(); ++k) {
        const double kk = static_cast<double>(k) * k;
        acc += std::pow(1.0 + kk, s) * std::norm(u(k));
    }
    return std::sqrt(two_pi * acc);
}

inline double l2_norm(const SpectralField& u) { return sobolev_norm(u, 0.0); }

inline double max_abs_coefficient(const SpectralField& u) {
    double m = 0.0;
    for (const auto& c : u.coefficients()) m = std::max(m, std::abs(c));
    return m;
}

// Point evaluation u(x) = Σ û_k e^{ikx} (real part; imaginary part is
// roundoff for Hermitian data).
inline double evaluate(const SpectralField& u, double x) {
    complexd acc = 0.0;
    for (int k = -u.order(); k <= u.order(); ++k)
        acc += u(k) * std::polar(1.0, k * x);
    return acc.real();
}

// Values on the uniform grid x_n = 2πn/N, n = 0..N-1.
inline std::vector<double> synthesize(const SpectralField& u, int N) {
    if (N < 1) throw InvalidArgument("grid size must be positive");
    std::vector<double> out(static_cast<std::size_t>(N));
    for (int n = 0; n < N; ++n) out[static_cast<std::size_t>(n)] = evaluate(u, two_pi * n / N);
    return out;
}

// Trapezoidal Fourier analysis on the uniform grid; exact for band-limited
// inputs when N >= 2K+1 (values must stem from a band <= (N-1)/2 field for
// alias-free recovery).
inline SpectralField analyze(const std::vector<double>& values, int order) {
    const int N = static_cast<int>(values.size());
    if (N < 2 * order + 1)
        throw InvalidArgument("grid too coarse for requested truncation order");
    SpectralField out(order);
    for (int k = -order; k <= order; ++k) {
        complexd acc = 0.0;
        for (int n = 0; n < N; ++n)
            acc += values[static_cast<std::size_t>(n)] * std::polar(1.0, -k * (two_pi * n / N));
        out(k) = acc / static_cast<double>(N);
    }
    return out;
}

inline SpectralField make_constant(int order, double value) {
    SpectralField u(order);
    u(0) = value;
    return u;
}

// amplitude * cos(mode * x)
inline SpectralField make_cosine(int order, double amplitude, int mode = 1) {
    if (mode < 0 || mode > order) throw InvalidArgument("cosine mode outside truncation band");
    SpectralField u(order);
    if (mode == 0) {
        u(0) = amplitude;
    } else {
        u(mode) = 0.5 * amplitude;
        u(-mode) = 0.5 * amplitude;
    }
    return u;
}

// amplitude * sin(mode * x)
inline SpectralField make_sine(int order, double amplitude, int mode = 1) {
    if (mode < 1 || mode > order) throw InvalidArgument("sine mode outside truncation band");
    SpectralField u(order);
    u(mode) = complexd(0.0, -0.5 * amplitude);
    u(-mode) = complexd(0.0, 0.5 * amplitude);
    return u;
}

} // namespace kdvbbm
