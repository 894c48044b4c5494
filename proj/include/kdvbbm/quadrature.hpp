#pragma once

// Composite-Simpson quadrature on uniform samples, including a prefix
// (running-integral) variant.  Prefixes at even indices are plain composite
// Simpson; odd indices append a Simpson-3/8 panel; the first interval uses
// the 4-point Adams-Moulton rule.  All prefixes are O(h^4)-accurate.

#include <algorithm>
#include <vector>

#include "errors.hpp"
#include "field.hpp"

namespace kdvbbm {

template <class T>
std::vector<T> simpson_prefix(const std::vector<T>& f, double h) {
    const std::size_t n = f.size();
    std::vector<T> out(n);
    if (n == 0) return out;
    out[0] = T(0);
    if (n == 1) return out;
    if (n < 4) {
        // Too few nodes for 4th order; trapezoid fallback.
        for (std::size_t i = 1; i < n; ++i)
            out[i] = out[i - 1] + (h / 2.0) * (f[i - 1] + f[i]);
        return out;
    }
    out[1] = (h / 24.0) * (9.0 * f[0] + 19.0 * f[1] - 5.0 * f[2] + f[3]);
    for (std::size_t i = 2; i < n; ++i) {
        if (i % 2 == 0)
            out[i] = out[i - 2] + (h / 3.0) * (f[i - 2] + 4.0 * f[i - 1] + f[i]);
        else
            out[i] = out[i - 3] + (3.0 * h / 8.0) * (f[i - 3] + 3.0 * f[i - 2] + 3.0 * f[i - 1] + f[i]);
    }
    return out;
}

template <class T>
T simpson_integral(const std::vector<T>& f, double h) {
    if (f.empty()) throw InvalidArgument("empty sample vector");
    return simpson_prefix(f, h).back();
}

// Cubic Lagrange interpolation of uniform field samples f_i = f(i*h),
// evaluated at t (clamped to the sampled range endpoints).
inline SpectralField cubic_interpolate_fields(const std::vector<SpectralField>& f, double h,
                                              double t) {
    if (f.empty()) throw InvalidArgument("no samples to interpolate");
    const int n = static_cast<int>(f.size());
    if (n < 4) return f[static_cast<std::size_t>(std::min<int>(n - 1, std::max(0, static_cast<int>(t / h + 0.5))))];
    int i0 = static_cast<int>(std::floor(t / h)) - 1;
    i0 = std::max(0, std::min(n - 4, i0));
    const double s = t / h - static_cast<double>(i0);
    double w[4];
    for (int a = 0; a < 4; ++a) {
        double num = 1.0, den = 1.0;
        for (int b = 0; b < 4; ++b) {
            if (b == a) continue;
            num *= s - static_cast<double>(b);
            den *= static_cast<double>(a - b);
        }
        w[a] = num / den;
    }
    SpectralField out(f[0].order());
    for (int a = 0; a < 4; ++a) out += w[a] * f[static_cast<std::size_t>(i0 + a)];
    return out;
}

// Same rule applied coefficientwise to sampled fields.
inline std::vector<SpectralField> simpson_prefix_fields(const std::vector<SpectralField>& f,
                                                        double h) {
    std::vector<SpectralField> out;
    out.reserve(f.size());
    if (f.empty()) return out;
    const int K = f[0].order();
    std::vector<complexd> mode(f.size());
    out.assign(f.size(), SpectralField(K));
    for (int k = -K; k <= K; ++k) {
        for (std::size_t i = 0; i < f.size(); ++i) mode[i] = f[i](k);
        const std::vector<complexd> pre = simpson_prefix(mode, h);
        for (std::size_t i = 0; i < f.size(); ++i) out[i](k) = pre[i];
    }
    return out;
}

} // namespace kdvbbm
