#pragma once

// Spectral data for the moment method on the drift-c linear group.
//
// Mode frequencies ω_k = (c k^3 + (c+1) k)/(k^2 + 1) may collide for
// rational c: ω_k = ω_l (k ≠ l) iff c = (kl - 1)/((k^2+1)(l^2+1)).  Each
// collision class ("cluster") has at most three members (the condition is
// cubic in l for fixed k and c).  Collisions are decided exactly in integer
// arithmetic when c is available as a rational p/q; otherwise a relative
// 1e-12 tolerance on sorted frequencies is used and flagged.
//
// For a horizon T > 2π/|c| the distinct exponentials p_k(t) = e^{-iω_k t}
// form a Riesz basis of their span in L^2(0,T); the Gram matrix
//     G_{jk} = ∫_0^T p_j conj(p_k) dt
// has closed form (e^{i(ω_k-ω_j)T} - 1)/(i(ω_k-ω_j)) (= T on the diagonal),
// and the dual family q_j = Σ_m d_{mj} p_m is biorthogonal,
// ∫ q_j conj(p_k) = δ_{jk}, iff conj(G) d = I.

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <map>
#include <memory>
#include <optional>

#include "operators.hpp"

namespace kdvbbm {

struct Rational {
    long long num = 0;
    long long den = 1; // > 0
};

// Exact rational form of a double via its binary mantissa (c = m * 2^e).
// Returns nullopt when the reduced numerator/denominator exceed 62 bits.
inline std::optional<Rational> rational_from_double(double c) {
    if (!std::isfinite(c)) return std::nullopt;
    if (c == 0.0) return Rational{0, 1};
    int exp2 = 0;
    const double m = std::frexp(c, &exp2);
    long long num = std::llround(std::ldexp(m, 53));
    int e2 = exp2 - 53;
    while (num != 0 && (num & 1) == 0) {
        num >>= 1;
        ++e2;
    }
    if (e2 >= 0) {
        if (e2 > 62) return std::nullopt;
        const __int128 wide = static_cast<__int128>(num) << e2;
        if (wide > INT64_MAX || wide < -static_cast<__int128>(INT64_MAX)) return std::nullopt;
        return Rational{static_cast<long long>(wide), 1};
    }
    if (-e2 > 62) return std::nullopt;
    return Rational{num, 1LL << (-e2)};
}

inline Rational reduced(long long num, long long den) {
    if (den == 0) throw InvalidArgument("rational with zero denominator");
    if (den < 0) {
        num = -num;
        den = -den;
    }
    long long a = num < 0 ? -num : num, b = den;
    while (b != 0) {
        const long long t = a % b;
        a = b;
        b = t;
    }
    if (a > 1) {
        num /= a;
        den /= a;
    }
    return Rational{num, den};
}

// ω_k == ω_l decided exactly: with c = p/q,
//   (p k^3 + (p+q) k)(l^2+1) == (p l^3 + (p+q) l)(k^2+1).
// All magnitudes fit __int128 for |p|,q < 2^62 and |k|,|l| <= 1024.
inline bool frequencies_collide(int k, int l, const Rational& c) {
    const __int128 p = c.num, q = c.den;
    auto lhs_of = [&](int a) {
        const __int128 ad = a;
        return p * ad * ad * ad + (p + q) * ad;
    };
    const __int128 k2 = static_cast<__int128>(k) * k + 1;
    const __int128 l2 = static_cast<__int128>(l) * l + 1;
    return lhs_of(k) * l2 == lhs_of(l) * k2;
}

struct Cluster {
    std::vector<int> members;  // mode numbers k, ascending
    int representative = 0;    // smallest |k|, ties resolved to k >= 0
};

struct FrequencyTable {
    double c = 0.0;
    int order = 0;
    std::vector<double> values;    // ω_k, index k + order
    std::vector<Cluster> clusters; // ascending by representative
    bool tolerance_clustering = false;

    double omega(int k) const { return values[static_cast<std::size_t>(k + order)]; }
};

inline FrequencyTable eigenfrequencies(double c, int order,
                                       std::optional<Rational> c_rational = std::nullopt) {
    if (c == 0.0) throw InvalidArgument("drift parameter c must be nonzero");
    if (order < 0) throw InvalidArgument("truncation order must be >= 0");
    FrequencyTable table;
    table.c = c;
    table.order = order;
    table.values.resize(2 * static_cast<std::size_t>(order) + 1);
    for (int k = -order; k <= order; ++k)
        table.values[static_cast<std::size_t>(k + order)] = mode_frequency(k, c);

    std::optional<Rational> rat = c_rational ? c_rational : rational_from_double(c);
    std::vector<int> group_of(2 * static_cast<std::size_t>(order) + 1, -1);
    std::vector<std::vector<int>> groups;

    if (rat) {
        for (int k = -order; k <= order; ++k) {
            const auto ik = static_cast<std::size_t>(k + order);
            if (group_of[ik] >= 0) continue;
            group_of[ik] = static_cast<int>(groups.size());
            groups.push_back({k});
            for (int l = k + 1; l <= order; ++l) {
                const auto il = static_cast<std::size_t>(l + order);
                if (group_of[il] >= 0) continue;
                if (frequencies_collide(k, l, *rat)) {
                    group_of[il] = group_of[ik];
                    groups[static_cast<std::size_t>(group_of[ik])].push_back(l);
                }
            }
        }
    } else {
        table.tolerance_clustering = true;
        std::vector<int> ks(2 * static_cast<std::size_t>(order) + 1);
        for (int k = -order; k <= order; ++k) ks[static_cast<std::size_t>(k + order)] = k;
        std::sort(ks.begin(), ks.end(),
                  [&](int a, int b) { return table.omega(a) < table.omega(b); });
        for (int k : ks) {
            const double w = table.omega(k);
            if (!groups.empty()) {
                const double w_prev = table.omega(groups.back().back());
                if (std::abs(w - w_prev) <= 1e-12 * std::max(1.0, std::abs(w))) {
                    groups.back().push_back(k);
                    continue;
                }
            }
            groups.push_back({k});
        }
        for (auto& g : groups) std::sort(g.begin(), g.end());
    }

    for (auto& g : groups) {
        Cluster cl;
        cl.members = g;
        cl.representative = g.front();
        for (int k : g) {
            const bool better = std::abs(k) < std::abs(cl.representative) ||
                                (std::abs(k) == std::abs(cl.representative) && k >= 0);
            if (better) cl.representative = k;
        }
        table.clusters.push_back(std::move(cl));
    }
    std::sort(table.clusters.begin(), table.clusters.end(),
              [](const Cluster& a, const Cluster& b) { return a.representative < b.representative; });
    return table;
}

// G_{jk} = ∫_0^T e^{-iω_j t} e^{+iω_k t} dt, closed form.
inline complexd pair_exponential_integral(double w_j, double w_k, double T) {
    const double delta = w_k - w_j;
    if (delta == 0.0) return complexd(T, 0.0);
    const complexd num = std::polar(1.0, delta * T) - 1.0;
    return num / complexd(0.0, delta);
}

inline Eigen::MatrixXcd gram_exponentials(const std::vector<double>& freqs, double T) {
    const auto n = static_cast<Eigen::Index>(freqs.size());
    Eigen::MatrixXcd G(n, n);
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index k = 0; k < n; ++k)
            G(j, k) = pair_exponential_integral(freqs[static_cast<std::size_t>(j)],
                                                freqs[static_cast<std::size_t>(k)], T);
    return G;
}

struct DualBasis {
    Eigen::MatrixXcd coefficients; // d: q_j = Σ_m d(m,j) p_m
    double gram_condition = 0.0;
    double biorthogonality_residual = 0.0;
};

// Solves conj(G) d = I (Cholesky); throws ConditioningError when the Gram
// spectrum is numerically singular or its condition number exceeds `cap`.
inline DualBasis dual_basis(const Eigen::MatrixXcd& gram, double cap = 1e12) {
    const Eigen::Index n = gram.rows();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(gram, Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues().minCoeff();
    const double hi = es.eigenvalues().maxCoeff();
    if (!(lo > 0.0))
        throw ConditioningError("Gram matrix numerically not positive definite");
    DualBasis out;
    out.gram_condition = hi / lo;
    if (out.gram_condition > cap)
        throw ConditioningError("Gram condition " + std::to_string(out.gram_condition) +
                                " exceeds cap " + std::to_string(cap));
    Eigen::LLT<Eigen::MatrixXcd> llt(gram.conjugate());
    if (llt.info() != Eigen::Success)
        throw ConditioningError("Cholesky factorization of Gram matrix failed");
    out.coefficients = llt.solve(Eigen::MatrixXcd::Identity(n, n));
    out.biorthogonality_residual =
        (gram.transpose() * out.coefficients - Eigen::MatrixXcd::Identity(n, n))
            .cwiseAbs()
            .maxCoeff();
    return out;
}

struct MomentSystem {
    double c = 0.0;
    double horizon = 0.0; // T
    int order = 0;        // K
    FrequencyTable table;
    std::vector<int> representatives;  // distinct-frequency modes, ascending
    std::vector<int> rep_index;        // mode k -> index into representatives
    Eigen::MatrixXcd gram;             // over representatives
    DualBasis dual;
    double out_of_band_residual = 0.0; // |∫ q_j conj(p_k)| for |k| > K (reported)

    int rep_of(int k) const { return rep_index[static_cast<std::size_t>(k + order)]; }
    double omega(int k) const { return table.omega(k); }

    // q_j(t) for representative index j.
    complexd dual_value(Eigen::Index j, double t) const {
        complexd acc = 0.0;
        for (Eigen::Index m = 0; m < static_cast<Eigen::Index>(representatives.size()); ++m)
            acc += dual.coefficients(m, j) *
                   std::polar(1.0, -omega(representatives[static_cast<std::size_t>(m)]) * t);
        return acc;
    }

    // Q_{ab} = ∫_0^T q_a conj(q_b) dt = (dᵀ G conj(d))_{ab}, closed form.
    Eigen::MatrixXcd dual_gram() const {
        return dual.coefficients.transpose() * gram * dual.coefficients.conjugate();
    }
};

inline MomentSystem build_moment_system(double c, double T, int order,
                                        std::optional<Rational> c_rational = std::nullopt,
                                        double condition_cap = 1e12) {
    if (c == 0.0) throw InvalidArgument("drift parameter c must be nonzero");
    if (!(T > two_pi / std::abs(c)))
        throw InvalidArgument("horizon must exceed 2*pi/|c| for a Riesz basis");
    MomentSystem ms;
    ms.c = c;
    ms.horizon = T;
    ms.order = order;
    ms.table = eigenfrequencies(c, order, c_rational);

    ms.rep_index.assign(2 * static_cast<std::size_t>(order) + 1, -1);
    for (const Cluster& cl : ms.table.clusters) ms.representatives.push_back(cl.representative);
    std::sort(ms.representatives.begin(), ms.representatives.end());
    for (std::size_t i = 0; i < ms.representatives.size(); ++i) {
        const int rep = ms.representatives[i];
        for (const Cluster& cl : ms.table.clusters)
            if (cl.representative == rep)
                for (int k : cl.members)
                    ms.rep_index[static_cast<std::size_t>(k + order)] = static_cast<int>(i);
    }

    std::vector<double> rep_freqs;
    rep_freqs.reserve(ms.representatives.size());
    for (int k : ms.representatives) rep_freqs.push_back(ms.table.omega(k));
    ms.gram = gram_exponentials(rep_freqs, T);
    ms.dual = dual_basis(ms.gram, condition_cap);

    // Reported only: coupling of the section's duals to the next few
    // out-of-band exponentials.
    double worst = 0.0;
    for (int k = order + 1; k <= order + 8; ++k) {
        for (const double sgn : {1.0, -1.0}) {
            const double w_out = mode_frequency(static_cast<int>(sgn * k), c);
            for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(ms.representatives.size()); ++j) {
                complexd acc = 0.0;
                for (Eigen::Index m = 0; m < static_cast<Eigen::Index>(ms.representatives.size()); ++m)
                    acc += ms.dual.coefficients(m, j) *
                           pair_exponential_integral(
                               rep_freqs[static_cast<std::size_t>(m)], w_out, T);
                worst = std::max(worst, std::abs(acc));
            }
        }
    }
    ms.out_of_band_residual = worst;
    return ms;
}

} // namespace kdvbbm
