#pragma once

// Feedback stabilization diagnostics.
//
// With B u = (1-∂_x^2)^{-1} [ a (1-∂_x^2) u ], the H^s-adjoint is
//     B^{*,s} = (1-∂_x^2)^{1-s} a (1-∂_x^2)^{s-1},
// in particular B^{*,1} u = a u; the closed-loop generator of
//     u_t = A u - B B^{*,1} u
// is, in coefficient space, the dense matrix
//     Ã = diag(-i ω_k) - D^{-1} C_a D C_a,
// with D = diag(1+k^2) and the (Hermitian, ℓ²-self-adjoint for real a)
// truncated product matrix C_a[k][j] = â_{k-j}.  Its exponential gives the
// damped group; its spectral abscissa bounds the exponential decay rate.
// The adjoint identity <Bu, v>_{H^s} = <u, B^{*,s} v>_{H^s} holds exactly at
// finite truncation because C_a is self-adjoint.

#include <limits>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

#include "integrator.hpp"

namespace kdvbbm {

// B u = (1-∂_x^2)^{-1} [ a (1-∂_x^2) u ].
inline SpectralField feedback_operator(const SpectralField& u, const SpectralField& a) {
    const SpectralField aK = a.resampled(u.order());
    return helmholtz_inverse(pointwise_product(aK, helmholtz_forward(u)));
}

// B^{*,s} u = (1-∂_x^2)^{1-s} [ a (1-∂_x^2)^{s-1} u ];  s = 1 gives a·u.
inline SpectralField feedback_adjoint(const SpectralField& u, double s,
                                      const SpectralField& a) {
    const SpectralField aK = a.resampled(u.order());
    return sobolev_scale(pointwise_product(aK, sobolev_scale(u, s - 1.0)), 1.0 - s);
}

struct DampedGenerator {
    int order = 0;
    double c = 0.0;
    SpectralField profile;
    Eigen::MatrixXcd matrix; // (2K+1)^2, acts on coefficient vectors
};

inline Eigen::VectorXcd to_vector(const SpectralField& u) {
    Eigen::VectorXcd v(u.size());
    for (int k = -u.order(); k <= u.order(); ++k) v(k + u.order()) = u(k);
    return v;
}

inline SpectralField from_vector(const Eigen::VectorXcd& v) {
    const int K = (static_cast<int>(v.size()) - 1) / 2;
    SpectralField u(K);
    for (int k = -K; k <= K; ++k) u(k) = v(k + K);
    return u;
}

inline Eigen::MatrixXcd product_matrix(const SpectralField& a, int order) {
    const SpectralField aK = a.resampled(order);
    const Eigen::Index n = 2 * static_cast<Eigen::Index>(order) + 1;
    Eigen::MatrixXcd C = Eigen::MatrixXcd::Zero(n, n);
    for (int k = -order; k <= order; ++k)
        for (int j = -order; j <= order; ++j)
            if (std::abs(k - j) <= order) C(k + order, j + order) = aK(k - j);
    return C;
}

inline DampedGenerator make_damped_generator(const SpectralField& a, double c, int order) {
    DampedGenerator gen;
    gen.order = order;
    gen.c = c;
    gen.profile = a.resampled(order);
    const Eigen::Index n = 2 * static_cast<Eigen::Index>(order) + 1;
    const Eigen::MatrixXcd C = product_matrix(gen.profile, order);
    Eigen::VectorXd D(n), Dinv(n);
    for (int k = -order; k <= order; ++k) {
        D(k + order) = 1.0 + static_cast<double>(k) * k;
        Dinv(k + order) = 1.0 / D(k + order);
    }
    gen.matrix = Dinv.asDiagonal() * C * D.asDiagonal() * C;
    gen.matrix *= -1.0;
    for (int k = -order; k <= order; ++k)
        gen.matrix(k + order, k + order) += complexd(0.0, -mode_frequency(k, c));
    return gen;
}

inline Eigen::MatrixXcd damped_propagator(const DampedGenerator& gen, double t) {
    return (t * gen.matrix).exp();
}

inline SpectralField damped_group_apply(const DampedGenerator& gen, const SpectralField& u0,
                                        double t) {
    if (u0.order() != gen.order) throw InvalidArgument("state/generator order mismatch");
    return from_vector(damped_propagator(gen, t) * to_vector(u0));
}

inline double spectral_abscissa(const DampedGenerator& gen) {
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(gen.matrix, false);
    return es.eigenvalues().real().maxCoeff();
}

struct DecayFit {
    double gamma_hat = 0.0; // decay rate: ||u(t)|| ~ C e^{-γ t}
    double c_hat = 0.0;     // fitted prefactor
    double r2 = 0.0;
};

// Least-squares fit of log||u(t)||_{H^s} over t >= t_min.  The window is
// truncated at the first underflowing sample (norm <= 1e-300).
inline DecayFit decay_rate_fit(const std::vector<double>& times,
                               const std::vector<double>& norms, double t_min = 1.0) {
    if (times.size() != norms.size()) throw InvalidArgument("times/norms size mismatch");
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (times[i] < t_min) continue;
        if (!(norms[i] > 1e-300)) break;
        xs.push_back(times[i]);
        ys.push_back(std::log(norms[i]));
    }
    if (xs.size() < 2) throw DegenerateFit("fewer than two usable samples in fit window");
    const auto nd = static_cast<double>(xs.size());
    double sx = 0.0, sy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
    }
    const double mx = sx / nd, my = sy / nd;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    if (!(sxx > 0.0)) throw DegenerateFit("degenerate time window");
    const double slope = sxy / sxx;
    DecayFit fit;
    fit.gamma_hat = -slope;
    fit.c_hat = std::exp(my - slope * mx);
    const double ss_res = syy - slope * sxy;
    fit.r2 = syy > 1e-28 ? 1.0 - ss_res / syy : 1.0;
    return fit;
}

inline DecayFit decay_rate_fit(const Trajectory& traj, double t_min = 1.0) {
    std::vector<double> norms(traj.states.size());
    for (std::size_t i = 0; i < norms.size(); ++i) norms[i] = traj.h1(i);
    return decay_rate_fit(traj.times, norms, t_min);
}

struct ObservabilityResult {
    double ratio = 0.0; // ||u0||_{H^1}^2 / ∫_0^T ||a u||_{H^1}^2 dt
    bool degenerate_denominator = false;
};

inline ObservabilityResult observability_ratio(const Trajectory& traj,
                                               const SpectralField& a) {
    if (traj.states.empty()) throw InvalidArgument("empty trajectory");
    std::vector<double> density(traj.states.size());
    for (std::size_t i = 0; i < traj.states.size(); ++i) {
        const SpectralField ai = a.resampled(traj.states[i].order());
        const double nrm = sobolev_norm(pointwise_product(ai, traj.states[i]), 1.0);
        density[i] = nrm * nrm;
    }
    double denom;
    if (traj.uniform_times()) {
        const double h = traj.times.size() > 1 ? traj.times[1] - traj.times[0] : 0.0;
        denom = simpson_integral(density, h);
    } else {
        denom = detail::trapezoid_prefix_times(traj.times, density).back();
    }
    const double num = std::pow(sobolev_norm(traj.states.front(), 1.0), 2);
    ObservabilityResult out;
    if (num == 0.0) {
        out.ratio = 0.0;
        return out;
    }
    if (!(denom > 1e-30)) {
        out.ratio = std::numeric_limits<double>::infinity();
        out.degenerate_denominator = true;
        return out;
    }
    out.ratio = num / denom;
    return out;
}

struct ClosedLoopResult {
    Trajectory trajectory;
    double ledger_residual = 0.0;
};

// Integrates the damped model and certifies the H^1 energy ledger
//     ||u(t)||^2 - ||u_0||^2 + 2 ∫_0^t dissipation dτ = 0
// against `ledger_tol` (relative to max(1, ||u_0||^2)).
inline ClosedLoopResult closed_loop_run(const SpectralField& u0, const ModelParams& params,
                                        double t_end, const IntegrateOptions& opts = {},
                                        double ledger_tol = 1e-4) {
    if (params.damping == DampingType::none)
        throw InvalidArgument("closed-loop run requires a damping term");
    ClosedLoopResult out;
    out.trajectory = integrate(u0, params, 0.0, t_end, opts);
    const SpectralField a = damping_profile_at(params, u0.order());
    out.ledger_residual = energy_ledger_residual(out.trajectory, a, params.damping);
    const double scale = std::max(1.0, std::pow(sobolev_norm(u0, 1.0), 2));
    if (out.ledger_residual > ledger_tol * scale)
        throw EnergyLedgerError("energy ledger residual " +
                                std::to_string(out.ledger_residual) + " exceeds tolerance");
    return out;
}

// Periodized Gaussian bump amplitude * exp(-sharpness (x - center)^2) with
// closed-form coefficients (image sum folded into the Gaussian transform):
//     â_k = (amplitude / 2π) sqrt(π/sharpness) e^{-k^2/(4 sharpness)} e^{-ik center}.
inline SpectralField gaussian_bump_profile(int order, double amplitude = 1.0,
                                           double center = std::numbers::pi,
                                           double sharpness = 10.0) {
    if (!(sharpness > 0.0)) throw InvalidArgument("bump sharpness must be positive");
    SpectralField a(order);
    const double base = amplitude / two_pi * std::sqrt(std::numbers::pi / sharpness);
    for (int k = -order; k <= order; ++k) {
        const double kd = static_cast<double>(k);
        a(k) = base * std::exp(-kd * kd / (4.0 * sharpness)) * std::polar(1.0, -kd * center);
    }
    return a;
}

} // namespace kdvbbm
