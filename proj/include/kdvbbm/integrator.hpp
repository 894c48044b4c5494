#pragma once

// Time integration by the Lawson (integrating-factor) Runge-Kutta 4 scheme:
// the diagonal linear group is applied exactly through its phases, the
// remainder (nonlinearity, damping, forcing) goes through classical RK4
// weights.  For a purely linear model a step is exact up to roundoff.
//
//   n_j = N(U_j, t + c_j h),   E_τ = exp(τ L)  (diagonal phases)
//   U_1 = u                    U_2 = E_{h/2}(u + (h/2) n_1)
//   U_3 = E_{h/2} u + (h/2) n_2
//   U_4 = E_h u + h E_{h/2} n_3
//   u⁺  = E_h u + (h/6)(E_h n_1 + 2 E_{h/2}(n_2 + n_3) + n_4)

#include <array>
#include <functional>

#include "model.hpp"
#include "quadrature.hpp"

namespace kdvbbm {

// I1 = ∫u, I2 = ∫(u^2 + u_x^2), I3 = ∫(u^3 + 3u^2); the cubic zero mode is
// formed from the full (untruncated) self-convolution, which is exact.
inline std::array<double, 3> invariants(const SpectralField& u) {
    const double i1 = two_pi * u(0).real();
    double sum2 = 0.0, sum_l2 = 0.0;
    for (int k = -u.order(); k <= u.order(); ++k) {
        const double kk = static_cast<double>(k) * k;
        sum2 += (1.0 + kk) * std::norm(u(k));
        sum_l2 += std::norm(u(k));
    }
    const SpectralField sq = convolve_full(u, u);
    complexd cubic0 = 0.0;
    for (int j = -u.order(); j <= u.order(); ++j) cubic0 += sq(j) * u(-j);
    return {i1, two_pi * sum2, two_pi * (cubic0.real() + 3.0 * sum_l2)};
}

struct Trajectory {
    std::vector<double> times;
    std::vector<SpectralField> states;
    std::vector<double> sobolev_orders;              // diagnostics config
    std::vector<std::vector<double>> sobolev_norms;  // [sample][order index]
    std::vector<std::array<double, 3>> invariant_values;
    std::vector<double> dissipation;                 // density at samples
    std::vector<double> damping_ledger;              // ∫_0^t dissipation

    double h1(std::size_t i) const { return sobolev_norms[i][0]; }
    bool uniform_times(double tol = 1e-9) const {
        if (times.size() < 2) return true;
        const double h = times[1] - times[0];
        for (std::size_t i = 1; i + 1 < times.size(); ++i)
            if (std::abs((times[i + 1] - times[i]) - h) > tol * std::max(1.0, std::abs(h)))
                return false;
        return true;
    }
};

using Forcing = std::function<SpectralField(double)>;

struct IntegrateOptions {
    double dt = 1e-3;
    int sample_every = 10;               // store every n-th step
    std::vector<double> sobolev_orders = {1.0};
    double blowup_factor = 1e6;
    Forcing forcing;                     // adds forcing(t) to du/dt
};

namespace detail {

// 2nd-order fallback for non-uniform sample times.
inline std::vector<double> trapezoid_prefix_times(const std::vector<double>& t,
                                                  const std::vector<double>& f) {
    std::vector<double> out(f.size(), 0.0);
    for (std::size_t i = 1; i < f.size(); ++i)
        out[i] = out[i - 1] + 0.5 * (t[i] - t[i - 1]) * (f[i] + f[i - 1]);
    return out;
}

inline void record_sample(Trajectory& traj, double t, const SpectralField& u,
                          const ModelParams& p, const SpectralField* a) {
    traj.times.push_back(t);
    traj.states.push_back(u);
    std::vector<double> norms;
    norms.reserve(traj.sobolev_orders.size());
    for (double s : traj.sobolev_orders) norms.push_back(sobolev_norm(u, s));
    traj.sobolev_norms.push_back(std::move(norms));
    traj.invariant_values.push_back(invariants(u));
    traj.dissipation.push_back(a ? dissipation_density(u, *a, p.damping) : 0.0);
}

} // namespace detail

inline Trajectory integrate(const SpectralField& u0, const ModelParams& params,
                            double t_begin, double t_end,
                            const IntegrateOptions& opts = {}) {
    if (!(t_end > t_begin)) throw InvalidArgument("integration horizon must be positive");
    if (!(opts.dt > 0.0)) throw InvalidArgument("time step must be positive");
    const double span = t_end - t_begin;
    const long long n_steps = std::max(1LL, static_cast<long long>(std::llround(span / opts.dt)));
    const double h = span / static_cast<double>(n_steps);
    const int K = u0.order();

    const std::vector<double> freqs = model_frequencies(params, K);
    const LinearSymbol e_half = group_symbol_from(freqs, 0.5 * h);
    const LinearSymbol e_full = group_symbol_from(freqs, h);

    std::optional<SpectralField> a;
    if (params.damping != DampingType::none) a = damping_profile_at(params, K);

    ModelParams local = params;
    if (a) local.profile = a; // resampled once at the working band

    const double guard = opts.blowup_factor * std::max(1.0, sobolev_norm(u0, 1.0));
    const bool has_sorder_one =
        !opts.sobolev_orders.empty() && opts.sobolev_orders.front() == 1.0;

    Trajectory traj;
    traj.sobolev_orders = opts.sobolev_orders;
    if (!has_sorder_one)
        traj.sobolev_orders.insert(traj.sobolev_orders.begin(), 1.0);

    auto rhs = [&](const SpectralField& u, double t) {
        SpectralField n = rhs_mild(u, local);
        if (opts.forcing) n += opts.forcing(t).resampled(K);
        return n;
    };

    SpectralField u = u0;
    detail::record_sample(traj, t_begin, u, local, a ? &*a : nullptr);

    const int every = std::max(1, opts.sample_every);
    for (long long step = 0; step < n_steps; ++step) {
        const double t = t_begin + h * static_cast<double>(step);

        const SpectralField n1 = rhs(u, t);
        const SpectralField u2 = e_half.apply(u + (0.5 * h) * n1);
        const SpectralField n2 = rhs(u2, t + 0.5 * h);
        const SpectralField u3 = e_half.apply(u) + (0.5 * h) * n2;
        const SpectralField n3 = rhs(u3, t + 0.5 * h);
        const SpectralField u4 = e_full.apply(u) + h * e_half.apply(n3);
        const SpectralField n4 = rhs(u4, t + h);

        u = e_full.apply(u) +
            (h / 6.0) * (e_full.apply(n1) + 2.0 * e_half.apply(n2 + n3) + n4);

        if (!(sobolev_norm(u, 1.0) <= guard))
            throw BlowUpError("H^1 norm exceeded blow-up guard at t = " +
                              std::to_string(t + h));

        if ((step + 1) % every == 0 || step + 1 == n_steps)
            detail::record_sample(traj, t_begin + h * static_cast<double>(step + 1), u,
                                  local, a ? &*a : nullptr);
    }

    if (traj.uniform_times())
        traj.damping_ledger =
            simpson_prefix(traj.dissipation, traj.times.size() > 1 ? traj.times[1] - traj.times[0] : 0.0);
    else
        traj.damping_ledger = detail::trapezoid_prefix_times(traj.times, traj.dissipation);
    return traj;
}

// max_t | ||u(t)||_{H^1}^2 - ||u(0)||_{H^1}^2 + 2 ∫_0^t dissipation dτ |
// with the dissipation recomputed from the stored states, so the check is
// independent of the integrator's own bookkeeping.
inline double energy_ledger_residual(const Trajectory& traj, const SpectralField& a,
                                     DampingType type) {
    if (traj.states.empty()) throw InvalidArgument("empty trajectory");
    std::vector<double> diss(traj.states.size());
    for (std::size_t i = 0; i < traj.states.size(); ++i) {
        const SpectralField ai = a.resampled(traj.states[i].order());
        diss[i] = dissipation_density(traj.states[i], ai, type);
    }
    std::vector<double> ledger;
    if (traj.uniform_times()) {
        const double h = traj.times.size() > 1 ? traj.times[1] - traj.times[0] : 0.0;
        ledger = simpson_prefix(diss, h);
    } else {
        ledger = detail::trapezoid_prefix_times(traj.times, diss);
    }
    const double e0 = std::pow(sobolev_norm(traj.states[0], 1.0), 2);
    double worst = 0.0;
    for (std::size_t i = 0; i < traj.states.size(); ++i) {
        const double e = std::pow(sobolev_norm(traj.states[i], 1.0), 2);
        worst = std::max(worst, std::abs(e - e0 + 2.0 * ledger[i]));
    }
    return worst;
}

} // namespace kdvbbm
