#pragma once

// Exact open-loop control of the linear drift-c group by the moment method,
// and steering of the quadratic model by contraction iteration.
//
// Control ansatz, driven through the profile a(x):
//     h(x,t) = a(x) Σ_j f_j q_j(t) e^{ijx},
// so the forced mode ODE reads
//     v̂_k' = -i ω_k v̂_k + (1+k^2)^{-1} Σ_j m_{j,k} f_j q_j(t),
//     m_{j,k} = (a^2)ˆ_{k-j}.
// Biorthogonality of the duals q_j collapses the Duhamel integral at t = T
// and the amplitudes f solve, per frequency cluster J,
//     Σ_{j∈J} m_{j,k} f_j = (1+k^2)(û_T(k) e^{iω_k T} - û_0(k)),  k ∈ J,
// which for singleton clusters is f_k = ((1+k^2)/μ)(û_T e^{iω_k T} - û_0)
// with μ = (a^2)ˆ_0.  Free flight (û_T = W(T)û_0) yields f = 0.
//
// The nonlinear steering map replaces the target by uT - ω(u), where
//     ω(u) = ∫_0^T W(T-τ) A(u^2/2)(τ) dτ
// is the terminal defect of the current iterate, and repeats until the
// iterate is Cauchy in C([0,T]; H^s).

#include <memory>

#include "integrator.hpp"
#include "moment_system.hpp"

namespace kdvbbm {

struct MomentData {
    int order = 0;         // K
    Eigen::MatrixXcd m;    // m(j+K, k+K) = (a^2)ˆ_{k-j}
    double mu = 0.0;       // (a^2)ˆ_0
};

inline MomentData moment_data(const SpectralField& a, int order,
                              double degenerate_tol = 1e-14) {
    const SpectralField aK = a.resampled(order);
    const SpectralField asq = convolve_full(aK, aK); // band 2K, exact
    MomentData md;
    md.order = order;
    md.mu = asq(0).real();
    if (!(md.mu > degenerate_tol))
        throw DegenerateDamping("control profile has (a^2)ˆ_0 = " + std::to_string(md.mu));
    const Eigen::Index n = 2 * static_cast<Eigen::Index>(order) + 1;
    md.m.resize(n, n);
    for (int j = -order; j <= order; ++j)
        for (int k = -order; k <= order; ++k)
            md.m(j + order, k + order) = asq(k - j);
    return md;
}

// Cluster block solve: rows are mode equations k ∈ members, unknowns f_j.
// The block B(r,c) = m_{members[c], members[r]} is Hermitian positive
// definite for nondegenerate profiles.
inline Eigen::VectorXcd solve_cluster_block(const MomentData& md,
                                            const std::vector<int>& members,
                                            const Eigen::VectorXcd& rhs) {
    const auto n = static_cast<Eigen::Index>(members.size());
    Eigen::MatrixXcd B(n, n);
    for (Eigen::Index r = 0; r < n; ++r)
        for (Eigen::Index c = 0; c < n; ++c)
            B(r, c) = md.m(members[static_cast<std::size_t>(c)] + md.order,
                           members[static_cast<std::size_t>(r)] + md.order);
    Eigen::LLT<Eigen::MatrixXcd> llt(B);
    if (llt.info() != Eigen::Success)
        throw SingularCluster("cluster moment block is not positive definite");
    const Eigen::VectorXcd f = llt.solve(rhs);
    if (!f.allFinite()) throw SingularCluster("cluster moment solve produced non-finite values");
    return f;
}

// Amplitudes f (index k + K) steering û_0 to û_T for the linear group.
inline Eigen::VectorXcd solve_moments(const MomentSystem& ms, const MomentData& md,
                                      const SpectralField& u0, const SpectralField& uT) {
    const int K = ms.order;
    if (u0.order() != K || uT.order() != K || md.order != K)
        throw InvalidArgument("moment solve requires matching truncation orders");
    auto target = [&](int k) {
        const complexd rot = std::polar(1.0, ms.omega(k) * ms.horizon);
        return (1.0 + static_cast<double>(k) * k) * (uT(k) * rot - u0(k));
    };
    Eigen::VectorXcd f = Eigen::VectorXcd::Zero(2 * K + 1);
    for (const Cluster& cl : ms.table.clusters) {
        if (cl.members.size() == 1) {
            const int k = cl.members.front();
            f(k + K) = target(k) / md.mu;
        } else {
            Eigen::VectorXcd b(static_cast<Eigen::Index>(cl.members.size()));
            for (std::size_t r = 0; r < cl.members.size(); ++r)
                b(static_cast<Eigen::Index>(r)) = target(cl.members[r]);
            const Eigen::VectorXcd fj = solve_cluster_block(md, cl.members, b);
            for (std::size_t r = 0; r < cl.members.size(); ++r)
                f(cl.members[r] + K) = fj(static_cast<Eigen::Index>(r));
        }
    }
    return f;
}

class ControlSignal {
public:
    ControlSignal() = default;

    ControlSignal(std::shared_ptr<const MomentSystem> system, SpectralField profile,
                  Eigen::VectorXcd amplitudes)
        : system_(std::move(system)),
          profile_(profile.resampled(system_->order)),
          data_(moment_data(profile_, system_->order)),
          f_(std::move(amplitudes)) {
        const int K = system_->order;
        if (f_.size() != 2 * K + 1)
            throw InvalidArgument("amplitude vector does not match truncation order");
        const auto R = static_cast<Eigen::Index>(system_->representatives.size());

        // ĥ_k(t) = Σ_a hcoef(k,a) q_a(t), |k| <= 2K.
        hcoef_ = Eigen::MatrixXcd::Zero(4 * K + 1, R);
        for (int k = -2 * K; k <= 2 * K; ++k)
            for (int j = -K; j <= K; ++j) {
                if (std::abs(k - j) > K) continue;
                hcoef_(k + 2 * K, system_->rep_of(j)) += profile_(k - j) * f_(j + K);
            }

        // (a h)ˆ_k(t) = Σ_a drive(k,a) q_a(t), |k| <= K.
        drive_ = Eigen::MatrixXcd::Zero(2 * K + 1, R);
        for (int k = -K; k <= K; ++k)
            for (int j = -K; j <= K; ++j)
                drive_(k + K, system_->rep_of(j)) += data_.m(j + K, k + K) * f_(j + K);

        // Duhamel weights: Σ_j m_{j,k} f_j d(m, rep(j)).
        duhamel_ = Eigen::MatrixXcd::Zero(R, 2 * K + 1);
        for (int k = -K; k <= K; ++k)
            for (int j = -K; j <= K; ++j) {
                const complexd w = data_.m(j + K, k + K) * f_(j + K);
                const Eigen::Index a = system_->rep_of(j);
                for (Eigen::Index mm = 0; mm < R; ++mm)
                    duhamel_(mm, k + K) += system_->dual.coefficients(mm, a) * w;
            }
    }

    const MomentSystem& system() const { return *system_; }
    std::shared_ptr<const MomentSystem> system_ptr() const { return system_; }
    const SpectralField& profile() const { return profile_; }
    const MomentData& data() const { return data_; }
    const Eigen::VectorXcd& amplitudes() const { return f_; }

    // h(·,t) on its natural band 2K.
    SpectralField coefficients(double t) const {
        const int K = system_->order;
        const Eigen::VectorXcd q = dual_values(t);
        SpectralField h(2 * K);
        for (int k = -2 * K; k <= 2 * K; ++k) {
            complexd acc = 0.0;
            for (Eigen::Index a = 0; a < q.size(); ++a) acc += hcoef_(k + 2 * K, a) * q(a);
            h(k) = acc;
        }
        return h;
    }

    double value(double x, double t) const { return evaluate(coefficients(t), x); }

    // (a h)(·,t) truncated to the working band K (what the PDE receives).
    SpectralField drive_coefficients(double t) const {
        const int K = system_->order;
        const Eigen::VectorXcd q = dual_values(t);
        SpectralField g(K);
        for (int k = -K; k <= K; ++k) {
            complexd acc = 0.0;
            for (Eigen::Index a = 0; a < q.size(); ++a) acc += drive_(k + K, a) * q(a);
            g(k) = acc;
        }
        return g;
    }

    // Contribution to du/dt in mild form: (1-∂_x^2)^{-1}(a h).
    Forcing mild_forcing() const {
        return [sig = *this](double t) { return helmholtz_inverse(sig.drive_coefficients(t)); };
    }

    // Closed-form controlled linear state at time t (Duhamel in closed form).
    SpectralField analytic_state(const SpectralField& u0, double t) const {
        const int K = system_->order;
        if (u0.order() != K) throw InvalidArgument("state/truncation mismatch");
        const auto R = static_cast<Eigen::Index>(system_->representatives.size());
        SpectralField out(K);
        for (int k = -K; k <= K; ++k) {
            const double wk = system_->omega(k);
            complexd acc = 0.0;
            for (Eigen::Index mm = 0; mm < R; ++mm) {
                const double wm =
                    system_->omega(system_->representatives[static_cast<std::size_t>(mm)]);
                acc += duhamel_(mm, k + K) * pair_exponential_integral(wm, wk, t);
            }
            out(k) = std::polar(1.0, -wk * t) *
                     (u0(k) + acc / (1.0 + static_cast<double>(k) * k));
        }
        return out;
    }

    // || h ||_{L^2(0,T; H^{s-2})} in closed form through the dual Gram.
    double norm_l2_hs(double s) const {
        const int K = system_->order;
        const Eigen::MatrixXcd Q = system_->dual_gram();
        double acc = 0.0;
        for (int k = -2 * K; k <= 2 * K; ++k) {
            const Eigen::VectorXcd c = hcoef_.row(k + 2 * K).transpose();
            const complexd quad = (c.transpose() * Q * c.conjugate())(0, 0);
            acc += std::pow(1.0 + static_cast<double>(k) * k, s - 2.0) * quad.real();
        }
        return std::sqrt(std::max(0.0, two_pi * acc));
    }

private:
    Eigen::VectorXcd dual_values(double t) const {
        const auto R = static_cast<Eigen::Index>(system_->representatives.size());
        Eigen::VectorXcd q(R);
        for (Eigen::Index a = 0; a < R; ++a) q(a) = system_->dual_value(a, t);
        return q;
    }

    std::shared_ptr<const MomentSystem> system_;
    SpectralField profile_;
    MomentData data_;
    Eigen::VectorXcd f_;
    Eigen::MatrixXcd hcoef_;   // (4K+1) x R
    Eigen::MatrixXcd drive_;   // (2K+1) x R
    Eigen::MatrixXcd duhamel_; // R x (2K+1)
};

inline ControlSignal synthesize_control(std::shared_ptr<const MomentSystem> system,
                                        const SpectralField& profile,
                                        Eigen::VectorXcd amplitudes) {
    return ControlSignal(std::move(system), profile, std::move(amplitudes));
}

// Φ(u0, uT): the exact-control synthesis map for the linear group.
inline ControlSignal phi_operator(std::shared_ptr<const MomentSystem> system,
                                  const SpectralField& profile, const SpectralField& u0,
                                  const SpectralField& uT) {
    const MomentData md = moment_data(profile, system->order);
    Eigen::VectorXcd f = solve_moments(*system, md, u0, uT);
    return ControlSignal(std::move(system), profile, std::move(f));
}

enum class DriveMethod { analytic, timestep };

// Final state of the controlled *linear* equation at horizon T.
inline SpectralField linear_drive(const SpectralField& u0, const ControlSignal& signal,
                                  DriveMethod method, double dt = 1e-3) {
    const MomentSystem& ms = signal.system();
    if (method == DriveMethod::analytic) return signal.analytic_state(u0, ms.horizon);
    ModelParams p;
    p.c = ms.c;
    p.nonlinearity = Nonlinearity::linear;
    IntegrateOptions opts;
    opts.dt = dt;
    opts.sample_every = 1 << 20; // endpoints only
    opts.forcing = signal.mild_forcing();
    return integrate(u0, p, 0.0, ms.horizon, opts).states.back();
}

namespace detail {

// Rotated quadratic integrands W(-τ_i) A(u_i^2/2) for uniform samples on
// [0,T]; Simpson prefixes of these give ∫_0^{τ_i} W(-τ) A(u^2/2) dτ.
inline std::vector<SpectralField> rotated_quadratic(const std::vector<SpectralField>& states,
                                                    const MomentSystem& ms, double T) {
    const int K = ms.order;
    const std::size_t n = states.size();
    std::vector<SpectralField> rot(n, SpectralField(K));
    for (std::size_t i = 0; i < n; ++i) {
        const double tau = T * static_cast<double>(i) / static_cast<double>(n - 1);
        SpectralField g = dispersion_generator(0.5 * pointwise_product(states[i], states[i]));
        for (int k = -K; k <= K; ++k)
            rot[i](k) = std::polar(1.0, ms.omega(k) * tau) * g(k);
    }
    return rot;
}

inline SpectralField rotate_by_group(const SpectralField& u, const MomentSystem& ms, double t) {
    SpectralField out(u.order());
    for (int k = -u.order(); k <= u.order(); ++k)
        out(k) = std::polar(1.0, -ms.omega(k) * t) * u(k);
    return out;
}

} // namespace detail

// ω(u) = ∫_0^T W(T-τ) A(u^2/2)(τ) dτ from uniform samples of u on [0,T].
inline SpectralField terminal_defect(const std::vector<SpectralField>& states,
                                     const MomentSystem& ms) {
    if (states.size() < 5)
        throw InvalidArgument("terminal defect needs at least 5 uniform samples");
    const double T = ms.horizon;
    const double h = T / static_cast<double>(states.size() - 1);
    const std::vector<SpectralField> rot = detail::rotated_quadratic(states, ms, T);
    SpectralField acc(ms.order);
    {
        std::vector<complexd> mode(rot.size());
        for (int k = -ms.order; k <= ms.order; ++k) {
            for (std::size_t i = 0; i < rot.size(); ++i) mode[i] = rot[i](k);
            acc(k) = simpson_integral(mode, h);
        }
    }
    return detail::rotate_by_group(acc, ms, T);
}

inline SpectralField terminal_defect(const Trajectory& traj, const MomentSystem& ms) {
    if (!traj.uniform_times())
        throw InvalidArgument("terminal defect needs uniformly sampled trajectories");
    if (traj.times.empty() || std::abs(traj.times.front()) > 1e-12 ||
        std::abs(traj.times.back() - ms.horizon) > 1e-9 * std::max(1.0, ms.horizon))
        throw InvalidArgument("trajectory does not span [0, T] of the moment system");
    return terminal_defect(traj.states, ms);
}

struct SteerOptions {
    double tol = 1e-10;        // stop when sup_t ||Δ iterate||_{H^s} < tol
    int max_iter = 25;
    int n_samples = 2048;      // uniform quadrature intervals on [0,T]
    double s = 1.0;            // convergence/reporting norm
    double verify_dt = 1e-3;   // time step of the verification run
    bool verify = true;
};

struct SteerReport {
    int iterations = 0;
    std::vector<double> changes;
    std::vector<double> ratios;
    double terminal_residual = 0.0; // relative, from the verification run
    double control_norm = 0.0;      // ||h||_{L^2(0,T;H^{s-2})}
    bool converged = false;
};

struct SteerResult {
    ControlSignal control;
    Trajectory trajectory; // verification run (timestep) when enabled
    SteerReport report;
};

// Contraction iteration for the quadratic model: each pass re-solves the
// linear moment problem toward uT - ω(u) and rebuilds the iterate from the
// closed-form controlled flow plus the quadratic Duhamel term of the
// previous iterate.
inline SteerResult nonlinear_steer(std::shared_ptr<const MomentSystem> system,
                                   const SpectralField& profile, const SpectralField& u0,
                                   const SpectralField& uT, const SteerOptions& opts = {}) {
    const MomentSystem& ms = *system;
    const int K = ms.order;
    const double T = ms.horizon;
    if (u0.order() != K || uT.order() != K)
        throw InvalidArgument("steering requires fields at the system truncation order");
    if (opts.n_samples < 8) throw InvalidArgument("too few quadrature samples");
    if (opts.max_iter < 1) throw InvalidArgument("at least one steering pass is required");
    const std::size_t n = static_cast<std::size_t>(opts.n_samples) + 1;
    const double h = T / static_cast<double>(opts.n_samples);
    const MomentData md = moment_data(profile, K);

    // Seed: free linear flight.
    std::vector<SpectralField> iterate(n, SpectralField(K));
    for (std::size_t i = 0; i < n; ++i)
        iterate[i] = detail::rotate_by_group(u0, ms, h * static_cast<double>(i));

    SteerResult result;
    SteerReport& rep = result.report;
    int stall_count = 0;

    for (int pass = 1; pass <= opts.max_iter; ++pass) {
        const std::vector<SpectralField> rot = detail::rotated_quadratic(iterate, ms, T);
        const std::vector<SpectralField> prefix = simpson_prefix_fields(rot, h);
        const SpectralField defect = detail::rotate_by_group(prefix.back(), ms, T);

        Eigen::VectorXcd f = solve_moments(ms, md, u0, uT - defect);
        result.control = ControlSignal(system, profile, std::move(f));

        double change = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double tau = h * static_cast<double>(i);
            SpectralField next = result.control.analytic_state(u0, tau) +
                                 detail::rotate_by_group(prefix[i], ms, tau);
            change = std::max(change, sobolev_norm(next - iterate[i], opts.s));
            iterate[i] = std::move(next);
        }
        rep.changes.push_back(change);
        rep.iterations = pass;
        if (rep.changes.size() > 1) {
            const double prev = rep.changes[rep.changes.size() - 2];
            const double ratio = prev > 0.0 ? change / prev : 0.0;
            rep.ratios.push_back(ratio);
            stall_count = ratio > 0.95 ? stall_count + 1 : 0;
            if (stall_count >= 3)
                throw NoContraction("steering iteration is not contracting (ratio > 0.95 x3)");
        }
        if (change < opts.tol) {
            rep.converged = true;
            break;
        }
    }

    rep.control_norm = result.control.norm_l2_hs(opts.s);

    if (opts.verify) {
        ModelParams p;
        p.c = ms.c;
        p.nonlinearity = Nonlinearity::drift_dispersion;
        IntegrateOptions iopts;
        iopts.dt = opts.verify_dt;
        iopts.sample_every =
            std::max(1, static_cast<int>(std::llround(T / opts.verify_dt)) / 512);
        iopts.sobolev_orders = {1.0, opts.s};
        iopts.forcing = result.control.mild_forcing();
        result.trajectory = integrate(u0, p, 0.0, T, iopts);
        const double scale = sobolev_norm(uT, opts.s);
        rep.terminal_residual =
            sobolev_norm(result.trajectory.states.back() - uT, opts.s) /
            (scale > 0.0 ? scale : 1.0);
    } else {
        const double scale = sobolev_norm(uT, opts.s);
        rep.terminal_residual = sobolev_norm(iterate.back() - uT, opts.s) /
                                (scale > 0.0 ? scale : 1.0);
    }
    return result;
}

} // namespace kdvbbm
