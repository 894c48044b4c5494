#pragma once

// Scenario orchestration: builds model objects from a ScenarioConfig, runs
// the requested experiment, writes CSV/JSON artifacts into the output
// directory, and returns the summary together with the list of declared
// numerical criteria (consumed by --strict).

#include <filesystem>

#include "config.hpp"
#include "global_steer.hpp"
#include "io.hpp"
#include "taylor.hpp"

namespace kdvbbm {

struct Criterion {
    std::string name;
    double value = 0.0;
    double threshold = 0.0;
    bool pass = false;
};

struct RunResult {
    ordered_json summary;
    std::vector<Criterion> criteria;
    int failed_criteria = 0;
};

namespace scenario_detail {

inline SpectralField build_profile(const ProfileSpec& ps, int order) {
    if (ps.type == "constant") return make_constant(order, ps.value);
    if (ps.type == "gaussian_bump")
        return gaussian_bump_profile(order, ps.amplitude, ps.center, ps.sharpness);
    if (ps.type == "raised_cosine") {
        SpectralField a = make_cosine(order, ps.amplitude, ps.mode);
        a(0) += ps.mean;
        return a;
    }
    if (ps.type == "file") return read_field_csv(ps.path).resampled(order);
    throw ConfigError("unknown profile type '" + ps.type + "'");
}

inline SpectralField build_field(const FieldSpec& fs, int order, std::uint64_t seed) {
    SpectralField u(order);
    if (fs.type == "zero") {
        // stays zero
    } else if (fs.type == "constant") {
        u = make_constant(order, fs.value);
    } else if (fs.type == "cosine") {
        u = make_cosine(order, fs.amplitude, fs.mode);
    } else if (fs.type == "sine") {
        u = make_sine(order, fs.amplitude, fs.mode);
    } else if (fs.type == "gaussian_bump") {
        u = gaussian_bump_profile(order, fs.amplitude, fs.center, fs.sharpness);
    } else if (fs.type == "random") {
        Rng rng(seed);
        u = random_field(order, rng, fs.decay);
    } else if (fs.type == "file") {
        u = read_field_csv(fs.path).resampled(order);
    } else {
        throw ConfigError("unknown field type '" + fs.type + "'");
    }
    if (fs.norm >= 0.0) {
        const double n = sobolev_norm(u, fs.norm_order);
        if (n == 0.0 && fs.norm > 0.0)
            throw ConfigError("cannot rescale a zero field to a nonzero norm");
        if (n > 0.0) u *= fs.norm / n;
    }
    return u;
}

inline std::function<double(double)> named_flux(const std::string& name) {
    if (name == "half_square") return [](double v) { return 0.5 * v * v; };
    if (name == "third_cube") return [](double v) { return v * v * v / 3.0; };
    if (name == "sine") return [](double v) { return std::sin(v); };
    throw ConfigError("unknown flux '" + name + "' (use half_square, third_cube, or sine)");
}

inline ModelParams build_model(const ScenarioConfig& sc) {
    ModelParams p;
    p.c = sc.c;
    p.nonlinearity = sc.nonlinearity;
    if (sc.nonlinearity == Nonlinearity::pointwise_flux) p.flux = named_flux(sc.flux_name);
    p.lambda = sc.lambda;
    p.damping = sc.damping;
    if (sc.has_profile) p.profile = build_profile(sc.profile, sc.order);
    return p;
}

inline IntegrateOptions build_integrate_options(const ScenarioConfig& sc) {
    IntegrateOptions o;
    o.dt = sc.dt;
    o.sample_every = sc.sample_every;
    o.sobolev_orders = sc.sobolev_orders;
    o.blowup_factor = sc.blowup_factor;
    return o;
}

inline std::shared_ptr<const MomentSystem> build_system(const ScenarioConfig& sc) {
    if (sc.c == 0.0)
        throw ConfigError("control scenarios need a nonzero drift parameter model.c");
    if (!(sc.horizon > two_pi / std::abs(sc.c)))
        throw ConfigError("control horizon must exceed 2*pi/|c| = " +
                          std::to_string(two_pi / std::abs(sc.c)));
    return std::make_shared<const MomentSystem>(
        build_moment_system(sc.c, sc.horizon, sc.order, sc.c_rational, sc.condition_cap));
}

inline void add_criterion(RunResult& rr, const std::string& name, double value,
                          double threshold) {
    Criterion c{name, value, threshold, value <= threshold};
    if (!c.pass) ++rr.failed_criteria;
    rr.criteria.push_back(c);
}

inline void finalize_criteria(RunResult& rr) {
    ordered_json arr = ordered_json::array();
    for (const Criterion& c : rr.criteria) {
        ordered_json jc;
        jc["name"] = c.name;
        jc["value"] = c.value;
        jc["threshold"] = c.threshold;
        jc["pass"] = c.pass;
        arr.push_back(jc);
    }
    rr.summary["criteria"] = arr;
    rr.summary["criteria_failed"] = rr.failed_criteria;
}

inline ordered_json trajectory_stats(const Trajectory& traj) {
    ordered_json j;
    j["samples"] = traj.times.size();
    j["t_final"] = traj.times.empty() ? 0.0 : traj.times.back();
    if (!traj.times.empty()) {
        j["h1_initial"] = traj.h1(0);
        j["h1_final"] = traj.h1(traj.times.size() - 1);
        double drift[3] = {0.0, 0.0, 0.0};
        for (std::size_t i = 0; i < traj.times.size(); ++i)
            for (int q = 0; q < 3; ++q)
                drift[q] = std::max(drift[q], std::abs(traj.invariant_values[i][q] -
                                                       traj.invariant_values[0][q]));
        j["invariant_drift"] = {drift[0], drift[1], drift[2]};
        j["damping_integral"] =
            traj.damping_ledger.empty() ? 0.0 : traj.damping_ledger.back();
    }
    return j;
}

inline void write_plots(const std::filesystem::path& dir, bool log_y) {
    std::string gp =
        "set datafile separator ','\n"
        "set key autotitle columnhead\n"
        "set grid\n"
        "set terminal pngcairo size 1100,800\n"
        "set output 'trajectory.png'\n"
        "set xlabel 't'\n";
    if (log_y) gp += "set logscale y\n";
    gp +=
        "plot 'trajectory.csv' using 1:5 with lines title 'H1 norm'\n"
        "unset logscale y\n"
        "set output 'invariants.png'\n"
        "plot 'trajectory.csv' using 1:2 with lines title 'I1', \\\n"
        "     'trajectory.csv' using 1:3 with lines title 'I2', \\\n"
        "     'trajectory.csv' using 1:4 with lines title 'I3'\n";
    detail::atomic_write(dir / "plots.gp", gp);
}

inline std::vector<double> uniform_times(double T, int count) {
    std::vector<double> ts(static_cast<std::size_t>(std::max(2, count)));
    for (std::size_t i = 0; i < ts.size(); ++i)
        ts[i] = T * static_cast<double>(i) / static_cast<double>(ts.size() - 1);
    return ts;
}

} // namespace scenario_detail

inline RunResult run_simulate(const ScenarioConfig& sc, const std::filesystem::path& dir) {
    namespace sd = scenario_detail;
    RunResult rr;
    const ModelParams model = sd::build_model(sc);
    const SpectralField u0 = sd::build_field(sc.initial, sc.order, sc.seed + 1);
    write_field_csv(dir / "initial_state.csv", u0);
    const Trajectory traj =
        integrate(u0, model, 0.0, sc.horizon, sd::build_integrate_options(sc));
    write_trajectory_csv(dir / "trajectory.csv", traj);
    write_field_csv(dir / "final_state.csv", traj.states.back());
    rr.summary["scenario"] = sc.scenario;
    rr.summary["trajectory"] = sd::trajectory_stats(traj);
    const bool conservative = sc.damping == DampingType::none;
    if (conservative) {
        double drift = 0.0;
        for (int q = 0; q < 3; ++q)
            drift = std::max(drift,
                             rr.summary["trajectory"]["invariant_drift"][q].get<double>());
        sd::add_criterion(rr, "invariant_drift", drift, sc.invariant_tol);
    } else {
        const SpectralField a = damping_profile_at(model, sc.order);
        const double residual = energy_ledger_residual(traj, a, model.damping);
        const double scale = std::max(1.0, std::pow(sobolev_norm(u0, 1.0), 2));
        rr.summary["ledger_residual"] = residual;
        sd::add_criterion(rr, "ledger_residual_rel", residual / scale, sc.ledger_tol);
    }
    if (sc.emit_plots) sd::write_plots(dir, !conservative);
    sd::finalize_criteria(rr);
    return rr;
}

inline RunResult run_taylor(const ScenarioConfig& sc, const std::filesystem::path& dir) {
    namespace sd = scenario_detail;
    RunResult rr;
    const SpectralField u0 = sd::build_field(sc.initial, sc.order, sc.seed + 1);
    const TaylorSeries ts = taylor_flow(u0, sc.taylor_n_max);
    const double t_eval =
        sc.taylor_eval_time > 0.0 ? sc.taylor_eval_time : 0.5 * ts.radius_estimate;

    ModelParams model;
    model.c = 0.0;
    model.nonlinearity = Nonlinearity::drift_dispersion;
    IntegrateOptions o;
    o.dt = sc.taylor_compare_dt;
    o.sample_every = 1 << 20;
    SpectralField reference = u0;
    if (t_eval > 0.0) reference = integrate(u0, model, 0.0, t_eval, o).states.back();
    const double err = sobolev_norm(ts.partial_sum(t_eval) - reference, 1.0);

    std::string csv = "n,h1_norm\n";
    for (std::size_t i = 0; i < ts.coefficients.size(); ++i)
        csv += std::to_string(i) + ',' +
               detail::fmt_double(sobolev_norm(ts.coefficients[i], 1.0)) + '\n';
    detail::atomic_write(dir / "taylor_coefficients.csv", csv);

    rr.summary["scenario"] = sc.scenario;
    rr.summary["n_max"] = sc.taylor_n_max;
    rr.summary["product_bound"] = ts.product_bound;
    rr.summary["radius_estimate"] = ts.radius_estimate;
    rr.summary["eval_time"] = t_eval;
    rr.summary["h1_error_vs_integrator"] = err;
    sd::add_criterion(rr, "taylor_error", err, 1e-6);
    sd::finalize_criteria(rr);
    return rr;
}

inline RunResult run_control_linear(const ScenarioConfig& sc, const std::filesystem::path& dir) {
    namespace sd = scenario_detail;
    RunResult rr;
    auto system = sd::build_system(sc);
    if (!sc.has_profile) throw ConfigError("control scenarios need model.profile");
    const SpectralField a = sd::build_profile(sc.profile, sc.order);
    const SpectralField u0 = sd::build_field(sc.initial, sc.order, sc.seed + 1);
    const SpectralField uT = sd::build_field(sc.target, sc.order, sc.seed + 2);

    const ControlSignal signal = phi_operator(system, a, u0, uT);
    const SpectralField reached_analytic = linear_drive(u0, signal, DriveMethod::analytic);

    ModelParams linear_model;
    linear_model.c = sc.c;
    linear_model.nonlinearity = Nonlinearity::linear;
    IntegrateOptions o = sd::build_integrate_options(sc);
    o.forcing = signal.mild_forcing();
    const Trajectory traj = integrate(u0, linear_model, 0.0, sc.horizon, o);
    write_trajectory_csv(dir / "trajectory.csv", traj);
    const SpectralField reached_timestep = traj.states.back();
    const double scale = std::max(sobolev_norm(uT, sc.control_s), 1e-30);
    const double res_analytic =
        sobolev_norm(reached_analytic - uT, sc.control_s) / scale;
    const double res_timestep =
        sobolev_norm(reached_timestep - uT, sc.control_s) / scale;

    write_field_csv(dir / "target_state.csv", uT);
    write_field_csv(dir / "achieved_state.csv", reached_timestep);
    write_control_csv(dir / "control.csv", signal,
                      sd::uniform_times(sc.horizon, sc.control_times));

    const MomentSystem& ms = *system;
    rr.summary["scenario"] = sc.scenario;
    rr.summary["c"] = sc.c;
    rr.summary["horizon"] = sc.horizon;
    rr.summary["order"] = sc.order;
    rr.summary["gram_condition"] = ms.dual.gram_condition;
    rr.summary["biorthogonality_residual"] = ms.dual.biorthogonality_residual;
    rr.summary["out_of_band_residual"] = ms.out_of_band_residual;
    rr.summary["tolerance_clustering"] = ms.table.tolerance_clustering;
    ordered_json clusters = ordered_json::array();
    for (const Cluster& cl : ms.table.clusters)
        if (cl.members.size() > 1) clusters.push_back(cl.members);
    rr.summary["nontrivial_clusters"] = clusters;
    rr.summary["control_norm"] = signal.norm_l2_hs(sc.control_s);
    rr.summary["residual_analytic_rel"] = res_analytic;
    rr.summary["residual_timestep_rel"] = res_timestep;
    sd::add_criterion(rr, "residual_analytic_rel", res_analytic, 1e-8);
    sd::add_criterion(rr, "residual_timestep_rel", res_timestep, 1e-4);
    sd::finalize_criteria(rr);
    return rr;
}

inline RunResult run_control_nonlinear(const ScenarioConfig& sc,
                                       const std::filesystem::path& dir) {
    namespace sd = scenario_detail;
    RunResult rr;
    auto system = sd::build_system(sc);
    if (!sc.has_profile) throw ConfigError("control scenarios need model.profile");
    const SpectralField a = sd::build_profile(sc.profile, sc.order);
    const SpectralField u0 = sd::build_field(sc.initial, sc.order, sc.seed + 1);
    const SpectralField uT = sd::build_field(sc.target, sc.order, sc.seed + 2);

    SteerOptions opts;
    opts.tol = sc.control_tol;
    opts.max_iter = sc.control_max_iter;
    opts.n_samples = sc.control_samples;
    opts.s = sc.control_s;
    opts.verify_dt = sc.dt;
    const SteerResult res = nonlinear_steer(system, a, u0, uT, opts);

    write_control_csv(dir / "control.csv", res.control,
                      sd::uniform_times(sc.horizon, sc.control_times));
    write_trajectory_csv(dir / "trajectory.csv", res.trajectory);
    write_field_csv(dir / "target_state.csv", uT);
    write_field_csv(dir / "achieved_state.csv", res.trajectory.states.back());

    rr.summary["scenario"] = sc.scenario;
    rr.summary["iterations"] = res.report.iterations;
    rr.summary["converged"] = res.report.converged;
    rr.summary["changes"] = res.report.changes;
    rr.summary["ratios"] = res.report.ratios;
    rr.summary["control_norm"] = res.report.control_norm;
    rr.summary["terminal_residual_rel"] = res.report.terminal_residual;
    rr.summary["gram_condition"] = system->dual.gram_condition;
    sd::add_criterion(rr, "terminal_residual_rel", res.report.terminal_residual,
                      sc.target_residual);
    sd::add_criterion(rr, "converged", res.report.converged ? 0.0 : 1.0, 0.5);
    if (sc.emit_plots) sd::write_plots(dir, false);
    sd::finalize_criteria(rr);
    return rr;
}

inline RunResult run_stabilize(const ScenarioConfig& sc, const std::filesystem::path& dir) {
    namespace sd = scenario_detail;
    RunResult rr;
    if (sc.damping == DampingType::none)
        throw ConfigError("stabilize scenario needs model.damping");
    const ModelParams model = sd::build_model(sc);
    const SpectralField u0 = sd::build_field(sc.initial, sc.order, sc.seed + 1);
    const ClosedLoopResult cl =
        closed_loop_run(u0, model, sc.horizon, sd::build_integrate_options(sc), sc.ledger_tol);
    write_trajectory_csv(dir / "trajectory.csv", cl.trajectory);
    write_field_csv(dir / "final_state.csv", cl.trajectory.states.back());

    const DecayFit fit = decay_rate_fit(cl.trajectory, sc.fit_t_min);
    const ObservabilityResult obs =
        observability_ratio(cl.trajectory, damping_profile_at(model, sc.order));

    rr.summary["scenario"] = sc.scenario;
    rr.summary["trajectory"] = sd::trajectory_stats(cl.trajectory);
    rr.summary["ledger_residual"] = cl.ledger_residual;
    rr.summary["gamma_hat"] = fit.gamma_hat;
    rr.summary["c_hat"] = fit.c_hat;
    rr.summary["r2"] = fit.r2;
    rr.summary["observability_ratio"] = obs.degenerate_denominator ? -1.0 : obs.ratio;
    rr.summary["observability_degenerate"] = obs.degenerate_denominator;
    if (sc.compute_abscissa && model.damping == DampingType::feedback && sc.order <= 64) {
        const DampedGenerator gen =
            make_damped_generator(damping_profile_at(model, sc.order), sc.c, sc.order);
        rr.summary["spectral_abscissa"] = spectral_abscissa(gen);
    }
    const double scale = std::max(1.0, std::pow(sobolev_norm(u0, 1.0), 2));
    sd::add_criterion(rr, "ledger_residual_rel", cl.ledger_residual / scale, sc.ledger_tol);
    sd::add_criterion(rr, "decay_rate_positive", fit.gamma_hat > 0.0 ? 0.0 : 1.0, 0.5);
    if (sc.emit_plots) sd::write_plots(dir, true);
    sd::finalize_criteria(rr);
    return rr;
}

inline RunResult run_moving_frame_check(const ScenarioConfig& sc,
                                        const std::filesystem::path& dir) {
    namespace sd = scenario_detail;
    RunResult rr;
    if (sc.c == 0.0) throw ConfigError("moving_frame_check needs a nonzero model.c");
    const SpectralField u0 = sd::build_field(sc.initial, sc.order, sc.seed + 1);

    // Moving-frame model: drift-c quadratic equation, fixed-frame model: the
    // drift-free equation with the frame-shifted forcing.
    ModelParams moving;
    moving.c = sc.c;
    moving.nonlinearity = Nonlinearity::drift_dispersion;
    ModelParams fixed = moving;
    fixed.c = 0.0;

    IntegrateOptions o = sd::build_integrate_options(sc);
    std::optional<ControlSignal> signal;
    if (sc.frame_with_control) {
        if (!sc.has_profile)
            throw ConfigError("moving_frame_check with control needs model.profile");
        ScenarioConfig ctrl = sc;
        auto system = sd::build_system(ctrl);
        const SpectralField a = sd::build_profile(sc.profile, sc.order);
        const SpectralField uT = sd::build_field(sc.target, sc.order, sc.seed + 2);
        signal = phi_operator(system, a, u0, uT);
    }

    IntegrateOptions o_moving = o;
    IntegrateOptions o_fixed = o;
    if (signal) {
        o_moving.forcing = signal->mild_forcing();
        const double c = sc.c;
        o_fixed.forcing = [signal, c](double t) {
            SpectralField g = signal->drive_coefficients(t);
            SpectralField shifted(g.order());
            for (int k = -g.order(); k <= g.order(); ++k)
                shifted(k) = std::polar(1.0, k * c * t) * g(k);
            return helmholtz_inverse(shifted);
        };
    }

    const Trajectory tv = integrate(u0, moving, 0.0, sc.horizon, o_moving);
    const Trajectory tu = integrate(u0, fixed, 0.0, sc.horizon, o_fixed);
    if (tv.times.size() != tu.times.size())
        throw InvalidArgument("frame-check trajectories sampled inconsistently");

    double worst = 0.0;
    std::string csv = "t,h1_discrepancy\n";
    for (std::size_t i = 0; i < tv.times.size(); ++i) {
        const SpectralField mapped =
            moving_frame(tv.states[i], tv.times[i], sc.c, FrameDirection::backward);
        const double d = sobolev_norm(mapped - tu.states[i], 1.0);
        worst = std::max(worst, d);
        csv += detail::fmt_double(tv.times[i]) + ',' + detail::fmt_double(d) + '\n';
    }
    detail::atomic_write(dir / "discrepancy.csv", csv);

    rr.summary["scenario"] = sc.scenario;
    rr.summary["with_control"] = sc.frame_with_control;
    rr.summary["max_h1_discrepancy"] = worst;
    sd::add_criterion(rr, "frame_discrepancy", worst, sc.frame_with_control ? 1e-6 : 1e-8);
    sd::finalize_criteria(rr);
    return rr;
}

inline RunResult run_global_steer(const ScenarioConfig& sc, const std::filesystem::path& dir) {
    namespace sd = scenario_detail;
    RunResult rr;
    auto system = sd::build_system(sc);
    if (!sc.has_profile) throw ConfigError("global_steer needs model.profile");
    const SpectralField a = sd::build_profile(sc.profile, sc.order);
    const SpectralField u0 = sd::build_field(sc.initial, sc.order, sc.seed + 1);
    const SpectralField uT = sd::build_field(sc.target, sc.order, sc.seed + 2);

    GlobalSteerOptions opts = sc.global;
    opts.dt = sc.dt;
    opts.s = sc.control_s;
    opts.local.s = sc.control_s;
    opts.local.verify_dt = sc.dt;
    const GlobalSteerResult res = global_steer(system, a, u0, uT, opts);

    write_trajectory_csv(dir / "stage1.csv", res.stage1);
    write_trajectory_csv(dir / "stage2.csv", res.stage2);
    write_trajectory_csv(dir / "stage3.csv", res.stage3.trajectory);
    write_field_csv(dir / "handoff_s1.csv", res.s1);
    write_field_csv(dir / "handoff_s2.csv", res.s2);

    rr.summary["scenario"] = sc.scenario;
    rr.summary["delta_local"] = opts.delta_local;
    rr.summary["t1"] = res.t1;
    rr.summary["t2"] = res.t2;
    rr.summary["stage1_norm"] = res.stage1_residual;
    rr.summary["stage2_norm"] = res.stage2_residual;
    rr.summary["stage3_residual_rel"] = res.stage3_residual;
    rr.summary["stage3_iterations"] = res.stage3.report.iterations;
    rr.summary["end_to_end_residual_rel"] = res.end_to_end_residual;
    sd::add_criterion(rr, "stage3_residual_rel", res.stage3_residual, 1e-4);
    sd::add_criterion(rr, "end_to_end_residual_rel", res.end_to_end_residual, 1e-3);
    sd::finalize_criteria(rr);
    return rr;
}

inline RunResult run_ucp_probe(const ScenarioConfig& sc, const std::filesystem::path& dir) {
    namespace sd = scenario_detail;
    RunResult rr;
    ScenarioConfig local = sc;
    if (local.damping == DampingType::none) {
        local.damping = DampingType::feedback;
        if (!local.has_profile) throw ConfigError("ucp_probe needs model.profile");
    }
    const ModelParams model = sd::build_model(local);
    const SpectralField a = damping_profile_at(model, sc.order);

    double beta_max = 0.0, beta_min = std::numeric_limits<double>::infinity();
    bool any_degenerate = false;
    std::string csv = "draw,observability_ratio\n";
    IntegrateOptions o = sd::build_integrate_options(sc);
    for (int i = 0; i < sc.ucp_batch; ++i) {
        Rng rng(sc.seed + 100 + static_cast<std::uint64_t>(i));
        const SpectralField u0 =
            random_field_with_norm(sc.order, rng, sc.ucp_amplitude, 1.0);
        const Trajectory traj = integrate(u0, model, 0.0, sc.horizon, o);
        const ObservabilityResult obs = observability_ratio(traj, a);
        any_degenerate = any_degenerate || obs.degenerate_denominator;
        beta_max = std::max(beta_max, obs.ratio);
        beta_min = std::min(beta_min, obs.ratio);
        csv += std::to_string(i) + ',' + detail::fmt_double(obs.ratio) + '\n';
    }
    detail::atomic_write(dir / "observability.csv", csv);

    rr.summary["scenario"] = sc.scenario;
    rr.summary["batch"] = sc.ucp_batch;
    rr.summary["amplitude"] = sc.ucp_amplitude;
    rr.summary["beta_empirical"] = beta_max;
    rr.summary["ratio_min"] = beta_min;
    rr.summary["any_degenerate"] = any_degenerate;
    sd::add_criterion(rr, "beta_finite",
                      std::isfinite(beta_max) && !any_degenerate ? 0.0 : 1.0, 0.5);
    sd::finalize_criteria(rr);
    return rr;
}

inline RunResult run_scenario(const ScenarioConfig& sc) {
    const std::filesystem::path dir(sc.output_dir);
    std::filesystem::create_directories(dir);
    RunResult rr;
    if (sc.scenario == "simulate") rr = run_simulate(sc, dir);
    else if (sc.scenario == "taylor") rr = run_taylor(sc, dir);
    else if (sc.scenario == "control_linear") rr = run_control_linear(sc, dir);
    else if (sc.scenario == "control_nonlinear") rr = run_control_nonlinear(sc, dir);
    else if (sc.scenario == "stabilize") rr = run_stabilize(sc, dir);
    else if (sc.scenario == "moving_frame_check") rr = run_moving_frame_check(sc, dir);
    else if (sc.scenario == "global_steer") rr = run_global_steer(sc, dir);
    else if (sc.scenario == "ucp_probe") rr = run_ucp_probe(sc, dir);
    else throw ConfigError("unknown scenario '" + sc.scenario + "'");
    rr.summary["seed"] = sc.seed;
    rr.summary["config"] = ordered_json::parse(sc.raw.dump());
    detail::atomic_write(dir / "summary.json", rr.summary.dump(2) + "\n");
    return rr;
}

// Semantic validation without running: builds every object the scenario
// would need (fields, profiles, moment system) and checks parameter domains.
inline void validate_config(const ScenarioConfig& sc) {
    namespace sd = scenario_detail;
    sd::build_field(sc.initial, sc.order, sc.seed + 1);
    if (sc.has_target) sd::build_field(sc.target, sc.order, sc.seed + 2);
    if (sc.has_profile) sd::build_profile(sc.profile, sc.order);
    sd::build_model(sc);
    const bool needs_system = sc.scenario == "control_linear" ||
                              sc.scenario == "control_nonlinear" ||
                              sc.scenario == "global_steer" ||
                              (sc.scenario == "moving_frame_check" && sc.frame_with_control);
    const bool needs_target = sc.scenario == "control_linear" ||
                              sc.scenario == "control_nonlinear" ||
                              sc.scenario == "global_steer" ||
                              (sc.scenario == "moving_frame_check" && sc.frame_with_control);
    if (needs_system) {
        sd::build_system(sc);
        if (!sc.has_profile) throw ConfigError(sc.scenario + " needs model.profile");
    }
    if (needs_target && !sc.has_target)
        throw ConfigError(sc.scenario + " needs a target field");
    if (sc.scenario == "stabilize" && sc.damping == DampingType::none)
        throw ConfigError("stabilize scenario needs model.damping");
    if (sc.scenario == "ucp_probe" && !sc.has_profile)
        throw ConfigError("ucp_probe needs model.profile");
    if (sc.scenario == "moving_frame_check" && sc.c == 0.0)
        throw ConfigError("moving_frame_check needs a nonzero model.c");
}

} // namespace kdvbbm
