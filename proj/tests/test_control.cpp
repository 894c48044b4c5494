#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <memory>

#include "kdvbbm/control.hpp"
#include "kdvbbm/random.hpp"
#include "oracles.hpp"

using namespace kdvbbm;
using Catch::Approx;

namespace {

std::shared_ptr<const MomentSystem> shared_system(double c, double T, int K) {
    return std::make_shared<const MomentSystem>(build_moment_system(c, T, K));
}

} // namespace

TEST_CASE("moment data of the unit profile is the identity") {
    const MomentData md = moment_data(make_constant(8, 1.0), 8);
    CHECK(md.mu == Approx(1.0).epsilon(1e-14));
    for (int j = -8; j <= 8; ++j)
        for (int k = -8; k <= 8; ++k) {
            const double expect = (j == k) ? 1.0 : 0.0;
            CHECK(std::abs(md.m(j + 8, k + 8) - expect) < 1e-14);
        }
}

TEST_CASE("moment data of one plus cosine") {
    // (1 + cos x)^2 = 3/2 + 2 cos x + cos(2x)/2.
    const SpectralField a = make_constant(6, 1.0) + make_cosine(6, 1.0);
    const MomentData md = moment_data(a, 6);
    CHECK(md.mu == Approx(1.5).epsilon(1e-14));
    CHECK(md.m(0 + 6, 0 + 6).real() == Approx(1.5).epsilon(1e-14));
    CHECK(md.m(0 + 6, 1 + 6).real() == Approx(1.0).epsilon(1e-14));
    CHECK(md.m(2 + 6, 0 + 6).real() == Approx(0.25).epsilon(1e-14));
    CHECK(std::abs(md.m(0 + 6, 3 + 6)) < 1e-15);
}

TEST_CASE("degenerate profiles are rejected") {
    CHECK_THROWS_AS(moment_data(make_constant(4, 0.0), 4), DegenerateDamping);
}

TEST_CASE("free flight needs no control") {
    auto sys = shared_system(1.0, 1.2 * two_pi, 8);
    Rng rng(19);
    const SpectralField u0 = random_field_with_norm(8, rng, 1.0);
    SpectralField uT(8);
    for (int k = -8; k <= 8; ++k)
        uT(k) = std::polar(1.0, -sys->omega(k) * sys->horizon) * u0(k);
    const ControlSignal sig = phi_operator(sys, make_constant(8, 1.0), u0, uT);
    CHECK(sig.amplitudes().cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("single mode amplitude has the closed form") {
    const double T = 1.2 * two_pi, eps = 1e-2;
    auto sys = shared_system(1.0, T, 4);
    const SpectralField u0(4);
    const SpectralField uT = make_cosine(4, 2.0 * eps); // coefficients eps at k = ±1
    const ControlSignal sig = phi_operator(sys, make_constant(4, 1.0), u0, uT);
    // f_k = (1+k^2) û_T(k) e^{iω_k T}, ω_{±1} = ±3/2 at c = 1.
    const complexd expect = 2.0 * eps * std::polar(1.0, 1.5 * T);
    CHECK(std::abs(sig.amplitudes()(1 + 4) - expect) < 1e-14);
    CHECK(std::abs(sig.amplitudes()(-1 + 4) - std::conj(expect)) < 1e-14);
    CHECK(std::abs(sig.amplitudes()(2 + 4)) < 1e-15);
}

TEST_CASE("synthesis is linear in the data") {
    auto sys = shared_system(1.0, 1.3 * two_pi, 6);
    const SpectralField a = make_constant(6, 1.0) + make_cosine(6, 0.4);
    Rng rng(23);
    const SpectralField u0 = random_field_with_norm(6, rng, 0.8);
    const SpectralField uT = random_field_with_norm(6, rng, 0.5);
    const SpectralField v0 = random_field_with_norm(6, rng, 0.3);
    const SpectralField vT = random_field_with_norm(6, rng, 0.9);

    const Eigen::VectorXcd fu = phi_operator(sys, a, u0, uT).amplitudes();
    const Eigen::VectorXcd fv = phi_operator(sys, a, v0, vT).amplitudes();
    const Eigen::VectorXcd fs = phi_operator(sys, a, u0 + v0, uT + vT).amplitudes();
    CHECK((fs - fu - fv).cwiseAbs().maxCoeff() < 1e-12);

    const Eigen::VectorXcd f2 = phi_operator(sys, a, 2.0 * u0, 2.0 * uT).amplitudes();
    CHECK((f2 - 2.0 * fu).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("zero amplitudes reproduce the free group") {
    auto sys = shared_system(1.0, 1.2 * two_pi, 6);
    Rng rng(29);
    const SpectralField u0 = random_field_with_norm(6, rng, 1.0);
    const ControlSignal sig(sys, make_constant(6, 1.0),
                            Eigen::VectorXcd::Zero(13));
    const SpectralField direct = sig.analytic_state(u0, sys->horizon);
    const SpectralField group = group_symbol(sys->horizon, 1.0, 6).apply(u0);
    CHECK(sobolev_norm(direct - group, 1.0) < 1e-13);
    const SpectralField stepped = linear_drive(u0, sig, DriveMethod::timestep, 1e-3);
    CHECK(sobolev_norm(stepped - group, 1.0) < 1e-12);
    CHECK(sig.norm_l2_hs(1.0) == 0.0);
}

TEST_CASE("analytic state starts at the data") {
    auto sys = shared_system(1.0, 1.2 * two_pi, 6);
    Rng rng(31);
    const SpectralField u0 = random_field_with_norm(6, rng, 1.0);
    const SpectralField uT = random_field_with_norm(6, rng, 1.0);
    const ControlSignal sig = phi_operator(sys, make_constant(6, 1.0), u0, uT);
    CHECK(sobolev_norm(sig.analytic_state(u0, 0.0) - u0, 1.0) < 1e-14);
}

TEST_CASE("designed control reaches the target through the linear flow") {
    auto sys = shared_system(1.0, 1.2 * two_pi, 8);
    const SpectralField a = make_constant(8, 1.0) + make_cosine(8, 0.5);
    Rng rng(37);
    const SpectralField u0 = random_field_with_norm(8, rng, 1.0);
    const SpectralField uT = random_field_with_norm(8, rng, 1.0);
    const ControlSignal sig = phi_operator(sys, a, u0, uT);

    const SpectralField closed = linear_drive(u0, sig, DriveMethod::analytic);
    CHECK(sobolev_norm(closed - uT, 1.0) < 1e-9);

    const SpectralField stepped = linear_drive(u0, sig, DriveMethod::timestep, 1e-3);
    CHECK(sobolev_norm(stepped - uT, 1.0) < 1e-5);
}

TEST_CASE("drive coefficients are the truncated product of profile and control") {
    auto sys = shared_system(1.0, 1.3 * two_pi, 5);
    const SpectralField a = make_constant(5, 1.0) + make_cosine(5, 0.6, 2);
    Rng rng(41);
    const SpectralField u0 = random_field_with_norm(5, rng, 0.5);
    const SpectralField uT = random_field_with_norm(5, rng, 0.5);
    const ControlSignal sig = phi_operator(sys, a, u0, uT);
    for (double t : {0.0, 1.1, 4.4}) {
        const SpectralField h = sig.coefficients(t); // band 2K
        const SpectralField expect = pointwise_product(a.resampled(10), h).resampled(5);
        CHECK(sobolev_norm(sig.drive_coefficients(t) - expect, 0.0) < 1e-11);
        CHECK(h.is_hermitian(1e-9));
    }
}

TEST_CASE("control norm closed form matches quadrature") {
    auto sys = shared_system(1.0, 1.1 * two_pi, 3);
    const SpectralField a = make_constant(3, 1.0) + make_cosine(3, 0.3);
    Rng rng(43);
    const SpectralField u0 = random_field_with_norm(3, rng, 0.7);
    const SpectralField uT = random_field_with_norm(3, rng, 0.7);
    const ControlSignal sig = phi_operator(sys, a, u0, uT);

    for (double s : {1.0, 2.0}) {
        double max_freq = 0.0;
        for (int k = -3; k <= 3; ++k) max_freq = std::max(max_freq, std::abs(sys->omega(k)));
        const complexd sq = oracles::gauss_legendre(
            [&](double t) {
                const double n = sobolev_norm(sig.coefficients(t), s - 2.0);
                return complexd(n * n, 0.0);
            },
            0.0, sys->horizon, oracles::panels_for(2.0 * max_freq, sys->horizon));
        CHECK(sig.norm_l2_hs(s) == Approx(std::sqrt(sq.real())).epsilon(1e-8));
    }
}

TEST_CASE("control norm is homogeneous in the data") {
    auto sys = shared_system(1.0, 1.2 * two_pi, 6);
    const SpectralField a = make_constant(6, 1.0);
    Rng rng(47);
    const SpectralField u0 = random_field_with_norm(6, rng, 0.5);
    const SpectralField uT = random_field_with_norm(6, rng, 0.5);
    const double n1 = phi_operator(sys, a, u0, uT).norm_l2_hs(1.0);
    const double n3 = phi_operator(sys, a, 3.0 * u0, 3.0 * uT).norm_l2_hs(1.0);
    CHECK(n3 == Approx(3.0 * n1).epsilon(1e-12));
}

TEST_CASE("terminal defect of a frozen state has the closed form") {
    auto sys = shared_system(1.0, 1.2 * two_pi, 4);
    const SpectralField u = make_cosine(4, 0.8) + make_sine(4, 0.3, 2);
    const std::vector<SpectralField> states(2049, u);
    const SpectralField defect = terminal_defect(states, *sys);
    const SpectralField g = dispersion_generator(0.5 * pointwise_product(u, u));
    for (int k = -4; k <= 4; ++k) {
        const double w = sys->omega(k);
        complexd expect;
        if (w == 0.0)
            expect = g(k) * sys->horizon;
        else
            expect = g(k) * (1.0 - std::polar(1.0, -w * sys->horizon)) / complexd(0.0, w);
        CHECK(std::abs(defect(k) - expect) < 1e-9);
    }
}

TEST_CASE("terminal defect rejects bad trajectories") {
    auto sys = shared_system(1.0, 1.2 * two_pi, 4);
    const std::vector<SpectralField> few(4, SpectralField(4));
    CHECK_THROWS_AS(terminal_defect(few, *sys), InvalidArgument);

    Trajectory traj;
    traj.times = {0.0, 0.5, 1.0, 1.5, 2.0};
    traj.states.assign(5, SpectralField(4));
    CHECK_THROWS_AS(terminal_defect(traj, *sys), InvalidArgument); // wrong span
}

TEST_CASE("small data steering contracts and verifies") {
    auto sys = shared_system(1.0, 1.2 * two_pi, 8);
    const SpectralField a = make_constant(8, 1.0) + make_cosine(8, 0.5);
    const double amp = 1e-2;
    const SpectralField u0 = make_cosine(8, amp);
    SpectralField uT = make_cosine(8, 0.7 * amp, 2);
    uT += make_sine(8, 0.5 * amp, 1);

    SteerOptions opts;
    opts.tol = 1e-11;
    opts.n_samples = 1024;
    const SteerResult res = nonlinear_steer(sys, a, u0, uT, opts);
    CHECK(res.report.converged);
    CHECK(res.report.iterations <= 12);
    for (std::size_t i = 1; i < res.report.ratios.size(); ++i)
        CHECK(res.report.ratios[i] < 0.5);
    CHECK(res.report.terminal_residual < 1e-6);
    CHECK(res.report.control_norm > 0.0);
    CHECK(sobolev_norm(res.trajectory.states.back() - uT, 1.0) <
          1e-6 * sobolev_norm(uT, 1.0) + 1e-12);
}

TEST_CASE("steering scales sublinearly near zero data") {
    // Halving the data roughly halves the control norm in the contraction regime.
    auto sys = shared_system(1.0, 1.2 * two_pi, 6);
    const SpectralField a = make_constant(6, 1.0);
    SteerOptions opts;
    opts.tol = 1e-12;
    opts.n_samples = 512;
    opts.verify = false;
    const SpectralField u0(6);
    const SpectralField uT = make_cosine(6, 2e-3);
    const SpectralField uT_half = make_cosine(6, 1e-3);
    const double n_full = nonlinear_steer(sys, a, u0, uT, opts).report.control_norm;
    const double n_half = nonlinear_steer(sys, a, u0, uT_half, opts).report.control_norm;
    CHECK(n_full / n_half == Approx(2.0).epsilon(0.01));
}

TEST_CASE("large data steering reports no contraction") {
    auto sys = shared_system(1.0, 1.2 * two_pi, 6);
    const SpectralField a = make_constant(6, 1.0);
    const SpectralField u0 = make_cosine(6, 8.0);
    const SpectralField uT = make_cosine(6, 8.0, 2);
    SteerOptions opts;
    opts.n_samples = 256;
    opts.verify = false;
    CHECK_THROWS_AS(nonlinear_steer(sys, a, u0, uT, opts), NoContraction);
}

TEST_CASE("steering validates its inputs") {
    auto sys = shared_system(1.0, 1.2 * two_pi, 6);
    const SpectralField a = make_constant(6, 1.0);
    SteerOptions bad;
    bad.max_iter = 0;
    CHECK_THROWS_AS(nonlinear_steer(sys, a, SpectralField(6), SpectralField(6), bad),
                    InvalidArgument);
    bad = SteerOptions{};
    bad.n_samples = 4;
    CHECK_THROWS_AS(nonlinear_steer(sys, a, SpectralField(6), SpectralField(6), bad),
                    InvalidArgument);
    CHECK_THROWS_AS(
        nonlinear_steer(sys, a, SpectralField(5), SpectralField(6), SteerOptions{}),
        InvalidArgument);
}
