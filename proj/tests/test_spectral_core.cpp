#include <catch2/catch_amalgamated.hpp>

#include <kdvbbm/field.hpp>
#include <kdvbbm/operators.hpp>
#include <kdvbbm/quadrature.hpp>
#include <kdvbbm/random.hpp>

#include "oracles.hpp"

using namespace kdvbbm;
using Catch::Approx;

namespace {

double coeff_distance(const SpectralField& a, const SpectralField& b) {
    double worst = 0.0;
    for (int k = -a.order(); k <= a.order(); ++k) worst = std::max(worst, std::abs(a(k) - b(k)));
    return worst;
}

} // namespace

TEST_CASE("sobolev norm of the constant field") {
    const SpectralField one = make_constant(8, 1.0);
    for (double s : {-1.0, 0.0, 1.0, 2.3}) {
        CHECK(sobolev_norm(one, s) == Approx(std::sqrt(two_pi)).epsilon(1e-14));
    }
}

TEST_CASE("sobolev norm of cos x") {
    const SpectralField c = make_cosine(8, 1.0);
    for (double s : {-0.5, 0.0, 1.0, 2.0, 2.7}) {
        const double expected = std::pow(2.0, 0.5 * s) * std::sqrt(std::numbers::pi);
        CHECK(sobolev_norm(c, s) == Approx(expected).epsilon(1e-13));
    }
}

TEST_CASE("sobolev norms match grid quadrature of u, u_x, u_xx") {
    Rng rng(11);
    const int K = 32;
    const SpectralField u = random_field(K, rng, 1.0);
    for (int s : {0, 1, 2}) {
        const double oracle = oracles::sobolev_norm_quadrature(u, s, 4 * K + 5);
        CHECK(sobolev_norm(u, s) == Approx(oracle).epsilon(1e-12));
    }
}

TEST_CASE("inner products are sesquilinear and consistent") {
    Rng rng(12);
    const SpectralField u = random_field(16, rng);
    const SpectralField v = random_field(16, rng);
    const complexd uv = sobolev_inner(u, v, 1.0);
    const complexd vu = sobolev_inner(v, u, 1.0);
    CHECK(std::abs(uv - std::conj(vu)) < 1e-12);
    CHECK(sobolev_inner(u, u, 1.0).real() ==
          Approx(std::pow(sobolev_norm(u, 1.0), 2)).epsilon(1e-13));
    CHECK(std::abs(l2_inner(u, v) - sobolev_inner(u, v, 0.0)) < 1e-12);
}

TEST_CASE("helmholtz inverse divides by 1 + k^2") {
    const SpectralField one = make_constant(4, 3.0);
    CHECK(coeff_distance(helmholtz_inverse(one), one) < 1e-15);
    const SpectralField c1 = helmholtz_inverse(make_cosine(4, 1.0, 1));
    CHECK(c1(1).real() == Approx(0.25).margin(1e-16));
    const SpectralField c2 = helmholtz_inverse(make_cosine(4, 1.0, 2));
    CHECK(c2(2).real() == Approx(0.1).margin(1e-16));
    Rng rng(13);
    const SpectralField u = random_field(12, rng);
    CHECK(coeff_distance(helmholtz_forward(helmholtz_inverse(u)), u) < 1e-15);
    CHECK(coeff_distance(sobolev_scale(u, -1.0), helmholtz_inverse(u)) < 1e-15);
}

TEST_CASE("dispersion generator annihilates constants and maps sin to -cos/2") {
    CHECK(max_abs_coefficient(dispersion_generator(make_constant(6, 2.5))) == 0.0);
    const SpectralField out = dispersion_generator(make_sine(6, 1.0, 1));
    CHECK(coeff_distance(out, make_cosine(6, -0.5, 1)) < 1e-15);
}

TEST_CASE("dispersion generator has H^s operator norm 1/2, attained at |k| = 1") {
    const int K = 48;
    double worst = 0.0;
    for (int k = -K; k <= K; ++k) {
        const double kd = k;
        worst = std::max(worst, std::abs(kd) / (1.0 + kd * kd));
    }
    CHECK(worst == 0.5);
    const SpectralField e1 = make_cosine(K, 1.0, 1);
    CHECK(sobolev_norm(dispersion_generator(e1), 1.0) ==
          Approx(0.5 * sobolev_norm(e1, 1.0)).epsilon(1e-14));
}

TEST_CASE("mode frequencies") {
    CHECK(mode_frequency(0, 0.7) == 0.0);
    CHECK(mode_frequency(1, 1.0) == Approx(1.5).margin(1e-16));
    CHECK(mode_frequency(-1, 1.0) == Approx(-1.5).margin(1e-16));
    CHECK(mode_frequency(2, 0.0) == Approx(0.4).margin(1e-16));
    for (int k = -9; k <= 9; ++k)
        CHECK(mode_frequency(-k, 0.37) == Approx(-mode_frequency(k, 0.37)).margin(1e-15));
}

TEST_CASE("group symbol is the identity at t = 0 and matches exp(-3i/2) at c=1,k=1,t=1") {
    const LinearSymbol w0 = group_symbol(0.0, 1.0, 5);
    for (int k = -5; k <= 5; ++k) CHECK(std::abs(w0(k) - 1.0) == 0.0);
    const LinearSymbol w = group_symbol(1.0, 1.0, 5);
    CHECK(std::abs(w(1) - std::exp(complexd(0.0, -1.5))) < 1e-15);
}

TEST_CASE("group is an H^s isometry for random data") {
    Rng rng(14);
    const int K = 64;
    for (int trial = 0; trial < 100; ++trial) {
        const SpectralField u = random_field(K, rng);
        const double t = 200.0 * (rng.uniform() - 0.5);
        const double c = trial % 3 == 0 ? 0.0 : (trial % 3 == 1 ? 1.0 : -0.5);
        const double s = trial % 2 == 0 ? 1.0 : 2.5;
        const SpectralField wu = group_symbol(t, c, K).apply(u);
        CHECK(sobolev_norm(wu, s) == Approx(sobolev_norm(u, s)).epsilon(1e-12));
    }
}

TEST_CASE("group law W(t)W(s) = W(t+s)") {
    Rng rng(15);
    const int K = 32;
    const SpectralField u = random_field(K, rng);
    const double t = 3.7, s = -1.9, c = 1.0;
    const SpectralField a = group_symbol(t, c, K).apply(group_symbol(s, c, K).apply(u));
    const SpectralField b = group_symbol(t + s, c, K).apply(u);
    CHECK(coeff_distance(a, b) < 1e-13);
}

TEST_CASE("torus convolution matches the closed coefficient form and quadrature") {
    const SpectralField one = make_constant(4, 1.0);
    CHECK(torus_convolution(one, one)(0).real() == Approx(two_pi).epsilon(1e-15));

    // 2cos x convolved with itself is 4π cos x = 2π (e^{ix} + e^{-ix}).
    const SpectralField c = make_cosine(4, 2.0, 1);
    const SpectralField w = torus_convolution(c, c);
    CHECK(w(1).real() == Approx(two_pi).epsilon(1e-14));
    CHECK(w(-1).real() == Approx(two_pi).epsilon(1e-14));
    CHECK(std::abs(w(2)) < 1e-15);
    CHECK(std::abs(w(0)) < 1e-15);
    for (double x : {0.0, 0.9, 2.7}) {
        CHECK(evaluate(w, x) ==
              Approx(oracles::convolution_quadrature(c, c, x, 64)).epsilon(1e-13));
    }

    Rng rng(16);
    const SpectralField u = random_field(10, rng);
    const SpectralField v = random_field(10, rng);
    const SpectralField uv = torus_convolution(u, v);
    for (double x : {0.3, 1.7, 4.4}) {
        CHECK(evaluate(uv, x) ==
              Approx(oracles::convolution_quadrature(u, v, x, 128)).margin(1e-10));
    }
}

TEST_CASE("pointwise product of cos x with itself") {
    const SpectralField c2 = pointwise_product(make_cosine(4, 1.0), make_cosine(4, 1.0));
    CHECK(c2(0).real() == Approx(0.5).margin(1e-16));
    CHECK(c2(2).real() == Approx(0.25).margin(1e-16));
    CHECK(std::abs(c2(1)) < 1e-16);

    // At truncation order 1 the 2-mode is cut.
    const SpectralField t1 = pointwise_product(make_cosine(1, 1.0), make_cosine(1, 1.0));
    CHECK(t1(0).real() == Approx(0.5).margin(1e-16));
}

TEST_CASE("pointwise product matches grid multiplication") {
    Rng rng(17);
    const int K = 12;
    const SpectralField u = random_field(K, rng);
    const SpectralField v = random_field(K, rng);
    const SpectralField w = pointwise_product(u, v);
    const int N = 4 * K + 3;
    std::vector<double> grid(N);
    for (int n = 0; n < N; ++n) {
        const double x = two_pi * n / N;
        grid[n] = evaluate(u, x) * evaluate(v, x);
    }
    const SpectralField oracle = analyze(grid, K);
    CHECK(coeff_distance(w, oracle) < 1e-13);

    const SpectralField full = convolve_full(u, v);
    const SpectralField full_oracle = analyze(grid, 2 * K);
    CHECK(coeff_distance(full, full_oracle) < 1e-13);
}

TEST_CASE("analysis inverts synthesis") {
    Rng rng(18);
    const int K = 20;
    const SpectralField u = random_field(K, rng);
    for (int N : {2 * K + 1, 4 * K, 4 * (K + 1)}) {
        const SpectralField back = analyze(synthesize(u, N), K);
        CHECK(coeff_distance(back, u) < 1e-13);
    }
    CHECK_THROWS_AS(analyze(synthesize(u, 2 * K), K), InvalidArgument);
}

TEST_CASE("moving frame round trip and constants") {
    Rng rng(19);
    const SpectralField u = random_field(24, rng);
    const SpectralField fwd = moving_frame(u, 2.3, 0.7, FrameDirection::forward);
    const SpectralField back = moving_frame(fwd, 2.3, 0.7, FrameDirection::backward);
    CHECK(coeff_distance(back, u) < 1e-14);
    CHECK(sobolev_norm(fwd, 1.0) == Approx(sobolev_norm(u, 1.0)).epsilon(1e-13));

    const SpectralField c = make_constant(24, 4.2);
    CHECK(coeff_distance(moving_frame(c, 5.0, 1.3, FrameDirection::forward), c) == 0.0);

    // A full period of the frame shift is the identity.
    const SpectralField period = moving_frame(u, two_pi, 1.0, FrameDirection::forward);
    CHECK(coeff_distance(period, u) < 1e-12);

    // The frame shift is a plain x-translation: compare point values.
    for (double x : {0.4, 2.0}) {
        CHECK(evaluate(fwd, x) == Approx(evaluate(u, x - 0.7 * 2.3)).margin(1e-12));
    }
}

TEST_CASE("reflection reverses the argument") {
    Rng rng(20);
    const SpectralField u = random_field(16, rng);
    const SpectralField r = u.reflected();
    CHECK(coeff_distance(r.reflected(), u) == 0.0);
    for (double x : {0.3, 1.1, 5.0})
        CHECK(evaluate(r, x) == Approx(evaluate(u, -x)).margin(1e-12));
}

TEST_CASE("operators preserve Hermitian symmetry") {
    Rng rng(21);
    const SpectralField u = random_field(16, rng);
    const SpectralField v = random_field(16, rng);
    REQUIRE(u.is_hermitian());
    CHECK(helmholtz_inverse(u).is_hermitian(1e-13));
    CHECK(dispersion_generator(u).is_hermitian(1e-13));
    CHECK(pointwise_product(u, v).is_hermitian(1e-12));
    CHECK(convolve_full(u, v).is_hermitian(1e-12));
    CHECK(torus_convolution(u, v).is_hermitian(1e-12));
    CHECK(group_symbol(3.3, -0.5, 16).apply(u).is_hermitian(1e-12));
    CHECK(moving_frame(u, 1.7, 2.0, FrameDirection::forward).is_hermitian(1e-12));
    CHECK(u.reflected().is_hermitian(1e-13));
}

TEST_CASE("field constructors and order checks") {
    const SpectralField s = make_sine(8, 2.0, 3);
    CHECK(evaluate(s, 0.4) == Approx(2.0 * std::sin(3 * 0.4)).margin(1e-13));
    CHECK_THROWS_AS(make_cosine(4, 1.0, 9), InvalidArgument);
    CHECK_THROWS_AS(pointwise_product(make_constant(3, 1.0), make_constant(4, 1.0)),
                    InvalidArgument);
    const SpectralField padded = make_cosine(4, 1.0).resampled(9);
    CHECK(padded.order() == 9);
    CHECK(padded(1).real() == 0.5);
    CHECK(padded(9) == complexd(0.0, 0.0));
    const SpectralField cut = padded.resampled(2);
    CHECK(cut.order() == 2);
    CHECK(cut(1).real() == 0.5);
}

TEST_CASE("simpson prefix integrates polynomials of degree three exactly") {
    const int n = 17;
    const double h = 0.25;
    std::vector<double> f(n);
    auto poly = [](double x) { return 1.0 + x * (2.0 + x * (-1.5 + 0.75 * x)); };
    auto prim = [](double x) {
        return x + x * x - 0.5 * x * x * x + (0.75 / 4.0) * x * x * x * x;
    };
    for (int i = 0; i < n; ++i) f[i] = poly(h * i);
    const std::vector<double> pre = simpson_prefix(f, h);
    for (int i = 0; i < n; ++i) CHECK(pre[i] == Approx(prim(h * i)).margin(1e-12));
}

TEST_CASE("simpson quadrature converges at fourth order") {
    auto integral_with = [](int n) {
        std::vector<double> f(n + 1);
        for (int i = 0; i <= n; ++i) f[i] = std::exp(2.0 * i / n);
        return simpson_integral(f, 2.0 / n);
    };
    const double ref = std::exp(2.0) - 1.0;
    const double e1 = std::abs(integral_with(32) - ref);
    const double e2 = std::abs(integral_with(64) - ref);
    CHECK(e1 / e2 > 10.0);
}

TEST_CASE("cubic interpolation reproduces cubics and smooth samples") {
    const int n = 40;
    const double h = 0.1;
    std::vector<SpectralField> samples(n, SpectralField(2));
    for (int i = 0; i < n; ++i) {
        const double t = h * i;
        samples[i](0) = 1.0 + t * (0.3 + t * (0.2 - 0.05 * t));
        samples[i](1) = complexd(std::cos(t), 0.1 * t);
        samples[i](-1) = std::conj(samples[i](1));
    }
    for (double t : {0.03, 0.77, 1.99, 3.4}) {
        const SpectralField g = cubic_interpolate_fields(samples, h, t);
        CHECK(g(0).real() == Approx(1.0 + t * (0.3 + t * (0.2 - 0.05 * t))).margin(1e-12));
        CHECK(g(1).real() == Approx(std::cos(t)).margin(2e-6));
    }
}

TEST_CASE("deterministic rng is reproducible") {
    Rng a(123), b(123);
    for (int i = 0; i < 10; ++i) CHECK(a.normal() == b.normal());
    const SpectralField u1 = random_field(8, a);
    Rng c(123);
    for (int i = 0; i < 10; ++i) (void)c.normal();
    const SpectralField u2 = random_field(8, c);
    for (int k = -8; k <= 8; ++k) CHECK(u1(k) == u2(k));
}
