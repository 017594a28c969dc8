#include "doctest.h"

#include <cmath>

#include "gibbs_lines/ensemble.hpp"
#include "gibbs_lines/scaling.hpp"

using namespace gibbs_lines;

TEST_CASE("digamma/trigamma: recurrences and classical values") {
    for (const double g : {0.5, 1.0, 7.3}) {
        const auto lo = digamma_trigamma(g);
        const auto hi = digamma_trigamma(g + 1.0);
        CHECK(std::abs(hi.digamma - lo.digamma - 1.0 / g) < 1e-12);
        CHECK(std::abs(lo.trigamma - hi.trigamma - 1.0 / (g * g)) < 1e-12);
        CHECK(lo.trigamma > 0.0);
    }
    // Psi_0(1) = -euler_gamma, Psi_1(1) = pi^2/6,
    // Psi_0(1/2) = -euler_gamma - 2 log 2, Psi_1(1/2) = pi^2/2
    const double euler = 0.57721566490153286;
    const double pi2 = 9.8696044010893586;
    CHECK(std::abs(digamma(1.0) + euler) < 1e-12);
    CHECK(std::abs(trigamma(1.0) - pi2 / 6.0) < 1e-12);
    CHECK(std::abs(digamma(0.5) + euler + 2.0 * std::log(2.0)) < 1e-12);
    CHECK(std::abs(trigamma(0.5) - pi2 / 2.0) < 1e-12);
    CHECK_THROWS(digamma_trigamma(0.0));
    CHECK_THROWS(digamma_trigamma(-2.0));
}

TEST_CASE("digamma of sqrt(N) approaches log sqrt(N) at rate 1/sqrt(N)") {
    for (int N = 16; N <= 4096; N *= 2) {
        const double root = std::sqrt(double(N));
        CHECK(std::abs(digamma(root) - std::log(root)) * root < 0.6);
    }
}

TEST_CASE("scaled Hamiltonian pair: direct values and normalization") {
    const auto p4 = scaled_hamiltonians(4);
    const Rect rect{5.0, 0.0, -1.0, 3.0, 2.0, 0.0};  // a2 = a6 = 0
    CHECK(p4.local(rect) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK_THROWS(scaled_hamiltonians(3));

    for (const int N : {16, 64, 256}) {
        const auto pair = scaled_hamiltonians(N);
        const auto& rw = pair.rw;
        const double mass =
            integrate_line([&rw](double x) { return std::exp(-rw(x)); }, 1e-13);
        CHECK(std::abs(mass - 1.0) < 1e-8);
        // E[X] = -Psi_0(sqrt N) + log(sqrt(N)-1) - log 2
        const double mean =
            integrate_line([&rw](double x) { return x * std::exp(-rw(x)); }, 1e-13);
        const double root = std::sqrt(double(N));
        const double expect = -digamma(root) + std::log(root - 1.0) - std::log(2.0);
        CHECK(std::abs(mean - expect) < 1e-8);
    }
}

TEST_CASE("scaled random-walk Hamiltonian is convex") {
    const auto pair = scaled_hamiltonians(64);
    const double h = 0.01;
    for (double x = -6.0; x <= 6.0; x += 0.25) {
        const double d2 = pair.rw(x - h) - 2.0 * pair.rw(x) + pair.rw(x + h);
        CHECK(d2 >= 0.0);
    }
}

TEST_CASE("scale_ensemble: defined region mask and input validation") {
    const int N = 16;  // K = 2 at t = 1
    const auto env = sample_environment(4.0, 4, 2, 3);
    const auto poly = build_line_ensemble(env, 2, 1, 4);
    const auto scaled = scale_ensemble(poly, N, 1.0, -1, 2);
    CHECK(scaled.grid.mesh() == doctest::Approx(0.5));
    // site j: n = 2 + j; curve i defined iff i <= min(2, 2 + j)
    CHECK(scaled.is_defined(1, 0));       // j = -1, n = 1
    CHECK(!scaled.is_defined(2, 0));
    CHECK(scaled.is_defined(2, 1));       // j = 0
    CHECK(scaled.is_defined(2, 3));       // j = 2
    CHECK_THROWS(scaled.value(2, 0));

    // value identity at one site: centering applied to log z
    const int j = 1, n = 2 + j;
    const double centered = *poly.value(1, n) -
                            (2.0 * 2 + j) * (std::log(2.0) - std::log(3.0)) +
                            std::log(4.0) - std::log(2.0);
    CHECK(scaled.value(1, 2) == doctest::Approx(centered).epsilon(1e-13));

    CHECK_THROWS(scale_ensemble(poly, N, 0.7, -1, 2));  // N t / 8 not integral
    const auto wrong_env = sample_environment(3.0, 4, 2, 3);
    const auto wrong = build_line_ensemble(wrong_env, 2, 1, 4);
    CHECK_THROWS(scale_ensemble(wrong, N, 1.0, -1, 2));  // gamma != sqrt(N)
    CHECK_THROWS(scale_ensemble(poly, N, 1.0, -3, 2));   // leaves the build range
}

TEST_CASE("weak-noise centering keeps the lowest curve O(1)") {
    for (const int N : {64, 256}) {
        const int K = N / 8;
        double acc = 0.0;
        const int reps = 60;
        for (int r = 0; r < reps; ++r) {
            const auto env = sample_environment(std::sqrt(double(N)), K, K,
                                                derive_seed(5, "centering", r));
            const auto poly = build_line_ensemble(env, K, K, K, 1);
            const auto scaled = scale_ensemble(poly, N, 1.0, 0, 0);
            acc += scaled.value(1, 0);
        }
        CHECK(std::abs(acc / reps) < 10.0);
    }
}

TEST_CASE("tilt parameters: asymptotics, residual, cumulant identity") {
    for (int N = 64; N <= 4096; N *= 4) {
        const auto tp = tilt_parameters(N);
        CHECK(tp.residual <= 1e-10);
        CHECK(std::abs(tp.xi - std::sqrt(double(N)) / 2.0) < 2.0);
        CHECK(std::abs(tp.mu - std::sqrt(2.0)) * std::sqrt(double(N)) < 5.0);
    }
    CHECK_THROWS(tilt_parameters(8));

    const auto tc = tilt_identity_cumulants(256);
    CHECK(tc.max_abs_diff < 1e-6);
}

TEST_CASE("A3-style sandwich for the scaled Hamiltonian sum") {
    // Cell-complete Riemann sum (interior rectangles plus the entrance gap
    // term) against the exact piecewise-linear integral.
    Rng rng(23);
    for (const int N : {16, 64, 256}) {
        const auto pair = scaled_hamiltonians(N);
        const double mesh = scaled_mesh(N);
        const int count = static_cast<int>(std::lround(1.0 / mesh)) + 1;
        const Grid grid(0.0, mesh, count);
        for (int trial = 0; trial < 25; ++trial) {
            std::vector<double> lk(count), lk1(count);
            const double a1 = rng.uniform(-1.0, 1.0), b1 = rng.uniform(-1.0, 1.0);
            const double a2 = rng.uniform(-1.0, 1.0), b2 = rng.uniform(-1.0, 1.0);
            for (int i = 0; i < count; ++i) {
                const double u = grid.site(i);
                lk[i] = a1 * std::sin(3.0 * u) + b1 * u;
                lk1[i] = a2 * std::cos(2.0 * u) + b2 * u - 1.0;
            }
            LineEnsemble ens = LineEnsemble::with_free_boundaries(grid, {lk, lk1});
            double hsum = -boltzmann_log_weight(ens, pair.local);
            hsum += pair.local.gap_value(lk1[1] - lk[0]);  // entrance cell term
            double integral = 0.0;
            for (int i = 0; i + 1 < count; ++i) {
                const double g0 = lk1[i] - lk[i], g1 = lk1[i + 1] - lk[i + 1];
                integral += std::abs(g1 - g0) < 1e-12
                                ? mesh * std::exp(0.5 * (g0 + g1))
                                : mesh * (std::exp(g1) - std::exp(g0)) / (g1 - g0);
            }
            const double w_low = modulus_of_continuity({lk}, grid, 0.0, grid.right(), mesh);
            const double w_high = modulus_of_continuity({lk1}, grid, 0.0, grid.right(), mesh);
            const double ratio = hsum / integral;
            const double root = std::sqrt(double(N));
            CHECK(ratio >= std::exp(-(2.0 * w_high + w_low)) - 1e-12);
            CHECK(ratio <= root / (root - 1.0) * std::exp(2.0 * w_high + w_low) + 1e-12);
        }
    }
}

TEST_CASE("stationarity statistics: degenerate, null and shifted inputs") {
    const std::vector<double> xs{-1.0, 0.0, 1.0};
    // degenerate: identical across replicas and sites after the parabola shift
    std::vector<std::vector<double>> flat(150);
    for (auto& row : flat)
        row = {2.0 - 0.5, 2.0, 2.0 - 0.5};  // value + x^2/2 == 2 everywhere
    const auto deg = stationarity_statistics(flat, xs);
    for (const auto& p : deg.pairs) CHECK(p.ks_statistic == 0.0);
    CHECK(deg.not_rejected);

    Rng rng(29);
    std::vector<std::vector<double>> null_rows(500), shifted(500);
    for (auto& row : null_rows)
        row = {rng.normal() - 0.5, rng.normal(), rng.normal() - 0.5};
    for (auto& row : shifted)
        row = {rng.normal() - 0.5, rng.normal() + 2.0, rng.normal() - 0.5};
    CHECK(stationarity_statistics(null_rows, xs).not_rejected);
    CHECK(!stationarity_statistics(shifted, xs).not_rejected);

    CHECK_THROWS(stationarity_statistics(flat, {0.0}));
    CHECK_THROWS(stationarity_statistics({{0.0, 0.0}}, {0.0, 1.0}));
}
