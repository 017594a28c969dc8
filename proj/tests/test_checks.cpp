#include "doctest.h"

#include <cmath>

#include "gibbs_lines/checks.hpp"

using namespace gibbs_lines;

namespace {

LocalHamiltonian minus_a2() {
    return LocalHamiltonian::custom("minus-a2", [](const Rect& a) {
        return a[1] == kNegInf ? kInf : (a[1] == kInf ? kNegInf : -a[1]);
    });
}

} // namespace

TEST_CASE("check_A1: zero Hamiltonian, scaled Hamiltonian, negative control") {
    Rng rng(1);
    const auto zero = check_A1(LocalHamiltonian::zero(), 2000, rng);
    CHECK(zero.pass);
    CHECK(zero.worst_margin == 0.0);

    Rng rng2(2);
    const auto good = check_A1(scaled_hamiltonians(16).local, 100000, rng2);
    CHECK(good.pass);
    CHECK(good.worst_margin >= -1e-12);

    Rng rng3(3);
    const auto bad = check_A1(minus_a2(), 2000, rng3);
    CHECK(!bad.pass);
    CHECK(bad.worst_margin < 0.0);
}

TEST_CASE("check_A1 is reproducible from the trial stream") {
    Rng a(77), b(77);
    const auto r1 = check_A1(scaled_hamiltonians(64).local, 5000, a);
    const auto r2 = check_A1(scaled_hamiltonians(64).local, 5000, b);
    CHECK(r1.worst_margin == r2.worst_margin);
}

TEST_CASE("check_A2: quadratic exact, log-gamma passes, sine control fails") {
    const auto quad = check_A2(RWHamiltonian::quadratic(), 5.0, 801);
    CHECK(quad.pass);
    // second difference of x^2/2 is exactly h^2
    const double h = 10.0 / 800.0;
    CHECK(quad.worst_margin == doctest::Approx(h * h).epsilon(1e-6));

    const auto good = check_A2(scaled_hamiltonians(64).rw, 6.0, 2001);
    CHECK(good.pass);

    const auto wiggly = RWHamiltonian::custom(
        "sine-perturbed", [](double x) { return 0.5 * x * x + 0.35 * std::sin(5.0 * x); },
        true);
    const auto bad = check_A2(wiggly, 6.0, 2001);
    CHECK(!bad.pass);
}

TEST_CASE("A3 on constant curves matches the closed-form Riemann ratio") {
    for (const int N : {16, 64, 256}) {
        const auto pair = scaled_hamiltonians(N);
        const double mesh = scaled_mesh(N);
        const int count = static_cast<int>(std::lround(1.0 / mesh)) + 1;
        const Grid grid(0.0, mesh, count);
        const double c1 = 0.8, c2 = -0.4;
        LineEnsemble ens = LineEnsemble::with_free_boundaries(
            grid, {std::vector<double>(count, c1), std::vector<double>(count, c2)});
        const double hsum = -boltzmann_log_weight(ens, pair.local);
        const double integral = (count - 1) * mesh * std::exp(c2 - c1);
        const double root = std::sqrt(double(N));
        const double expect =
            std::abs(double(count - 2) / double(count - 1) * root / (root - 1.0) - 1.0);
        CHECK(hsum / integral - 1.0 == doctest::Approx(-expect).epsilon(1e-10));
        // zero-modulus curves: within the bound already at C1 = 3
        CHECK(expect <= std::expm1(3.0 * mesh));
    }
}

TEST_CASE("check_A3 passes on the smooth family and the worst LHS shrinks with N") {
    for (const int N : {16, 64, 256}) {
        const auto rep = check_A3(N, 60, 3.0, 2024);
        CHECK(rep.pass);
        CHECK(rep.details["smallest_passing_c1"].get<double>() <= 3.0);
    }
    // mesh halving = 4x in the parameter; the worst LHS should roughly halve
    const double w256 = a3_worst_lhs(256, 60, 2024);
    const double w1024 = a3_worst_lhs(1024, 60, 2024);
    const double ratio = w1024 / w256;
    CHECK(ratio > 0.25);
    CHECK(ratio < 0.75);
}

TEST_CASE("A3 bound degrades gracefully on an adversarial sawtooth") {
    const int N = 64;
    const auto pair = scaled_hamiltonians(N);
    const double mesh = scaled_mesh(N);
    const int count = static_cast<int>(std::lround(1.0 / mesh)) + 1;
    const Grid grid(0.0, mesh, count);
    std::vector<double> lk(count), lk1(count);
    for (int i = 0; i < count; ++i) {
        lk[i] = (i % 2 == 0) ? 0.5 : -0.5;  // omega = 1
        lk1[i] = ((i + 1) % 2 == 0) ? -0.5 : -1.5;
    }
    LineEnsemble ens = LineEnsemble::with_free_boundaries(grid, {lk, lk1});
    const double hsum = -boltzmann_log_weight(ens, pair.local);
    double integral = 0.0;
    for (int i = 0; i + 1 < count; ++i) {
        const double g0 = lk1[i] - lk[i], g1 = lk1[i + 1] - lk[i + 1];
        integral += std::abs(g1 - g0) < 1e-12
                        ? mesh * std::exp(0.5 * (g0 + g1))
                        : mesh * (std::exp(g1) - std::exp(g0)) / (g1 - g0);
    }
    const double lhs = std::abs(hsum / integral - 1.0);
    const double bound = std::expm1(3.0 * (1.0 + 1.0 + mesh));
    CHECK(lhs <= bound);
    CHECK(bound > 100.0);  // the bound is huge here, as it should be
}

TEST_CASE("single-step coupled pair has only endpoint snap error") {
    const auto pair = scaled_hamiltonians(64);
    const auto lat = default_lattice(8.0);
    const auto law = discretize_increment_law(pair.rw, lat.delta, lat.M);
    const ConvolutionTable conv(law, 1);
    Rng rng(4);
    const double z = std::lround(-0.4 / law.delta()) * law.delta();
    const auto cp = sample_coupled_rw_brownian(law, conv, 1, 1.0, z, rng);
    CHECK(std::abs(cp.brownian[0] + 0.0 - cp.walk[0]) == 0.0);
    CHECK(std::abs(cp.brownian[1] + z - cp.walk[1]) < 1e-12);
}

TEST_CASE("A4 scaling proxy smoke run") {
    const auto rep = check_A4_empirical({64, 256, 1024}, 1.0, 0.0, 800, 11, 2);
    REQUIRE(rep.rows.size() == 3);
    for (size_t i = 0; i + 1 < rep.rows.size(); ++i)
        CHECK(rep.rows[i].q99 > rep.rows[i + 1].q99);  // decreasing tail quantiles
    CHECK(rep.slope > 0.4);
    CHECK(rep.slope < 1.6);
    CHECK_THROWS(check_A4_empirical({64, 128}, 1.0, 0.0, 800, 11, 1));
}

TEST_CASE("gibbs invariance: small positive run and loud negative control") {
    GibbsInvarianceConfig cfg;
    cfg.gamma = 3.0;
    cfg.curves = 2;
    cfg.window_interior = 2;
    cfg.replicas = 250;
    cfg.delta = 0.05;
    cfg.sweeps = 600;
    cfg.burn_in = 200;
    cfg.seed = 7;
    cfg.workers = 2;
    const auto good = gibbs_invariance_test(cfg);
    CHECK(good.pass);

    GibbsInvarianceConfig bad = cfg;
    bad.wrong_rw = true;
    const auto control = gibbs_invariance_test(bad);
    CHECK(!control.pass);
}

TEST_CASE("z comparison: gap shrinks with N and matches within noise") {
    ZComparisonConfig cfg;
    cfg.n_values = {64, 256};
    cfg.samples = 30000;
    cfg.seed = 5;
    const auto rep = z_comparison_check(cfg);
    REQUIRE(rep.rows.size() == 2);
    CHECK(rep.rows[1].gap <= rep.rows[0].gap);
    CHECK(rep.report.pass);

    // the polymer pair carries its intrinsic Theta(1/sqrt N) offset
    ZComparisonConfig lg = cfg;
    lg.family = "log-gamma";
    lg.samples = 20000;
    const auto lgrep = z_comparison_check(lg);
    CHECK(lgrep.rows[1].gap <= lgrep.rows[0].gap);
    CHECK(lgrep.rows[1].gap > 3.0 * lgrep.rows[1].joint_stderr);

    ZComparisonConfig broken = cfg;
    broken.b = 0.9;  // not a multiple of the mesh
    CHECK_THROWS(z_comparison_check(broken));
}

TEST_CASE("window extrema: degenerate input and monotone R(eps)") {
    const std::vector<double> xs{-1.0, -0.5, 0.0, 0.5, 1.0};
    std::vector<std::vector<double>> flat(40, std::vector<double>(5, 2.0));
    const auto res = window_extrema(flat, xs, -1.0, 1.0);
    // inf of 2 + x^2/2 over the window is 2 at x = 0
    CHECK(res.inf_values.front() == doctest::Approx(2.0));
    CHECK(res.inf_values.back() == doctest::Approx(2.0));
    CHECK(res.sup_values.front() == doctest::Approx(2.5));

    Rng rng(9);
    std::vector<std::vector<double>> rows(500, std::vector<double>(5));
    for (auto& row : rows)
        for (auto& v : row) v = rng.normal();
    const auto r2 = window_extrema(rows, xs, -1.0, 1.0);
    double prev = kInf;
    for (double eps : {0.01, 0.05, 0.1, 0.3}) {
        const double r = r2.r_at(eps);
        CHECK(r <= prev);
        prev = r;
    }
    CHECK_THROWS(window_extrema(rows, xs, 5.0, 6.0));
}

TEST_CASE("tightness proxy finds a common radius when one exists") {
    ModulusSamples a{64, {0.25, 0.5, 1.0}, {}};
    ModulusSamples b{256, {0.25, 0.5, 1.0}, {}};
    Rng rng(12);
    for (int rep = 0; rep < 200; ++rep) {
        // omega grows with r; rho = 2 reached only rarely at small r
        const double base = std::abs(rng.normal());
        a.omega.push_back({base * 0.5, base * 0.9, base * 1.6});
        b.omega.push_back({base * 0.4, base * 0.8, base * 1.5});
    }
    const auto rep = tightness_proxy({a, b}, 2.0, 0.1);
    CHECK(rep.report.pass);
    CHECK(rep.common_r > 0.0);
    for (const auto& c : rep.curves) {
        // probability curves are non-increasing in r
        for (size_t i = 0; i + 1 < c.prob.size(); ++i) CHECK(c.prob[i] >= c.prob[i + 1]);
        CHECK(c.prob[0] >= 0.9);
    }

    // rho huge: probability 1 at every radius
    const auto sure = tightness_proxy({a, b}, 1e9, 0.1);
    CHECK(sure.common_r == doctest::Approx(1.0));

    ModulusSamples mismatch{16, {0.5, 1.0}, {{0.1, 0.2}}};
    CHECK_THROWS(tightness_proxy({a, mismatch}, 2.0, 0.1));
}

TEST_CASE("parallel_for is deterministic and propagates exceptions") {
    std::vector<long> serial(100), parallel(100);
    parallel_for(100, 1, [&](long i) { serial[i] = i * i; });
    parallel_for(100, 4, [&](long i) { parallel[i] = i * i; });
    CHECK(serial == parallel);
    CHECK_THROWS(parallel_for(10, 3, [](long i) {
        if (i == 7) throw std::runtime_error("boom");
    }));
}

TEST_CASE("check report pass flag is tied to the margin") {
    CheckReport r;
    r.worst_margin = -1e-10;
    r.tolerance = 1e-9;
    r.finalize();
    CHECK(r.pass);
    r.worst_margin = -1e-8;
    r.finalize();
    CHECK(!r.pass);
    const auto j = r.to_json();
    CHECK(j["pass"] == false);
    CHECK(r.to_text().find("[FAIL]") == 0);
}
