#include "doctest.h"

#include <cmath>
#include <map>

#include "gibbs_lines/mcmc.hpp"
#include "gibbs_lines/scaling.hpp"
#include "gibbs_lines/stats.hpp"

using namespace gibbs_lines;

namespace {

DiscreteIncrementLaw three_jump_law() {
    // support {-1, 0, 1} * delta with mildly asymmetric weights
    return DiscreteIncrementLaw::from_log_weights(0.5, -1,
                                                  {std::log(0.3), std::log(0.45),
                                                   std::log(0.25)});
}

// 1 curve, 2 interior sites, finite lower boundary so the exp-gap H acts.
ChainTarget tiny_target(bool edge_terms = false) {
    const int count = 4;
    ChainTarget t{Grid(0.0, 1.0, count),
                  LocalHamiltonian::exp_gap(0.8, 1),
                  three_jump_law(),
                  {0.0},
                  {0.5},
                  std::vector<double>(count, kInf),
                  std::vector<double>(count, -1.0),
                  edge_terms};
    return t;
}

LineEnsemble random_state(const ChainTarget& t, Rng& rng) {
    const int steps = t.grid.count() - 1;
    std::vector<std::vector<double>> curves;
    for (int k = 1; k <= t.num_curves(); ++k) {
        BridgeSampler sampler(t.law, steps, t.entrance[k - 1],
                              t.entrance[k - 1] + t.exit_offset(k) * t.law.delta());
        curves.push_back(sampler.sample(rng));
    }
    return LineEnsemble(t.grid, std::move(curves), t.upper, t.lower);
}

} // namespace

TEST_CASE("free-walk reduction of the acceptance ratio") {
    ChainTarget t = tiny_target();
    t.local = LocalHamiltonian::zero();
    Rng rng(2);
    const auto q = random_state(t, rng);
    for (int dir : {1, -1}) {
        const double log_r = metropolis_log_ratio(q, 1, 1, dir, t.local, t.law);
        const double z = q.curves[0][1];
        const double lp_left_new =
            t.law.log_prob(std::lround((z + dir * t.law.delta() - q.curves[0][0]) / t.law.delta()));
        const double lp_right_new =
            t.law.log_prob(std::lround((q.curves[0][2] - z - dir * t.law.delta()) / t.law.delta()));
        const double lp_left_old = t.law.log_prob(std::lround((z - q.curves[0][0]) / t.law.delta()));
        const double lp_right_old =
            t.law.log_prob(std::lround((q.curves[0][2] - z) / t.law.delta()));
        double expect;
        if (lp_left_new == kNegInf || lp_right_new == kNegInf)
            expect = kNegInf;
        else
            expect = lp_left_new + lp_right_new - lp_left_old - lp_right_old;
        if (expect == kNegInf)
            CHECK(log_r == kNegInf);
        else
            CHECK(log_r == doctest::Approx(expect).epsilon(1e-12));
    }
}

TEST_CASE("acceptance ratio equals the full target recomputation") {
    for (const bool edge : {false, true}) {
        ChainTarget t = tiny_target(edge);
        Rng rng(3);
        double worst = 0.0;
        for (int trial = 0; trial < 500; ++trial) {
            const auto q = random_state(t, rng);
            const int i = 1 + static_cast<int>(rng.below(2));
            const int dir = rng.below(2) ? 1 : -1;
            const double log_r =
                metropolis_log_ratio(q, 1, i, dir, t.local, t.law, edge);
            LineEnsemble q2 = q;
            q2.curves[0][i] += dir * t.law.delta();
            const double brute = chain_log_target(t, q2) - chain_log_target(t, q);
            if (log_r == kNegInf || brute == kNegInf) {
                CHECK(log_r == brute);
            } else {
                worst = std::max(worst, std::abs(log_r - brute));
            }
        }
        CHECK(worst < 1e-10);
    }
}

TEST_CASE("continuous-density ratio variant agrees with the discretized one") {
    ChainTarget t = tiny_target();
    const auto rw = RWHamiltonian::log_gamma(2.0, 0.0);
    const auto law = discretize_increment_law(rw, 0.05, 4.0);
    t.law = law;
    t.exit = {0.4};
    Rng rng(8);
    const auto q = random_state(t, rng);
    const double with_law = metropolis_log_ratio(q, 1, 1, 1, t.local, law);
    const double with_rw = metropolis_log_ratio(q, 1, 1, 1, law.delta(), t.local, rw);
    // the truncated-lattice normalizer cancels in the ratio, so both routes agree
    CHECK(with_law == doctest::Approx(with_rw).epsilon(1e-10));
}

TEST_CASE("raising a neighboring curve never lowers the up-move ratio (A1)") {
    // two curves; proposals on curve 1 while curve 2 rises pointwise
    const int count = 5;
    ChainTarget t{Grid(0.0, 1.0, count),
                  LocalHamiltonian::exp_gap(1.0, 1),
                  three_jump_law(),
                  {0.0, -2.0},
                  {0.5, -1.5},
                  std::vector<double>(count, kInf),
                  std::vector<double>(count, kNegInf),
                  false};
    Rng rng(4);
    for (int trial = 0; trial < 200; ++trial) {
        const auto q = random_state(t, rng);
        const int i = 1 + static_cast<int>(rng.below(count - 2));
        const double base = metropolis_log_ratio(q, 1, i, +1, t.local, t.law);
        LineEnsemble raised = q;
        const double lift = rng.uniform(0.1, 1.0);
        for (auto& v : raised.curves[1]) v += lift;
        const double after = metropolis_log_ratio(raised, 1, i, +1, t.local, t.law);
        if (base != kNegInf && after != kNegInf) CHECK(after >= base - 1e-12);
    }
}

TEST_CASE("run_chain leaves endpoints pinned and respects zero-interior grids") {
    ChainTarget t = tiny_target();
    ChainConfig cfg;
    cfg.sweeps = 50;
    cfg.burn_in = 0;
    cfg.seed = 77;
    const auto init = minimal_initial_state(t);
    const auto res = run_chain(init, t, cfg);
    CHECK(res.state.curves[0][0] == init.curves[0][0]);
    CHECK(res.state.curves[0][3] == init.curves[0][3]);
    CHECK(res.stats.proposed == 50 * 2);

    // zero interior sites: the state comes back unchanged
    ChainTarget t2 = tiny_target();
    t2.grid = Grid(0.0, 1.0, 2);
    t2.upper = {kInf, kInf};
    t2.lower = {-1.0, -1.0};
    t2.exit = {0.5};
    const LineEnsemble q2(t2.grid, {{0.0, 0.5}}, t2.upper, t2.lower);
    const auto res2 = run_chain(q2, t2, cfg);
    CHECK(res2.state.curves == q2.curves);
    CHECK(res2.stats.proposed == 0);
}

TEST_CASE("chain config and coupled pair validation") {
    ChainConfig bad;
    bad.sweeps = 5;
    bad.burn_in = 5;
    CHECK_THROWS(bad.validate());

    const Grid g(0.0, 1.0, 3);
    LineEnsemble a = LineEnsemble::with_free_boundaries(g, {{0.0, 0.0, 0.0}});
    LineEnsemble b(g, {{0.0, 0.0, 0.0}}, std::vector<double>(3, kInf),
                   std::vector<double>(3, 5.0));
    // lower system has a HIGHER lower boundary: not ordered
    CHECK_THROWS(CoupledPair(a, b, 1));
}

TEST_CASE("stuck initialization raises") {
    // single-point jump law pins every site; a hard Hamiltonian kills the state
    const auto frozen =
        DiscreteIncrementLaw::from_log_weights(1.0, -1, {kNegInf, 0.0, kNegInf});
    const int count = 4;
    ChainTarget t{Grid(0.0, 1.0, count),
                  LocalHamiltonian::custom("always-inf", [](const Rect&) { return kInf; }),
                  frozen,
                  {0.0},
                  {0.0},
                  std::vector<double>(count, kInf),
                  std::vector<double>(count, kNegInf),
                  false};
    const LineEnsemble q(t.grid, {{0.0, 0.0, 0.0, 0.0}}, t.upper, t.lower);
    ChainConfig cfg;
    cfg.sweeps = 3;
    cfg.burn_in = 0;
    cfg.seed = 1;
    CHECK_THROWS_AS(run_chain(q, t, cfg), std::runtime_error);
}

TEST_CASE("detailed balance on random transitions") {
    ChainTarget t = tiny_target();
    Rng rng(11);
    double worst = 0.0;
    long used = 0;
    for (int trial = 0; trial < 10000; ++trial) {
        const auto q = random_state(t, rng);
        const int i = 1 + static_cast<int>(rng.below(2));
        const int dir = rng.below(2) ? 1 : -1;
        const double log_r = metropolis_log_ratio(q, 1, i, dir, t.local, t.law);
        if (log_r == kNegInf || log_r == kInf) continue;
        LineEnsemble q2 = q;
        q2.curves[0][i] += dir * t.law.delta();
        const double lhs = chain_log_target(t, q) + std::min(0.0, log_r);
        const double rhs = chain_log_target(t, q2) + std::min(0.0, -log_r);
        worst = std::max(worst, std::abs(lhs - rhs));
        ++used;
    }
    CHECK(used > 5000);
    CHECK(worst < 1e-10);
}

TEST_CASE("long-run chain distribution matches exhaustive enumeration") {
    // H == 0 reduces to the free bridge; the exponential-gap case carries the
    // finite lower boundary. Both are checked against the exact measure.
    for (const bool zero_h : {true, false}) {
        ChainTarget t = tiny_target();
        if (zero_h) t.local = LocalHamiltonian::zero();
        const auto exact = enumerate_gibbs(t);
        std::map<std::vector<int>, long> counts;
        ChainConfig cfg;
        cfg.sweeps = 201000;
        cfg.burn_in = 1000;
        cfg.seed = zero_h ? 100 : 200;
        long total = 0;
        run_chain(minimal_initial_state(t), t, cfg,
                  [&](long, const std::vector<std::vector<int>>& off) {
                      counts[{off[0][1], off[0][2]}] += 1;
                      ++total;
                  });
        double tv = 0.0;
        for (size_t s = 0; s < exact.states.size(); ++s) {
            const auto key = GibbsEnumeration::flatten(exact.states[s]);
            const auto it = counts.find(key);
            const double emp = it == counts.end() ? 0.0 : double(it->second) / total;
            tv += std::abs(emp - exact.probs[s]);
        }
        CHECK(tv / 2.0 < 0.02);
    }
}

TEST_CASE("identical coupled chains coincide forever") {
    ChainTarget t = tiny_target();
    const auto init = minimal_initial_state(t);
    CoupledPair pair(init, init, 4242);
    ChainConfig cfg;
    cfg.sweeps = 2000;
    cfg.burn_in = 0;
    cfg.seed = 4242;
    const auto rep = monotone_coupled_run(pair, t, t, cfg);
    CHECK(rep.ordering_violations == 0);
    CHECK(rep.upper.state.curves == rep.lower.state.curves);
}

TEST_CASE("ordered data stay ordered under the shared-randomness dynamics") {
    const int count = 6;
    const auto pair_h = scaled_hamiltonians(64);
    const auto lat = default_lattice(8.0);
    const auto law = discretize_increment_law(pair_h.rw, lat.delta, lat.M);
    const auto make = [&](double base) {
        ChainTarget t{Grid(0.0, scaled_mesh(64), count),
                      pair_h.local,
                      law,
                      {base, base - 1.0},
                      {base, base - 1.0},
                      std::vector<double>(count, kInf),
                      std::vector<double>(count, kNegInf),
                      false};
        return t;
    };
    const ChainTarget hi = make(std::lround(0.7 / law.delta()) * law.delta());
    const ChainTarget lo = make(0.0);
    CoupledPair cp(minimal_initial_state(hi), minimal_initial_state(lo), 9);
    ChainConfig cfg;
    cfg.sweeps = 5000;
    cfg.burn_in = 0;
    cfg.seed = 9;
    const auto rep = monotone_coupled_run(cp, hi, lo, cfg);
    CHECK(rep.updates == 5000L * 2 * (count - 2));
    CHECK(rep.ordering_violations == 0);
}

TEST_CASE("non-convex jump law admits an R-inequality violation; convex does not") {
    // convexity dip: -log p has a bump at the center
    const auto dipped = DiscreteIncrementLaw::from_log_weights(
        0.5, -1, {std::log(0.45), std::log(0.1), std::log(0.45)});
    CHECK(dipped.min_convexity_margin() < 0.0);
    const auto witness = find_r_inequality_violation(dipped);
    REQUIRE(witness.has_value());
    CHECK(witness->log_r_high < witness->log_r_low);

    CHECK(!find_r_inequality_violation(three_jump_law()).has_value());
    const auto gauss = discretize_increment_law(RWHamiltonian::quadratic(), 0.25, 2.0);
    CHECK(!find_r_inequality_violation(gauss).has_value());
}

TEST_CASE("estimate_log_Z: zero Hamiltonian gives exactly zero") {
    ChainTarget t = tiny_target();
    t.local = LocalHamiltonian::zero();
    Rng rng(5);
    const auto est = estimate_log_Z(t, 2000, rng);
    CHECK(est.log_z == 0.0);
    CHECK(est.stderr_ == 0.0);
}

TEST_CASE("estimate_log_Z stays nonpositive and matches enumeration") {
    ChainTarget t = tiny_target();
    Rng rng(6);
    const auto est = estimate_log_Z(t, 50000, rng);
    CHECK(est.log_z <= 0.0 + 3.0 * est.stderr_);
    const auto exact = enumerate_gibbs(t);
    CHECK(std::abs(std::exp(est.log_z) - std::exp(exact.log_Z)) <=
          3.0 * std::exp(est.log_z) * est.stderr_ + 1e-12);
}

TEST_CASE("estimate_log_Z flags the all-impossible case") {
    ChainTarget t = tiny_target();
    t.local = LocalHamiltonian::custom("always-inf", [](const Rect&) { return kInf; });
    Rng rng(7);
    const auto est = estimate_log_Z(t, 100, rng);
    CHECK(est.all_impossible);
    CHECK(est.log_z == kNegInf);
}

TEST_CASE("Z is monotone under squeezing boundaries") {
    // wider boundaries (higher f, lower g) admit more weight
    const int count = 5;
    const auto law = discretize_increment_law(RWHamiltonian::quadratic(), 0.25, 2.0);
    const auto make = [&](double f_const, double g_const) {
        return ChainTarget{Grid(0.0, 1.0, count),
                           LocalHamiltonian::exp_gap(1.0, 1),
                           law,
                           {0.0},
                           {0.0},
                           std::vector<double>(count, f_const),
                           std::vector<double>(count, g_const),
                           false};
    };
    Rng rng1(8), rng2(9);
    const auto tight = estimate_log_Z(make(1.0, -1.0), 40000, rng1);
    const auto wide = estimate_log_Z(make(3.0, -3.0), 40000, rng2);
    const double joint = 3.0 * std::sqrt(tight.stderr_ * tight.stderr_ +
                                         wide.stderr_ * wide.stderr_);
    CHECK(tight.log_z <= wide.log_z + joint);
}

TEST_CASE("resample_interior: empty block and outside values are untouched") {
    const Grid g(0.0, 1.0, 6);
    Rng rng(10);
    // lattice random-walk curves keep every window displacement reachable
    std::vector<std::vector<double>> curves(2, std::vector<double>(6));
    for (auto& c : curves) {
        c[0] = std::floor(rng.uniform(-2.0, 2.0) / 0.5) * 0.5;
        for (int i = 1; i < 6; ++i)
            c[i] = c[i - 1] + 0.5 * (double(rng.below(3)) - 1.0);
    }
    const LineEnsemble L = LineEnsemble::with_free_boundaries(g, curves);
    ChainConfig cfg;
    cfg.sweeps = 30;
    cfg.burn_in = 10;
    cfg.seed = 3;
    const auto law = three_jump_law();
    const auto H = LocalHamiltonian::exp_gap(1.0, 1);

    const auto untouched = resample_interior(L, 1, 0, 1, 4, H, law, cfg);
    CHECK(untouched.curves == L.curves);

    const auto res = resample_interior(L, 1, 2, 2, 3, H, law, cfg);
    for (int k = 0; k < 2; ++k)
        for (int i = 0; i < 6; ++i)
            if (i < 2 || i > 3) CHECK(res.curves[k][i] == L.curves[k][i]);

    CHECK_THROWS(resample_interior(L, 1, 2, 0, 3, H, law, cfg));
    CHECK_THROWS(resample_interior(L, 1, 2, 2, 5, H, law, cfg));
}

TEST_CASE("resampling twice is distributionally idempotent") {
    const auto law = three_jump_law();
    const auto H = LocalHamiltonian::exp_gap(1.0, 1);
    const Grid g(0.0, 1.0, 5);
    std::vector<double> once, twice;
    for (int rep = 0; rep < 1500; ++rep) {
        std::vector<std::vector<double>> curves{{0.0, 0.0, 0.0, 0.0, 0.5}};
        LineEnsemble L(g, curves, std::vector<double>(5, kInf),
                       std::vector<double>(5, -1.0));
        ChainConfig cfg;
        cfg.sweeps = 400;
        cfg.burn_in = 100;
        cfg.seed = derive_seed(1000, "idempotence-1", rep);
        const auto r1 = resample_interior(L, 1, 1, 1, 3, H, law, cfg);
        cfg.seed = derive_seed(1000, "idempotence-2", rep);
        const auto r2 = resample_interior(r1, 1, 1, 1, 3, H, law, cfg);
        once.push_back(r1.curves[0][2]);
        twice.push_back(r2.curves[0][2]);
    }
    CHECK(ks_two_sample(once, twice).p_value > 0.001);
}

TEST_CASE("systematic scan visits every site and keeps endpoints pinned") {
    ChainTarget t = tiny_target();
    ChainConfig cfg;
    cfg.sweeps = 200;
    cfg.burn_in = 0;
    cfg.seed = 31;
    cfg.scan = ChainConfig::Scan::Systematic;
    const auto init = minimal_initial_state(t);
    const auto res = run_chain(init, t, cfg);
    CHECK(res.stats.proposed == 200 * 2);
    CHECK(res.state.curves[0][0] == init.curves[0][0]);
    CHECK(res.state.curves[0][3] == init.curves[0][3]);
}

TEST_CASE("gelman-rubin diagnostic: mixed chain near 1, frozen chains apart") {
    ChainTarget t = tiny_target();
    ChainConfig cfg;
    cfg.sweeps = 2000;
    cfg.burn_in = ChainConfig::default_burn_in(1, 2);  // 40
    cfg.seed = 5;
    const auto diag = gelman_rubin_midpoints(t, cfg, 4);
    CHECK(diag.converged);
    CHECK(diag.max_psrf < 1.1);

    // a glacial chain over a huge flat state space stays unconverged
    const auto wide = discretize_increment_law(RWHamiltonian::quadratic(), 0.01, 6.0);
    ChainTarget slow = t;
    slow.law = wide;
    slow.local = LocalHamiltonian::zero();
    slow.exit = {0.0};
    ChainConfig short_cfg;
    short_cfg.sweeps = 40;
    short_cfg.burn_in = 10;
    short_cfg.seed = 6;
    const auto bad = gelman_rubin_midpoints(slow, short_cfg, 4);
    CHECK(bad.max_psrf > 1.1);
    CHECK(!bad.converged);
}
