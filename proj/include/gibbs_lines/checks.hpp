#ifndef GIBBS_LINES_CHECKS_HPP
#define GIBBS_LINES_CHECKS_HPP

#include <string>

#include "gibbs_lines/mcmc.hpp"
#include "gibbs_lines/scaling.hpp"

#include "json.hpp"

namespace gibbs_lines {

// Outcome of one executable check. pass <=> worst_margin >= -tolerance.
struct CheckReport {
    std::string name;
    nlohmann::json params;
    long trials = 0;
    double worst_margin = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    std::string threshold_provenance;
    nlohmann::json details;

    void finalize() { pass = worst_margin >= -tolerance; }
    nlohmann::json to_json() const;
    std::string to_text() const;
};

// Randomized audit of the two monotonicity properties of a local interaction
// Hamiltonian plus nonnegativity of its values: margins are
//   (1) H(a) - H(a + d e_c) for c in {1,2,3} and the mirrored sign for
//       c in {4,5,6},
//   (2) [H(a) - H(a')] - [H(b) - H(b')] over coordinatewise-ordered pairs
//       with one tied coordinate raised by the same d on both sides,
//   (3) min H over all evaluated tuples.
CheckReport check_A1(const LocalHamiltonian& H, long trials, Rng& rng);

// Convexity of H^RW: smallest second difference over a symmetric test grid.
CheckReport check_A2(const RWHamiltonian& rw, double half_width, int grid_points);

// |sum_u H^N(rect)/integral exp(L_{k+1}-L_k) - 1| against
// exp(C1 (omega_k + omega_{k+1} + mesh)) - 1 on random smooth curve pairs.
// Reports the worst LHS, worst ratio to the bound and the smallest C1 that
// would pass all trials.
CheckReport check_A3(int N, long trials, double c1, std::uint64_t seed);

// Same trial family evaluated deterministically; returns the worst LHS only.
// Used for the mesh-refinement slope experiment.
double a3_worst_lhs(int N, long trials, std::uint64_t seed);

// Coupled discretized walk/Brownian-bridge pairs across a ladder of N values:
// quantiles of the sup distance, fitted against log(N^{-1/2} log(NL)).
struct A4ScalingRow {
    int N;
    int steps;
    double median;
    double q99;
};
struct A4ScalingReport {
    std::vector<A4ScalingRow> rows;
    double slope = 0.0;
    double intercept = 0.0;
    CheckReport report;
};
A4ScalingReport check_A4_empirical(const std::vector<int>& n_values, double L, double z,
                                   long samples, std::uint64_t seed, int workers = 1);

// Resampling-invariance audit of the polymer ensemble: over fresh
// environments, refresh a window with the conditional chain and compare
// per-site marginals of original vs resampled values by two-sample KS with
// Bonferroni adjustment. wrong_rw drops the exponential term of H^RW, the
// loud negative control.
struct GibbsInvarianceConfig {
    double gamma = 3.0;
    int curves = 3;
    int window_interior = 2;
    long replicas = 2000;
    double delta = 0.05;
    long sweeps = 1500;
    long burn_in = 500;
    std::uint64_t seed = 0;
    bool wrong_rw = false;
    int workers = 1;
};
CheckReport gibbs_invariance_test(const GibbsInvarianceConfig& cfg);

// Discrete vs Brownian normalizing constants on matched boundary data across
// increasing N; pass when the gap is non-increasing and the final gap is
// within three joint standard errors.
struct ZComparisonConfig {
    std::vector<int> n_values;
    double a = 0.0, b = 1.0;
    double x = 0.0, y = 0.0;          // single-curve entrance/exit
    double lower_boundary = -1.0;     // constant g; f is +inf
    long samples = 100000;
    int brownian_grid = 257;
    std::uint64_t seed = 0;
    // "framework-gaussian": mesh 1/N, H^N = (1/N) exp(gap), Gaussian walk of
    // variance 1/N (the canonical A1-A4 family of the comparison statement).
    // "log-gamma": the weak-noise polymer pair on its 2/sqrt(N) mesh; its
    // Hamiltonian scale carries an intrinsic Theta(1/sqrt N) offset.
    std::string family = "framework-gaussian";
};
struct ZComparisonRow {
    int N;
    double log_z_discrete, stderr_discrete;
    double z_discrete;
    double z_brownian, stderr_brownian;
    double gap;
    double joint_stderr;
};
struct ZComparisonReport {
    std::vector<ZComparisonRow> rows;
    double z_brownian;
    double stderr_brownian;
    CheckReport report;
};
ZComparisonReport z_comparison_check(const ZComparisonConfig& cfg);

// Empirical distribution of window extrema of L_k(x) + x^2/2 over replicas,
// and the smallest R with P(inf < -R) < eps.
struct WindowExtremaResult {
    std::vector<double> inf_values;  // sorted
    std::vector<double> sup_values;  // sorted
    double r_at(double eps) const;   // smallest R with empirical P(inf < -R) < eps
};
WindowExtremaResult window_extrema(const std::vector<std::vector<double>>& replica_curves,
                                   const std::vector<double>& x_sites, double x_lo,
                                   double x_hi);

// For each N, the empirical P(omega_{[-T,T]} <= rho) as a function of the
// modulus radius r; pass when one r achieves >= 1 - eta simultaneously.
struct ModulusSamples {
    int N;
    std::vector<double> r_values;
    std::vector<std::vector<double>> omega;  // [replica][r_index]
};
struct TightnessCurve {
    int N;
    std::vector<double> r_values;
    std::vector<double> prob;  // P(omega(r) <= rho)
};
struct TightnessReport {
    std::vector<TightnessCurve> curves;
    double rho = 0.0, eta = 0.0;
    double common_r = -1.0;  // largest r that works for every N, -1 if none
    CheckReport report;
};
TightnessReport tightness_proxy(const std::vector<ModulusSamples>& samples, double rho,
                                double eta);

// Runs fn(replica_index) over a bounded pool; results land in replica order.
void parallel_for(long n, int workers, const std::function<void(long)>& fn);

} // namespace gibbs_lines

#endif
