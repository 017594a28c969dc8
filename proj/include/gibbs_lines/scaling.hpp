#ifndef GIBBS_LINES_SCALING_HPP
#define GIBBS_LINES_SCALING_HPP

#include <vector>

#include "gibbs_lines/grid.hpp"
#include "gibbs_lines/hamiltonian.hpp"
#include "gibbs_lines/polymer.hpp"
#include "gibbs_lines/stats.hpp"

namespace gibbs_lines {

struct DigammaTrigamma {
    double digamma;
    double trigamma;
};

// Psi_0 and Psi_1 via recurrence shift to x >= 12 plus the asymptotic series;
// absolute error <= 1e-12 over the positive axis.
DigammaTrigamma digamma_trigamma(double gamma);

inline double digamma(double x) { return digamma_trigamma(x).digamma; }
inline double trigamma(double x) { return digamma_trigamma(x).trigamma; }

// Drift mismatch q(N) = log(sqrt(N)-1) - log 2 - Psi_0(sqrt(N)), shared by the
// increment law centering and the tilting equations.
double tilt_shift_q(int N);

inline double scaled_mesh(int N) { return 2.0 / std::sqrt(static_cast<double>(N)); }

// The weak-noise Hamiltonian pair at parameter N:
//   H^N(rect)  = 2/(sqrt(N)-1) * exp(a6 - a2)
//   H^{RW,N}(x) = lgamma(sqrt N) + sqrt(N) (x - log(sqrt(N)-1) + log 2)
//                 + exp(-x + log(sqrt(N)-1) - log 2).
HamiltonianPair scaled_hamiltonians(int N);

// Scaled ensemble values over x in (2/sqrt(N))Z; curve i is defined exactly
// where i <= (N t / 8) /\ (N t / 8 + sqrt(N) x / 2).
struct ScaledEnsemble {
    int N = 0;
    double t = 0.0;
    Grid grid;                 // x axis, mesh 2/sqrt(N)
    int num_curves = 0;        // N t / 8
    double center_slope = 0.0; // log 2 - log(sqrt(N)-1)
    double center_const = 0.0; // log sqrt(N) - log 2
    std::vector<std::vector<double>> values;        // [i-1][site]
    std::vector<std::vector<unsigned char>> defined;  // mask, same shape

    bool is_defined(int i, int site) const {
        return defined.at(i - 1).at(static_cast<size_t>(site)) != 0;
    }
    double value(int i, int site) const;
};

// Applies the weak-noise recentering to a polymer line ensemble built at
// gamma = sqrt(N); x sites are (2/sqrt(N)) * j for j in [j_lo, j_hi].
ScaledEnsemble scale_ensemble(const PolymerLineEnsemble& L, int N, double t, int j_lo,
                              int j_hi);

// Curves 1..k restricted to sites [site_lo, site_hi]; throws if any requested
// value is undefined.
std::vector<std::vector<double>> curves_on_window(const ScaledEnsemble& ens, int k,
                                                  int site_lo, int site_hi);

struct TiltParameters {
    double xi;
    double mu;
    double residual;
};

// Solves Psi_0(xi) = Psi_0(sqrt N) + q(N) by safeguarded Newton on the
// bracket [sqrt(N)/4, sqrt(N)]; mu = sqrt(Psi_1(xi)/Psi_1(sqrt N)).
TiltParameters tilt_parameters(int N);

// The tilting identity between the two standardized increment laws, checked
// at cumulant level: an exponential tilt of the law of
// (Y(sqrt N) - m - q)/sigma matches mu (Y(xi) - m(xi))/sigma(xi). Returns the
// first three cumulants of both sides, computed by quadrature.
struct TiltCumulants {
    double tilted[3];
    double reference[3];
    double max_abs_diff;
};
TiltCumulants tilt_identity_cumulants(int N);

// Per-site summary of replica samples of the lowest curve, shifted by x^2/2,
// plus all pairwise two-sample KS comparisons with Bonferroni adjustment.
struct StationarityTable {
    std::vector<double> x;
    std::vector<double> mean;
    std::vector<double> variance;
    struct Pair {
        int site_a;
        int site_b;
        double ks_statistic;
        double p_raw;
        double p_adjusted;
    };
    std::vector<Pair> pairs;
    double min_adjusted_p = 1.0;
    bool not_rejected = false;
};
StationarityTable stationarity_statistics(const std::vector<std::vector<double>>& replicas,
                                          const std::vector<double>& x_sites,
                                          double p_threshold = 0.001);

} // namespace gibbs_lines

#endif
