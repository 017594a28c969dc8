#ifndef GIBBS_LINES_STATS_HPP
#define GIBBS_LINES_STATS_HPP

#include <span>
#include <vector>

namespace gibbs_lines {

struct MeanVar {
    double mean = 0.0;
    double var = 0.0;   // unbiased sample variance
    std::size_t n = 0;
};
MeanVar mean_var(std::span<const double> xs);

// Inverse standard normal CDF, accurate to ~1e-15 (rational seed + Halley steps).
double normal_quantile(double p);

// Regularized upper incomplete gamma Q(a, x).
double gamma_q(double a, double x);

// Upper tail of the chi-square distribution with df degrees of freedom.
inline double chisq_sf(double x, double df) { return gamma_q(df / 2.0, x / 2.0); }

// Asymptotic Kolmogorov distribution tail Q_KS(lambda).
double kolmogorov_sf(double lambda);

struct KsResult {
    double statistic = 0.0;
    double p_value = 1.0;
};

// Two-sample Kolmogorov-Smirnov test (asymptotic p with the small-sample
// lambda correction).
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

struct ChiSquareResult {
    double statistic = 0.0;
    double df = 0.0;
    double p_value = 1.0;
};

// Goodness of fit of observed counts against expected counts. Bins with
// expectation below min_expected are pooled into their left neighbor.
ChiSquareResult chi_square_gof(std::span<const double> observed,
                               std::span<const double> expected,
                               double min_expected = 5.0);

double quantile_of_sorted(std::span<const double> sorted, double q);

} // namespace gibbs_lines

#endif
