#ifndef GIBBS_LINES_POLYMER_HPP
#define GIBBS_LINES_POLYMER_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "gibbs_lines/numeric.hpp"
#include "gibbs_lines/rng.hpp"

namespace gibbs_lines {

// n_max x K matrix of i.i.d. inverse-gamma weights d_{ij}, stored in log form.
// Rows i = 1..n_max are the time direction, columns j = 1..K the levels.
struct PolymerEnvironment {
    double gamma = 0.0;
    int n_max = 0;
    int K = 0;
    std::uint64_t seed = 0;
    std::vector<std::vector<double>> log_d;  // [i-1][j-1]

    double log_weight(int i, int j) const { return log_d.at(i - 1).at(j - 1); }
    double weight(int i, int j) const { return std::exp(log_weight(i, j)); }
};

// d = 1/G with G Gamma(gamma, rate 1); deterministic in (gamma, dims, seed).
PolymerEnvironment sample_environment(double gamma, int n_max, int K, std::uint64_t seed);

// Per-start-row DP tables of single-path partition functions:
// Z(i,j) = d_ij * (Z(i-1,j) + Z(i,j-1)) in log domain.
class PathPartitionCache {
public:
    explicit PathPartitionCache(const PolymerEnvironment& env);

    // log of the partition function over up-right paths (1, start_row) -> (n, end_row).
    // Throws for end_row < start_row.
    double log_partition(int start_row, int n, int end_row) const;

    // Same, but -inf instead of throwing when no path exists.
    double log_partition_or_neg_inf(int start_row, int n, int end_row) const;

    const PolymerEnvironment& env() const { return *env_; }

private:
    const PolymerEnvironment* env_;
    // tables_[r-1][i-1][j-r] for j >= r
    std::vector<std::vector<std::vector<double>>> tables_;
};

inline double single_path_log_partition(const PolymerEnvironment& env, int start_row,
                                        int n, int end_row) {
    return PathPartitionCache(env).log_partition(start_row, n, end_row);
}

// log tau_{k,l}(n): the sum over l-tuples of vertex-disjoint up-right paths
// (1,r) -> (n, k-l+r). Empty-sum cases (n < l < k) give -inf; the l = k tuple
// is the horizontal product for any n; otherwise evaluated as an l x l
// determinant of single-path partition functions with row/column log scaling
// extracted first. A non-positive determinant raises determinant_degeneracy.
double tau_log(const PathPartitionCache& cache, int n, int k, int l);
double tau_log(const PolymerEnvironment& env, int n, int k, int l);

struct determinant_degeneracy : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Direct enumeration of the l-tuples, filtering vertex-disjoint ones. Guarded:
// refuses when any single endpoint pair has more than max_single_paths paths
// or the grid has more than 64 cells.
double tau_bruteforce(const PolymerEnvironment& env, int n, int k, int l,
                      long max_single_paths = 10000);

// Triangular array of log z_{k,l}(n) = log tau_{k,l}(n) - log tau_{k,l-1}(n),
// with tau_{k,0} = 1; entry (k,l) is undefined exactly when n < l <= k.
struct TriangularArray {
    int K = 0;
    int n = 0;
    std::vector<std::vector<std::optional<double>>> rows;  // rows[k-1][l-1]

    const std::optional<double>& entry(int k, int l) const { return rows.at(k - 1).at(l - 1); }
};
TriangularArray z_array(const PolymerEnvironment& env, int n, int K);

// The K-curve line ensemble L_{K,i}(n) = log z_{K,i}(n) over a range of n;
// undefined markers where n < i. Only the first `built` curves are computed
// (deep determinants lose positivity in doubles long before the low curves
// do, and the scaled studies read only the lowest few).
struct PolymerLineEnsemble {
    double gamma = 0.0;
    int K = 0;
    int built = 0;
    int n_lo = 0;
    int n_hi = 0;
    std::vector<std::vector<std::optional<double>>> values;  // [i-1][n-n_lo]

    const std::optional<double>& value(int i, int n) const {
        return values.at(i - 1).at(static_cast<size_t>(n - n_lo));
    }
};
PolymerLineEnsemble build_line_ensemble(const PolymerEnvironment& env, int K, int n_lo,
                                        int n_hi, int max_curves = 0);

} // namespace gibbs_lines

#endif
