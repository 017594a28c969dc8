#include "gibbs_lines/polymer.hpp"

#include <algorithm>
#include <cmath>

namespace gibbs_lines {

PolymerEnvironment sample_environment(double gamma, int n_max, int K, std::uint64_t seed) {
    if (!(gamma > 0.0))
        throw std::invalid_argument("sample_environment: gamma must be positive");
    if (n_max < 1 || K < 1)
        throw std::invalid_argument("sample_environment: dimensions must be positive");
    PolymerEnvironment env;
    env.gamma = gamma;
    env.n_max = n_max;
    env.K = K;
    env.seed = seed;
    Rng rng(seed);
    env.log_d.assign(n_max, std::vector<double>(K));
    for (int i = 0; i < n_max; ++i)
        for (int j = 0; j < K; ++j) env.log_d[i][j] = -std::log(rng.gamma(gamma));
    return env;
}

PathPartitionCache::PathPartitionCache(const PolymerEnvironment& env) : env_(&env) {
    tables_.resize(env.K);
    for (int r = 1; r <= env.K; ++r) {
        auto& table = tables_[r - 1];
        table.assign(env.n_max, std::vector<double>(env.K - r + 1, kNegInf));
        for (int i = 1; i <= env.n_max; ++i) {
            for (int j = r; j <= env.K; ++j) {
                const double up = (j > r) ? table[i - 1][j - 1 - r] : kNegInf;
                const double left = (i > 1) ? table[i - 2][j - r] : kNegInf;
                double prev;
                if (i == 1 && j == r)
                    prev = 0.0;  // path start
                else
                    prev = log_add(up, left);
                table[i - 1][j - r] = env.log_weight(i, j) + prev;
            }
        }
    }
}

double PathPartitionCache::log_partition(int start_row, int n, int end_row) const {
    if (end_row < start_row)
        throw std::invalid_argument("log_partition: no up-right path (end row < start row)");
    return log_partition_or_neg_inf(start_row, n, end_row);
}

double PathPartitionCache::log_partition_or_neg_inf(int start_row, int n,
                                                    int end_row) const {
    if (start_row < 1 || end_row > env_->K || n < 1 || n > env_->n_max)
        throw std::out_of_range("log_partition: indices outside the environment");
    if (end_row < start_row) return kNegInf;
    return tables_[start_row - 1][n - 1][end_row - start_row];
}

namespace {

double tau_log_horizontal(const PolymerEnvironment& env, int n, int k) {
    double s = 0.0;
    for (int r = 1; r <= k; ++r)
        for (int i = 1; i <= n; ++i) s += env.log_weight(i, r);
    return s;
}

} // namespace

double tau_log(const PathPartitionCache& cache, int n, int k, int l) {
    const auto& env = cache.env();
    if (l < 1 || l > k || k > env.K)
        throw std::invalid_argument("tau_log: need 1 <= l <= k <= K");
    if (n < 0 || n > env.n_max) throw std::out_of_range("tau_log: n outside environment");
    if (n < l) return kNegInf;  // empty tuple collection, including l = k
    if (l == k) return tau_log_horizontal(env, n, k);

    // Determinant of [Z((1,i) -> (n, k-l+j))]_{i,j=1..l}. Entries span hundreds
    // of log units, so per-row and per-column maxima are pulled out first.
    std::vector<std::vector<double>> logm(l, std::vector<double>(l, kNegInf));
    for (int i = 1; i <= l; ++i)
        for (int j = 1; j <= l; ++j)
            logm[i - 1][j - 1] = cache.log_partition_or_neg_inf(i, n, k - l + j);

    double scale = 0.0;
    std::vector<double> row_max(l, kNegInf);
    for (int i = 0; i < l; ++i) {
        for (int j = 0; j < l; ++j) row_max[i] = std::max(row_max[i], logm[i][j]);
        if (row_max[i] == kNegInf)
            throw determinant_degeneracy("tau_log: zero row in path matrix");
        scale += row_max[i];
        for (int j = 0; j < l; ++j) logm[i][j] -= row_max[i];
    }
    std::vector<double> col_max(l, kNegInf);
    for (int j = 0; j < l; ++j) {
        for (int i = 0; i < l; ++i) col_max[j] = std::max(col_max[j], logm[i][j]);
        if (col_max[j] == kNegInf)
            throw determinant_degeneracy("tau_log: zero column in path matrix");
        scale += col_max[j];
    }
    std::vector<std::vector<double>> a(l, std::vector<double>(l));
    for (int i = 0; i < l; ++i)
        for (int j = 0; j < l; ++j) a[i][j] = std::exp(logm[i][j] - col_max[j]);

    const LogDet det = log_abs_det(std::move(a));
    if (det.sign <= 0)
        throw determinant_degeneracy("tau_log: non-positive determinant for tau(" +
                                     std::to_string(k) + "," + std::to_string(l) + ";" +
                                     std::to_string(n) + ")");
    return scale + det.log_abs;
}

double tau_log(const PolymerEnvironment& env, int n, int k, int l) {
    return tau_log(PathPartitionCache(env), n, k, l);
}

namespace {

struct EnumeratedPath {
    std::uint64_t mask;  // visited cells, bit (i-1)*K + (j-1)
    double log_weight;
};

void enumerate_paths(const PolymerEnvironment& env, int i, int j, int n, int end_row,
                     std::uint64_t mask, double logw, std::vector<EnumeratedPath>& out) {
    mask |= 1ull << ((i - 1) * env.K + (j - 1));
    logw += env.log_weight(i, j);
    if (i == n && j == end_row) {
        out.push_back({mask, logw});
        return;
    }
    if (i < n) enumerate_paths(env, i + 1, j, n, end_row, mask, logw, out);
    if (j < end_row) enumerate_paths(env, i, j + 1, n, end_row, mask, logw, out);
}

long binomial(int a, int b) {
    if (b < 0 || b > a) return 0;
    long r = 1;
    for (int i = 1; i <= b; ++i) r = r * (a - b + i) / i;
    return r;
}

void combine_tuples(const std::vector<std::vector<EnumeratedPath>>& per_path, size_t idx,
                    std::uint64_t mask, double logw, double& acc) {
    if (idx == per_path.size()) {
        acc = log_add(acc, logw);
        return;
    }
    for (const auto& p : per_path[idx]) {
        if ((p.mask & mask) != 0) continue;  // vertex intersection
        combine_tuples(per_path, idx + 1, mask | p.mask, logw + p.log_weight, acc);
    }
}

} // namespace

double tau_bruteforce(const PolymerEnvironment& env, int n, int k, int l,
                      long max_single_paths) {
    if (l < 1 || l > k || k > env.K)
        throw std::invalid_argument("tau_bruteforce: need 1 <= l <= k <= K");
    if (n < 1 || n > env.n_max)
        throw std::out_of_range("tau_bruteforce: n outside environment");
    if (n < l) return kNegInf;  // matches tau_log's convention at l = k too
    if (static_cast<long>(n) * env.K > 64)
        throw std::invalid_argument("tau_bruteforce: grid too large for vertex masks");
    for (int r = 1; r <= l; ++r) {
        const int end_row = k - l + r;
        if (end_row >= r && binomial((n - 1) + (end_row - r), n - 1) > max_single_paths)
            throw std::invalid_argument("tau_bruteforce: too many single paths");
    }
    std::vector<std::vector<EnumeratedPath>> per_path(l);
    for (int r = 1; r <= l; ++r) {
        const int end_row = k - l + r;
        if (end_row < r) return kNegInf;  // no path at all
        enumerate_paths(env, 1, r, n, end_row, 0ull, 0.0, per_path[r - 1]);
    }
    double acc = kNegInf;
    combine_tuples(per_path, 0, 0ull, 0.0, acc);
    return acc;
}

TriangularArray z_array(const PolymerEnvironment& env, int n, int K) {
    if (K < 1 || K > env.K) throw std::invalid_argument("z_array: K outside environment");
    if (n < 1 || n > env.n_max) throw std::out_of_range("z_array: n outside environment");
    const PathPartitionCache cache(env);
    TriangularArray arr;
    arr.K = K;
    arr.n = n;
    arr.rows.resize(K);
    for (int k = 1; k <= K; ++k) {
        arr.rows[k - 1].resize(k);
        for (int l = 1; l <= k; ++l) {
            if (n < l) continue;  // undefined
            const double num = tau_log(cache, n, k, l);
            const double den = (l == 1) ? 0.0 : tau_log(cache, n, k, l - 1);
            arr.rows[k - 1][l - 1] = num - den;
        }
    }
    return arr;
}

PolymerLineEnsemble build_line_ensemble(const PolymerEnvironment& env, int K, int n_lo,
                                        int n_hi, int max_curves) {
    if (K < 1 || K > env.K)
        throw std::invalid_argument("build_line_ensemble: K outside environment");
    if (n_lo < 1 || n_hi > env.n_max || n_lo > n_hi)
        throw std::invalid_argument("build_line_ensemble: bad n range");
    if (max_curves <= 0 || max_curves > K) max_curves = K;
    const PathPartitionCache cache(env);
    PolymerLineEnsemble ens;
    ens.gamma = env.gamma;
    ens.K = K;
    ens.built = max_curves;
    ens.n_lo = n_lo;
    ens.n_hi = n_hi;
    ens.values.assign(max_curves, std::vector<std::optional<double>>(n_hi - n_lo + 1));
    for (int n = n_lo; n <= n_hi; ++n) {
        double prev = 0.0;  // log tau_{K,0} = 0
        const int defined = std::min({n, K, max_curves});
        for (int i = 1; i <= defined; ++i) {
            const double cur = tau_log(cache, n, K, i);
            ens.values[i - 1][n - n_lo] = cur - prev;
            prev = cur;
        }
    }
    return ens;
}

} // namespace gibbs_lines
