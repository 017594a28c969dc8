#include "gibbs_lines/scaling.hpp"

#include <algorithm>
#include <cmath>

namespace gibbs_lines {

DigammaTrigamma digamma_trigamma(double gamma) {
    if (!(gamma > 0.0))
        throw std::invalid_argument("digamma_trigamma: argument must be positive");
    double x = gamma;
    double dig = 0.0, tri = 0.0;
    while (x < 12.0) {
        dig -= 1.0 / x;
        tri += 1.0 / (x * x);
        x += 1.0;
    }
    const double inv = 1.0 / x;
    const double inv2 = inv * inv;
    // Bernoulli tails; the first omitted terms are below 1e-16 at x >= 12.
    const double dig_series =
        inv2 * (1.0 / 12.0 -
                inv2 * (1.0 / 120.0 -
                        inv2 * (1.0 / 252.0 -
                                inv2 * (1.0 / 240.0 -
                                        inv2 * (1.0 / 132.0 -
                                                inv2 * (691.0 / 32760.0 - inv2 / 12.0))))));
    dig += std::log(x) - 0.5 * inv - dig_series;
    const double tri_series =
        inv * inv2 *
        (1.0 / 6.0 -
         inv2 * (1.0 / 30.0 -
                 inv2 * (1.0 / 42.0 -
                         inv2 * (1.0 / 30.0 -
                                 inv2 * (5.0 / 66.0 -
                                         inv2 * (691.0 / 2730.0 - inv2 * 7.0 / 6.0))))));
    tri += inv + 0.5 * inv2 + tri_series;
    return {dig, tri};
}

double tilt_shift_q(int N) {
    const double root = std::sqrt(static_cast<double>(N));
    return std::log(root - 1.0) - std::log(2.0) - digamma(root);
}

HamiltonianPair scaled_hamiltonians(int N) {
    if (N < 4) throw std::invalid_argument("scaled_hamiltonians: need N >= 4");
    const double root = std::sqrt(static_cast<double>(N));
    return HamiltonianPair{
        LocalHamiltonian::exp_gap(2.0 / (root - 1.0), 1),
        RWHamiltonian::log_gamma(root, std::log(root - 1.0) - std::log(2.0))};
}

double ScaledEnsemble::value(int i, int site) const {
    if (!is_defined(i, site))
        throw std::out_of_range("ScaledEnsemble::value: undefined entry");
    return values.at(i - 1).at(static_cast<size_t>(site));
}

ScaledEnsemble scale_ensemble(const PolymerLineEnsemble& L, int N, double t, int j_lo,
                              int j_hi) {
    if (N < 16) throw std::invalid_argument("scale_ensemble: need N >= 16");
    const double root = std::sqrt(static_cast<double>(N));
    const double kt = N * t / 8.0;
    const int K = static_cast<int>(std::lround(kt));
    if (std::abs(kt - K) > 1e-9 || K < 1)
        throw std::invalid_argument("scale_ensemble: N t / 8 must be a positive integer");
    if (std::abs(L.gamma - root) > 1e-9 * root)
        throw std::invalid_argument("scale_ensemble: ensemble was not built at gamma = sqrt(N)");
    if (L.K != K)
        throw std::invalid_argument("scale_ensemble: ensemble has K != N t / 8 curves");
    const int avail = std::min(K, L.built);
    if (j_lo > j_hi) throw std::invalid_argument("scale_ensemble: empty site range");
    // n(x) = K + j must stay inside the built range; n >= 1 required.
    if (K + j_lo < 1 || K + j_lo < L.n_lo || K + j_hi > L.n_hi)
        throw std::out_of_range("scale_ensemble: requested window leaves the defined region");

    ScaledEnsemble out{.N = N,
                       .t = t,
                       .grid = Grid(j_lo * scaled_mesh(N), scaled_mesh(N), j_hi - j_lo + 1),
                       .num_curves = K,
                       .center_slope = std::log(2.0) - std::log(root - 1.0),
                       .center_const = std::log(root) - std::log(2.0),
                       .values = {},
                       .defined = {}};
    out.num_curves = avail;
    out.values.assign(avail, std::vector<double>(out.grid.count(), 0.0));
    out.defined.assign(avail, std::vector<unsigned char>(out.grid.count(), 0));
    for (int j = j_lo; j <= j_hi; ++j) {
        const int n = K + j;
        const int site = j - j_lo;
        const double centering = -(2.0 * K + j) * out.center_slope + out.center_const;
        const int defined_curves = std::min(n, avail);
        for (int i = 1; i <= defined_curves; ++i) {
            const auto& v = L.value(i, n);
            if (!v.has_value())
                throw std::logic_error("scale_ensemble: missing value inside defined region");
            out.values[i - 1][site] = *v + centering;
            out.defined[i - 1][site] = 1;
        }
    }
    return out;
}

std::vector<std::vector<double>> curves_on_window(const ScaledEnsemble& ens, int k,
                                                  int site_lo, int site_hi) {
    if (k < 1 || k > ens.num_curves)
        throw std::invalid_argument("curves_on_window: bad curve count");
    if (site_lo > site_hi || site_lo < 0 || site_hi >= ens.grid.count())
        throw std::out_of_range("curves_on_window: bad site range");
    std::vector<std::vector<double>> out(k);
    for (int i = 1; i <= k; ++i) {
        out[i - 1].reserve(site_hi - site_lo + 1);
        for (int s = site_lo; s <= site_hi; ++s) out[i - 1].push_back(ens.value(i, s));
    }
    return out;
}

TiltParameters tilt_parameters(int N) {
    if (N < 16) throw std::invalid_argument("tilt_parameters: need N >= 16");
    const double root = std::sqrt(static_cast<double>(N));
    const double target = digamma(root) + tilt_shift_q(N);  // = log(sqrt(N)-1) - log 2
    double lo = root / 4.0, hi = root;
    double flo = digamma(lo) - target, fhi = digamma(hi) - target;
    if (flo > 0.0 || fhi < 0.0)
        throw std::runtime_error("tilt_parameters: bracket failure, residuals " +
                                 std::to_string(flo) + " / " + std::to_string(fhi));
    double xi = 0.5 * (lo + hi);
    for (int iter = 0; iter < 200; ++iter) {
        const auto [dig, tri] = digamma_trigamma(xi);
        const double f = dig - target;
        if (std::abs(f) <= 1e-13) break;
        if (f > 0.0)
            hi = xi;
        else
            lo = xi;
        double next = xi - f / tri;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        xi = next;
    }
    const double residual = std::abs(digamma(xi) - target);
    if (residual > 1e-10)
        throw std::runtime_error("tilt_parameters: Newton failed, residual " +
                                 std::to_string(residual));
    const double mu = std::sqrt(trigamma(xi) / trigamma(root));
    return {xi, mu, residual};
}

namespace {

// First three cumulants of a density given by an unnormalized log-density.
void cumulants_of(const std::function<double(double)>& log_density, double out[3]) {
    const auto dens = [&](double a) { return std::exp(log_density(a)); };
    const double mass = integrate_line(dens, 1e-13);
    const double mean =
        integrate_line([&](double a) { return a * dens(a); }, 1e-13) / mass;
    const double var = integrate_line(
                           [&](double a) {
                               const double d = a - mean;
                               return d * d * dens(a);
                           },
                           1e-13) /
                       mass;
    const double third = integrate_line(
                             [&](double a) {
                                 const double d = a - mean;
                                 return d * d * d * dens(a);
                             },
                             1e-13) /
                         mass;
    out[0] = mean;
    out[1] = var;
    out[2] = third;
}

} // namespace

TiltCumulants tilt_identity_cumulants(int N) {
    const double root = std::sqrt(static_cast<double>(N));
    const auto tp = tilt_parameters(N);
    const double m = digamma(root);
    const double sigma = std::sqrt(trigamma(root));
    const double q = tilt_shift_q(N);
    const double m_xi = digamma(tp.xi);
    const double lg_root = std::lgamma(root);
    const double lg_xi = std::lgamma(tp.xi);
    const double tilt = (root - tp.xi) * sigma;

    // A = (Y(sqrt N) - m - q)/sigma with Y the log of a Gamma(gamma) variable;
    // the exponential tilt exp(-tilt * a) of its law should match
    // B = mu (Y(xi) - m(xi))/sigma(xi) = (Y(xi) - m(xi))/sigma.
    const auto log_f_tilted = [=](double a) {
        const double y = sigma * a + m + q;
        return -tilt * a + root * y - std::exp(y) - lg_root;
    };
    const auto log_f_ref = [=](double a) {
        const double y = sigma * a + m_xi;
        return tp.xi * y - std::exp(y) - lg_xi;
    };
    TiltCumulants out{};
    cumulants_of(log_f_tilted, out.tilted);
    cumulants_of(log_f_ref, out.reference);
    out.max_abs_diff = 0.0;
    for (int i = 0; i < 3; ++i)
        out.max_abs_diff = std::max(out.max_abs_diff, std::abs(out.tilted[i] - out.reference[i]));
    return out;
}

StationarityTable stationarity_statistics(const std::vector<std::vector<double>>& replicas,
                                          const std::vector<double>& x_sites,
                                          double p_threshold) {
    if (x_sites.size() < 2)
        throw std::invalid_argument("stationarity_statistics: need >= 2 sites");
    if (replicas.size() < 100)
        throw std::invalid_argument("stationarity_statistics: need >= 100 replicas");
    const size_t sites = x_sites.size();
    std::vector<std::vector<double>> shifted(sites);
    for (const auto& row : replicas) {
        if (row.size() != sites)
            throw std::invalid_argument("stationarity_statistics: ragged replica row");
        for (size_t s = 0; s < sites; ++s)
            shifted[s].push_back(row[s] + 0.5 * x_sites[s] * x_sites[s]);
    }
    StationarityTable table;
    table.x = x_sites;
    for (size_t s = 0; s < sites; ++s) {
        const auto mv = mean_var(shifted[s]);
        table.mean.push_back(mv.mean);
        table.variance.push_back(mv.var);
    }
    const double n_pairs = static_cast<double>(sites * (sites - 1) / 2);
    table.min_adjusted_p = 1.0;
    for (size_t a = 0; a < sites; ++a) {
        for (size_t b = a + 1; b < sites; ++b) {
            const auto ks = ks_two_sample(shifted[a], shifted[b]);
            const double adj = std::min(1.0, ks.p_value * n_pairs);
            table.pairs.push_back({static_cast<int>(a), static_cast<int>(b), ks.statistic,
                                   ks.p_value, adj});
            table.min_adjusted_p = std::min(table.min_adjusted_p, adj);
        }
    }
    table.not_rejected = table.min_adjusted_p > p_threshold;
    return table;
}

} // namespace gibbs_lines
