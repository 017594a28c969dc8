#include "gibbs_lines/bridge.hpp"

#include <algorithm>
#include <cmath>

#include "gibbs_lines/scaling.hpp"
#include "gibbs_lines/stats.hpp"

namespace gibbs_lines {

DiscreteIncrementLaw DiscreteIncrementLaw::from_log_weights(double delta, int jmin,
                                                            std::vector<double> log_weights) {
    if (!(delta > 0.0))
        throw std::invalid_argument("DiscreteIncrementLaw: delta must be positive");
    if (log_weights.empty())
        throw std::invalid_argument("DiscreteIncrementLaw: empty support");
    const double log_c = log_sum_exp(log_weights);
    if (log_c == kNegInf)
        throw std::invalid_argument("DiscreteIncrementLaw: all mass is zero");
    DiscreteIncrementLaw law;
    law.delta_ = delta;
    law.jmin_ = jmin;
    law.log_probs_ = std::move(log_weights);
    law.probs_.resize(law.log_probs_.size());
    for (size_t i = 0; i < law.log_probs_.size(); ++i) {
        law.log_probs_[i] -= log_c;
        law.probs_[i] = std::exp(law.log_probs_[i]);
    }
    return law;
}

double DiscreteIncrementLaw::min_convexity_margin() const {
    double margin = kInf;
    for (size_t i = 0; i + 2 < log_probs_.size(); ++i) {
        // second difference of -log p
        const double d2 = -log_probs_[i] + 2.0 * log_probs_[i + 1] - log_probs_[i + 2];
        margin = std::min(margin, d2);
    }
    return margin;
}

double DiscreteIncrementLaw::total_probability() const {
    double s = 0.0;
    for (double p : probs_) s += p;
    return s;
}

DiscreteIncrementLaw discretize_increment_law(const RWHamiltonian& H, double delta,
                                              double M) {
    if (!(delta > 0.0) || delta > 2.0 * M)
        throw std::invalid_argument("discretize_increment_law: empty support (need 0 < delta <= 2M)");
    if (!(M >= delta))
        throw std::invalid_argument("discretize_increment_law: need delta <= M");
    const int jmax = static_cast<int>(std::floor(M / delta + 1e-12));
    const int jmin = -jmax;
    std::vector<double> logw(jmax - jmin + 1);
    for (int j = jmin; j <= jmax; ++j) {
        const double h = H(j * delta);
        require_not_nan(h, "discretize_increment_law");
        logw[j - jmin] = -h;
    }
    return DiscreteIncrementLaw::from_log_weights(delta, jmin, std::move(logw));
}

LatticeDefaults default_lattice(double gamma) {
    const double sigma = std::sqrt(digamma_trigamma(gamma).trigamma);
    return {0.02 * sigma, 12.0 * sigma};
}

ConvolutionTable::ConvolutionTable(const DiscreteIncrementLaw& law, int max_steps)
    : jmin_(law.jmin()), jmax_(law.jmax()) {
    if (max_steps < 1)
        throw std::invalid_argument("ConvolutionTable: max_steps must be >= 1");
    tables_.reserve(max_steps);
    std::vector<double> p1(law.support_size());
    for (int j = jmin_; j <= jmax_; ++j) p1[j - jmin_] = law.prob(j);
    tables_.push_back(p1);
    for (int k = 2; k <= max_steps; ++k) {
        const auto& prev = tables_.back();
        std::vector<double> next(prev.size() + p1.size() - 1, 0.0);
        for (size_t a = 0; a < prev.size(); ++a) {
            if (prev[a] == 0.0) continue;
            for (size_t b = 0; b < p1.size(); ++b) next[a + b] += prev[a] * p1[b];
        }
        tables_.push_back(std::move(next));
    }
}

double ConvolutionTable::prob(int k, int offset) const {
    if (k < 1 || k > max_steps())
        throw std::out_of_range("ConvolutionTable::prob: step count out of range");
    const auto& t = tables_[k - 1];
    const long idx = static_cast<long>(offset) - static_cast<long>(k) * jmin_;
    if (idx < 0 || idx >= static_cast<long>(t.size())) return 0.0;
    return t[idx];
}

BridgeSampler::BridgeSampler(DiscreteIncrementLaw law, int steps, double start, double end)
    : law_(std::move(law)), steps_(steps), start_(start) {
    if (steps < 1) throw std::invalid_argument("BridgeSampler: steps must be >= 1");
    const double raw = (end - start) / law_.delta();
    end_offset_ = static_cast<int>(std::lround(raw));
    if (std::abs(raw - end_offset_) > 1e-9)
        throw std::invalid_argument("BridgeSampler: (end - start)/delta is not an integer");
    if (end_offset_ < static_cast<long>(steps) * law_.jmin() ||
        end_offset_ > static_cast<long>(steps) * law_.jmax())
        throw std::invalid_argument("BridgeSampler: endpoint outside the reachable cone");

    lo_.resize(steps_ + 1);
    hi_.resize(steps_ + 1);
    h_.resize(steps_ + 1);
    for (int m = 0; m <= steps_; ++m) {
        lo_[m] = std::max(m * law_.jmin(), end_offset_ - (steps_ - m) * law_.jmax());
        hi_[m] = std::min(m * law_.jmax(), end_offset_ - (steps_ - m) * law_.jmin());
        h_[m].assign(static_cast<size_t>(hi_[m] - lo_[m] + 1), kNegInf);
    }
    h_[steps_][0] = 0.0;  // lo_[steps] == hi_[steps] == end_offset_

    std::vector<double> terms;
    for (int m = steps_ - 1; m >= 0; --m) {
        for (int v = lo_[m]; v <= hi_[m]; ++v) {
            terms.clear();
            for (int j = law_.jmin(); j <= law_.jmax(); ++j) {
                const int w = v + j;
                if (w < lo_[m + 1] || w > hi_[m + 1]) continue;
                const double t = law_.log_prob(j) + h_[m + 1][w - lo_[m + 1]];
                if (t != kNegInf) terms.push_back(t);
            }
            h_[m][v - lo_[m]] = terms.empty() ? kNegInf : log_sum_exp(terms);
        }
    }
    if (log_h(0, 0) == kNegInf)
        throw std::invalid_argument("BridgeSampler: impossible bridge (endpoint unreachable)");
}

double BridgeSampler::log_h(int m, int v) const {
    if (m < 0 || m > steps_) throw std::out_of_range("BridgeSampler::log_h: bad step");
    if (v < lo_[m] || v > hi_[m]) return kNegInf;
    return h_[m][v - lo_[m]];
}

std::vector<int> BridgeSampler::sample_offsets(Rng& rng) const {
    std::vector<int> path(steps_ + 1);
    path[0] = 0;
    int v = 0;
    for (int m = 0; m < steps_; ++m) {
        const double hv = log_h(m, v);
        const double u = rng.uniform();
        double acc = 0.0;
        int chosen = 0;
        bool found = false;
        int last_positive = 0;
        bool any = false;
        for (int j = law_.jmin(); j <= law_.jmax(); ++j) {
            const double t = law_.log_prob(j) + log_h(m + 1, v + j);
            if (t == kNegInf) continue;
            const double p = std::exp(t - hv);
            last_positive = j;
            any = true;
            acc += p;
            if (u <= acc) {
                chosen = j;
                found = true;
                break;
            }
        }
        if (!found) {
            if (!any) throw std::logic_error("BridgeSampler: dead end while sampling");
            chosen = last_positive;  // float slack at the top of the CDF
        }
        v += chosen;
        path[m + 1] = v;
    }
    return path;
}

std::vector<double> BridgeSampler::sample(Rng& rng) const {
    const auto offs = sample_offsets(rng);
    std::vector<double> vals(offs.size());
    for (size_t i = 0; i < offs.size(); ++i) vals[i] = start_ + offs[i] * law_.delta();
    return vals;
}

std::vector<double> BridgeSampler::exact_marginal(int m) const {
    if (m < 0 || m > steps_) throw std::out_of_range("BridgeSampler::exact_marginal");
    std::vector<double> alpha(1, 1.0);
    int lo = 0;
    for (int step = 0; step < m; ++step) {
        std::vector<double> next(static_cast<size_t>(hi_[step + 1] - lo_[step + 1] + 1), 0.0);
        for (int v = std::max(lo, lo_[step]); v <= hi_[step]; ++v) {
            const size_t vi = static_cast<size_t>(v - lo);
            if (vi >= alpha.size() || alpha[vi] == 0.0) continue;
            const double hv = log_h(step, v);
            for (int j = law_.jmin(); j <= law_.jmax(); ++j) {
                const double t = law_.log_prob(j) + log_h(step + 1, v + j);
                if (t == kNegInf) continue;
                next[static_cast<size_t>(v + j - lo_[step + 1])] += alpha[vi] * std::exp(t - hv);
            }
        }
        alpha = std::move(next);
        lo = lo_[step + 1];
    }
    return alpha;
}

FreeBridgeSampler::FreeBridgeSampler(DiscreteIncrementLaw law, int steps, double start,
                                     double end)
    : law_(std::move(law)), conv_(law_, std::max(1, steps - 1)), steps_(steps),
      start_(start) {
    if (steps < 1) throw std::invalid_argument("FreeBridgeSampler: steps must be >= 1");
    const double raw = (end - start) / law_.delta();
    end_offset_ = static_cast<int>(std::lround(raw));
    if (std::abs(raw - end_offset_) > 1e-9)
        throw std::invalid_argument("FreeBridgeSampler: (end - start)/delta is not an integer");
    // reachability probe; underflowed linear tables fall back to the h-transform check
    if (end_offset_ < static_cast<long>(steps) * law_.jmin() ||
        end_offset_ > static_cast<long>(steps) * law_.jmax())
        throw std::invalid_argument("FreeBridgeSampler: endpoint outside the reachable cone");
    if (steps == 1 && law_.log_prob(end_offset_) == kNegInf)
        throw std::invalid_argument("FreeBridgeSampler: impossible one-step bridge");
}

std::vector<int> FreeBridgeSampler::sample_offsets(Rng& rng) const {
    std::vector<int> path(static_cast<size_t>(steps_) + 1, 0);
    path[steps_] = end_offset_;
    int v = 0;
    for (int m = 0; m + 1 < steps_; ++m) {
        const int remaining = steps_ - m - 1;
        double total = 0.0;
        for (int j = law_.jmin(); j <= law_.jmax(); ++j)
            total += law_.prob(j) * conv_.prob(remaining, end_offset_ - v - j);
        if (!(total > 0.0))
            throw std::runtime_error("FreeBridgeSampler: dead end (underflow or hole)");
        const double target = rng.uniform() * total;
        double acc = 0.0;
        int chosen = law_.jmax();
        for (int j = law_.jmin(); j <= law_.jmax(); ++j) {
            acc += law_.prob(j) * conv_.prob(remaining, end_offset_ - v - j);
            if (acc >= target) {
                chosen = j;
                break;
            }
        }
        v += chosen;
        path[m + 1] = v;
    }
    return path;
}

std::vector<double> FreeBridgeSampler::sample(Rng& rng) const {
    const auto offs = sample_offsets(rng);
    std::vector<double> vals(offs.size());
    for (size_t i = 0; i < offs.size(); ++i) vals[i] = start_ + offs[i] * law_.delta();
    return vals;
}

std::vector<double> sample_brownian_bridge(double L, double z, int grid_points, Rng& rng) {
    if (grid_points < 2)
        throw std::invalid_argument("sample_brownian_bridge: need >= 2 grid points");
    if (!(L > 0.0)) throw std::invalid_argument("sample_brownian_bridge: L must be positive");
    const int m = grid_points;
    std::vector<double> b(m);
    b[0] = 0.0;
    b[m - 1] = z;
    for (int i = 0; i + 1 < m - 1; ++i) {
        const double t = L * i / (m - 1);
        const double tn = L * (i + 1) / (m - 1);
        const double dt = tn - t;
        const double remain = L - t;
        const double mean = b[i] + (z - b[i]) * dt / remain;
        const double var = dt * (L - tn) / remain;
        b[i + 1] = mean + std::sqrt(var) * rng.normal();
    }
    return b;
}

namespace {

// Preorder list of bisection nodes over step indices [0, steps]; each node
// fixes the midpoint of its segment. All bridges of the same length share it.
struct BisectNode {
    int lo, hi, mid;
};

void collect_nodes(int lo, int hi, std::vector<BisectNode>& out) {
    if (hi - lo <= 1) return;
    const int mid = lo + (hi - lo) / 2;
    out.push_back({lo, hi, mid});
    collect_nodes(lo, mid, out);
    collect_nodes(mid, hi, out);
}

// CDF inversion for the conditional midpoint law of a lattice bridge segment:
// weights w(v) = P_m(v - v0) * P_{n-m}(v1 - v).
int midpoint_quantile(const ConvolutionTable& conv, int seg_steps, int mid_steps, int v0,
                      int v1, double u) {
    const int lo = std::max(v0 + mid_steps * conv.jmin(),
                            v1 - (seg_steps - mid_steps) * conv.jmax());
    const int hi = std::min(v0 + mid_steps * conv.jmax(),
                            v1 - (seg_steps - mid_steps) * conv.jmin());
    double total = 0.0;
    for (int v = lo; v <= hi; ++v)
        total += conv.prob(mid_steps, v - v0) * conv.prob(seg_steps - mid_steps, v1 - v);
    if (!(total > 0.0))
        throw std::runtime_error("midpoint_quantile: unreachable segment endpoint");
    const double target = u * total;
    double acc = 0.0;
    for (int v = lo; v <= hi; ++v) {
        acc += conv.prob(mid_steps, v - v0) * conv.prob(seg_steps - mid_steps, v1 - v);
        if (acc >= target) return v;
    }
    return hi;
}

} // namespace

std::vector<std::vector<double>> quantile_couple_bridges(const DiscreteIncrementLaw& law,
                                                         int steps,
                                                         const std::vector<double>& endpoints,
                                                         Rng& rng) {
    if (steps < 1) throw std::invalid_argument("quantile_couple_bridges: steps must be >= 1");
    const ConvolutionTable conv(law, steps);
    std::vector<BisectNode> nodes;
    collect_nodes(0, steps, nodes);
    std::vector<double> uniforms(nodes.size());
    for (auto& u : uniforms) u = rng.uniform();

    std::vector<std::vector<double>> paths;
    paths.reserve(endpoints.size());
    for (double z : endpoints) {
        const double raw = z / law.delta();
        const int vend = static_cast<int>(std::lround(raw));
        if (std::abs(raw - vend) > 1e-9)
            throw std::invalid_argument("quantile_couple_bridges: endpoint not on lattice");
        if (conv.prob(steps, vend) <= 0.0)
            throw std::invalid_argument("quantile_couple_bridges: endpoint unreachable");
        std::vector<int> off(static_cast<size_t>(steps) + 1, 0);
        off[steps] = vend;
        for (size_t n = 0; n < nodes.size(); ++n) {
            const auto& nd = nodes[n];
            off[nd.mid] = midpoint_quantile(conv, nd.hi - nd.lo, nd.mid - nd.lo, off[nd.lo],
                                            off[nd.hi], uniforms[n]);
        }
        std::vector<double> vals(off.size());
        for (size_t i = 0; i < off.size(); ++i) vals[i] = off[i] * law.delta();
        paths.push_back(std::move(vals));
    }
    return paths;
}

CoupledRwBrownian sample_coupled_rw_brownian(const DiscreteIncrementLaw& law,
                                             const ConvolutionTable& conv, int steps,
                                             double L, double z, Rng& rng) {
    if (steps < 1)
        throw std::invalid_argument("sample_coupled_rw_brownian: steps must be >= 1");
    const double raw = z / law.delta();
    const int vend = static_cast<int>(std::lround(raw));
    if (std::abs(raw - vend) > 1e-9)
        throw std::invalid_argument("sample_coupled_rw_brownian: endpoint not on lattice");
    if (conv.prob(steps, vend) <= 0.0)
        throw std::invalid_argument("sample_coupled_rw_brownian: endpoint unreachable");

    std::vector<BisectNode> nodes;
    collect_nodes(0, steps, nodes);

    CoupledRwBrownian out;
    out.times.resize(static_cast<size_t>(steps) + 1);
    for (int k = 0; k <= steps; ++k) out.times[k] = L * k / steps;
    std::vector<int> off(static_cast<size_t>(steps) + 1, 0);
    off[steps] = vend;
    out.brownian.assign(static_cast<size_t>(steps) + 1, 0.0);

    for (const auto& nd : nodes) {
        const double u = rng.uniform();
        off[nd.mid] = midpoint_quantile(conv, nd.hi - nd.lo, nd.mid - nd.lo, off[nd.lo],
                                        off[nd.hi], u);
        const double tl = out.times[nd.lo], tm = out.times[nd.mid], th = out.times[nd.hi];
        const double mean =
            out.brownian[nd.lo] + (out.brownian[nd.hi] - out.brownian[nd.lo]) * (tm - tl) / (th - tl);
        const double var = (tm - tl) * (th - tm) / (th - tl);
        out.brownian[nd.mid] = mean + std::sqrt(var) * normal_quantile(u);
    }
    out.walk.resize(off.size());
    for (size_t i = 0; i < off.size(); ++i) out.walk[i] = off[i] * law.delta();
    return out;
}

SupTailReport bridge_sup_tail_check(const DiscreteIncrementLaw& law, int steps, double L,
                                    double z, const std::vector<double>& s_values,
                                    long samples, Rng& rng) {
    for (double s : s_values)
        if (s < 1.0)
            throw std::invalid_argument("bridge_sup_tail_check: requires s >= 1");
    const BridgeSampler sampler(law, steps, 0.0, z);
    const double zl = sampler.end_lattice();
    std::vector<long> exceed(s_values.size(), 0);
    for (long n = 0; n < samples; ++n) {
        const auto path = sampler.sample(rng);
        double sup = kNegInf;
        for (int k = 0; k <= steps; ++k) {
            const double t = L * k / steps;
            sup = std::max(sup, path[k] - t * zl / L);
        }
        for (size_t si = 0; si < s_values.size(); ++si)
            if (sup > s_values[si]) ++exceed[si];
    }
    SupTailReport report;
    report.all_pass = true;
    for (size_t si = 0; si < s_values.size(); ++si) {
        SupTailRow row;
        row.s = s_values[si];
        row.empirical = static_cast<double>(exceed[si]) / static_cast<double>(samples);
        row.bound = std::exp(-row.s * row.s / L);
        row.stderr_ =
            std::sqrt(std::max(row.empirical * (1.0 - row.empirical), 1e-12) / samples);
        row.pass = row.empirical <= row.bound + 3.0 * row.stderr_;
        report.all_pass = report.all_pass && row.pass;
        report.rows.push_back(row);
    }
    return report;
}

} // namespace gibbs_lines
