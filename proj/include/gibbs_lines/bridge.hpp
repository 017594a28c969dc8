#ifndef GIBBS_LINES_BRIDGE_HPP
#define GIBBS_LINES_BRIDGE_HPP

#include <vector>

#include "gibbs_lines/hamiltonian.hpp"
#include "gibbs_lines/rng.hpp"

namespace gibbs_lines {

// Jump law on the lattice delta * {jmin..jmax}, stored as log-probabilities
// normalized over the (truncated) support.
class DiscreteIncrementLaw {
public:
    static DiscreteIncrementLaw from_log_weights(double delta, int jmin,
                                                 std::vector<double> log_weights);

    double delta() const { return delta_; }
    int jmin() const { return jmin_; }
    int jmax() const { return jmin_ + static_cast<int>(log_probs_.size()) - 1; }
    int support_size() const { return static_cast<int>(log_probs_.size()); }

    double log_prob(int j) const {
        if (j < jmin_ || j > jmax()) return kNegInf;
        return log_probs_[j - jmin_];
    }
    double prob(int j) const {
        if (j < jmin_ || j > jmax()) return 0.0;
        return probs_[j - jmin_];
    }

    // Smallest second difference of -log p over the interior of the support;
    // >= 0 (up to noise) for laws built from a convex H^RW.
    double min_convexity_margin() const;

    double total_probability() const;  // sum of exp(log_probs), 1 by construction

private:
    double delta_ = 0.0;
    int jmin_ = 0;
    std::vector<double> log_probs_;
    std::vector<double> probs_;
};

// log_probs[k] = -H(k delta) - log C with C the normalizing sum over
// delta*Z intersected with [-M, M].
DiscreteIncrementLaw discretize_increment_law(const RWHamiltonian& H, double delta,
                                              double M);

// Lattice spacing and truncation radius used for the log-gamma laws unless
// overridden: delta = 0.02 sigma, M = 12 sigma with sigma^2 = trigamma(gamma).
struct LatticeDefaults {
    double delta;
    double M;
};
LatticeDefaults default_lattice(double gamma);

// k-fold convolutions of the jump law, linear domain; table k is supported
// on offsets [k*jmin, k*jmax] and sums to 1.
class ConvolutionTable {
public:
    ConvolutionTable(const DiscreteIncrementLaw& law, int max_steps);
    double prob(int k, int offset) const;
    int max_steps() const { return static_cast<int>(tables_.size()); }
    int jmin() const { return jmin_; }
    int jmax() const { return jmax_; }

private:
    int jmin_, jmax_;
    std::vector<std::vector<double>> tables_;
};

// Exact sampler for the law of a lattice random walk bridge, realized by the
// backward Doob h-transform recursion
//   h_m(v) = log sum_j exp(log p_j + h_{m+1}(v + j)),   h_n(end) = 0,
// with forward kernel P(v -> v+j) proportional to exp(log p_j + h_{m+1}(v+j)).
class BridgeSampler {
public:
    BridgeSampler(DiscreteIncrementLaw law, int steps, double start, double end);

    int steps() const { return steps_; }
    double start() const { return start_; }
    // End snapped to the start-anchored lattice; equals `end` when on it.
    double end_lattice() const { return start_ + end_offset_ * law_.delta(); }
    int end_offset() const { return end_offset_; }
    const DiscreteIncrementLaw& law() const { return law_; }

    // log h_m(v) for offset v from start; -inf off the reachable range.
    double log_h(int m, int v) const;
    int range_lo(int m) const { return lo_[m]; }
    int range_hi(int m) const { return hi_[m]; }

    std::vector<int> sample_offsets(Rng& rng) const;
    std::vector<double> sample(Rng& rng) const;  // lattice values, length steps+1

    // Exact occupation probabilities of the offsets at step m.
    std::vector<double> exact_marginal(int m) const;

private:
    DiscreteIncrementLaw law_;
    int steps_;
    double start_;
    int end_offset_;
    std::vector<int> lo_, hi_;
    std::vector<std::vector<double>> h_;
};

inline BridgeSampler build_bridge_sampler(DiscreteIncrementLaw law, int steps,
                                          double start, double end) {
    return BridgeSampler(std::move(law), steps, start, end);
}

inline std::vector<double> sample_bridge(const BridgeSampler& sampler, Rng& rng) {
    return sampler.sample(rng);
}

// Free lattice bridge sampler driven by the convolution factorization
// P(S_{m+1} = v + j | S_m = v, S_n = vend) ~ p(j) P_{n-m-1}(vend - v - j);
// same law as the h-transform sampler but with O(n^2 S^2) setup in linear
// arithmetic, which makes long bridges affordable.
class FreeBridgeSampler {
public:
    FreeBridgeSampler(DiscreteIncrementLaw law, int steps, double start, double end);
    std::vector<int> sample_offsets(Rng& rng) const;
    std::vector<double> sample(Rng& rng) const;
    int end_offset() const { return end_offset_; }
    double start() const { return start_; }

private:
    DiscreteIncrementLaw law_;
    ConvolutionTable conv_;
    int steps_;
    double start_;
    int end_offset_;
};

// Gaussian bridge on m grid points over [0, L] with B(0) = 0, B(L) = z,
// built by the sequential conditional (Markov) construction.
std::vector<double> sample_brownian_bridge(double L, double z, int grid_points, Rng& rng);

// Samples one bridge per endpoint, all driven by the same uniforms through
// the recursive midpoint construction: the midpoint of each segment is the
// quantile transform of a shared uniform under that bridge's exact midpoint
// law; odd segment lengths split as (floor(n/2), n - floor(n/2)). Every
// marginal is the exact bridge law.
std::vector<std::vector<double>> quantile_couple_bridges(
    const DiscreteIncrementLaw& law, int steps, const std::vector<double>& endpoints,
    Rng& rng);

// One lattice bridge 0 -> z in `steps` steps over [0, L], and a Brownian
// bridge B(0) = B(L) = 0 evaluated at the same times, coupled through shared
// uniforms at the dyadic midpoints.
struct CoupledRwBrownian {
    std::vector<double> times;
    std::vector<double> walk;      // lattice bridge values
    std::vector<double> brownian;  // B_L values, endpoints 0
};
CoupledRwBrownian sample_coupled_rw_brownian(const DiscreteIncrementLaw& law,
                                             const ConvolutionTable& conv, int steps,
                                             double L, double z, Rng& rng);

// Monte Carlo check of the bridge sup-tail bound: empirical
// P(sup_t (S(t) - t z / L) > s) against exp(-s^2 / L) for each s.
struct SupTailRow {
    double s;
    double empirical;
    double bound;
    double stderr_;
    bool pass;
};
struct SupTailReport {
    std::vector<SupTailRow> rows;
    bool all_pass;
};
SupTailReport bridge_sup_tail_check(const DiscreteIncrementLaw& law, int steps, double L,
                                    double z, const std::vector<double>& s_values,
                                    long samples, Rng& rng);

} // namespace gibbs_lines

#endif
