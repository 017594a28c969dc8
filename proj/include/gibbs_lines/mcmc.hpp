#ifndef GIBBS_LINES_MCMC_HPP
#define GIBBS_LINES_MCMC_HPP

#include <functional>
#include <map>
#include <optional>

#include "gibbs_lines/bridge.hpp"
#include "gibbs_lines/ensemble.hpp"

namespace gibbs_lines {

struct ChainConfig {
    long sweeps = 0;
    long burn_in = 0;
    std::uint64_t seed = 0;
    enum class Scan { RandomSite, Systematic } scan = Scan::RandomSite;

    // Default burn-in: 20 sweeps per degree of freedom.
    static long default_burn_in(int curves, int interior_sites) {
        return 20L * curves * interior_sites;
    }

    void validate() const {
        if (burn_in < 0 || sweeps <= burn_in)
            throw std::invalid_argument("ChainConfig: need sweeps > burn_in >= 0");
    }
};

// The measure a chain targets: free lattice bridges pinned at the entrance and
// exit columns, reweighted by exp(boltzmann_log_weight). When
// entrance_edge_terms is set, the gap interaction attached to the first
// increment (pairing row k at the entrance column with row k+1 at the first
// interior column) is counted as well; that term belongs to the conditional
// law of a window cut out of a longer ensemble. It requires a gap-form H.
struct ChainTarget {
    Grid grid;
    LocalHamiltonian local;
    DiscreteIncrementLaw law;
    std::vector<double> entrance;  // x_j, one per curve
    std::vector<double> exit;      // y_j
    std::vector<double> upper;     // boundary row f over the grid
    std::vector<double> lower;     // boundary row g over the grid
    bool entrance_edge_terms = false;

    int num_curves() const { return static_cast<int>(entrance.size()); }
    // Exit displacement snapped to the proposal lattice.
    int exit_offset(int k) const;
    void validate() const;
};

// log R for the single-site update Q_k(i) -> Q_k(i) + direction * delta:
// the change of the free-walk increment log-density plus the change of every
// interaction term containing site (k, i); all other terms cancel.
double metropolis_log_ratio(const LineEnsemble& Q, int k, int i, int direction,
                            const LocalHamiltonian& H, const DiscreteIncrementLaw& law,
                            bool entrance_edge_terms = false);

// Continuous-density variant (H^RW evaluated at the real increments).
double metropolis_log_ratio(const LineEnsemble& Q, int k, int i, int direction,
                            double delta, const LocalHamiltonian& H,
                            const RWHamiltonian& rw);

// Full log target density (up to the normalizing constant): free increment
// log-probabilities plus the Boltzmann log weight (with edge terms when the
// target carries them). States are snapped to the entrance-anchored lattice.
double chain_log_target(const ChainTarget& target, const LineEnsemble& state);
double target_log_boltzmann(const ChainTarget& target, const LineEnsemble& state);

// Pointwise-lowest feasible lattice state; falls back to the best of 64 free
// bridge draws when the greedy trajectory has zero mass.
LineEnsemble minimal_initial_state(const ChainTarget& target);

struct AcceptanceStats {
    long proposed = 0;
    long accepted = 0;
    double rate() const { return proposed == 0 ? 0.0 : double(accepted) / double(proposed); }
};

struct ChainResult {
    LineEnsemble state;
    AcceptanceStats stats;
};

// Post-burn-in hook: 0-based post-burn-in sweep index and the lattice offsets
// per curve and site (endpoint columns included).
using SweepCollector =
    std::function<void(long sweep, const std::vector<std::vector<int>>& offsets)>;

// Runs sweeps x (curves x interior sites) single-site Metropolis proposals.
// Endpoints and boundary rows never change.
ChainResult run_chain(const LineEnsemble& Q0, const ChainTarget& target,
                      const ChainConfig& cfg, const SweepCollector& collector = nullptr);

// Two ensembles driven by one (site, direction, uniform) stream; the pair is
// ordered pointwise (upper >= lower) at construction.
struct CoupledPair {
    LineEnsemble upper;
    LineEnsemble lower;
    std::uint64_t shared_stream_seed = 0;

    CoupledPair(LineEnsemble up, LineEnsemble low, std::uint64_t seed);
};

struct CoupledRunReport {
    long updates;
    long ordering_violations;
    ChainResult upper;
    ChainResult lower;
};

// Lock-step run of both chains on identical randomness; after every update the
// pointwise ordering is checked at the touched site. With boundary data of the
// upper target dominating the lower, a Hamiltonian satisfying the A1
// monotonicity and a discretely convex -log p, the count stays at zero:
// dominating data produce the pointwise-dominating ensemble.
CoupledRunReport monotone_coupled_run(const CoupledPair& pair, const ChainTarget& upper,
                                      const ChainTarget& lower, const ChainConfig& cfg);

// Witness that the single-update acceptance-ratio inequality fails for a jump
// law whose -log p is not convex: a one-curve configuration with ordered
// neighbors, equal site value and an up proposal where log R_upper < log R_lower.
struct RInequalityViolation {
    int site_value_offset;
    int left_high, left_low;
    int right_high, right_low;
    double log_r_high, log_r_low;
};
std::optional<RInequalityViolation> find_r_inequality_violation(
    const DiscreteIncrementLaw& law);

struct LogZEstimate {
    double log_z = kNegInf;
    double stderr_ = kInf;  // delta-method standard error of log Z
    long samples = 0;
    bool all_impossible = false;
};

// log of the sample mean of exp(boltzmann_log_weight) over independent free
// bridge ensembles drawn from the target's law and endpoint data.
LogZEstimate estimate_log_Z(const ChainTarget& target, long samples, Rng& rng);

// Exhaustive enumeration of the chain's state space (small instances only).
struct GibbsEnumeration {
    std::vector<std::vector<std::vector<int>>> states;  // interior offsets [k][i-1]
    std::vector<double> probs;                          // target probabilities
    double log_Z = kNegInf;                             // log E_free[W]
    std::map<std::vector<int>, std::size_t> index;      // flattened offsets -> state id

    static std::vector<int> flatten(const std::vector<std::vector<int>>& offsets);
};
GibbsEnumeration enumerate_gibbs(const ChainTarget& target, long max_states = 2000000);

// Conditional refresh of the block [k1,k2] x [i1,i2] (interior sites) with all
// other values bit-identical; the block's entrance/exit columns and the rows
// k1-1, k2+1 act as the frozen boundary data. Exits are snapped to the
// per-curve proposal lattice internally.
LineEnsemble resample_interior(const LineEnsemble& L, int k1, int k2, int i1, int i2,
                               const LocalHamiltonian& H, const DiscreteIncrementLaw& law,
                               const ChainConfig& cfg, bool entrance_edge_terms = false);

LineEnsemble resample_interior(const LineEnsemble& L, int k1, int k2, int i1, int i2,
                               const HamiltonianPair& pair, double delta, double M,
                               const ChainConfig& cfg, bool entrance_edge_terms = false);

// Between/within replica variance ratio of the curve midpoints over
// independently seeded replicas (threshold 1.1 for "converged").
struct ConvergenceDiagnostic {
    double max_psrf = 0.0;
    std::vector<double> per_curve;
    int replicas = 0;
    long samples_per_replica = 0;
    bool converged = false;
};
ConvergenceDiagnostic gelman_rubin_midpoints(const ChainTarget& target,
                                             const ChainConfig& cfg, int replicas,
                                             double threshold = 1.1);

} // namespace gibbs_lines

#endif
