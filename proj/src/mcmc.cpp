#include "gibbs_lines/mcmc.hpp"

#include <algorithm>
#include <cmath>

#include "gibbs_lines/stats.hpp"

namespace gibbs_lines {

int ChainTarget::exit_offset(int k) const {
    return static_cast<int>(std::lround((exit.at(k - 1) - entrance.at(k - 1)) / law.delta()));
}

void ChainTarget::validate() const {
    const auto n = static_cast<size_t>(grid.count());
    if (grid.count() < 2) throw std::invalid_argument("ChainTarget: need >= 2 grid sites");
    if (entrance.empty() || entrance.size() != exit.size())
        throw std::invalid_argument("ChainTarget: entrance/exit size mismatch");
    if (upper.size() != n || lower.size() != n)
        throw std::invalid_argument("ChainTarget: boundary rows must cover the grid");
    for (double v : entrance)
        if (!std::isfinite(v)) throw std::invalid_argument("ChainTarget: entrance not finite");
    for (double v : exit)
        if (!std::isfinite(v)) throw std::invalid_argument("ChainTarget: exit not finite");
    if (entrance_edge_terms &&
        !(local.is_gap_form() && (local.kind() == LocalHamiltonian::Kind::Zero || local.shift() == 1)))
        throw std::invalid_argument(
            "ChainTarget: entrance edge terms need a time-shifted gap-form Hamiltonian");
    const int steps = grid.count() - 1;
    for (int k = 1; k <= num_curves(); ++k) {
        const int v = exit_offset(k);
        if (v < steps * law.jmin() || v > steps * law.jmax())
            throw std::invalid_argument("ChainTarget: exit outside the reachable cone");
    }
}

namespace {

// Interior state of a chain: integer lattice offsets per curve and site,
// anchored at the entrance values.
struct State {
    const ChainTarget* t;
    std::vector<std::vector<int>> off;  // [k-1][i], endpoints included

    double value(int row, int i) const {
        const int K = t->num_curves();
        if (row == 0) return t->upper[i];
        if (row == K + 1) return t->lower[i];
        return t->entrance[row - 1] + off[row - 1][i] * t->law.delta();
    }

    LineEnsemble to_ensemble() const {
        std::vector<std::vector<double>> curves(t->num_curves());
        for (int k = 1; k <= t->num_curves(); ++k) {
            curves[k - 1].resize(t->grid.count());
            for (int i = 0; i < t->grid.count(); ++i) curves[k - 1][i] = value(k, i);
        }
        return LineEnsemble(t->grid, std::move(curves), t->upper, t->lower);
    }
};

State state_from_ensemble(const ChainTarget& t, const LineEnsemble& Q) {
    if (!(Q.grid == t.grid)) throw std::invalid_argument("chain state: grid mismatch");
    if (Q.num_curves() != t.num_curves())
        throw std::invalid_argument("chain state: curve count mismatch");
    State s{&t, {}};
    s.off.resize(t.num_curves());
    const double delta = t.law.delta();
    for (int k = 1; k <= t.num_curves(); ++k) {
        if (std::abs(Q.curves[k - 1][0] - t.entrance[k - 1]) > 1e-9)
            throw std::invalid_argument("chain state: entrance data mismatch");
        const double snapped_exit = t.entrance[k - 1] + t.exit_offset(k) * delta;
        if (std::abs(Q.curves[k - 1][t.grid.count() - 1] - snapped_exit) > 1e-8)
            throw std::invalid_argument("chain state: exit data mismatch");
        auto& row = s.off[k - 1];
        row.resize(t.grid.count());
        for (int i = 0; i < t.grid.count(); ++i)
            row[i] = static_cast<int>(std::lround((Q.curves[k - 1][i] - t.entrance[k - 1]) / delta));
        row[0] = 0;
        row[t.grid.count() - 1] = t.exit_offset(k);
    }
    return s;
}

// Change of the log target density for the single-site move (k, i) -> z_new:
// the two free-walk increments at the site plus every interaction term that
// contains it. `row` returns the current value of any extended row at a site.
template <class RowFn, class IncFn>
double log_ratio_rows(const Grid& grid, int K, const LocalHamiltonian& H, bool edge_terms,
                      RowFn row, int k, int i, double z_new, IncFn inc_log_density) {
    const int count = grid.count();
    const double z_old = row(k, i);

    double free_old = inc_log_density(z_old - row(k, i - 1)) +
                      inc_log_density(row(k, i + 1) - z_old);
    double free_new = inc_log_density(z_new - row(k, i - 1)) +
                      inc_log_density(row(k, i + 1) - z_new);
    if (free_new == kNegInf) return kNegInf;
    double log_r = (free_old == kNegInf) ? kInf : free_new - free_old;

    double h_old = 0.0, h_new = 0.0;
    for (int r = k - 1; r <= k; ++r) {
        if (r < 0 || r > K) continue;
        for (int m = i - 1; m <= i + 1; ++m) {
            if (m < 1 || m > count - 2) continue;
            Rect rect_old, rect_new;
            for (int slot = 0; slot < 6; ++slot) {
                const int rr = r + slot / 3;
                const int cc = m - 1 + slot % 3;
                const double v = row(rr, cc);
                rect_old[slot] = v;
                rect_new[slot] = (rr == k && cc == i) ? z_new : v;
            }
            h_old += H(rect_old);
            h_new += H(rect_new);
        }
    }
    if (edge_terms && i == 1) {
        const double above = row(k - 1, 0);
        h_old += H.gap_value(ext_diff(row(k, 1), above));
        h_new += H.gap_value(ext_diff(z_new, above));
    }
    if (h_new == kInf) return kNegInf;
    log_r += ext_diff(h_old, h_new);
    return log_r;
}

double log_ratio_state(const State& s, int k, int i, int dir) {
    const ChainTarget& t = *s.t;
    const auto row = [&s](int r, int c) { return s.value(r, c); };
    // Increments stay on the lattice by construction; recover the integer.
    const auto inc = [&t](double x) {
        return t.law.log_prob(static_cast<int>(std::lround(x / t.law.delta())));
    };
    const double z_new = s.value(k, i) + dir * t.law.delta();
    return log_ratio_rows(t.grid, t.num_curves(), t.local, t.entrance_edge_terms, row, k,
                          i, z_new, inc);
}

} // namespace

double metropolis_log_ratio(const LineEnsemble& Q, int k, int i, int direction,
                            const LocalHamiltonian& H, const DiscreteIncrementLaw& law,
                            bool entrance_edge_terms) {
    if (k < 1 || k > Q.num_curves())
        throw std::out_of_range("metropolis_log_ratio: unknown curve");
    if (i < 1 || i > Q.grid.count() - 2)
        throw std::out_of_range("metropolis_log_ratio: site must be interior");
    if (direction != 1 && direction != -1)
        throw std::invalid_argument("metropolis_log_ratio: direction must be +-1");
    const auto row = [&Q](int r, int c) { return Q.row_value(r, c); };
    const auto inc = [&law](double x) {
        const double raw = x / law.delta();
        const long j = std::lround(raw);
        if (std::abs(raw - static_cast<double>(j)) > 1e-6) return kNegInf;
        return law.log_prob(static_cast<int>(j));
    };
    const double z_new = Q.row_value(k, i) + direction * law.delta();
    return log_ratio_rows(Q.grid, Q.num_curves(), H, entrance_edge_terms, row, k, i,
                          z_new, inc);
}

double metropolis_log_ratio(const LineEnsemble& Q, int k, int i, int direction,
                            double delta, const LocalHamiltonian& H,
                            const RWHamiltonian& rw) {
    if (k < 1 || k > Q.num_curves())
        throw std::out_of_range("metropolis_log_ratio: unknown curve");
    if (i < 1 || i > Q.grid.count() - 2)
        throw std::out_of_range("metropolis_log_ratio: site must be interior");
    const auto row = [&Q](int r, int c) { return Q.row_value(r, c); };
    const auto inc = [&rw](double x) { return -rw(x); };
    const double z_new = Q.row_value(k, i) + direction * delta;
    return log_ratio_rows(Q.grid, Q.num_curves(), H, false, row, k, i, z_new, inc);
}

double target_log_boltzmann(const ChainTarget& target, const LineEnsemble& state) {
    double w = boltzmann_log_weight(state, target.local);
    if (target.entrance_edge_terms && w != kNegInf) {
        double penalty = 0.0;
        for (int r = 0; r <= state.num_curves(); ++r)
            penalty +=
                target.local.gap_value(ext_diff(state.row_value(r + 1, 1), state.row_value(r, 0)));
        w -= penalty;
    }
    return w;
}

double chain_log_target(const ChainTarget& target, const LineEnsemble& state) {
    const double delta = target.law.delta();
    double free = 0.0;
    for (int k = 1; k <= state.num_curves(); ++k) {
        for (int i = 0; i + 1 < target.grid.count(); ++i) {
            const double x = state.curves[k - 1][i + 1] - state.curves[k - 1][i];
            const double raw = x / delta;
            const long j = std::lround(raw);
            if (std::abs(raw - static_cast<double>(j)) > 1e-6) return kNegInf;
            free += target.law.log_prob(static_cast<int>(j));
            if (free == kNegInf) return kNegInf;
        }
    }
    const double w = target_log_boltzmann(target, state);
    return (w == kNegInf) ? kNegInf : free + w;
}

LineEnsemble minimal_initial_state(const ChainTarget& target) {
    target.validate();
    const int count = target.grid.count();
    const int steps = count - 1;
    State s{&target, {}};
    s.off.resize(target.num_curves());
    bool feasible = true;
    for (int k = 1; k <= target.num_curves(); ++k) {
        const int vend = target.exit_offset(k);
        auto& row = s.off[k - 1];
        row.resize(count);
        for (int i = 0; i < count; ++i)
            row[i] = std::max(i * target.law.jmin(),
                              vend - (steps - i) * target.law.jmax());
        for (int i = 0; i + 1 < count && feasible; ++i)
            feasible = target.law.log_prob(row[i + 1] - row[i]) != kNegInf;
    }
    if (feasible) {
        LineEnsemble cand = s.to_ensemble();
        if (chain_log_target(target, cand) != kNegInf) return cand;
    }
    // Greedy trajectory has zero mass: best of 64 free bridge draws.
    Rng rng(derive_seed(0x6c696e6573u, "minimal-initial-state", 0));
    std::vector<BridgeSampler> samplers;
    for (int k = 1; k <= target.num_curves(); ++k)
        samplers.emplace_back(target.law, steps, target.entrance[k - 1],
                              target.entrance[k - 1] +
                                  target.exit_offset(k) * target.law.delta());
    double best = kNegInf;
    LineEnsemble best_state = s.to_ensemble();
    for (int trial = 0; trial < 64; ++trial) {
        std::vector<std::vector<double>> curves;
        curves.reserve(samplers.size());
        for (auto& sampler : samplers) curves.push_back(sampler.sample(rng));
        LineEnsemble cand(target.grid, std::move(curves), target.upper, target.lower);
        const double lt = chain_log_target(target, cand);
        if (lt > best) {
            best = lt;
            best_state = cand;
        }
    }
    if (best == kNegInf)
        throw std::runtime_error("minimal_initial_state: no feasible initial state found");
    return best_state;
}

ChainResult run_chain(const LineEnsemble& Q0, const ChainTarget& target,
                      const ChainConfig& cfg, const SweepCollector& collector) {
    target.validate();
    cfg.validate();
    const int K = target.num_curves();
    const int interior = target.grid.count() - 2;
    if (interior <= 0) return {Q0, {}};

    State s = state_from_ensemble(target, Q0);
    Rng rng(cfg.seed);
    AcceptanceStats stats;
    const bool neg_inf_start = chain_log_target(target, s.to_ensemble()) == kNegInf;

    for (long sweep = 1; sweep <= cfg.sweeps; ++sweep) {
        for (int step = 0; step < K * interior; ++step) {
            int k, i;
            if (cfg.scan == ChainConfig::Scan::RandomSite) {
                k = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(K)));
                i = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(interior)));
            } else {
                k = 1 + step / interior;
                i = 1 + step % interior;
            }
            const int dir = rng.below(2) == 0 ? 1 : -1;
            const double u = rng.uniform();
            const double log_r = log_ratio_state(s, k, i, dir);
            ++stats.proposed;
            if (std::log(u) <= log_r) {
                s.off[k - 1][i] += dir;
                ++stats.accepted;
            }
        }
        if (sweep == 1 && neg_inf_start && stats.accepted == 0)
            throw std::runtime_error("run_chain: stuck initialization (zero-weight state)");
        if (collector && sweep > cfg.burn_in) collector(sweep - cfg.burn_in - 1, s.off);
    }
    return {s.to_ensemble(), stats};
}

CoupledPair::CoupledPair(LineEnsemble up, LineEnsemble low, std::uint64_t seed)
    : upper(std::move(up)), lower(std::move(low)), shared_stream_seed(seed) {
    if (!(upper.grid == lower.grid))
        throw std::invalid_argument("CoupledPair: grids differ");
    if (upper.num_curves() != lower.num_curves())
        throw std::invalid_argument("CoupledPair: curve counts differ");
    for (int i = 0; i < upper.grid.count(); ++i) {
        if (upper.upper[i] < lower.upper[i] || upper.lower[i] < lower.lower[i])
            throw std::invalid_argument("CoupledPair: boundary data not ordered");
    }
}

CoupledRunReport monotone_coupled_run(const CoupledPair& pair, const ChainTarget& upper,
                                      const ChainTarget& lower, const ChainConfig& cfg) {
    upper.validate();
    lower.validate();
    cfg.validate();
    if (!(upper.grid == lower.grid) || upper.num_curves() != lower.num_curves())
        throw std::invalid_argument("monotone_coupled_run: target shapes differ");
    const int K = upper.num_curves();
    const int interior = upper.grid.count() - 2;
    for (int k = 0; k < K; ++k) {
        if (upper.entrance[k] < lower.entrance[k] || upper.exit[k] < lower.exit[k])
            throw std::invalid_argument("monotone_coupled_run: endpoint data not ordered");
    }
    State s1 = state_from_ensemble(upper, pair.upper);
    State s2 = state_from_ensemble(lower, pair.lower);
    for (int k = 1; k <= K; ++k)
        for (int i = 0; i < upper.grid.count(); ++i)
            if (s1.value(k, i) < s2.value(k, i) - 1e-12)
                throw std::invalid_argument("monotone_coupled_run: unordered initial states");

    long updates = 0, violations = 0;
    Rng rng(pair.shared_stream_seed);
    AcceptanceStats st1, st2;
    if (interior > 0) {
        for (long sweep = 1; sweep <= cfg.sweeps; ++sweep) {
            for (int step = 0; step < K * interior; ++step) {
                const int k = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(K)));
                const int i =
                    1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(interior)));
                const int dir = rng.below(2) == 0 ? 1 : -1;
                const double u = rng.uniform();
                const double log_u = std::log(u);
                ++updates;
                ++st1.proposed;
                ++st2.proposed;
                if (log_u <= log_ratio_state(s1, k, i, dir)) {
                    s1.off[k - 1][i] += dir;
                    ++st1.accepted;
                }
                if (log_u <= log_ratio_state(s2, k, i, dir)) {
                    s2.off[k - 1][i] += dir;
                    ++st2.accepted;
                }
                if (s1.value(k, i) < s2.value(k, i) - 1e-12) ++violations;
            }
        }
    }
    return CoupledRunReport{updates, violations,
                            ChainResult{s1.to_ensemble(), st1},
                            ChainResult{s2.to_ensemble(), st2}};
}

std::optional<RInequalityViolation> find_r_inequality_violation(
    const DiscreteIncrementLaw& law) {
    if (law.support_size() > 61)
        throw std::invalid_argument("find_r_inequality_violation: support too large");
    // One curve, H == 0, up proposal at the middle site with value offset 0:
    // log R = lp(1 - w) + lp(r - 1) - lp(-w) - lp(r) for left/right neighbor
    // offsets w, r. The two sides separate, so scan each side for a monotone
    // failure across ordered neighbor values.
    const auto side_value = [&law](int old_inc, int new_inc) {
        const double lp_new = law.log_prob(new_inc);
        const double lp_old = law.log_prob(old_inc);
        if (lp_new == kNegInf) return kNegInf;
        if (lp_old == kNegInf) return kInf;
        return lp_new - lp_old;
    };
    std::optional<RInequalityViolation> found;
    const auto check = [&](bool left_side, int hi, int lo) {
        // left side: neighbor offset w, increments -w (old) and 1-w (new)
        // right side: neighbor offset r, increments r (old) and r-1 (new)
        const int old_hi = left_side ? -hi : hi;
        const int old_lo = left_side ? -lo : lo;
        if (law.log_prob(old_hi) == kNegInf || law.log_prob(old_lo) == kNegInf)
            return;  // infeasible current state
        const double v_hi = side_value(old_hi, left_side ? 1 - hi : hi - 1);
        const double v_lo = side_value(old_lo, left_side ? 1 - lo : lo - 1);
        const bool violated = (v_hi == kNegInf && v_lo > kNegInf) ||
                              (v_hi != kInf && v_lo != kInf && v_hi < v_lo - 1e-12);
        if (violated && !found) {
            RInequalityViolation v{};
            v.site_value_offset = 0;
            if (left_side) {
                v.left_high = hi;
                v.left_low = lo;
                v.right_high = v.right_low = 0;
            } else {
                v.right_high = hi;
                v.right_low = lo;
                v.left_high = v.left_low = 0;
            }
            v.log_r_high = v_hi;
            v.log_r_low = v_lo;
            found = v;
        }
    };
    // Left neighbors live where the old increment -w is in the support, i.e.
    // w in [-jmax, -jmin]; right neighbors where r itself is. Scan all ordered
    // pairs on each side.
    for (int hi = law.jmin(); hi <= law.jmax(); ++hi)
        for (int lo = law.jmin(); lo < hi; ++lo) {
            check(true, -lo, -hi);
            check(false, hi, lo);
        }
    return found;
}

LogZEstimate estimate_log_Z(const ChainTarget& target, long samples, Rng& rng) {
    target.validate();
    if (samples < 1) throw std::invalid_argument("estimate_log_Z: need samples >= 1");
    const int steps = target.grid.count() - 1;
    std::vector<FreeBridgeSampler> samplers;
    for (int k = 1; k <= target.num_curves(); ++k)
        samplers.emplace_back(target.law, steps, target.entrance[k - 1],
                              target.entrance[k - 1] +
                                  target.exit_offset(k) * target.law.delta());
    std::vector<double> logw;
    logw.reserve(samples);
    for (long n = 0; n < samples; ++n) {
        std::vector<std::vector<double>> curves;
        curves.reserve(samplers.size());
        for (auto& sampler : samplers) curves.push_back(sampler.sample(rng));
        LineEnsemble ens(target.grid, std::move(curves), target.upper, target.lower);
        logw.push_back(target_log_boltzmann(target, ens));
    }
    LogZEstimate est;
    est.samples = samples;
    const double a = log_mean_exp(logw);
    est.log_z = a;
    if (a == kNegInf) {
        est.all_impossible = true;
        return est;
    }
    std::vector<double> twice(logw.size());
    for (size_t i = 0; i < logw.size(); ++i) twice[i] = 2.0 * logw[i];
    const double b = log_mean_exp(twice);
    const double gap = 2.0 * a - b;
    if (gap >= 0.0) {
        est.stderr_ = 0.0;  // degenerate sample (all weights equal)
    } else {
        const double log_var = b + std::log1p(-std::exp(gap));
        est.stderr_ = std::exp(0.5 * log_var - a - 0.5 * std::log(double(samples)));
    }
    return est;
}

std::vector<int> GibbsEnumeration::flatten(const std::vector<std::vector<int>>& offsets) {
    std::vector<int> key;
    for (const auto& row : offsets) key.insert(key.end(), row.begin(), row.end());
    return key;
}

GibbsEnumeration enumerate_gibbs(const ChainTarget& target, long max_states) {
    target.validate();
    const int K = target.num_curves();
    const int count = target.grid.count();
    const int steps = count - 1;
    const int interior = count - 2;
    struct SiteRange {
        int lo, hi;
    };
    std::vector<std::vector<SiteRange>> ranges(K);
    long total = 1;
    for (int k = 1; k <= K; ++k) {
        const int vend = target.exit_offset(k);
        ranges[k - 1].resize(interior);
        for (int i = 1; i <= interior; ++i) {
            const int lo = std::max(i * target.law.jmin(), vend - (steps - i) * target.law.jmax());
            const int hi = std::min(i * target.law.jmax(), vend - (steps - i) * target.law.jmin());
            if (lo > hi) throw std::invalid_argument("enumerate_gibbs: impossible bridge");
            ranges[k - 1][i - 1] = {lo, hi};
            total *= (hi - lo + 1);
            if (total > max_states)
                throw std::invalid_argument("enumerate_gibbs: state space too large");
        }
    }

    GibbsEnumeration out;
    std::vector<std::vector<int>> off(K, std::vector<int>(count, 0));
    for (int k = 1; k <= K; ++k) {
        off[k - 1][count - 1] = target.exit_offset(k);
        for (int i = 1; i <= interior; ++i) off[k - 1][i] = ranges[k - 1][i - 1].lo;
    }
    std::vector<double> log_num, log_free_all;
    for (long idx = 0;; ++idx) {
        double log_free = 0.0;
        for (int k = 1; k <= K && log_free != kNegInf; ++k)
            for (int i = 0; i < steps; ++i) {
                log_free += target.law.log_prob(off[k - 1][i + 1] - off[k - 1][i]);
                if (log_free == kNegInf) break;
            }
        if (log_free != kNegInf) {
            State s{&target, off};
            const double w = target_log_boltzmann(target, s.to_ensemble());
            std::vector<std::vector<int>> inner(K, std::vector<int>(interior));
            for (int k = 0; k < K; ++k)
                for (int i = 0; i < interior; ++i) inner[k][i] = off[k][i + 1];
            out.states.push_back(inner);
            log_num.push_back(log_free + w);
            log_free_all.push_back(log_free);
        }
        // odometer increment over (k, i)
        int k = 0, i = 0;
        bool done = true;
        for (k = 0; k < K; ++k) {
            for (i = 0; i < interior; ++i) {
                if (off[k][i + 1] < ranges[k][i].hi) {
                    ++off[k][i + 1];
                    for (int kk = 0; kk <= k; ++kk)
                        for (int ii = 0; ii < ((kk == k) ? i : interior); ++ii)
                            off[kk][ii + 1] = ranges[kk][ii].lo;
                    done = false;
                    break;
                }
            }
            if (!done) break;
        }
        if (done) break;
    }
    if (out.states.empty()) throw std::runtime_error("enumerate_gibbs: no feasible state");
    const double lse_num = log_sum_exp(log_num);
    const double lse_free = log_sum_exp(log_free_all);
    out.log_Z = lse_num - lse_free;
    out.probs.resize(log_num.size());
    for (size_t s = 0; s < log_num.size(); ++s) out.probs[s] = std::exp(log_num[s] - lse_num);
    for (size_t s = 0; s < out.states.size(); ++s)
        out.index[GibbsEnumeration::flatten(out.states[s])] = s;
    return out;
}

LineEnsemble resample_interior(const LineEnsemble& L, int k1, int k2, int i1, int i2,
                               const LocalHamiltonian& H, const DiscreteIncrementLaw& law,
                               const ChainConfig& cfg, bool entrance_edge_terms) {
    if (k2 < k1 || i2 < i1) return L;  // empty block
    const int K = L.num_curves();
    const int count = L.grid.count();
    if (k1 < 1 || k2 > K) throw std::out_of_range("resample_interior: curve range");
    if (i1 < 1 || i2 > count - 2)
        throw std::out_of_range("resample_interior: block touches the grid boundary");

    const int sub_count = i2 - i1 + 3;
    ChainTarget target{Grid(L.grid.site(i1 - 1), L.grid.mesh(), sub_count),
                       H,
                       law,
                       {},
                       {},
                       {},
                       {},
                       entrance_edge_terms};
    for (int k = k1; k <= k2; ++k) {
        target.entrance.push_back(L.curves[k - 1][i1 - 1]);
        target.exit.push_back(L.curves[k - 1][i2 + 1]);
    }
    target.upper.resize(sub_count);
    target.lower.resize(sub_count);
    for (int i = 0; i < sub_count; ++i) {
        target.upper[i] = L.row_value(k1 - 1, i1 - 1 + i);
        target.lower[i] = L.row_value(k2 + 1, i1 - 1 + i);
    }
    // Start from an exact free-bridge draw: it already has the H == 0
    // conditional law, so the chain only has to absorb the Boltzmann tilt.
    Rng init_rng(derive_seed(cfg.seed, "resample-init", 0));
    std::vector<std::vector<double>> init_curves;
    for (int k = k1; k <= k2; ++k) {
        BridgeSampler sampler(law, sub_count - 1, target.entrance[k - k1],
                              target.entrance[k - k1] +
                                  target.exit_offset(k - k1 + 1) * law.delta());
        init_curves.push_back(sampler.sample(init_rng));
    }
    const LineEnsemble init(target.grid, std::move(init_curves), target.upper,
                            target.lower);
    const ChainResult res = run_chain(init, target, cfg);
    LineEnsemble out = L;
    for (int k = k1; k <= k2; ++k)
        for (int i = i1; i <= i2; ++i)
            out.curves[k - 1][i] = res.state.curves[k - k1][i - (i1 - 1)];
    return out;
}

LineEnsemble resample_interior(const LineEnsemble& L, int k1, int k2, int i1, int i2,
                               const HamiltonianPair& pair, double delta, double M,
                               const ChainConfig& cfg, bool entrance_edge_terms) {
    return resample_interior(L, k1, k2, i1, i2, pair.local,
                             discretize_increment_law(pair.rw, delta, M), cfg,
                             entrance_edge_terms);
}

ConvergenceDiagnostic gelman_rubin_midpoints(const ChainTarget& target,
                                             const ChainConfig& cfg, int replicas,
                                             double threshold) {
    target.validate();
    cfg.validate();
    if (replicas < 2)
        throw std::invalid_argument("gelman_rubin_midpoints: need >= 2 replicas");
    const int K = target.num_curves();
    const int mid = target.grid.count() / 2;
    const long n = cfg.sweeps - cfg.burn_in;
    // traces[k][r] accumulates sum and sum of squares of the midpoint value
    std::vector<std::vector<double>> sums(K, std::vector<double>(replicas, 0.0));
    std::vector<std::vector<double>> sq(K, std::vector<double>(replicas, 0.0));
    for (int r = 0; r < replicas; ++r) {
        ChainConfig rc = cfg;
        rc.seed = derive_seed(cfg.seed, "gelman-rubin-replica", r);
        run_chain(minimal_initial_state(target), target, rc,
                  [&](long, const std::vector<std::vector<int>>& off) {
                      for (int k = 0; k < K; ++k) {
                          const double v =
                              target.entrance[k] + off[k][mid] * target.law.delta();
                          sums[k][r] += v;
                          sq[k][r] += v * v;
                      }
                  });
    }
    ConvergenceDiagnostic diag;
    diag.replicas = replicas;
    diag.samples_per_replica = n;
    for (int k = 0; k < K; ++k) {
        std::vector<double> means(replicas);
        double within = 0.0;
        for (int r = 0; r < replicas; ++r) {
            means[r] = sums[k][r] / n;
            within += (sq[k][r] - n * means[r] * means[r]) / (n - 1);
        }
        within /= replicas;
        const auto mv = mean_var(means);
        const double between_over_n = mv.var;  // B/n in the usual notation
        const double pooled = (double(n - 1) / n) * within + between_over_n;
        const double psrf = within > 0.0 ? std::sqrt(pooled / within) : 1.0;
        diag.per_curve.push_back(psrf);
        diag.max_psrf = std::max(diag.max_psrf, psrf);
    }
    diag.converged = diag.max_psrf < threshold;
    return diag;
}

} // namespace gibbs_lines
