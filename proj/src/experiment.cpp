#include "gibbs_lines/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

#include "gibbs_lines/checks.hpp"
#include "gibbs_lines/csv.hpp"
#include "gibbs_lines/svg.hpp"

namespace gibbs_lines {

namespace {

using nlohmann::json;

class Params {
public:
    explicit Params(const json& j) : obj_(j) {
        if (!obj_.is_object()) throw ConfigError("config must be a JSON object");
    }

    double real_or(const std::string& key, double def, double lo, double hi) {
        if (!obj_.contains(key)) {
            resolved_[key] = def;
            return def;
        }
        return real(key, lo, hi);
    }

    double real(const std::string& key, double lo, double hi) {
        mark(key);
        const auto& v = obj_.at(key);
        if (!v.is_number()) throw ConfigError("field '" + key + "': must be a number");
        const double x = v.get<double>();
        check_range(key, x, lo, hi);
        resolved_[key] = x;
        return x;
    }

    long integer_or(const std::string& key, long def, long lo, long hi) {
        if (!obj_.contains(key)) {
            resolved_[key] = def;
            return def;
        }
        return integer(key, lo, hi);
    }

    long integer(const std::string& key, long lo, long hi) {
        mark(key);
        const auto& v = obj_.at(key);
        if (!v.is_number_integer())
            throw ConfigError("field '" + key + "': must be an integer");
        const long x = v.get<long>();
        check_range(key, static_cast<double>(x), static_cast<double>(lo),
                    static_cast<double>(hi));
        resolved_[key] = x;
        return x;
    }

    bool bool_or(const std::string& key, bool def) {
        if (!obj_.contains(key)) {
            resolved_[key] = def;
            return def;
        }
        mark(key);
        const auto& v = obj_.at(key);
        if (!v.is_boolean()) throw ConfigError("field '" + key + "': must be a boolean");
        resolved_[key] = v.get<bool>();
        return v.get<bool>();
    }

    std::uint64_t seed_or(std::uint64_t def) {
        if (!obj_.contains("seed")) {
            resolved_["seed"] = def;
            return def;
        }
        mark("seed");
        const auto& v = obj_.at("seed");
        if (!v.is_number_unsigned() && !v.is_number_integer())
            throw ConfigError("field 'seed': must be an integer");
        const std::uint64_t s = v.get<std::uint64_t>();
        resolved_["seed"] = s;
        return s;
    }

    void override_seed(std::uint64_t s) { resolved_["seed"] = s; }
    std::uint64_t seed() const { return resolved_.at("seed").get<std::uint64_t>(); }

    std::vector<int> int_list(const std::string& key, long lo, long hi) {
        mark(key);
        if (!obj_.contains(key) || !obj_.at(key).is_array())
            throw ConfigError("field '" + key + "': must be an array of integers");
        std::vector<int> out;
        for (const auto& v : obj_.at(key)) {
            if (!v.is_number_integer())
                throw ConfigError("field '" + key + "': must be an array of integers");
            const long x = v.get<long>();
            check_range(key, static_cast<double>(x), static_cast<double>(lo),
                        static_cast<double>(hi));
            out.push_back(static_cast<int>(x));
        }
        if (out.empty()) throw ConfigError("field '" + key + "': must not be empty");
        resolved_[key] = out;
        return out;
    }

    std::vector<int> int_list_or(const std::string& key, std::vector<int> def, long lo,
                                 long hi) {
        if (!obj_.contains(key)) {
            resolved_[key] = def;
            return def;
        }
        return int_list(key, lo, hi);
    }

    std::vector<double> real_list_or(const std::string& key, std::vector<double> def,
                                     double lo, double hi) {
        if (!obj_.contains(key)) {
            resolved_[key] = def;
            return def;
        }
        mark(key);
        if (!obj_.at(key).is_array())
            throw ConfigError("field '" + key + "': must be an array of numbers");
        std::vector<double> out;
        for (const auto& v : obj_.at(key)) {
            if (!v.is_number())
                throw ConfigError("field '" + key + "': must be an array of numbers");
            const double x = v.get<double>();
            check_range(key, x, lo, hi);
            out.push_back(x);
        }
        if (out.empty()) throw ConfigError("field '" + key + "': must not be empty");
        resolved_[key] = out;
        return out;
    }

    std::string string_or(const std::string& key, const std::string& def,
                          const std::set<std::string>& allowed) {
        std::string s = def;
        if (obj_.contains(key)) {
            mark(key);
            if (!obj_.at(key).is_string())
                throw ConfigError("field '" + key + "': must be a string");
            s = obj_.at(key).get<std::string>();
        }
        if (!allowed.empty() && !allowed.count(s))
            throw ConfigError("field '" + key + "': unsupported value '" + s + "'");
        resolved_[key] = s;
        return s;
    }

    // Extended real: a number, "inf" or "-inf".
    double extended_or(const std::string& key, double def) {
        if (!obj_.contains(key)) {
            resolved_[key] = def == kInf ? json("inf") : (def == kNegInf ? json("-inf") : json(def));
            return def;
        }
        mark(key);
        const auto& v = obj_.at(key);
        if (v.is_string()) {
            const std::string s = v.get<std::string>();
            resolved_[key] = s;
            if (s == "inf") return kInf;
            if (s == "-inf") return kNegInf;
            throw ConfigError("field '" + key + "': must be a number, \"inf\" or \"-inf\"");
        }
        if (!v.is_number()) throw ConfigError("field '" + key + "': must be a number");
        resolved_[key] = v.get<double>();
        return v.get<double>();
    }

    void finish(const std::string& kind) const {
        for (auto it = obj_.begin(); it != obj_.end(); ++it) {
            if (it.key() == "experiment" || seen_.count(it.key())) continue;
            throw ConfigError("unknown key '" + it.key() + "' for experiment '" + kind + "'");
        }
    }

    json resolved() const { return resolved_; }

private:
    void mark(const std::string& key) {
        if (!obj_.contains(key)) throw ConfigError("missing required field '" + key + "'");
        seen_.insert(key);
    }
    static void check_range(const std::string& key, double x, double lo, double hi) {
        if (!(x >= lo && x <= hi))
            throw ConfigError("field '" + key + "': must be in [" + format_double(lo) + ", " +
                              format_double(hi) + "]");
    }

    const json& obj_;
    std::set<std::string> seen_;
    json resolved_ = json::object();
};

struct Artifacts {
    std::vector<std::pair<std::string, std::string>> files;
    std::vector<CheckReport> gating;
    std::vector<CheckReport> informational;
    // Experiment-level assertions that a constructed control must fail.
    std::vector<std::pair<std::string, bool>> control_failed_as_expected;

    void add(std::string name, std::string content) {
        files.emplace_back(std::move(name), std::move(content));
    }

    bool all_pass() const {
        for (const auto& r : gating)
            if (!r.pass) return false;
        for (const auto& [name, ok] : control_failed_as_expected)
            if (!ok) return false;
        return true;
    }
};

void write_reports(Artifacts& art, std::uint64_t seed) {
    if (art.gating.empty() && art.informational.empty() &&
        art.control_failed_as_expected.empty())
        return;
    json arr = json::array();
    std::string text;
    for (const auto& r : art.gating) {
        json j = r.to_json();
        j["gating"] = true;
        j["seed"] = seed;
        arr.push_back(j);
        text += r.to_text();
    }
    for (const auto& r : art.informational) {
        json j = r.to_json();
        j["gating"] = false;
        j["seed"] = seed;
        arr.push_back(j);
        text += "(informational) " + r.to_text();
    }
    for (const auto& [name, ok] : art.control_failed_as_expected)
        text += std::string(ok ? "[PASS] " : "[FAIL] ") + name +
                "  (constructed violation must fail its check)\n";
    art.add("reports.json", arr.dump(2) + "\n");
    art.add("reports.txt", text);
}

// ---------------------------------------------------------------------------
// experiment kinds
// ---------------------------------------------------------------------------

void run_polymer_build(Params& p, const RunOptions&, Artifacts& art, bool oracle_only) {
    const double gamma = p.real("gamma", 1e-6, 1e6);
    const int n = static_cast<int>(p.integer("n", 1, 5000));
    const int K = static_cast<int>(p.integer("K", 1, 64));
    const bool oracle = p.bool_or("oracle", false) || oracle_only;
    p.finish("polymer-build");

    const auto env = sample_environment(gamma, n, K, p.seed());
    if (!oracle_only) {
        art.add("environment.csv", environment_csv(env));
        art.add("environment.json", environment_header_json(env));
        art.add("z_array.csv", triangular_array_csv(z_array(env, n, K)));
    }
    if (oracle) {
        double worst = 0.0;
        long cases = 0;
        const int n_cap = std::min(n, 5), k_cap = std::min(K, 3);
        for (int nn = 1; nn <= n_cap; ++nn)
            for (int k = 1; k <= k_cap; ++k)
                for (int l = 1; l <= k; ++l) {
                    const double a = tau_log(env, nn, k, l);
                    const double b = tau_bruteforce(env, nn, k, l);
                    if (a == kNegInf && b == kNegInf) continue;
                    worst = std::max(worst, std::abs(std::expm1(a - b)));
                    ++cases;
                }
        CheckReport r;
        r.name = "lgv-enumeration-oracle";
        r.trials = cases;
        r.tolerance = 0.0;
        r.worst_margin = 1e-9 - worst;
        r.threshold_provenance = "determinant route vs path enumeration, 1e-9 relative";
        r.details = {{"worst_relative_error", worst}, {"n_cap", n_cap}, {"k_cap", k_cap}};
        r.finalize();
        art.gating.push_back(r);
    }
}

void run_gibbs_sample(Params& p, const RunOptions&, Artifacts& art, bool oracle_only) {
    const int N = static_cast<int>(p.integer("N", 16, 1 << 20));
    const int K = static_cast<int>(p.integer("curves", 1, 32));
    const int interior = static_cast<int>(p.integer("interior_sites", 1, 4096));
    const double entrance = p.real_or("entrance", 0.0, -1e6, 1e6);
    const double exit_v = p.real_or("exit", 0.0, -1e6, 1e6);
    const double curve_spacing = p.real_or("curve_spacing", 1.0, 0.0, 1e6);
    const double f_const = p.extended_or("upper_boundary", kInf);
    const double g_const = p.extended_or("lower_boundary", kNegInf);
    const auto lat = default_lattice(std::sqrt(static_cast<double>(N)));
    const double delta = p.real_or("delta", lat.delta, 1e-9, 1e3);
    const double M = p.real_or("M", lat.M, delta, 1e4);
    const long default_burn =
        std::min<long>(ChainConfig::default_burn_in(K, interior), 100000000);
    const long sweeps = p.integer_or("sweeps", 4 * default_burn + 1, 1, 100000000);
    const long burn_in =
        p.integer_or("burn_in", std::min(default_burn, sweeps - 1), 0, sweeps - 1);
    const std::string scan = p.string_or("scan", "random-site", {"random-site", "systematic"});
    const int gr_replicas = static_cast<int>(p.integer_or("convergence_replicas", 4, 0, 64));
    p.finish("gibbs-sample");

    const auto pair = scaled_hamiltonians(N);
    const double mesh = scaled_mesh(N);
    const int count = interior + 2;
    ChainTarget target{Grid(0.0, mesh, count),
                       pair.local,
                       discretize_increment_law(pair.rw, delta, M),
                       {},
                       {},
                       std::vector<double>(count, f_const),
                       std::vector<double>(count, g_const),
                       false};
    for (int k = 0; k < K; ++k) {
        target.entrance.push_back(entrance - k * curve_spacing);
        target.exit.push_back(exit_v - k * curve_spacing);
    }

    if (oracle_only) {
        // Exact invariant-measure oracle on the enumerable state space:
        // detailed balance of the chain's acceptance ratios, checked exactly.
        const auto enumeration = enumerate_gibbs(target, 200000);
        double worst = 0.0;
        Rng rng(derive_seed(p.seed(), "oracle-transitions", 0));
        const auto& states = enumeration.states;
        for (long t = 0; t < 2000; ++t) {
            const auto& s = states[rng.below(states.size())];
            std::vector<std::vector<double>> curves(K, std::vector<double>(count));
            for (int k = 1; k <= K; ++k) {
                curves[k - 1][0] = target.entrance[k - 1];
                curves[k - 1][count - 1] =
                    target.entrance[k - 1] + target.exit_offset(k) * delta;
                for (int i = 1; i <= interior; ++i)
                    curves[k - 1][i] = target.entrance[k - 1] + s[k - 1][i - 1] * delta;
            }
            LineEnsemble q(target.grid, std::move(curves), target.upper, target.lower);
            const int k = 1 + static_cast<int>(rng.below(K));
            const int i = 1 + static_cast<int>(rng.below(interior));
            const int dir = rng.below(2) == 0 ? 1 : -1;
            const double log_r =
                metropolis_log_ratio(q, k, i, dir, target.local, target.law);
            if (log_r == kNegInf || log_r == kInf) continue;
            LineEnsemble q2 = q;
            q2.curves[k - 1][i] += dir * delta;
            const double lhs = chain_log_target(target, q) + std::min(0.0, log_r);
            const double rhs = chain_log_target(target, q2) + std::min(0.0, -log_r);
            worst = std::max(worst, std::abs(lhs - rhs));
        }
        CheckReport r;
        r.name = "detailed-balance-oracle";
        r.trials = 2000;
        r.tolerance = 0.0;
        r.worst_margin = 1e-10 - worst;
        r.threshold_provenance = "pi(Q) P(Q->Q') identity on enumerated states, 1e-10";
        r.details = {{"worst_abs_error", worst}, {"states", states.size()}};
        r.finalize();
        art.gating.push_back(r);
        return;
    }

    ChainConfig cfg;
    cfg.sweeps = sweeps;
    cfg.burn_in = burn_in;
    cfg.seed = derive_seed(p.seed(), "gibbs-sample", 0);
    cfg.scan = scan == "systematic" ? ChainConfig::Scan::Systematic
                                    : ChainConfig::Scan::RandomSite;
    const auto res = run_chain(minimal_initial_state(target), target, cfg);
    CsvWriter w;
    w.row({"curve", "site", "x", "value"});
    for (int k = 1; k <= K; ++k)
        for (int i = 0; i < count; ++i)
            w.row({std::to_string(k), std::to_string(i),
                   format_double(target.grid.site(i)),
                   format_double(res.state.curves[k - 1][i])});
    art.add("final_state.csv", w.str());
    json stats{{"proposed", res.stats.proposed},
               {"accepted", res.stats.accepted},
               {"rate", res.stats.rate()}};
    if (gr_replicas >= 2) {
        const auto diag = gelman_rubin_midpoints(target, cfg, gr_replicas);
        stats["gelman_rubin_max_psrf"] = diag.max_psrf;
        stats["gelman_rubin_converged"] = diag.converged;
        stats["gelman_rubin_replicas"] = diag.replicas;
    }
    art.add("acceptance.json", stats.dump(2) + "\n");
}

void run_monotone_coupling(Params& p, const RunOptions&, Artifacts& art) {
    const int N = static_cast<int>(p.integer("N", 16, 1 << 20));
    const int K = static_cast<int>(p.integer("curves", 1, 32));
    const int interior = static_cast<int>(p.integer("interior_sites", 1, 4096));
    const long updates = p.integer("updates", 1, 4000000000L);
    const double shift_req = p.real_or("data_shift", 1.0, 0.0, 1e6);
    const double spacing = p.real_or("curve_spacing", 2.0, 0.0, 1e6);
    const auto lat = default_lattice(std::sqrt(static_cast<double>(N)));
    const double delta = p.real_or("delta", lat.delta, 1e-9, 1e3);
    const double M = p.real_or("M", lat.M, delta, 1e4);
    p.finish("monotone-coupling");

    const auto pair = scaled_hamiltonians(N);
    const auto law = discretize_increment_law(pair.rw, delta, M);
    const double shift = std::lround(shift_req / delta) * delta;
    const double mesh = scaled_mesh(N);
    const int count = interior + 2;
    const Grid grid(0.0, mesh, count);

    const auto make_target = [&](double base) {
        ChainTarget t{grid,
                      pair.local,
                      law,
                      {},
                      {},
                      std::vector<double>(count, kInf),
                      std::vector<double>(count, kNegInf),
                      false};
        for (int k = 0; k < K; ++k) {
            t.entrance.push_back(base - k * spacing);
            t.exit.push_back(base - k * spacing);
        }
        return t;
    };
    const ChainTarget upper = make_target(shift);
    const ChainTarget lower = make_target(0.0);
    CoupledPair cp(minimal_initial_state(upper), minimal_initial_state(lower),
                   derive_seed(p.seed(), "coupling-stream", 0));
    ChainConfig cfg;
    cfg.sweeps = (updates + K * interior - 1) / (K * interior);
    cfg.burn_in = 0;
    cfg.seed = cp.shared_stream_seed;
    const auto report = monotone_coupled_run(cp, upper, lower, cfg);

    CheckReport r;
    r.name = "monotone-coupling";
    r.trials = report.updates;
    r.tolerance = 0.0;
    r.worst_margin = report.ordering_violations == 0
                         ? 0.0
                         : -static_cast<double>(report.ordering_violations);
    r.threshold_provenance = "zero ordering violations over the shared-randomness run";
    r.details = {{"updates", report.updates},
                 {"ordering_violations", report.ordering_violations},
                 {"upper_acceptance", report.upper.stats.rate()},
                 {"lower_acceptance", report.lower.stats.rate()},
                 {"convexity_margin", law.min_convexity_margin()}};
    r.finalize();
    art.gating.push_back(r);
}

LocalHamiltonian a1_negative_control() {
    // Takes negative values; check_A1's nonnegativity margin flags it.
    return LocalHamiltonian::custom("minus-a2", [](const Rect& a) {
        return a[1] == kNegInf ? kInf : (a[1] == kInf ? kNegInf : -a[1]);
    });
}

void run_verify_a1(Params& p, const RunOptions&, Artifacts& art) {
    const auto n_values = p.int_list_or("N_values", {16, 64, 256}, 4, 1 << 20);
    const long trials = p.integer_or("trials", 100000, 1, 100000000);
    const bool control = p.bool_or("negative_control", true);
    p.finish("verify-A1");
    for (size_t i = 0; i < n_values.size(); ++i) {
        Rng rng(derive_seed(p.seed(), "a1", i));
        auto r = check_A1(scaled_hamiltonians(n_values[i]).local, trials, rng);
        r.name = "A1(H^N), N=" + std::to_string(n_values[i]);
        r.params = {{"N", n_values[i]}, {"trials", trials}};
        art.gating.push_back(r);
    }
    if (control) {
        Rng rng(derive_seed(p.seed(), "a1-control", 0));
        auto r = check_A1(a1_negative_control(), std::min<long>(trials, 10000), rng);
        r.name = "A1-negative-control";
        art.informational.push_back(r);
        art.control_failed_as_expected.emplace_back("A1 negative control fails", !r.pass);
    }
}

void run_verify_a2(Params& p, const RunOptions&, Artifacts& art) {
    const auto n_values = p.int_list_or("N_values", {16, 64, 256}, 4, 1 << 20);
    const double half_width = p.real_or("half_width", 6.0, 1e-6, 1e4);
    const int points = static_cast<int>(p.integer_or("grid_points", 4001, 3, 10000000));
    const bool control = p.bool_or("negative_control", true);
    p.finish("verify-A2");
    for (int N : n_values) {
        auto r = check_A2(scaled_hamiltonians(N).rw, half_width, points);
        r.name = "A2(H^RW_N), N=" + std::to_string(N);
        r.params = {{"N", N}, {"half_width", half_width}, {"grid_points", points}};
        art.gating.push_back(r);
    }
    if (control) {
        const auto wiggly = RWHamiltonian::custom(
            "sine-perturbed",
            [](double x) { return 0.5 * x * x + 0.35 * std::sin(5.0 * x); }, true);
        auto r = check_A2(wiggly, half_width, points);
        r.name = "A2-negative-control";
        art.informational.push_back(r);
        art.control_failed_as_expected.emplace_back("A2 negative control fails", !r.pass);
    }
}

void run_verify_a3(Params& p, const RunOptions&, Artifacts& art) {
    const auto n_values = p.int_list_or("N_values", {16, 64, 256}, 16, 1 << 20);
    const long trials = p.integer_or("trials", 200, 1, 1000000);
    const double c1 = p.real_or("C1", 3.0, 1e-6, 1e3);
    p.finish("verify-A3");
    json slopes = json::array();
    std::vector<double> worst(n_values.size());
    for (size_t i = 0; i < n_values.size(); ++i) {
        auto r = check_A3(n_values[i], trials, c1, p.seed());
        r.name = "A3(H^N), N=" + std::to_string(n_values[i]);
        worst[i] = r.details["worst_lhs"].get<double>();
        art.gating.push_back(r);
    }
    // The assumption indexes resolution by mesh 1/N; under the 2/sqrt(N)
    // relabeling a mesh halving is a 4x step in the parameter.
    for (size_t i = 0; i + 1 < n_values.size(); ++i) {
        if (n_values[i + 1] == 4 * n_values[i])
            slopes.push_back({{"N", n_values[i]},
                              {"ratio_worst_lhs", worst[i + 1] / worst[i]}});
    }
    if (!slopes.empty()) {
        CheckReport r;
        r.name = "A3-mesh-refinement";
        r.trials = trials;
        r.tolerance = 0.0;
        double m = kInf;
        for (const auto& s : slopes) {
            const double ratio = s["ratio_worst_lhs"].get<double>();
            m = std::min(m, std::min(ratio - 0.25, 0.75 - ratio));
        }
        r.worst_margin = m;
        r.threshold_provenance = "worst LHS halves (+-50%) per halving of the grid mesh";
        r.details = {{"ratios", slopes}};
        r.finalize();
        art.gating.push_back(r);
    }
}

void run_verify_a4(Params& p, const RunOptions& opts, Artifacts& art) {
    const auto n_values = p.int_list_or("N_values", {64, 128, 256, 512, 1024}, 16, 1 << 20);
    const double L = p.real_or("L", 1.0, 1e-3, 1e3);
    const double z = p.real_or("z", 0.0, -1e3, 1e3);
    const long samples = p.integer_or("samples", 10000, 100, 100000000);
    p.finish("verify-A4");
    auto rep = check_A4_empirical(n_values, L, z, samples, p.seed(), opts.workers);
    art.gating.push_back(rep.report);

    CsvWriter w;
    w.row({"N", "steps", "median_sup_distance", "q99_sup_distance"});
    for (const auto& row : rep.rows)
        w.row({std::to_string(row.N), std::to_string(row.steps),
               format_double(row.median), format_double(row.q99)});
    art.add("a4_quantiles.csv", w.str());
    if (opts.plots) {
        PlotSeries med{"median", {}, {}, {}, {}}, q99{"q99", {}, {}, {}, {}};
        for (const auto& row : rep.rows) {
            const double x = std::log(static_cast<double>(row.N) * L) /
                             std::sqrt(static_cast<double>(row.N));
            med.x.push_back(x);
            med.y.push_back(row.median);
            q99.x.push_back(x);
            q99.y.push_back(row.q99);
        }
        art.add("a4_scaling.svg",
                emit_plot({med, q99}, {"coupled sup distance vs N^{-1/2} log(NL)",
                                       "N^{-1/2} log(NL)", "sup distance", true, true}));
    }
}

void run_gibbs_invariance(Params& p, const RunOptions& opts, Artifacts& art) {
    GibbsInvarianceConfig cfg;
    cfg.gamma = p.real_or("gamma", 3.0, 1e-3, 1e6);
    cfg.curves = static_cast<int>(p.integer_or("curves", 3, 1, 16));
    cfg.window_interior = static_cast<int>(p.integer_or("window_interior", 2, 1, 64));
    cfg.replicas = p.integer_or("replicas", 2000, 100, 10000000);
    cfg.delta = p.real_or("delta", 0.05, 1e-6, 10.0);
    cfg.sweeps = p.integer_or("sweeps", 1500, 2, 10000000);
    cfg.burn_in = p.integer_or("burn_in", cfg.sweeps / 3, 0, cfg.sweeps - 1);
    const bool control = p.bool_or("negative_control", true);
    p.finish("gibbs-invariance");
    cfg.seed = p.seed();
    cfg.workers = opts.workers;

    art.gating.push_back(gibbs_invariance_test(cfg));
    if (control) {
        GibbsInvarianceConfig bad = cfg;
        bad.wrong_rw = true;
        bad.replicas = std::min<long>(cfg.replicas, 500);
        auto r = gibbs_invariance_test(bad);
        art.informational.push_back(r);
        art.control_failed_as_expected.emplace_back("wrong-Hamiltonian control fails",
                                                    !r.pass);
    }
}

void run_z_comparison(Params& p, const RunOptions& opts, Artifacts& art) {
    ZComparisonConfig cfg;
    cfg.n_values = p.int_list_or("N_values", {64, 256}, 16, 1 << 20);
    cfg.a = p.real_or("a", 0.0, -1e6, 1e6);
    cfg.b = p.real_or("b", 1.0, -1e6, 1e6);
    cfg.x = p.real_or("x", 0.0, -1e6, 1e6);
    cfg.y = p.real_or("y", 0.0, -1e6, 1e6);
    cfg.lower_boundary = p.real_or("lower_boundary", -1.0, -1e6, 1e6);
    cfg.samples = p.integer_or("samples", 100000, 100, 100000000);
    cfg.brownian_grid = static_cast<int>(p.integer_or("brownian_grid", 257, 3, 100000));
    cfg.family =
        p.string_or("family", "framework-gaussian", {"framework-gaussian", "log-gamma"});
    p.finish("z-comparison");
    cfg.seed = p.seed();
    auto rep = z_comparison_check(cfg);
    art.gating.push_back(rep.report);

    CsvWriter w;
    w.row({"N", "Z_discrete", "stderr_discrete", "Z_brownian", "stderr_brownian", "gap",
           "joint_stderr"});
    for (const auto& row : rep.rows)
        w.row({std::to_string(row.N), format_double(row.z_discrete),
               format_double(row.z_discrete * row.stderr_discrete),
               format_double(row.z_brownian), format_double(row.stderr_brownian),
               format_double(row.gap), format_double(row.joint_stderr)});
    art.add("z_comparison.csv", w.str());
    if (opts.plots) {
        PlotSeries gap{"|Z_N - Z_inf|", {}, {}, {}, {}};
        PlotSeries band{"3 x joint stderr", {}, {}, {}, {}};
        for (const auto& row : rep.rows) {
            gap.x.push_back(row.N);
            gap.y.push_back(row.gap);
            band.x.push_back(row.N);
            band.y.push_back(3.0 * row.joint_stderr);
        }
        art.add("z_comparison.svg",
                emit_plot({gap, band},
                          {"normalizing-constant comparison", "N", "gap", true, true}));
    }
}

// Scaled-ensemble replica machinery shared by scaling-study and
// tightness-study.
struct ScaledReplicaSet {
    int N;
    std::vector<double> x_sites;             // all sites j_lo..j_hi
    std::vector<std::vector<std::vector<double>>> curves;
    // curves[replica][i-1][site], curves 1..k
};

ScaledReplicaSet scaled_replicas(int N, double t, int k, int j_lo, int j_hi, long replicas,
                                 std::uint64_t seed, std::string_view salt, int workers) {
    const double kt = N * t / 8.0;
    const int K = static_cast<int>(std::lround(kt));
    if (std::abs(kt - K) > 1e-9 || K < 1)
        throw ConfigError("N t / 8 must be a positive integer (N=" + std::to_string(N) + ")");
    if (K + j_lo < std::max(1, k))
        throw ConfigError("window reaches outside the defined region for N=" +
                          std::to_string(N));
    ScaledReplicaSet out;
    out.N = N;
    for (int j = j_lo; j <= j_hi; ++j) out.x_sites.push_back(j * scaled_mesh(N));
    out.curves.assign(replicas, {});
    parallel_for(replicas, workers, [&](long r) {
        const auto env = sample_environment(
            std::sqrt(static_cast<double>(N)), K + j_hi, K,
            derive_seed(seed, std::string(salt) + "-env-" + std::to_string(N), r));
        const auto poly =
            build_line_ensemble(env, K, std::max(1, K + j_lo), K + j_hi, k);
        const auto scaled = scale_ensemble(poly, N, t, j_lo, j_hi);
        out.curves[r] = curves_on_window(scaled, k, 0, scaled.grid.count() - 1);
    });
    return out;
}

void run_scaling_study(Params& p, const RunOptions& opts, Artifacts& art) {
    const auto n_values = p.int_list_or("N_values", {64, 256}, 16, 1 << 20);
    const double t = p.real_or("t", 1.0, 1e-6, 1e3);
    const auto x_values = p.real_list_or("x_values", {-1.0, 0.0, 1.0}, -100.0, 100.0);
    const long replicas = p.integer_or("replicas", 400, 100, 10000000);
    const double eps = p.real_or("eps", 0.05, 1e-4, 0.5);
    const bool gate = p.bool_or("gate", false);
    p.finish("scaling-study");

    json extrema = json::array();
    std::vector<PlotSeries> mean_series;
    for (int N : n_values) {
        const double mesh = scaled_mesh(N);
        int j_lo = 0, j_hi = 0;
        std::vector<int> x_index;
        for (double x : x_values) {
            const double raw = x / mesh;
            const int j = static_cast<int>(std::lround(raw));
            if (std::abs(raw - j) > 1e-9)
                throw ConfigError("x value " + format_double(x) +
                                  " is not on the lattice 2/sqrt(N) for N=" + std::to_string(N));
            j_lo = std::min(j_lo, j);
            j_hi = std::max(j_hi, j);
        }
        const auto set = scaled_replicas(N, t, 1, j_lo, j_hi, replicas, p.seed(),
                                         "scaling", opts.workers);
        for (double x : x_values)
            x_index.push_back(static_cast<int>(std::lround(x / mesh)) - j_lo);

        std::vector<std::vector<double>> rows(replicas, std::vector<double>(x_values.size()));
        std::vector<std::vector<double>> full_rows(replicas);
        for (long r = 0; r < replicas; ++r) {
            for (size_t xi = 0; xi < x_values.size(); ++xi)
                rows[r][xi] = set.curves[r][0][x_index[xi]];
            full_rows[r] = set.curves[r][0];
        }
        auto table = stationarity_statistics(rows, x_values);
        CheckReport r;
        r.name = "stationarity, N=" + std::to_string(N);
        r.trials = replicas;
        r.tolerance = 0.0;
        r.worst_margin = table.min_adjusted_p - 0.001;
        r.threshold_provenance = "pairwise KS of L1 + x^2/2 across sites, Bonferroni, p > 0.001";
        json sites = json::array();
        for (size_t s = 0; s < table.x.size(); ++s)
            sites.push_back({{"x", table.x[s]}, {"mean", table.mean[s]},
                             {"variance", table.variance[s]}});
        r.details = {{"sites", sites}, {"min_adjusted_p", table.min_adjusted_p}};
        r.finalize();
        (gate ? art.gating : art.informational).push_back(r);

        const auto ext = window_extrema(full_rows, set.x_sites, set.x_sites.front(),
                                        set.x_sites.back());
        extrema.push_back({{"N", N},
                           {"R_at_eps", ext.r_at(eps)},
                           {"eps", eps},
                           {"inf_median", quantile_of_sorted(ext.inf_values, 0.5)},
                           {"sup_median", quantile_of_sorted(ext.sup_values, 0.5)}});

        {
            // serialize replica 0's scaled ensemble as a worked example
            const int K = static_cast<int>(std::lround(N * t / 8.0));
            const auto env0 =
                sample_environment(std::sqrt(static_cast<double>(N)), K + j_hi, K,
                                   derive_seed(p.seed(), "scaling-env-" + std::to_string(N), 0));
            const auto poly0 = build_line_ensemble(env0, K, std::max(1, K + j_lo), K + j_hi, 1);
            const auto scaled0 = scale_ensemble(poly0, N, t, j_lo, j_hi);
            art.add("scaled_ensemble_N" + std::to_string(N) + ".csv",
                    scaled_ensemble_csv(scaled0));
            art.add("scaled_ensemble_N" + std::to_string(N) + ".json",
                    scaled_ensemble_metadata_json(scaled0));
        }
        PlotSeries series{"N=" + std::to_string(N), {}, {}, {}, {}};
        for (size_t s = 0; s < set.x_sites.size(); ++s) {
            std::vector<double> col(replicas);
            const double parabola = 0.5 * set.x_sites[s] * set.x_sites[s];
            for (long rr = 0; rr < replicas; ++rr) col[rr] = full_rows[rr][s] + parabola;
            const auto mv = mean_var(col);
            series.x.push_back(set.x_sites[s]);
            series.y.push_back(mv.mean);
            series.band_lo.push_back(mv.mean - std::sqrt(mv.var));
            series.band_hi.push_back(mv.mean + std::sqrt(mv.var));
        }
        mean_series.push_back(std::move(series));

        CsvWriter w;
        w.row({"replica", "x", "value"});
        for (long rr = 0; rr < replicas; ++rr)
            for (size_t s = 0; s < set.x_sites.size(); ++s)
                w.row({std::to_string(rr), format_double(set.x_sites[s]),
                       format_double(set.curves[rr][0][s])});
        art.add("samples_N" + std::to_string(N) + ".csv", w.str());
    }
    art.add("window_extrema.json", extrema.dump(2) + "\n");
    if (opts.plots)
        art.add("stationarity.svg",
                emit_plot(mean_series, {"mean of L1 + x^2/2 across replicas (band: +-1 sd)",
                                        "x", "shifted height", false, false}));
}

void run_tightness_study(Params& p, const RunOptions& opts, Artifacts& art) {
    const auto n_values = p.int_list_or("N_values", {64, 256}, 16, 1 << 20);
    const double t = p.real_or("t", 1.0, 1e-6, 1e3);
    const double T = p.real_or("T", 1.0, 1e-3, 100.0);
    const double rho = p.real_or("rho", 2.0, 1e-6, 1e3);
    const double eta = p.real_or("eta", 0.1, 1e-4, 0.9);
    const int k = static_cast<int>(p.integer_or("curves", 2, 1, 16));
    const long replicas = p.integer_or("replicas", 400, 100, 10000000);
    const bool gate = p.bool_or("gate", false);
    p.finish("tightness-study");

    double mesh_max = 0.0;
    for (int N : n_values) mesh_max = std::max(mesh_max, scaled_mesh(N));
    std::vector<double> r_values;
    for (double r = mesh_max; r <= 2.0 * T + 1e-9; r += mesh_max) r_values.push_back(r);

    std::vector<ModulusSamples> samples;
    for (int N : n_values) {
        const double mesh = scaled_mesh(N);
        const double raw = T / mesh;
        const int jT = static_cast<int>(std::lround(raw));
        if (std::abs(raw - jT) > 1e-9)
            throw ConfigError("T must be a multiple of the mesh 2/sqrt(N) for N=" +
                              std::to_string(N));
        const auto set =
            scaled_replicas(N, t, k, -jT, jT, replicas, p.seed(), "tightness", opts.workers);
        ModulusSamples ms{N, r_values, {}};
        ms.omega.assign(replicas, std::vector<double>(r_values.size()));
        const Grid grid(-T, mesh, 2 * jT + 1);
        parallel_for(replicas, opts.workers, [&](long r) {
            for (size_t ri = 0; ri < r_values.size(); ++ri)
                ms.omega[r][ri] =
                    modulus_of_continuity(set.curves[r], grid, -T, T, r_values[ri]);
        });
        samples.push_back(std::move(ms));
    }
    auto rep = tightness_proxy(samples, rho, eta);
    (gate ? art.gating : art.informational).push_back(rep.report);

    CsvWriter w;
    w.row({"N", "r", "prob_omega_le_rho"});
    for (const auto& c : rep.curves)
        for (size_t ri = 0; ri < c.r_values.size(); ++ri)
            w.row({std::to_string(c.N), format_double(c.r_values[ri]),
                   format_double(c.prob[ri])});
    art.add("tightness_curves.csv", w.str());
    if (opts.plots) {
        std::vector<PlotSeries> series;
        for (const auto& c : rep.curves)
            series.push_back(PlotSeries{"N=" + std::to_string(c.N), c.r_values, c.prob,
                                        {}, {}});
        art.add("tightness.svg",
                emit_plot(series, {"P(omega_{[-T,T]} <= rho) by modulus radius", "r",
                                   "probability", false, false}));
    }
}

int dispatch(const json& config, const RunOptions& opts, bool oracle_only) {
    json cfg = config;
    if (cfg.is_object() && cfg.contains("config")) cfg = cfg.at("config");  // manifest input
    if (!cfg.is_object() || !cfg.contains("experiment") || !cfg.at("experiment").is_string())
        throw ConfigError("config must be an object with an 'experiment' string");
    const std::string kind = cfg.at("experiment").get<std::string>();

    Params p(cfg);
    p.seed_or(0);
    if (opts.seed_override) p.override_seed(*opts.seed_override);
    // "out" and "plots" are runtime knobs: honored when present, but never
    // echoed into the manifest unless the caller wrote them, so identical
    // configs produce identical bytes wherever they run.
    RunOptions run_opts = opts;
    if (cfg.contains("out")) {
        const std::string cfg_out = p.string_or("out", opts.out_dir, {});
        if (!opts.out_dir_from_cli) run_opts.out_dir = cfg_out;
    }
    if (cfg.contains("plots")) run_opts.plots = opts.plots && p.bool_or("plots", true);
    const RunOptions& effective = run_opts;

    Artifacts art;
    if (kind == "polymer-build") {
        run_polymer_build(p, effective, art, oracle_only);
    } else if (kind == "gibbs-sample") {
        run_gibbs_sample(p, effective, art, oracle_only);
    } else if (oracle_only) {
        throw ConfigError("experiment '" + kind + "' has no brute-force oracle");
    } else if (kind == "monotone-coupling") {
        run_monotone_coupling(p, effective, art);
    } else if (kind == "verify-A1") {
        run_verify_a1(p, effective, art);
    } else if (kind == "verify-A2") {
        run_verify_a2(p, effective, art);
    } else if (kind == "verify-A3") {
        run_verify_a3(p, effective, art);
    } else if (kind == "verify-A4") {
        run_verify_a4(p, effective, art);
    } else if (kind == "gibbs-invariance") {
        run_gibbs_invariance(p, effective, art);
    } else if (kind == "z-comparison") {
        run_z_comparison(p, effective, art);
    } else if (kind == "scaling-study") {
        run_scaling_study(p, effective, art);
    } else if (kind == "tightness-study") {
        run_tightness_study(p, effective, art);
    } else {
        throw ConfigError("unknown experiment kind '" + kind + "'");
    }

    write_reports(art, p.seed());
    json resolved = p.resolved();
    resolved["experiment"] = kind;
    json manifest{{"config", resolved}, {"pass", art.all_pass()}};
    json names = json::array();
    for (const auto& [name, content] : art.files) names.push_back(name);
    manifest["artifacts"] = names;
    json checks = json::array();
    for (const auto& r : art.gating)
        checks.push_back({{"name", r.name},
                          {"pass", r.pass},
                          {"gating", true},
                          {"worst_margin", r.worst_margin}});
    for (const auto& r : art.informational)
        checks.push_back({{"name", r.name},
                          {"pass", r.pass},
                          {"gating", false},
                          {"worst_margin", r.worst_margin}});
    for (const auto& [name, ok] : art.control_failed_as_expected)
        checks.push_back({{"name", name}, {"pass", ok}, {"gating", true}});
    manifest["checks"] = checks;

    namespace fs = std::filesystem;
    fs::create_directories(effective.out_dir);
    std::vector<fs::path> written;
    try {
        const auto write_one = [&](const std::string& name, const std::string& content) {
            const fs::path path = fs::path(effective.out_dir) / name;
            std::ofstream f(path, std::ios::binary);
            if (!f) throw std::runtime_error("cannot write " + path.string());
            f << content;
            written.push_back(path);
        };
        write_one("manifest.json", manifest.dump(2) + "\n");
        for (const auto& [name, content] : art.files) write_one(name, content);
    } catch (...) {
        for (const auto& path : written) fs::remove(path);
        throw;
    }
    return art.all_pass() ? 0 : 1;
}

} // namespace

int run_experiment(const json& config, const RunOptions& opts) {
    return dispatch(config, opts, false);
}

int run_oracle(const json& config, const RunOptions& opts) {
    return dispatch(config, opts, true);
}

json load_config_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config file: " + path);
    json j;
    try {
        j = json::parse(f);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    return j;
}

} // namespace gibbs_lines
