#ifndef GIBBS_LINES_TEST_ORACLES_HPP
#define GIBBS_LINES_TEST_ORACLES_HPP

// Test-only oracles, independent of the h-transform implementation path.

#include <map>
#include <vector>

#include "gibbs_lines/bridge.hpp"

namespace gibbs_lines::oracles {

struct BruteBridge {
    std::map<std::vector<int>, double> paths;      // offset path -> prob
    std::vector<std::map<int, double>> marginals;  // per step
    double total_weight = 0.0;
};

inline void enumerate_paths_rec(const DiscreteIncrementLaw& law, std::vector<int>& path,
                                int steps, int vend, double weight,
                                std::map<std::vector<int>, double>& out) {
    const int m = static_cast<int>(path.size()) - 1;
    if (m == steps) {
        if (path.back() == vend) out[path] += weight;
        return;
    }
    for (int j = law.jmin(); j <= law.jmax(); ++j) {
        const double p = law.prob(j);
        if (p == 0.0) continue;
        path.push_back(path.back() + j);
        enumerate_paths_rec(law, path, steps, vend, weight * p, out);
        path.pop_back();
    }
}

inline BruteBridge brute_force_bridge(const DiscreteIncrementLaw& law, int steps,
                                      int vend) {
    BruteBridge bb;
    std::vector<int> path{0};
    enumerate_paths_rec(law, path, steps, vend, 1.0, bb.paths);
    double total = 0.0;
    for (const auto& [p, w] : bb.paths) total += w;
    bb.total_weight = total;
    if (total <= 0.0) return bb;
    bb.marginals.resize(steps + 1);
    for (auto& [p, w] : bb.paths) {
        w /= total;
        for (int m = 0; m <= steps; ++m) bb.marginals[m][p[m]] += w;
    }
    return bb;
}

} // namespace gibbs_lines::oracles

#endif
