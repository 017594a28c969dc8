#include "gibbs_lines/ensemble.hpp"

#include <cmath>

namespace gibbs_lines {

LineEnsemble::LineEnsemble(Grid g, std::vector<std::vector<double>> c,
                           std::vector<double> f, std::vector<double> gl)
    : grid(g), curves(std::move(c)), upper(std::move(f)), lower(std::move(gl)) {
    validate();
}

LineEnsemble LineEnsemble::with_free_boundaries(Grid g,
                                                std::vector<std::vector<double>> c) {
    const auto n = static_cast<size_t>(g.count());
    return LineEnsemble(g, std::move(c), std::vector<double>(n, kInf),
                        std::vector<double>(n, kNegInf));
}

void LineEnsemble::validate() const {
    const auto n = static_cast<size_t>(grid.count());
    for (const auto& curve : curves) {
        if (curve.size() != n)
            throw std::invalid_argument("LineEnsemble: curve length != grid count");
        for (double v : curve)
            if (!std::isfinite(v))
                throw std::invalid_argument("LineEnsemble: curve values must be finite");
    }
    if (upper.size() != n || lower.size() != n)
        throw std::invalid_argument("LineEnsemble: boundary length != grid count");
    for (double v : upper) require_not_nan(v, "LineEnsemble::upper");
    for (double v : lower) require_not_nan(v, "LineEnsemble::lower");
}

double LineEnsemble::row_value(int row, int i) const {
    if (i < 0 || i >= grid.count())
        throw std::out_of_range("LineEnsemble::row_value: site out of range");
    if (row == 0) return upper[i];
    if (row == num_curves() + 1) return lower[i];
    if (row < 1 || row > num_curves())
        throw std::out_of_range("LineEnsemble::row_value: unknown curve index");
    return curves[row - 1][i];
}

Rect rectangle_neighborhood(const LineEnsemble& L, int k, int i) {
    if (i < 1 || i > L.grid.count() - 2)
        throw std::out_of_range("rectangle_neighborhood: site must be interior");
    if (k < 0 || k > L.num_curves())
        throw std::out_of_range("rectangle_neighborhood: unknown curve index");
    return Rect{L.row_value(k, i - 1),     L.row_value(k, i),     L.row_value(k, i + 1),
                L.row_value(k + 1, i - 1), L.row_value(k + 1, i), L.row_value(k + 1, i + 1)};
}

double boltzmann_log_weight(const LineEnsemble& L, const LocalHamiltonian& H,
                            const ExternalField* external) {
    if (H.kind() == LocalHamiltonian::Kind::Zero && external == nullptr) return 0.0;
    const int count = L.grid.count();
    const int K = L.num_curves();
    double penalty = 0.0;
    for (int k = 0; k <= K && penalty != kInf; ++k) {
        for (int i = 1; i <= count - 2; ++i) {
            const double h = H(rectangle_neighborhood(L, k, i));
            if (h == kInf) {
                penalty = kInf;
                break;
            }
            penalty += h;
        }
    }
    if (external != nullptr && penalty != kInf) {
        if (external->f_hat.size() != static_cast<size_t>(count) ||
            external->g_hat.size() != static_cast<size_t>(count))
            throw std::invalid_argument("boltzmann_log_weight: external field length");
        for (int i = 1; i <= count - 2; ++i) {
            const double hu = external->h_upper(ext_diff(L.row_value(1, i), external->f_hat[i]));
            const double hl = external->h_lower(ext_diff(external->g_hat[i], L.row_value(K, i)));
            require_not_nan(hu, "external upper Hamiltonian");
            require_not_nan(hl, "external lower Hamiltonian");
            penalty += hu + hl;
            if (penalty == kInf) break;
        }
    }
    return -penalty;
}

double brownian_boltzmann_log_weight(const LineEnsemble& L) {
    const int count = L.grid.count();
    if (count < 2)
        throw std::invalid_argument("brownian_boltzmann_log_weight: need >= 2 grid points");
    const int K = L.num_curves();
    const double mesh = L.grid.mesh();
    double penalty = 0.0;
    for (int k = 0; k <= K; ++k) {
        // Trapezoid rule for the integral of exp(row_{k+1} - row_k).
        double integral = 0.0;
        for (int i = 0; i < count; ++i) {
            const double gap = ext_diff(L.row_value(k + 1, i), L.row_value(k, i));
            const double val = std::exp(gap);
            require_not_nan(val, "brownian_boltzmann_log_weight");
            const double w = (i == 0 || i == count - 1) ? 0.5 : 1.0;
            integral += w * val;
        }
        penalty += integral * mesh;
    }
    return -penalty;
}

double modulus_of_continuity(const std::vector<std::vector<double>>& curves,
                             const Grid& grid, double a, double b, double delta) {
    if (!(delta > 0.0))
        throw std::invalid_argument("modulus_of_continuity: delta must be positive");
    const double tol = 1e-9 * grid.mesh();
    int lo = grid.count(), hi = -1;
    for (int i = 0; i < grid.count(); ++i) {
        const double t = grid.site(i);
        if (t >= a - tol && t <= b + tol) {
            lo = std::min(lo, i);
            hi = std::max(hi, i);
        }
    }
    if (hi < lo) throw std::invalid_argument("modulus_of_continuity: empty window");
    const int span = static_cast<int>(std::floor(delta / grid.mesh() + 1e-9));
    double omega = 0.0;
    for (const auto& curve : curves) {
        for (int i = lo; i <= hi; ++i) {
            for (int j = i + 1; j <= std::min(hi, i + span); ++j)
                omega = std::max(omega, std::abs(curve[j] - curve[i]));
        }
    }
    return omega;
}

} // namespace gibbs_lines
