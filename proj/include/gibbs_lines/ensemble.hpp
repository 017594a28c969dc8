#ifndef GIBBS_LINES_ENSEMBLE_HPP
#define GIBBS_LINES_ENSEMBLE_HPP

#include <optional>
#include <vector>

#include "gibbs_lines/grid.hpp"
#include "gibbs_lines/hamiltonian.hpp"

namespace gibbs_lines {

// K indexed curves over a grid, with extended-real boundary rows above and
// below. Row index 0 addresses the upper boundary f, rows 1..K the curves,
// row K+1 the lower boundary g. Curves are finite everywhere; only boundary
// rows may hold +-inf.
struct LineEnsemble {
    Grid grid;
    std::vector<std::vector<double>> curves;
    std::vector<double> upper;  // f
    std::vector<double> lower;  // g

    LineEnsemble(Grid g, std::vector<std::vector<double>> c, std::vector<double> f,
                 std::vector<double> gl);

    // f = +inf, g = -inf everywhere.
    static LineEnsemble with_free_boundaries(Grid g, std::vector<std::vector<double>> c);

    int num_curves() const { return static_cast<int>(curves.size()); }

    // Row accessor over the extended index range 0..K+1.
    double row_value(int row, int i) const;

    void validate() const;
};

// The six-point neighborhood of site i between rows k and k+1; k ranges over
// 0..K so that k = 0 pairs the upper boundary with curve 1 and k = K pairs
// curve K with the lower boundary. Requires 1 <= i <= count-2.
Rect rectangle_neighborhood(const LineEnsemble& L, int k, int i);

// log of the Boltzmann weight: -sum over row pairs k = 0..K and interior
// sites of H(rectangle), minus the external-field sums when given.
// Always in [-inf, 0] for H >= 0.
double boltzmann_log_weight(const LineEnsemble& L, const LocalHamiltonian& H,
                            const ExternalField* external = nullptr);

// Continuum counterpart with H(x) = e^x: -sum over consecutive row pairs of
// the trapezoid-rule approximation of the integral of exp(L_{i+1} - L_i).
double brownian_boltzmann_log_weight(const LineEnsemble& L);

// Largest oscillation of any curve over site pairs within distance delta,
// restricted to the window [a, b] (inclusive, matched to grid sites).
double modulus_of_continuity(const std::vector<std::vector<double>>& curves,
                             const Grid& grid, double a, double b, double delta);

inline double modulus_of_continuity(const LineEnsemble& L, double a, double b,
                                    double delta) {
    return modulus_of_continuity(L.curves, L.grid, a, b, delta);
}

} // namespace gibbs_lines

#endif
