#ifndef GIBBS_LINES_HAMILTONIAN_HPP
#define GIBBS_LINES_HAMILTONIAN_HPP

#include <array>
#include <functional>
#include <string>

#include "gibbs_lines/numeric.hpp"

namespace gibbs_lines {

// The six curve values around one interior site, in the order
// (L_k(t-1), L_k(t), L_k(t+1), L_{k+1}(t-1), L_{k+1}(t), L_{k+1}(t+1)).
using Rect = std::array<double, 6>;

// Local interaction Hamiltonian: a function of the six-point neighborhood
// with values in [0, inf]. The exp_gap kind is
//   scale * exp(L_{k+1}(t + shift*mesh) - L_k(t)),
// i.e. it reads entries a2 and a5 (shift 0) or a6 (shift 1) only.
class LocalHamiltonian {
public:
    enum class Kind { Zero, ExpGap, Custom };

    static LocalHamiltonian zero();
    static LocalHamiltonian exp_gap(double scale, int shift = 1);
    static LocalHamiltonian custom(std::string name, std::function<double(const Rect&)> f);

    double operator()(const Rect& r) const;

    Kind kind() const { return kind_; }
    double scale() const { return scale_; }
    int shift() const { return shift_; }
    const std::string& name() const { return name_; }

    // True when the value depends only on (a2, a_{5+shift}); such Hamiltonians
    // admit the gap-form evaluation used for time-edge interaction terms.
    bool is_gap_form() const { return kind_ != Kind::Custom; }

    // Evaluate directly from the gap x = L_{k+1}(t + shift*mesh) - L_k(t).
    double gap_value(double x) const;

private:
    LocalHamiltonian() = default;
    Kind kind_ = Kind::Zero;
    double scale_ = 0.0;
    int shift_ = 1;
    std::string name_ = "zero";
    std::function<double(const Rect&)> fn_;
};

// Random walk Hamiltonian: negative log density of one increment, with
// integral exp(-H) over the line equal to 1 (verified at construction by
// quadrature, tolerance 1e-8).
class RWHamiltonian {
public:
    enum class Kind { LogGamma, Quadratic, Custom };

    // H(x) = lgamma(gamma) + gamma*(x - centering) + exp(-(x - centering)),
    // the negative log density of -log(Gamma(gamma, 1)) + centering.
    static RWHamiltonian log_gamma(double gamma, double centering = 0.0);

    // Centered Gaussian increment with the given standard deviation.
    static RWHamiltonian gaussian(double sigma);

    // Standard normal increment: H(x) = x^2/2 + log sqrt(2 pi).
    static RWHamiltonian quadratic() { return gaussian(1.0); }

    // Custom H, normalized by quadrature; pass skip_normalization_check to
    // construct deliberately broken laws for negative controls.
    static RWHamiltonian custom(std::string name, std::function<double(double)> h,
                                bool skip_normalization_check = false);

    double operator()(double x) const { return fn_(x); }

    Kind kind() const { return kind_; }
    const std::string& name() const { return name_; }
    double gamma() const { return gamma_; }
    double centering() const { return centering_; }

private:
    RWHamiltonian() = default;
    void check_normalization() const;

    Kind kind_ = Kind::Quadratic;
    std::string name_;
    double gamma_ = 0.0;
    double centering_ = 0.0;
    std::function<double(double)> fn_;
};

struct HamiltonianPair {
    LocalHamiltonian local;
    RWHamiltonian rw;
};

// Extra boundary interaction in the sense of the external-Hamiltonian
// extension: single-argument penalties felt by the top and bottom curves
// against two additional boundary functions.
struct ExternalField {
    std::function<double(double)> h_upper;  // applied to L_{k1}(t) - f_hat(t)
    std::function<double(double)> h_lower;  // applied to g_hat(t) - L_{k2}(t)
    std::vector<double> f_hat;
    std::vector<double> g_hat;
};

} // namespace gibbs_lines

#endif
