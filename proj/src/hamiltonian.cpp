#include "gibbs_lines/hamiltonian.hpp"

#include <cmath>

namespace gibbs_lines {

LocalHamiltonian LocalHamiltonian::zero() {
    LocalHamiltonian h;
    h.kind_ = Kind::Zero;
    h.name_ = "zero";
    return h;
}

LocalHamiltonian LocalHamiltonian::exp_gap(double scale, int shift) {
    if (!(scale >= 0.0))
        throw std::invalid_argument("LocalHamiltonian::exp_gap: scale must be >= 0");
    if (shift != 0 && shift != 1)
        throw std::invalid_argument("LocalHamiltonian::exp_gap: shift must be 0 or 1");
    LocalHamiltonian h;
    h.kind_ = Kind::ExpGap;
    h.scale_ = scale;
    h.shift_ = shift;
    h.name_ = "exp-gap";
    return h;
}

LocalHamiltonian LocalHamiltonian::custom(std::string name,
                                          std::function<double(const Rect&)> f) {
    LocalHamiltonian h;
    h.kind_ = Kind::Custom;
    h.name_ = std::move(name);
    h.fn_ = std::move(f);
    return h;
}

double LocalHamiltonian::gap_value(double x) const {
    switch (kind_) {
        case Kind::Zero:
            return 0.0;
        case Kind::ExpGap: {
            // exp(-inf) = 0 and exp(+inf) = +inf fall out of IEEE arithmetic.
            const double v = scale_ * std::exp(x);
            require_not_nan(v, "LocalHamiltonian::gap_value");
            return v;
        }
        case Kind::Custom:
            throw std::logic_error("gap_value: custom Hamiltonian has no gap form");
    }
    return 0.0;
}

double LocalHamiltonian::operator()(const Rect& r) const {
    switch (kind_) {
        case Kind::Zero:
            return 0.0;
        case Kind::ExpGap:
            return gap_value(ext_diff(r[shift_ == 1 ? 5 : 4], r[1]));
        case Kind::Custom: {
            const double v = fn_(r);
            require_not_nan(v, "LocalHamiltonian::custom");
            return v;
        }
    }
    return 0.0;
}

RWHamiltonian RWHamiltonian::log_gamma(double gamma, double centering) {
    if (!(gamma > 0.0))
        throw std::invalid_argument("RWHamiltonian::log_gamma: gamma must be positive");
    RWHamiltonian h;
    h.kind_ = Kind::LogGamma;
    h.name_ = "log-gamma";
    h.gamma_ = gamma;
    h.centering_ = centering;
    const double lg = std::lgamma(gamma);
    h.fn_ = [gamma, centering, lg](double x) {
        const double y = x - centering;
        return lg + gamma * y + std::exp(-y);
    };
    h.check_normalization();
    return h;
}

RWHamiltonian RWHamiltonian::gaussian(double sigma) {
    if (!(sigma > 0.0))
        throw std::invalid_argument("RWHamiltonian::gaussian: sigma must be positive");
    RWHamiltonian h;
    h.kind_ = Kind::Quadratic;
    h.name_ = "gaussian";
    const double c = std::log(sigma) + 0.5 * std::log(2.0 * 3.14159265358979323846);
    const double inv2 = 0.5 / (sigma * sigma);
    h.fn_ = [c, inv2](double x) { return inv2 * x * x + c; };
    h.check_normalization();
    return h;
}

RWHamiltonian RWHamiltonian::custom(std::string name, std::function<double(double)> f,
                                    bool skip_normalization_check) {
    RWHamiltonian h;
    h.kind_ = Kind::Custom;
    h.name_ = std::move(name);
    h.fn_ = std::move(f);
    if (!skip_normalization_check) h.check_normalization();
    return h;
}

void RWHamiltonian::check_normalization() const {
    const auto& f = fn_;
    const double total =
        integrate_line([&f](double x) { return std::exp(-f(x)); }, 1e-12);
    if (std::abs(total - 1.0) > 1e-8)
        throw std::invalid_argument("RWHamiltonian: exp(-H) does not integrate to 1 (got " +
                                    std::to_string(total) + ")");
}

} // namespace gibbs_lines
