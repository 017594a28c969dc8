#ifndef GIBBS_LINES_NUMERIC_HPP
#define GIBBS_LINES_NUMERIC_HPP

#include <cmath>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace gibbs_lines {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Extended reals are plain doubles with +-inf sentinels. The conventions
// exp(-inf) = 0 and inf + finite = inf come for free from IEEE arithmetic;
// NaN is a hard error everywhere in this codebase.
inline void require_not_nan(double x, const char* what) {
    if (std::isnan(x)) throw std::domain_error(std::string("NaN encountered in ") + what);
}

// x - y with the convention that equal infinities cancel to 0. Used when
// differencing Hamiltonian values that may both be +inf.
inline double ext_diff(double x, double y) {
    if (x == y) return 0.0;
    return x - y;
}

// log(exp(x) + exp(y)), stable.
inline double log_add(double x, double y) {
    if (x < y) std::swap(x, y);
    if (y == kNegInf) return x;
    const double d = y - x;
    if (d < -45.0) return x;
    return x + std::log1p(std::exp(d));
}

double log_sum_exp(std::span<const double> xs);

inline double log_mean_exp(std::span<const double> xs) {
    if (xs.empty()) throw std::invalid_argument("log_mean_exp: empty input");
    return log_sum_exp(xs) - std::log(static_cast<double>(xs.size()));
}

// Adaptive Simpson quadrature on [a,b].
double integrate(const std::function<double(double)>& f, double a, double b,
                 double tol = 1e-12, int max_depth = 40);

// Integral of f over the whole line, for integrands that decay at infinity.
// Expands the window until the boundary contributions are negligible.
double integrate_line(const std::function<double(double)>& f, double tol = 1e-12);

// log|det| of a small dense matrix by LU with partial pivoting.
// Returns {log_abs_det, sign}; sign is 0 for an exactly singular matrix.
struct LogDet {
    double log_abs = kNegInf;
    int sign = 0;
};
LogDet log_abs_det(std::vector<std::vector<double>> a);

} // namespace gibbs_lines

#endif
