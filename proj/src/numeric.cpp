#include "gibbs_lines/numeric.hpp"

#include <algorithm>
#include <functional>

namespace gibbs_lines {

double log_sum_exp(std::span<const double> xs) {
    double m = kNegInf;
    for (double x : xs) {
        require_not_nan(x, "log_sum_exp");
        m = std::max(m, x);
    }
    if (m == kNegInf) return kNegInf;
    if (m == kInf) return kInf;
    double s = 0.0;
    for (double x : xs) s += std::exp(x - m);
    return m + std::log(s);
}

namespace {

double simpson(const std::function<double(double)>& f, double a, double fa, double b,
               double fb, double fm, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    return simpson(f, a, fa, m, fm, flm, left, tol / 2.0, depth - 1) +
           simpson(f, m, fm, b, fb, frm, right, tol / 2.0, depth - 1);
}

} // namespace

double integrate(const std::function<double(double)>& f, double a, double b, double tol,
                 int max_depth) {
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    const double r = simpson(f, a, fa, b, fb, fm, whole, tol, max_depth);
    require_not_nan(r, "integrate");
    return r;
}

double integrate_line(const std::function<double(double)>& f, double tol) {
    // Locate the bulk of the mass, then widen until the added shells vanish.
    double lo = -1.0, hi = 1.0;
    double total = integrate(f, lo, hi, tol);
    for (int iter = 0; iter < 60; ++iter) {
        const double width = hi - lo;
        const double left = integrate(f, lo - width, lo, tol);
        const double right = integrate(f, hi, hi + width, tol);
        lo -= width;
        hi += width;
        total += left + right;
        if (std::abs(left) + std::abs(right) < tol * std::max(1.0, std::abs(total)) &&
            iter >= 2)
            break;
    }
    return total;
}

LogDet log_abs_det(std::vector<std::vector<double>> a) {
    const size_t n = a.size();
    for (const auto& row : a)
        if (row.size() != n) throw std::invalid_argument("log_abs_det: matrix not square");
    int sign = 1;
    double log_abs = 0.0;
    for (size_t col = 0; col < n; ++col) {
        size_t piv = col;
        for (size_t r = col + 1; r < n; ++r)
            if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
        if (a[piv][col] == 0.0) return {kNegInf, 0};
        if (piv != col) {
            std::swap(a[piv], a[col]);
            sign = -sign;
        }
        const double d = a[col][col];
        if (d < 0.0) sign = -sign;
        log_abs += std::log(std::abs(d));
        for (size_t r = col + 1; r < n; ++r) {
            const double factor = a[r][col] / d;
            if (factor == 0.0) continue;
            for (size_t c = col; c < n; ++c) a[r][c] -= factor * a[col][c];
        }
    }
    return {log_abs, sign};
}

} // namespace gibbs_lines
