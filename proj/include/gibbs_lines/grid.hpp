#ifndef GIBBS_LINES_GRID_HPP
#define GIBBS_LINES_GRID_HPP

#include <cmath>
#include <stdexcept>

namespace gibbs_lines {

// Uniform discrete time axis {origin + k * mesh : k = 0..count-1}.
class Grid {
public:
    Grid(double origin, double mesh, int count)
        : origin_(origin), mesh_(mesh), count_(count) {
        if (!(mesh > 0.0)) throw std::invalid_argument("Grid: mesh must be positive");
        if (count < 1) throw std::invalid_argument("Grid: count must be >= 1");
        if (std::isnan(origin)) throw std::invalid_argument("Grid: origin is NaN");
    }

    double origin() const { return origin_; }
    double mesh() const { return mesh_; }
    int count() const { return count_; }

    double site(int i) const {
        if (i < 0 || i >= count_) throw std::out_of_range("Grid::site: index out of range");
        return origin_ + i * mesh_;
    }

    double left() const { return origin_; }
    double right() const { return site(count_ - 1); }

    // Nearest site index to time t; throws if t is off the grid by more than tol.
    int index_of(double t, double tol = 1e-9) const {
        const double raw = (t - origin_) / mesh_;
        const int i = static_cast<int>(std::lround(raw));
        if (i < 0 || i >= count_ || std::abs(raw - i) > tol)
            throw std::out_of_range("Grid::index_of: time not on grid");
        return i;
    }

    bool operator==(const Grid& o) const {
        return origin_ == o.origin_ && mesh_ == o.mesh_ && count_ == o.count_;
    }

private:
    double origin_;
    double mesh_;
    int count_;
};

} // namespace gibbs_lines

#endif
