#pragma once

#include <cstddef>
#include <stdexcept>

namespace vofrac {

/// Uniform time grid t_k = k * T / n on [0, T].
class TimeGrid {
public:
    TimeGrid(double horizon, std::size_t steps) : horizon_(horizon), steps_(steps)
    {
        if (!(horizon > 0.0)) {
            throw std::invalid_argument("TimeGrid: horizon must be positive");
        }
        if (steps == 0) {
            throw std::invalid_argument("TimeGrid: step count must be positive");
        }
    }

    double horizon() const { return horizon_; }
    std::size_t steps() const { return steps_; }
    double dt() const { return horizon_ / static_cast<double>(steps_); }

    /// Step relative to the horizon, Δt / T.
    double ratio() const { return 1.0 / static_cast<double>(steps_); }

    // t_n is pinned to T so the endpoint never drifts by a rounding unit.
    double node(std::size_t k) const
    {
        if (k == steps_) {
            return horizon_;
        }
        return static_cast<double>(k) * dt();
    }

private:
    double horizon_;
    std::size_t steps_;
};

/// Uniform spatial grid x_j = x_l + j * (x_r - x_l) / m.
class SpatialGrid {
public:
    SpatialGrid(double left, double right, std::size_t cells)
        : left_(left), right_(right), cells_(cells)
    {
        if (!(right > left)) {
            throw std::invalid_argument("SpatialGrid: right end must exceed left end");
        }
        if (cells < 2) {
            throw std::invalid_argument("SpatialGrid: need at least two cells");
        }
    }

    double left() const { return left_; }
    double right() const { return right_; }
    std::size_t cells() const { return cells_; }
    double dx() const { return (right_ - left_) / static_cast<double>(cells_); }

    double node(std::size_t j) const
    {
        if (j == cells_) {
            return right_;
        }
        return left_ + static_cast<double>(j) * dx();
    }

    /// x_{j+1/2}, the midpoint between nodes j and j + 1.
    double midpoint(std::size_t j) const { return 0.5 * (node(j) + node(j + 1)); }

private:
    double left_;
    double right_;
    std::size_t cells_;
};

}  // namespace vofrac
