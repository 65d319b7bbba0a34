#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "grid.hpp"

namespace vofrac {

/// Mobile-immobile diffusion problem
///
///   u_t + ζ D^{α(t)} u = (p(x) u_x)_x + f(x, t)  on (x_l, x_r) × (0, T]
///   u(x, 0) = φ(x),  u(x_l, t) = u(x_r, t) = 0.
struct ProblemSpec {
    double capacity = 1.0;  // ζ
    std::function<double(double)> diffusivity = [](double) { return 1.0; };
    std::function<double(double, double)> source = [](double, double) { return 0.0; };
    std::function<double(double)> initial = [](double) { return 0.0; };
    double left = 0.0;
    double right = 1.0;
    double horizon = 1.0;

    /// Checks ζ > 0 and p > 0 on `samples` points of [x_l, x_r].
    void validate(std::size_t samples = 1001) const
    {
        if (!(capacity > 0.0)) {
            throw std::invalid_argument("ProblemSpec: capacity must be positive");
        }
        if (!(right > left) || !(horizon > 0.0)) {
            throw std::invalid_argument("ProblemSpec: empty space or time domain");
        }
        for (std::size_t i = 0; i < samples; ++i) {
            const double x = left + (right - left) * static_cast<double>(i) /
                                        static_cast<double>(samples - 1);
            if (!(diffusivity(x) > 0.0)) {
                throw std::invalid_argument("ProblemSpec: diffusivity must be positive");
            }
        }
    }
};

/// Scalar problem u' + ζ D^{α(t)} u = g(t), u(0) = u0.
struct OdeProblem {
    double capacity = 1.0;
    std::function<double(double)> source = [](double) { return 1.0; };
    double initial = 1.0;
    double horizon = 1.0;

    void validate() const
    {
        if (!(capacity > 0.0) || !(horizon > 0.0)) {
            throw std::invalid_argument("OdeProblem: capacity and horizon must be positive");
        }
    }
};

/// ζ = 1, T = 1, g ≡ 1, u(0) = 1.
inline OdeProblem example_ode()
{
    return OdeProblem{};
}

/// [0, 1] × [0, 1], ζ = 1, p ≡ 1, φ(x) = sin(πx), f ≡ 0.
inline ProblemSpec example_pde()
{
    ProblemSpec p;
    p.initial = [](double x) { return std::sin(std::numbers::pi * x); };
    return p;
}

/// Numerical solution: final time level always, full trace optionally.
///
/// `points` is 1 for ODE solutions and m + 1 for PDE solutions (boundary
/// nodes included).
struct SolutionField {
    std::size_t steps = 0;
    std::size_t cells = 0;  // 0 for ODE solutions
    std::vector<double> final_values;
    std::vector<double> trace;  // level-major, (steps + 1) × points; empty if not kept

    std::size_t points() const { return cells == 0 ? 1 : cells + 1; }
    bool is_ode() const { return cells == 0; }

    double at(std::size_t k, std::size_t j) const
    {
        if (trace.empty()) {
            if (k != steps) {
                throw std::out_of_range("SolutionField: trace not retained");
            }
            return final_values.at(j);
        }
        return trace.at(k * points() + j);
    }
};

}  // namespace vofrac
