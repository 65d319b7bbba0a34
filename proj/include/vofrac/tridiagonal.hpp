#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace vofrac {

/// Tridiagonal system; lower[0] and upper[n-1] are ignored.
struct TridiagonalSystem {
    std::vector<double> lower;
    std::vector<double> diag;
    std::vector<double> upper;
    std::vector<double> rhs;

    std::size_t size() const { return diag.size(); }

    /// Smallest |diag| - |lower| - |upper| over the rows.
    double dominance_margin() const
    {
        double margin = INFINITY;
        const std::size_t n = size();
        for (std::size_t i = 0; i < n; ++i) {
            double off = 0.0;
            if (i > 0) off += std::abs(lower[i]);
            if (i + 1 < n) off += std::abs(upper[i]);
            margin = std::min(margin, std::abs(diag[i]) - off);
        }
        return margin;
    }
};

/// Thomas elimination without pivoting into `x`, using `scratch` (size n)
/// for the modified super-diagonal. Throws on a vanishing pivot.
inline void thomas_solve(std::span<const double> lower, std::span<const double> diag,
                         std::span<const double> upper, std::span<const double> rhs,
                         std::span<double> x, std::span<double> scratch)
{
    const std::size_t n = diag.size();
    if (n == 0 || lower.size() != n || upper.size() != n || rhs.size() != n || x.size() != n ||
        scratch.size() != n) {
        throw std::invalid_argument("thomas_solve: inconsistent sizes");
    }
    constexpr double tiny = 1e-300;

    double pivot = diag[0];
    if (std::abs(pivot) < tiny) {
        throw std::runtime_error("thomas_solve: zero pivot");
    }
    scratch[0] = upper[0] / pivot;
    x[0] = rhs[0] / pivot;
    for (std::size_t i = 1; i < n; ++i) {
        pivot = diag[i] - lower[i] * scratch[i - 1];
        if (std::abs(pivot) < tiny) {
            throw std::runtime_error("thomas_solve: zero pivot");
        }
        scratch[i] = upper[i] / pivot;
        x[i] = (rhs[i] - lower[i] * x[i - 1]) / pivot;
    }
    for (std::size_t i = n - 1; i-- > 0;) {
        x[i] -= scratch[i] * x[i + 1];
    }
}

inline std::vector<double> thomas_solve(const TridiagonalSystem& sys)
{
    std::vector<double> x(sys.size()), scratch(sys.size());
    thomas_solve(sys.lower, sys.diag, sys.upper, sys.rhs, x, scratch);
    return x;
}

}  // namespace vofrac
