#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "esa_quadrature.hpp"
#include "gamma.hpp"
#include "grid.hpp"
#include "order_profile.hpp"

namespace vofrac {

// Discrete variable-order Caputo operators.
//
// Every operator is a level-synchronous state machine over a fixed set of
// points (one per spatial unknown, or one for a scalar ODE). The driving
// loop is, for k = 1..n:
//
//   op.advance();                         // move to level k
//   s = op.implicit_coefficient();        // coefficient of u^k
//   op.history(h);                        // D u^k = s u^k + h
//   ... solve for u^k ...
//   op.commit(u^k);
//
// Only the u^k term is implicit, so all three operators plug into the same
// tridiagonal step.

template <class Op>
concept CaputoOperator = requires(Op op, const Op cop, std::span<const double> in,
                                  std::span<double> out) {
    op.advance();
    { cop.level() } -> std::convertible_to<std::size_t>;
    { cop.points() } -> std::convertible_to<std::size_t>;
    { cop.implicit_coefficient() } -> std::convertible_to<double>;
    cop.history(out);
    op.commit(in);
    { cop.retained_values() } -> std::convertible_to<std::size_t>;
};

namespace detail {

// Below this both closed forms lose digits to cancellation; the series
// through x^14 is exact to rounding there.
inline constexpr double hat_series_cutoff = 0.1;

// 1 - e^{-x} - x e^{-x} = Σ_{j>=2} (-1)^j (j-1) x^j / j!
inline double hat_falling(double x)
{
    if (x <= hat_series_cutoff) {
        double term = 1.0, sum = 0.0;
        for (int j = 1; j <= 14; ++j) {
            term *= -x / j;
            if (j >= 2) sum += (j - 1) * term;
        }
        return sum;
    }
    return -std::expm1(-x) - x * std::exp(-x);
}

// x - 1 + e^{-x} = Σ_{j>=2} (-1)^j x^j / j!
inline double hat_rising(double x)
{
    if (x <= hat_series_cutoff) {
        double term = 1.0, sum = 0.0;
        for (int j = 1; j <= 14; ++j) {
            term *= -x / j;
            if (j >= 2) sum += term;
        }
        return sum;
    }
    return x + std::expm1(-x);
}

inline void check_points(std::span<const double> u, std::size_t points)
{
    if (u.size() != points) {
        throw std::invalid_argument("Caputo operator: wrong number of point values");
    }
}

}  // namespace detail

/// Direct L1 discretization. Keeps the whole history: O(k) work and memory
/// per point at level k.
class L1Operator {
public:
    L1Operator(TimeGrid grid, VoOrderProfile alpha, std::span<const double> initial)
        : grid_(grid), alpha_(std::move(alpha)), points_(initial.size()),
          last_(initial.begin(), initial.end())
    {
        if (points_ == 0) {
            throw std::invalid_argument("L1Operator: need at least one point");
        }
    }

    std::size_t level() const { return level_; }
    std::size_t points() const { return points_; }
    double order() const { return alpha_k_; }

    void advance()
    {
        if (committed_ != level_) {
            throw std::logic_error("L1Operator: advance before commit");
        }
        if (level_ == grid_.steps()) {
            throw std::out_of_range("L1Operator: past the final level");
        }
        ++level_;
        const std::size_t k = level_;
        alpha_k_ = alpha_(grid_.node(k));
        scale_ = std::pow(grid_.dt(), -alpha_k_) / gamma(2.0 - alpha_k_);

        // a_l = (l+1)^{1-α} - l^{1-α}, written as l^{1-α} expm1((1-α) log1p(1/l))
        const double g = 1.0 - alpha_k_;
        weights_.assign(k, 1.0);
        for (std::size_t l = 1; l < k; ++l) {
            const double dl = static_cast<double>(l);
            weights_[l] = std::pow(dl, g) * std::expm1(g * std::log1p(1.0 / dl));
        }
    }

    /// s^{(k)} = Δt^{-α_k} / Γ(2 - α_k)
    double implicit_coefficient() const { return scale_; }

    /// s (-u^{k-1} + Σ_{q=1}^{k-1} a_{k-q} (u^q - u^{q-1})), per point.
    void history(std::span<double> out) const
    {
        if (out.size() != points_) {
            throw std::invalid_argument("L1Operator: wrong output size");
        }
        const std::size_t k = level_;
        std::fill(out.begin(), out.end(), 0.0);
        for (std::size_t q = 1; q < k; ++q) {
            const double a = weights_[k - q];
            const double* d = increments_.data() + (q - 1) * points_;
            for (std::size_t j = 0; j < points_; ++j) {
                out[j] += a * d[j];
            }
        }
        for (std::size_t j = 0; j < points_; ++j) {
            out[j] = scale_ * (out[j] - last_[j]);
        }
    }

    /// Full operator value at level k for point j given u^k.
    double apply(std::size_t j, double u_k) const
    {
        std::vector<double> h(points_);
        history(h);
        return scale_ * u_k + h.at(j);
    }

    void commit(std::span<const double> u)
    {
        detail::check_points(u, points_);
        if (committed_ + 1 != level_) {
            throw std::logic_error("L1Operator: commit without advance");
        }
        for (std::size_t j = 0; j < points_; ++j) {
            increments_.push_back(u[j] - last_[j]);
            last_[j] = u[j];
        }
        committed_ = level_;
    }

    /// Stored 64-bit values: the level increments plus the latest level.
    std::size_t retained_values() const { return increments_.size() + last_.size(); }

private:
    TimeGrid grid_;
    VoOrderProfile alpha_;
    std::size_t points_;
    std::size_t level_ = 0;
    std::size_t committed_ = 0;
    double alpha_k_ = 0.0;
    double scale_ = 0.0;
    std::vector<double> weights_;
    std::vector<double> increments_;  // level-major, u^q - u^{q-1} for q = 1..
    std::vector<double> last_;
};

namespace detail {

// Shared state of the two exponential-sum operators: per-point accumulators
// laid out point-major (points × nodes) plus the last two committed levels.
class FastOperatorBase {
public:
    std::size_t level() const { return level_; }
    std::size_t points() const { return points_; }
    double order() const { return alpha_k_; }
    double implicit_coefficient() const { return scale_; }
    const EsaQuadrature& quadrature() const { return quad_; }

    /// Accumulator of node i at point j for the current level.
    double accumulator(std::size_t j, std::size_t i) const { return acc_.at(j * quad_.size() + i); }

    void commit(std::span<const double> u)
    {
        check_points(u, points_);
        if (committed_ + 1 != level_) {
            throw std::logic_error("Caputo operator: commit without advance");
        }
        prev2_.swap(prev1_);
        prev1_.assign(u.begin(), u.end());
        committed_ = level_;
    }

    /// Accumulators, three stored levels and the per-node constants.
    std::size_t retained_values() const
    {
        return acc_.size() + initial_.size() + prev1_.size() + prev2_.size() + 4 * quad_.size();
    }

protected:
    FastOperatorBase(TimeGrid grid, VoOrderProfile alpha, std::span<const double> initial,
                     EsaQuadrature quad)
        : grid_(grid), alpha_(std::move(alpha)), points_(initial.size()), quad_(std::move(quad)),
          initial_(initial.begin(), initial.end()), prev1_(initial_), prev2_(initial_),
          acc_(points_ * quad_.size(), 0.0), decay_(quad_.size()), theta_(quad_.size())
    {
        if (points_ == 0) {
            throw std::invalid_argument("Caputo operator: need at least one point");
        }
        const double dt_over_T = grid_.ratio();
        for (std::size_t i = 0; i < quad_.size(); ++i) {
            decay_[i] = std::exp(-quad_.exponents()[i] * dt_over_T);
        }
    }

    // Moves to the next level and refreshes α_k, s^{(k)} and θ^{(k)} for the
    // kernel exponent β_k = alpha_k + beta_shift.
    void next_level(double beta_shift)
    {
        if (committed_ != level_) {
            throw std::logic_error("Caputo operator: advance before commit");
        }
        if (level_ == grid_.steps()) {
            throw std::out_of_range("Caputo operator: past the final level");
        }
        ++level_;
        alpha_k_ = alpha_(grid_.node(level_));
        scale_ = std::pow(grid_.dt(), -alpha_k_) / gamma(2.0 - alpha_k_);
        if (level_ >= 2) {
            const double beta = alpha_k_ + beta_shift;
            const double w = quad_.step() / gamma(beta);
            for (std::size_t i = 0; i < theta_.size(); ++i) {
                theta_[i] = w * std::exp(beta * static_cast<double>(quad_.index(i)) * quad_.step());
            }
        }
    }

    double weighted_accumulator(std::size_t j) const
    {
        const std::size_t n = quad_.size();
        const double* f = acc_.data() + j * n;
        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            sum += theta_[i] * f[i];
        }
        return sum;
    }

    TimeGrid grid_;
    VoOrderProfile alpha_;
    std::size_t points_;
    EsaQuadrature quad_;
    std::size_t level_ = 0;
    std::size_t committed_ = 0;
    double alpha_k_ = 0.0;
    double scale_ = 0.0;
    std::vector<double> initial_;
    std::vector<double> prev1_;  // u^{k-1}
    std::vector<double> prev2_;  // u^{k-2}
    std::vector<double> acc_;
    std::vector<double> decay_;  // e^{-λ_i Δt / T}
    std::vector<double> theta_;
};

}  // namespace detail

/// Robust fast L1 (RF-L1): integration by parts moves the history kernel to
/// ((t_k - τ)/T)^{-(1+α_k)}, whose exponential-sum approximation needs no
/// positive lower bound on α.
///
///   D u^k = [u^{k-1}/Δt^α - u^0/t_k^α - α/T^{1+α} Σ θ_i F_{k,i}] / Γ(1-α)
///           + (u^k - u^{k-1}) / (Δt^α Γ(2-α))
///
/// with F_{k,i} = ∫_0^{t_{k-1}} L(τ) e^{-(t_k-τ)λ_i/T} dτ for the piecewise
/// linear interpolant L, updated by an exact one-interval recursion.
class RobustFastL1Operator : public detail::FastOperatorBase {
public:
    RobustFastL1Operator(TimeGrid grid, VoOrderProfile alpha, std::span<const double> initial,
                         double epsilon)
        : FastOperatorBase(grid, alpha, initial, make_quadrature(grid, alpha, epsilon)),
          coef_prev2_(quad_.size()), coef_prev1_(quad_.size())
    {
        const double dt = grid_.dt();
        const double ratio = grid_.ratio();
        for (std::size_t i = 0; i < quad_.size(); ++i) {
            const double x = quad_.exponents()[i] * ratio;
            const double common = dt * decay_[i] / (x * x);
            coef_prev2_[i] = common * detail::hat_falling(x);
            coef_prev1_[i] = common * detail::hat_rising(x);
        }
    }

    static EsaQuadrature make_quadrature(const TimeGrid& grid, const VoOrderProfile& alpha,
                                         double epsilon)
    {
        return build_quadrature(EsaConfig{EsaKernel::shifted, 1.0 + alpha.lower(),
                                          1.0 + alpha.upper(), epsilon, grid.ratio()});
    }

    /// Moves to the next level; for k >= 2 this is the O(N_ε) accumulator update
    ///   F_{k,i} = e^{-Δtλ_i/T} F_{k-1,i} + A_i u^{k-2} + B_i u^{k-1}.
    void advance()
    {
        next_level(1.0);
        if (level_ < 2) {
            return;
        }
        const std::size_t n = quad_.size();
        for (std::size_t j = 0; j < points_; ++j) {
            double* f = acc_.data() + j * n;
            const double u2 = prev2_[j];
            const double u1 = prev1_[j];
            for (std::size_t i = 0; i < n; ++i) {
                f[i] = decay_[i] * f[i] + coef_prev2_[i] * u2 + coef_prev1_[i] * u1;
            }
        }
    }

    void history(std::span<double> out) const
    {
        if (out.size() != points_) {
            throw std::invalid_argument("RobustFastL1Operator: wrong output size");
        }
        if (level_ == 1) {
            for (std::size_t j = 0; j < points_; ++j) {
                out[j] = -scale_ * initial_[j];
            }
            return;
        }
        const double a = alpha_k_;
        const double inv_g = 1.0 / gamma(1.0 - a);
        const double local = std::pow(grid_.dt(), -a);
        const double origin = std::pow(grid_.node(level_), -a);
        const double tail = a / std::pow(grid_.horizon(), 1.0 + a);
        for (std::size_t j = 0; j < points_; ++j) {
            const double hist =
                inv_g * (prev1_[j] * local - initial_[j] * origin - tail * weighted_accumulator(j));
            out[j] = hist - scale_ * prev1_[j];
        }
    }

    double apply(std::size_t j, double u_k) const
    {
        std::vector<double> h(points_);
        history(h);
        return scale_ * u_k + h.at(j);
    }

private:
    std::vector<double> coef_prev2_;  // A_i
    std::vector<double> coef_prev1_;  // B_i
};

/// Fast L1 (F-L1): exponential-sum approximation of the original kernel
/// ((t_k - τ)/T)^{-α_k}. Requires inf α > 0.
///
///   D u^k = T^{-α}/Γ(1-α) Σ θ̃_i F̃_{k,i} + (u^k - u^{k-1}) / (Δt^α Γ(2-α))
class FastL1Operator : public detail::FastOperatorBase {
public:
    FastL1Operator(TimeGrid grid, VoOrderProfile alpha, std::span<const double> initial,
                   double epsilon)
        : FastOperatorBase(grid, alpha, initial, make_quadrature(grid, alpha, epsilon)),
          coef_jump_(quad_.size())
    {
        const double ratio = grid_.ratio();
        for (std::size_t i = 0; i < quad_.size(); ++i) {
            const double x = quad_.exponents()[i] * ratio;
            coef_jump_[i] = decay_[i] * (-std::expm1(-x)) / x;
        }
    }

    static EsaQuadrature make_quadrature(const TimeGrid& grid, const VoOrderProfile& alpha,
                                         double epsilon)
    {
        return build_quadrature(
            EsaConfig{EsaKernel::direct, alpha.lower(), alpha.upper(), epsilon, grid.ratio()});
    }

    /// F̃_{k,i} = e^{-λ̃_iΔt/T} F̃_{k-1,i} + T(e^{-λ̃_iΔt/T} - e^{-2λ̃_iΔt/T})/(λ̃_iΔt) (u^{k-1} - u^{k-2})
    void advance()
    {
        next_level(0.0);
        if (level_ < 2) {
            return;
        }
        const std::size_t n = quad_.size();
        for (std::size_t j = 0; j < points_; ++j) {
            double* f = acc_.data() + j * n;
            const double jump = prev1_[j] - prev2_[j];
            for (std::size_t i = 0; i < n; ++i) {
                f[i] = decay_[i] * f[i] + coef_jump_[i] * jump;
            }
        }
    }

    void history(std::span<double> out) const
    {
        if (out.size() != points_) {
            throw std::invalid_argument("FastL1Operator: wrong output size");
        }
        if (level_ == 1) {
            for (std::size_t j = 0; j < points_; ++j) {
                out[j] = -scale_ * initial_[j];
            }
            return;
        }
        const double a = alpha_k_;
        const double factor = std::pow(grid_.horizon(), -a) / gamma(1.0 - a);
        for (std::size_t j = 0; j < points_; ++j) {
            out[j] = factor * weighted_accumulator(j) - scale_ * prev1_[j];
        }
    }

    double apply(std::size_t j, double u_k) const
    {
        std::vector<double> h(points_);
        history(h);
        return scale_ * u_k + h.at(j);
    }

private:
    std::vector<double> coef_jump_;
};

static_assert(CaputoOperator<L1Operator>);
static_assert(CaputoOperator<RobustFastL1Operator>);
static_assert(CaputoOperator<FastL1Operator>);

/// RF-L1 rewritten as s^{(k)} (u^k - Σ_{l<k} d_l u^l).
struct KernelWeights {
    double scale = 0.0;
    std::vector<double> d;
};

/// Closed-form d_l^{(k)} of the RF-L1 operator at level k.
///
/// Each interior d_l collects the two hat-function integrals around t_l
/// against the exponential sum; d_0 also carries (1-α)k^{-α} and d_{k-1}
/// the local α term.
inline KernelWeights rfl1_weights(std::size_t k, const TimeGrid& grid, const VoOrderProfile& alpha,
                                  const EsaQuadrature& quad)
{
    if (k < 1 || k > grid.steps()) {
        throw std::out_of_range("rfl1_weights: level outside 1..n");
    }
    const double a = alpha(grid.node(k));
    const double dt = grid.dt();
    const double T = grid.horizon();

    KernelWeights w;
    w.scale = std::pow(dt, -a) / gamma(2.0 - a);
    if (k == 1) {
        w.d = {1.0};
        return w;
    }

    const auto theta = step_weights(quad, 1.0 + a);
    const auto& lambda = quad.exponents();
    const double ratio = grid.ratio();
    const double factor = a * (1.0 - a) * std::pow(dt, a - 1.0) / std::pow(T, 1.0 + a);

    // For each node: rising(m) = ∫ over the interval ending m steps before t_k
    // of (τ - left end) e^{-λ(t_k-τ)/T}, falling(m) likewise with (right end - τ).
    std::vector<double> rise(quad.size()), fall(quad.size()), xs(quad.size());
    for (std::size_t i = 0; i < quad.size(); ++i) {
        const double x = lambda[i] * ratio;
        const double inv_c2 = (T / lambda[i]) * (T / lambda[i]);
        rise[i] = theta[i] * inv_c2 * detail::hat_rising(x);
        fall[i] = theta[i] * inv_c2 * detail::hat_falling(x);
        xs[i] = x;
    }

    auto sum_over_nodes = [&](std::size_t l) {
        // interval [t_{l-1}, t_l] ends k-l steps before t_k, [t_l, t_{l+1}] ends k-l-1 steps before
        double s = 0.0;
        for (std::size_t i = 0; i < quad.size(); ++i) {
            const double x = xs[i];
            double term = 0.0;
            if (l >= 1) {
                term += rise[i] * std::exp(-static_cast<double>(k - l) * x);
            }
            if (l + 1 <= k - 1) {
                term += fall[i] * std::exp(-static_cast<double>(k - l - 1) * x);
            }
            s += term;
        }
        return s;
    };

    w.d.assign(k, 0.0);
    for (std::size_t l = 0; l < k; ++l) {
        w.d[l] = factor * sum_over_nodes(l);
    }
    w.d[0] += (1.0 - a) * std::pow(static_cast<double>(k), -a);
    w.d[k - 1] += a;
    return w;
}

}  // namespace vofrac
