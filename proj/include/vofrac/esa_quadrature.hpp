#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "gamma.hpp"

namespace vofrac {

/// Raised when the exponential-sum lower index has no finite value, which
/// happens for the direct (F-L1) parameterization when the order's lower
/// bound vanishes.
class EsaDivergenceError : public std::invalid_argument {
public:
    EsaDivergenceError()
        : std::invalid_argument("ESA lower index diverges for vanishing order lower bound")
    {
    }
};

/// Which power-law kernel the quadrature compresses.
enum class EsaKernel {
    shifted,  // (t/T)^-(1+α), β in [1, 2): the robust fast L1 history kernel
    direct,   // (t/T)^-α,     β in (0, 1): the fast L1 kernel
};

struct EsaConfig {
    EsaKernel kernel = EsaKernel::shifted;
    double beta_lo = 1.0;  // β_*
    double beta_hi = 1.0;  // β^*
    double epsilon = 1e-6;
    double ratio = 1.0;  // δ = Δt / T

    void validate() const
    {
        if (!(epsilon > 0.0 && epsilon <= std::exp(-1.0))) {
            throw std::invalid_argument("EsaConfig: epsilon must lie in (0, 1/e]");
        }
        if (!(ratio > 0.0 && ratio <= 1.0)) {
            throw std::invalid_argument("EsaConfig: step ratio must lie in (0, 1]");
        }
        if (kernel == EsaKernel::direct) {
            if (!(beta_lo > 0.0)) {
                throw EsaDivergenceError();
            }
            if (!(beta_lo <= beta_hi && beta_hi < 1.0)) {
                throw std::invalid_argument("EsaConfig: direct kernel needs 0 < beta_lo <= beta_hi < 1");
            }
        } else if (!(beta_lo >= 1.0 && beta_lo <= beta_hi && beta_hi < 2.0)) {
            throw std::invalid_argument("EsaConfig: shifted kernel needs 1 <= beta_lo <= beta_hi < 2");
        }
    }
};

/// Exponential-sum approximation
///
///   s^-β ≈ Σ_{i = lower+1}^{upper} θ_i(β) e^{-λ_i s},   s in [δ, 1],
///
/// with λ_i = e^{ih} and θ_i(β) = h e^{βih} / Γ(β). The node set is
/// independent of β; only the weights change with the order.
class EsaQuadrature {
public:
    const EsaConfig& config() const { return config_; }
    double step() const { return step_; }
    std::int64_t lower() const { return lower_; }
    std::int64_t upper() const { return upper_; }
    std::size_t size() const { return exponents_.size(); }

    /// Index of the j-th node, lower() + 1 + j.
    std::int64_t index(std::size_t j) const { return lower_ + 1 + static_cast<std::int64_t>(j); }

    const std::vector<double>& exponents() const { return exponents_; }

    /// Unrounded lower/upper index expressions, kept for diagnostics.
    double lower_expression() const { return lower_expr_; }
    double upper_expression() const { return upper_expr_; }

    /// Count bound (1/10)(2 log(1/ε) + log β^* + 2)(log(1/δ) + log(1/ε)/β_* + log log(1/ε) + 3/2).
    double size_bound() const
    {
        const double le = std::log(1.0 / config_.epsilon);
        return 0.1 * (2.0 * le + std::log(config_.beta_hi) + 2.0) *
               (std::log(1.0 / config_.ratio) + le / config_.beta_lo + std::log(le) + 1.5);
    }

    friend EsaQuadrature build_quadrature(const EsaConfig& config);

private:
    EsaConfig config_;
    double step_ = 0.0;
    std::int64_t lower_ = 0;
    std::int64_t upper_ = 0;
    double lower_expr_ = 0.0;
    double upper_expr_ = 0.0;
    std::vector<double> exponents_;
};

/// Builds the node set for `config`.
///
///   h     = 2π / (log 3 + β^* log(1/cos 1) + log(1/ε))
///   lower = (1/h)(1/β_*)(log ε + log Γ(1 + β^*))            (negative)
///   upper = (1/h)(log(1/δ) + log log(1/ε) + log β_* + 1/2)   (positive)
///
/// Nodes run over the integers floor(lower) .. ceil(upper) inclusive; the
/// stored lower() is one below the first node so the count is upper() - lower().
inline EsaQuadrature build_quadrature(const EsaConfig& config)
{
    config.validate();
    const double log_inv_eps = std::log(1.0 / config.epsilon);

    EsaQuadrature q;
    q.config_ = config;
    q.step_ = 2.0 * std::numbers::pi /
              (std::log(3.0) + config.beta_hi * std::log(1.0 / std::cos(1.0)) + log_inv_eps);
    q.lower_expr_ = (std::log(config.epsilon) + std::log(gamma(1.0 + config.beta_hi))) /
                    (q.step_ * config.beta_lo);
    q.upper_expr_ = (std::log(1.0 / config.ratio) + std::log(log_inv_eps) +
                     std::log(config.beta_lo) + 0.5) /
                    q.step_;
    q.lower_ = static_cast<std::int64_t>(std::floor(q.lower_expr_)) - 1;
    q.upper_ = static_cast<std::int64_t>(std::ceil(q.upper_expr_));
    if (q.upper_ <= q.lower_) {
        throw std::invalid_argument("build_quadrature: empty index range");
    }

    q.exponents_.resize(static_cast<std::size_t>(q.upper_ - q.lower_));
    for (std::size_t j = 0; j < q.exponents_.size(); ++j) {
        q.exponents_[j] = std::exp(static_cast<double>(q.index(j)) * q.step_);
    }
    return q;
}

/// Weights θ_i = h e^{β i h} / Γ(β), in node order.
inline std::vector<double> step_weights(const EsaQuadrature& q, double beta)
{
    const auto& c = q.config();
    if (!(beta >= c.beta_lo && beta <= c.beta_hi)) {
        throw std::domain_error("step_weights: order outside the quadrature's band");
    }
    const double scale = q.step() / gamma(beta);
    std::vector<double> w(q.size());
    for (std::size_t j = 0; j < w.size(); ++j) {
        w[j] = scale * std::exp(beta * static_cast<double>(q.index(j)) * q.step());
    }
    return w;
}

/// Σ θ_i e^{-λ_i s}; terms whose exponential underflows are skipped.
inline double kernel_eval(const EsaQuadrature& q, double beta, double s)
{
    const auto w = step_weights(q, beta);
    const auto& lambda = q.exponents();
    double sum = 0.0;
    for (std::size_t j = 0; j < w.size(); ++j) {
        const double x = lambda[j] * s;
        if (x > 745.0) {
            break;  // λ increasing: every later term underflows too
        }
        sum += w[j] * std::exp(-x);
    }
    return sum;
}

}  // namespace vofrac
