#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

namespace vofrac {

/// Smooth monotone transition between α(0) = alpha0 and α(T) = alphaT:
///
///   α(t) = αT + (α0 - αT) (1 - t/T - sin(2π(1 - t/T)) / 2π)
///
/// The endpoints are returned exactly.
inline double alpha_profile(double t, double alpha0, double alphaT, double horizon)
{
    if (!(t >= 0.0 && t <= horizon)) {
        throw std::domain_error("alpha_profile: t outside [0, T]");
    }
    if (t == 0.0) {
        return alpha0;
    }
    if (t == horizon) {
        return alphaT;
    }
    const double s = 1.0 - t / horizon;
    const double shape = s - std::sin(2.0 * std::numbers::pi * s) / (2.0 * std::numbers::pi);
    return alphaT + (alpha0 - alphaT) * shape;
}

/// A time-dependent fractional order α(t) on [0, T] with sampled bounds
/// 0 <= α_* <= α(t) <= α^* < 1.
class VoOrderProfile {
public:
    using Function = std::function<double(double)>;

    /// Wraps a user callable. Bounds are taken from `samples` equispaced
    /// evaluations that include both endpoints.
    static VoOrderProfile custom(Function alpha, double horizon, std::size_t samples = 10001)
    {
        return VoOrderProfile(std::move(alpha), horizon, samples, std::nullopt);
    }

    /// The built-in sine transition profile.
    static VoOrderProfile sine(double alpha0, double alphaT, double horizon,
                               std::size_t samples = 10001)
    {
        auto fn = [=](double t) { return alpha_profile(t, alpha0, alphaT, horizon); };
        return VoOrderProfile(fn, horizon, samples, std::make_pair(alpha0, alphaT));
    }

    /// Constant order, mostly useful in tests.
    static VoOrderProfile constant(double alpha, double horizon)
    {
        return VoOrderProfile([alpha](double) { return alpha; }, horizon, 2, std::nullopt);
    }

    double operator()(double t) const { return alpha_(t); }

    double lower() const { return lower_; }
    double upper() const { return upper_; }
    double horizon() const { return horizon_; }

    /// (α(0), α(T)) when this is the built-in sine profile.
    const std::optional<std::pair<double, double>>& endpoints() const { return endpoints_; }

private:
    VoOrderProfile(Function alpha, double horizon, std::size_t samples,
                   std::optional<std::pair<double, double>> endpoints)
        : alpha_(std::move(alpha)), horizon_(horizon), endpoints_(endpoints)
    {
        if (!(horizon > 0.0)) {
            throw std::invalid_argument("VoOrderProfile: horizon must be positive");
        }
        samples = std::max<std::size_t>(samples, 2);
        lower_ = alpha_(0.0);
        upper_ = lower_;
        for (std::size_t i = 1; i < samples; ++i) {
            const double t = (i + 1 == samples)
                                 ? horizon
                                 : horizon * static_cast<double>(i) / static_cast<double>(samples - 1);
            const double a = alpha_(t);
            if (std::isnan(a)) {
                throw std::invalid_argument("VoOrderProfile: order evaluates to NaN");
            }
            lower_ = std::min(lower_, a);
            upper_ = std::max(upper_, a);
        }
        if (lower_ < 0.0 || upper_ >= 1.0) {
            throw std::invalid_argument("VoOrderProfile: order must satisfy 0 <= alpha(t) < 1, got [" +
                                        std::to_string(lower_) + ", " + std::to_string(upper_) + "]");
        }
    }

    Function alpha_;
    double horizon_;
    double lower_ = 0.0;
    double upper_ = 0.0;
    std::optional<std::pair<double, double>> endpoints_;
};

}  // namespace vofrac
