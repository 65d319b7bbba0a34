#pragma once

#include <chrono>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "caputo.hpp"
#include "grid.hpp"
#include "order_profile.hpp"
#include "problem.hpp"
#include "tridiagonal.hpp"

namespace vofrac {

enum class Scheme { l1, fl1, rfl1 };

inline std::string_view to_string(Scheme s)
{
    switch (s) {
    case Scheme::l1: return "l1";
    case Scheme::fl1: return "fl1";
    case Scheme::rfl1: return "rfl1";
    }
    return "?";
}

inline Scheme parse_scheme(std::string_view name)
{
    if (name == "l1") return Scheme::l1;
    if (name == "fl1") return Scheme::fl1;
    if (name == "rfl1") return Scheme::rfl1;
    throw std::invalid_argument("unknown scheme '" + std::string(name) + "'");
}

/// Expected accuracy of the exponential-sum operators: either fixed, or
/// (Δt/T)^2 capped at 1/e (the cap only matters for n = 1).
struct EpsilonPolicy {
    std::optional<double> fixed;

    static EpsilonPolicy dt_squared() { return {}; }
    static EpsilonPolicy value(double eps) { return {eps}; }

    double resolve(const TimeGrid& grid) const
    {
        if (fixed) {
            return *fixed;
        }
        const double r = grid.ratio();
        return std::min(r * r, std::exp(-1.0));
    }
};

/// Constructs the operator for `scheme` and hands it to `body`.
template <class Body>
decltype(auto) with_operator(Scheme scheme, const TimeGrid& grid, const VoOrderProfile& alpha,
                             std::span<const double> initial, const EpsilonPolicy& eps, Body&& body)
{
    switch (scheme) {
    case Scheme::l1: {
        L1Operator op(grid, alpha, initial);
        return body(op);
    }
    case Scheme::fl1: {
        FastL1Operator op(grid, alpha, initial, eps.resolve(grid));
        return body(op);
    }
    case Scheme::rfl1: break;
    }
    RobustFastL1Operator op(grid, alpha, initial, eps.resolve(grid));
    return body(op);
}

template <class Op>
std::size_t quadrature_count(const Op& op)
{
    if constexpr (requires { op.quadrature(); }) {
        return op.quadrature().size();
    } else {
        return 0;
    }
}

/// Δ_x restricted to the interior nodes j = 1..m-1:
/// row j is (p_{j-1/2}, -(p_{j-1/2} + p_{j+1/2}), p_{j+1/2}) / Δx².
struct SpatialOperator {
    std::vector<double> sub;
    std::vector<double> main;
    std::vector<double> super;

    static SpatialOperator build(const SpatialGrid& grid, const std::function<double(double)>& p)
    {
        const std::size_t n = grid.cells() - 1;
        const double inv_dx2 = 1.0 / (grid.dx() * grid.dx());
        SpatialOperator op;
        op.sub.resize(n);
        op.main.resize(n);
        op.super.resize(n);
        for (std::size_t r = 0; r < n; ++r) {
            const std::size_t j = r + 1;
            const double west = p(grid.midpoint(j - 1)) * inv_dx2;
            const double east = p(grid.midpoint(j)) * inv_dx2;
            op.sub[r] = west;
            op.main[r] = -(west + east);
            op.super[r] = east;
        }
        return op;
    }
};

/// One implicit scalar step (1/Δt + ζ s) u^k = u^{k-1}/Δt - ζ h^k + g(t_k).
/// Advances and commits `op`; returns u^k.
template <CaputoOperator Op>
double ode_step(Op& op, const OdeProblem& problem, const TimeGrid& grid, double previous)
{
    op.advance();
    const std::size_t k = op.level();
    const double s = op.implicit_coefficient();
    double hist = 0.0;
    op.history(std::span<double>(&hist, 1));
    const double inv_dt = 1.0 / grid.dt();
    const double u = (previous * inv_dt - problem.capacity * hist + problem.source(grid.node(k))) /
                     (inv_dt + problem.capacity * s);
    op.commit(std::span<const double>(&u, 1));
    return u;
}

struct PdeWorkspace {
    std::vector<double> history;
    std::vector<double> lower, diag, upper, rhs, scratch;

    explicit PdeWorkspace(std::size_t interior)
        : history(interior), lower(interior), diag(interior), upper(interior), rhs(interior),
          scratch(interior)
    {
    }
};

/// Assembles and solves
///   (1/Δt + ζ s^{(k)}) U^k - Δ_x U^k = U^{k-1}/Δt - ζ h^k + f^k
/// on the interior nodes. `previous` and `next` hold interior values only.
template <CaputoOperator Op>
void pde_step(Op& op, const ProblemSpec& problem, const TimeGrid& tgrid, const SpatialGrid& xgrid,
              const SpatialOperator& dx, std::span<const double> previous, std::span<double> next,
              PdeWorkspace& ws)
{
    op.advance();
    const std::size_t k = op.level();
    const double s = op.implicit_coefficient();
    op.history(ws.history);

    const double inv_dt = 1.0 / tgrid.dt();
    const double shift = inv_dt + problem.capacity * s;
    if (!(shift > 0.0)) {
        throw std::runtime_error("pde_step: step system is not diagonally dominant");
    }
    const double t = tgrid.node(k);
    const std::size_t n = previous.size();
    for (std::size_t r = 0; r < n; ++r) {
        ws.lower[r] = -dx.sub[r];
        ws.diag[r] = shift - dx.main[r];
        ws.upper[r] = -dx.super[r];
        ws.rhs[r] = previous[r] * inv_dt - problem.capacity * ws.history[r] +
                    problem.source(xgrid.node(r + 1), t);
    }
    thomas_solve(ws.lower, ws.diag, ws.upper, ws.rhs, next, ws.scratch);
    op.commit(next);
}

struct SolveStats {
    double cpu_seconds = 0.0;
    std::size_t retained_values = 0;
    std::size_t quadrature_count = 0;
};

struct SolveResult {
    SolutionField field;
    SolveStats stats;
};

/// Marches the scalar problem to t = T with the given scheme.
inline SolveResult solve_ode(Scheme scheme, const OdeProblem& problem, const VoOrderProfile& alpha,
                             const TimeGrid& grid, const EpsilonPolicy& eps,
                             bool keep_trace = false)
{
    problem.validate();
    const auto start = std::chrono::steady_clock::now();
    const double u0 = problem.initial;
    SolveResult result;
    result.field.steps = grid.steps();
    result.field.cells = 0;
    if (keep_trace) {
        result.field.trace.reserve(grid.steps() + 1);
        result.field.trace.push_back(u0);
    }

    with_operator(scheme, grid, alpha, std::span<const double>(&u0, 1), eps, [&](auto& op) {
        double u = u0;
        for (std::size_t k = 1; k <= grid.steps(); ++k) {
            u = ode_step(op, problem, grid, u);
            if (keep_trace) {
                result.field.trace.push_back(u);
            }
        }
        result.field.final_values = {u};
        result.stats.retained_values = op.retained_values();
        result.stats.quadrature_count = quadrature_count(op);
    });
    result.stats.cpu_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
}

/// Marches the diffusion problem to t = T; boundary nodes are held at zero
/// for k >= 1.
inline SolveResult solve_pde(Scheme scheme, const ProblemSpec& problem, const VoOrderProfile& alpha,
                             const TimeGrid& tgrid, const SpatialGrid& xgrid,
                             const EpsilonPolicy& eps, bool keep_trace = false)
{
    problem.validate();
    const auto start = std::chrono::steady_clock::now();
    const std::size_t m = xgrid.cells();
    const std::size_t interior = m - 1;

    std::vector<double> u(interior), next(interior);
    for (std::size_t r = 0; r < interior; ++r) {
        u[r] = problem.initial(xgrid.node(r + 1));
    }

    SolveResult result;
    result.field.steps = tgrid.steps();
    result.field.cells = m;
    auto push_level = [&](std::span<const double> values, double left, double right) {
        result.field.trace.push_back(left);
        result.field.trace.insert(result.field.trace.end(), values.begin(), values.end());
        result.field.trace.push_back(right);
    };
    if (keep_trace) {
        result.field.trace.reserve((tgrid.steps() + 1) * (m + 1));
        push_level(u, problem.initial(xgrid.node(0)), problem.initial(xgrid.node(m)));
    }

    const auto dx = SpatialOperator::build(xgrid, problem.diffusivity);
    PdeWorkspace ws(interior);
    with_operator(scheme, tgrid, alpha, u, eps, [&](auto& op) {
        for (std::size_t k = 1; k <= tgrid.steps(); ++k) {
            pde_step(op, problem, tgrid, xgrid, dx, u, next, ws);
            u.swap(next);
            if (keep_trace) {
                push_level(u, 0.0, 0.0);
            }
        }
        result.stats.retained_values = op.retained_values();
        result.stats.quadrature_count = quadrature_count(op);
    });

    result.field.final_values.assign(m + 1, 0.0);
    std::copy(u.begin(), u.end(), result.field.final_values.begin() + 1);
    result.stats.cpu_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
}

}  // namespace vofrac
