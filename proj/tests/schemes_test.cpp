#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "vofrac/schemes.hpp"
#include "vofrac/tridiagonal.hpp"

using namespace vofrac;

TEST(Thomas, Identity)
{
    TridiagonalSystem s{{0, 0, 0, 0}, {1, 1, 1, 1}, {0, 0, 0, 0}, {3, -1, 2.5, 0}};
    EXPECT_EQ(thomas_solve(s), s.rhs);
}

TEST(Thomas, SmallSystem)
{
    TridiagonalSystem s{{0, -1, -1}, {2, 2, 2}, {-1, -1, 0}, {1, 0, 1}};
    const auto x = thomas_solve(s);
    for (double v : x) EXPECT_NEAR(v, 1.0, 1e-15);
}

TEST(Thomas, RandomDominantMatchesDenseElimination)
{
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    const std::size_t n = 50;
    TridiagonalSystem s;
    s.lower.resize(n);
    s.diag.resize(n);
    s.upper.resize(n);
    s.rhs.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        s.lower[i] = i > 0 ? dist(rng) : 0.0;
        s.upper[i] = i + 1 < n ? dist(rng) : 0.0;
        s.diag[i] = (std::abs(s.lower[i]) + std::abs(s.upper[i]) + 0.5) * (dist(rng) < 0 ? -1 : 1);
        s.rhs[i] = dist(rng);
    }
    EXPECT_GT(s.dominance_margin(), 0.0);

    std::vector<std::vector<double>> a(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        a[i][i] = s.diag[i];
        if (i > 0) a[i][i - 1] = s.lower[i];
        if (i + 1 < n) a[i][i + 1] = s.upper[i];
    }
    const auto expected = oracle::dense_solve(a, s.rhs);
    const auto x = thomas_solve(s);
    for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(x[i], expected[i], 1e-10);
}

TEST(Thomas, ZeroPivot)
{
    TridiagonalSystem s{{0, 1}, {0, 1}, {1, 0}, {1, 1}};
    EXPECT_THROW(thomas_solve(s), std::runtime_error);
}

TEST(Scheme, Names)
{
    for (auto s : {Scheme::l1, Scheme::fl1, Scheme::rfl1}) EXPECT_EQ(parse_scheme(to_string(s)), s);
    EXPECT_THROW(parse_scheme("l2"), std::invalid_argument);
}

TEST(EpsilonPolicy, Resolve)
{
    EXPECT_EQ(EpsilonPolicy::dt_squared().resolve(TimeGrid(1.0, 1024)), 1.0 / (1024.0 * 1024.0));
    EXPECT_EQ(EpsilonPolicy::dt_squared().resolve(TimeGrid(1.0, 1)), std::exp(-1.0));
    EXPECT_EQ(EpsilonPolicy::value(1e-7).resolve(TimeGrid(1.0, 4)), 1e-7);
}

TEST(PdeSolve, ZeroDataStaysZero)
{
    ProblemSpec p;
    const TimeGrid tg(1.0, 32);
    const SpatialGrid xg(0.0, 1.0, 16);
    for (auto s : {Scheme::l1, Scheme::fl1, Scheme::rfl1}) {
        const auto r = solve_pde(s, p, VoOrderProfile::sine(0.2, 0.6, 1.0), tg, xg,
                                 EpsilonPolicy::dt_squared(), true);
        for (double v : r.field.trace) EXPECT_EQ(v, 0.0);
    }
}

TEST(OdeSolve, ZeroDataStaysZero)
{
    OdeProblem p;
    p.initial = 0.0;
    p.source = [](double) { return 0.0; };
    for (auto s : {Scheme::l1, Scheme::fl1, Scheme::rfl1}) {
        const auto r = solve_ode(s, p, VoOrderProfile::sine(0.2, 0.6, 1.0), TimeGrid(1.0, 64),
                                 EpsilonPolicy::dt_squared(), true);
        for (double v : r.field.trace) EXPECT_EQ(v, 0.0);
    }
}

TEST(PdeSolve, FirstStepIdenticalAcrossSchemes)
{
    const auto p = example_pde();
    const TimeGrid tg(1.0, 1);
    const SpatialGrid xg(0.0, 1.0, 32);
    const auto alpha = VoOrderProfile::sine(0.2, 0.6, 1.0);
    const auto l1 = solve_pde(Scheme::l1, p, alpha, tg, xg, EpsilonPolicy::dt_squared());
    const auto fl1 = solve_pde(Scheme::fl1, p, alpha, tg, xg, EpsilonPolicy::dt_squared());
    const auto rfl1 = solve_pde(Scheme::rfl1, p, alpha, tg, xg, EpsilonPolicy::dt_squared());
    EXPECT_EQ(l1.field.final_values, rfl1.field.final_values);
    EXPECT_EQ(l1.field.final_values, fl1.field.final_values);
}

TEST(PdeSolve, L1AndRobustFastAgree)
{
    const auto p = example_pde();
    const TimeGrid tg(1.0, 256);
    const SpatialGrid xg(0.0, 1.0, 64);
    const auto alpha = VoOrderProfile::sine(0.05, 0.5, 1.0);
    const auto a = solve_pde(Scheme::l1, p, alpha, tg, xg, EpsilonPolicy::dt_squared());
    const auto b = solve_pde(Scheme::rfl1, p, alpha, tg, xg, EpsilonPolicy::dt_squared());
    double diff = 0.0;
    for (std::size_t j = 0; j < a.field.final_values.size(); ++j) {
        diff = std::max(diff, std::abs(a.field.final_values[j] - b.field.final_values[j]));
    }
    EXPECT_LE(diff, 1e-8);
    EXPECT_EQ(a.field.final_values.front(), 0.0);
    EXPECT_EQ(a.field.final_values.back(), 0.0);
}

TEST(PdeSolve, StepSystemsDiagonallyDominant)
{
    const auto p = example_pde();
    const TimeGrid tg(1.0, 64);
    const SpatialGrid xg(0.0, 1.0, 16);
    const auto alpha = VoOrderProfile::sine(0.0, 0.2, 1.0);
    const auto dx = SpatialOperator::build(xg, p.diffusivity);
    std::vector<double> u(15), next(15);
    for (std::size_t r = 0; r < 15; ++r) u[r] = p.initial(xg.node(r + 1));
    PdeWorkspace ws(15);
    RobustFastL1Operator op(tg, alpha, u, 1e-6);
    for (std::size_t k = 1; k <= tg.steps(); ++k) {
        pde_step(op, p, tg, xg, dx, u, next, ws);
        TridiagonalSystem s{ws.lower, ws.diag, ws.upper, ws.rhs};
        EXPECT_GT(s.dominance_margin(), 0.0);
        u.swap(next);
    }
}

TEST(OdeSolve, SingleStep)
{
    const auto r = solve_ode(Scheme::rfl1, example_ode(), VoOrderProfile::sine(0.0, 0.5, 1.0),
                             TimeGrid(1.0, 1), EpsilonPolicy::dt_squared());
    // (1 + 1/Γ(1.5) + 1) / (1 + 1/Γ(1.5)), 1/Γ(1.5) = 1.1283791670955126
    EXPECT_NEAR(r.field.final_values[0], 1.4698410957313811, 1e-13);
}

TEST(OdeSolve, L1AndRobustFastAgreeToFourDigits)
{
    const TimeGrid g(1.0, 1024);
    const auto alpha = VoOrderProfile::sine(0.0, 0.2, 1.0);
    const auto a = solve_ode(Scheme::l1, example_ode(), alpha, g, EpsilonPolicy::dt_squared());
    const auto b = solve_ode(Scheme::rfl1, example_ode(), alpha, g, EpsilonPolicy::dt_squared());
    EXPECT_LE(std::abs(a.field.final_values[0] - b.field.final_values[0]),
              5e-5 * std::abs(a.field.final_values[0]));
    EXPECT_EQ(a.stats.retained_values, 1025u);
    EXPECT_EQ(a.stats.quadrature_count, 0u);
    EXPECT_GT(b.stats.quadrature_count, 0u);
}

TEST(Solve, FastL1FailsBeforeStepping)
{
    EXPECT_THROW(solve_ode(Scheme::fl1, example_ode(), VoOrderProfile::sine(0.0, 0.2, 1.0),
                           TimeGrid(1.0, 64), EpsilonPolicy::dt_squared()),
                 EsaDivergenceError);
}
