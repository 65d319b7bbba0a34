#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "vofrac/reference_cache.hpp"
#include "vofrac/study.hpp"

using namespace vofrac;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name)
{
    auto p = fs::temp_directory_path() / ("vofrac_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

SolutionField pde_field(std::size_t n, std::size_t m, double v)
{
    SolutionField f;
    f.steps = n;
    f.cells = m;
    f.final_values.assign(m + 1, v);
    return f;
}

StudyConfig small_ode_study()
{
    StudyConfig c;
    c.example = Example::ode;
    c.scheme = Scheme::rfl1;
    c.alpha0 = 0.2;
    c.alphaT = 0.6;
    c.resolutions = {64, 128, 256};
    c.reference_steps = 2048;
    return c;
}

}  // namespace

TEST(ComputeError, IdenticalFields)
{
    const auto f = pde_field(8, 4, 0.25);
    EXPECT_EQ(compute_error(f, f), 0.0);
}

TEST(ComputeError, SingleDeviation)
{
    const auto a = pde_field(8, 4, 0.5);
    auto b = pde_field(16, 8, 0.5);
    b.final_values[4] += 1e-3;
    b.final_values[3] += 1.0;  // not a shared node
    EXPECT_DOUBLE_EQ(compute_error(a, b), 1e-3);
}

TEST(ComputeError, IncompatibleGrids)
{
    EXPECT_THROW(compute_error(pde_field(8, 4, 0), pde_field(12, 8, 0)), std::invalid_argument);
    EXPECT_THROW(compute_error(pde_field(8, 4, 0), pde_field(16, 6, 0)), std::invalid_argument);
    SolutionField ode;
    ode.steps = 8;
    ode.final_values = {1.0};
    EXPECT_THROW(compute_error(ode, pde_field(8, 4, 0)), std::invalid_argument);
}

TEST(ReferenceCache, RoundTripIsBitIdentical)
{
    const auto dir = scratch_dir("roundtrip");
    const ReferenceKey key{Example::pde, Scheme::rfl1, 0.05, 0.5, 64, 32, 1.0 / 4096};
    const auto field = run_example(Example::pde, Scheme::rfl1, 0.05, 0.5, 64, 32, EpsilonPolicy::dt_squared()).field;
    save_reference(dir / key.file_name(), key, field);
    const auto back = load_reference(dir / key.file_name(), key);
    ASSERT_EQ(back.final_values.size(), field.final_values.size());
    EXPECT_EQ(std::memcmp(back.final_values.data(), field.final_values.data(),
                          field.final_values.size() * sizeof(double)),
              0);
    EXPECT_EQ(back.steps, 64u);
    EXPECT_EQ(back.cells, 32u);

    std::ifstream is(dir / key.file_name(), std::ios::binary);
    std::string head(64, '\0');
    is.read(head.data(), 64);
    EXPECT_EQ(head.rfind("VOFRACREF1 ", 0), 0u);
    EXPECT_EQ(head.back(), '\n');
    EXPECT_EQ(fs::file_size(dir / key.file_name()), 64 + 33 * sizeof(double));
}

TEST(ReferenceCache, OdeTraceStored)
{
    const auto dir = scratch_dir("trace");
    const ReferenceKey key{Example::ode, Scheme::rfl1, 0.0, 0.2, 128, 0, 1.0 / 16384};
    const auto field = run_example(Example::ode, Scheme::rfl1, 0.0, 0.2, 128, 0, EpsilonPolicy::dt_squared(), true).field;
    save_reference(dir / "r.bin", key, field);
    const auto back = load_reference(dir / "r.bin", key);
    EXPECT_EQ(back.trace, field.trace);
    EXPECT_EQ(back.final_values, field.final_values);
}

TEST(ReferenceCache, KeySensitivity)
{
    const ReferenceKey a{Example::ode, Scheme::rfl1, 0.05, 0.5, 1024, 0, 1e-6};
    auto b = a;
    b.alpha0 = std::nextafter(0.05, 1.0);
    EXPECT_NE(a.hash(), b.hash());
    auto c = a;
    c.steps = 2048;
    EXPECT_NE(a.file_name(), c.file_name());
    EXPECT_EQ(a.hash(), ReferenceKey(a).hash());
}

TEST(ReferenceCache, StaleHashRejected)
{
    const auto dir = scratch_dir("stale");
    const ReferenceKey key{Example::pde, Scheme::rfl1, 0.05, 0.5, 8, 4, 1e-3};
    save_reference(dir / "r.bin", key, pde_field(8, 4, 1.0));
    auto other = key;
    other.alpha0 = 0.06;
    EXPECT_THROW(load_reference(dir / "r.bin", other), StaleCacheError);
}

TEST(ReferenceCache, ChangedKeyRecomputes)
{
    const auto dir = scratch_dir("recompute");
    int calls = 0;
    auto compute = [&] {
        ++calls;
        return pde_field(8, 4, 2.0);
    };
    ReferenceKey key{Example::pde, Scheme::rfl1, 0.05, 0.5, 8, 4, 1e-3};
    bool loaded = true;
    cache_reference(key, dir, compute, &loaded);
    EXPECT_FALSE(loaded);
    cache_reference(key, dir, compute, &loaded);
    EXPECT_TRUE(loaded);
    key.alpha0 = 0.1;
    cache_reference(key, dir, compute, &loaded);
    EXPECT_FALSE(loaded);
    EXPECT_EQ(calls, 2);
}

TEST(Study, RatesConsistentWithErrors)
{
    const auto report = run_convergence_study(small_ode_study());
    ASSERT_EQ(report.rows.size(), 3u);
    EXPECT_FALSE(report.rows[0].rate.has_value());
    for (std::size_t i = 1; i < report.rows.size(); ++i) {
        ASSERT_TRUE(report.rows[i].rate.has_value());
        const double coarse = std::exp2(*report.rows[i].rate) * report.rows[i].error;
        EXPECT_NEAR(coarse / report.rows[i - 1].error, 1.0, 1e-12);
    }
}

TEST(Study, ErrorsDeterministic)
{
    const auto a = run_convergence_study(small_ode_study());
    const auto b = run_convergence_study(small_ode_study());
    for (std::size_t i = 0; i < a.rows.size(); ++i) EXPECT_EQ(a.rows[i].error, b.rows[i].error);
}

TEST(Study, SingleRowHasEmptyRate)
{
    auto c = small_ode_study();
    c.resolutions = {128};
    const auto r = run_convergence_study(c);
    ASSERT_EQ(r.rows.size(), 1u);
    EXPECT_FALSE(r.rows[0].rate.has_value());
    const auto csv = r.to_csv();
    EXPECT_EQ(csv.rfind("resolution,error,rate,cpu_s,mem_values,quad_count\n128,", 0), 0u);
    EXPECT_NE(csv.find(",,"), std::string::npos);
}

TEST(Study, CsvWrittenAndCachedReferenceReused)
{
    const auto dir = scratch_dir("study");
    auto c = small_ode_study();
    c.cache_directory = dir / "cache";
    c.output = dir / "out" / "study.csv";
    const auto first = run_convergence_study(c);
    EXPECT_TRUE(fs::exists(*c.output));
    EXPECT_EQ(first.reference_provenance.rfind("computed and cached", 0), 0u);
    const auto second = run_convergence_study(c);
    EXPECT_EQ(second.reference_provenance.rfind("cached", 0), 0u);
    for (std::size_t i = 0; i < first.rows.size(); ++i) EXPECT_EQ(first.rows[i].error, second.rows[i].error);
    EXPECT_NE(second.to_markdown().find("| 2^7 |"), std::string::npos);
}

TEST(Study, Validation)
{
    auto c = small_ode_study();
    c.resolutions = {64, 96};
    EXPECT_THROW(c.validate(), std::invalid_argument);
    c.resolutions = {128, 64};
    EXPECT_THROW(c.validate(), std::invalid_argument);
    c.resolutions = {64, 128};
    c.reference_steps = 100;
    EXPECT_THROW(c.validate(), std::invalid_argument);
    c = small_ode_study();
    c.vary = Refinement::space;
    EXPECT_THROW(c.validate(), std::invalid_argument);
    c = small_ode_study();
    c.example = Example::pde;
    EXPECT_THROW(c.validate(), std::invalid_argument);
}

TEST(Study, FastL1WithVanishingOrderNeverReports)
{
    const auto dir = scratch_dir("fl1");
    auto c = small_ode_study();
    c.scheme = Scheme::fl1;
    c.alpha0 = 0.0;
    c.alphaT = 0.2;
    c.output = dir / "never.csv";
    c.cache_directory = dir / "cache";
    EXPECT_THROW(run_convergence_study(c), EsaDivergenceError);
    EXPECT_FALSE(fs::exists(*c.output));
    EXPECT_FALSE(fs::exists(*c.cache_directory));
}

TEST(Probe, MemoryProxy)
{
    const auto l1 = timing_and_memory_probe([] {
        return run_example(Example::ode, Scheme::l1, 0.2, 0.6, 512, 0, EpsilonPolicy::dt_squared());
    });
    EXPECT_EQ(l1.retained_values, 513u);
    EXPECT_GE(l1.cpu_seconds, 0.0);
    const auto rf = timing_and_memory_probe([] {
        return run_example(Example::ode, Scheme::rfl1, 0.05, 0.5, 8192, 0, EpsilonPolicy::dt_squared());
    });
    EXPECT_EQ(rf.result.stats.quadrature_count, 95u);
    EXPECT_EQ(rf.retained_values, 95u + 3u + 4u * 95u);
}
