#pragma once

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "esa_quadrature.hpp"
#include "order_profile.hpp"
#include "problem.hpp"
#include "reference_cache.hpp"
#include "schemes.hpp"

namespace vofrac {

/// Max-norm difference at the final time level over the nodes the two grids
/// share. The reference must refine the solution by an integer factor in
/// both space and time.
inline double compute_error(const SolutionField& solution, const SolutionField& reference)
{
    if (solution.is_ode() != reference.is_ode()) {
        throw std::invalid_argument("compute_error: mixing ODE and PDE fields");
    }
    if (solution.steps == 0 || reference.steps % solution.steps != 0) {
        throw std::invalid_argument("compute_error: time grids are not nested");
    }
    if (solution.is_ode()) {
        return std::abs(solution.final_values.at(0) - reference.final_values.at(0));
    }
    if (reference.cells % solution.cells != 0) {
        throw std::invalid_argument("compute_error: spatial grids are not nested");
    }
    const std::size_t stride = reference.cells / solution.cells;
    double err = 0.0;
    for (std::size_t j = 0; j <= solution.cells; ++j) {
        err = std::max(err, std::abs(solution.final_values.at(j) -
                                     reference.final_values.at(j * stride)));
    }
    return err;
}

enum class Refinement { time, space };

struct StudyConfig {
    Example example = Example::ode;
    Scheme scheme = Scheme::rfl1;
    double alpha0 = 0.2;
    double alphaT = 0.6;
    Refinement vary = Refinement::time;
    std::vector<std::size_t> resolutions;  // n for time studies, m for space studies
    std::size_t fixed = 0;                 // m for PDE time studies, n for space studies
    EpsilonPolicy epsilon;

    std::size_t reference_steps = 0;  // time studies: n_ref; space studies: ignored (= fixed)
    std::size_t reference_cells = 0;  // space studies: m_ref; PDE time studies: ignored (= fixed)
    std::optional<std::filesystem::path> reference_file;   // load instead of computing
    std::optional<std::filesystem::path> cache_directory;  // compute-or-load
    std::optional<std::filesystem::path> output;           // CSV destination

    std::size_t ref_steps() const { return vary == Refinement::time ? reference_steps : fixed; }
    std::size_t ref_cells() const
    {
        if (example == Example::ode) return 0;
        return vary == Refinement::space ? reference_cells : fixed;
    }

    void validate() const
    {
        if (resolutions.empty()) {
            throw std::invalid_argument("study: no resolutions given");
        }
        for (std::size_t i = 0; i < resolutions.size(); ++i) {
            const auto r = resolutions[i];
            if (r == 0 || (r & (r - 1)) != 0) {
                throw std::invalid_argument("study: resolutions must be powers of two");
            }
            if (i > 0 && r <= resolutions[i - 1]) {
                throw std::invalid_argument("study: resolutions must be strictly increasing");
            }
        }
        if (example == Example::ode && vary == Refinement::space) {
            throw std::invalid_argument("study: the ODE example has no spatial grid");
        }
        if (example == Example::pde && fixed == 0) {
            throw std::invalid_argument("study: PDE studies need the fixed counterpart resolution");
        }
        if (vary == Refinement::space && fixed == 0) {
            throw std::invalid_argument("study: space studies need a fixed step count");
        }
        const std::size_t ref = vary == Refinement::time ? reference_steps : reference_cells;
        if (!reference_file && ref == 0) {
            throw std::invalid_argument("study: reference resolution missing");
        }
        if (!reference_file) {
            for (auto r : resolutions) {
                if (ref % r != 0) {
                    throw std::invalid_argument("study: reference does not refine every resolution");
                }
            }
        }
        if (!(alpha0 >= 0.0 && alpha0 < 1.0 && alphaT >= 0.0 && alphaT < 1.0)) {
            throw std::invalid_argument("study: orders must lie in [0, 1)");
        }
        if (scheme == Scheme::fl1 && std::min(alpha0, alphaT) <= 0.0) {
            throw EsaDivergenceError();
        }
    }
};

struct ReportRow {
    std::size_t resolution = 0;
    double error = 0.0;
    std::optional<double> rate;
    double cpu_seconds = 0.0;
    std::size_t mem_values = 0;
    std::size_t quad_count = 0;
};

struct ConvergenceReport {
    StudyConfig config;
    std::vector<ReportRow> rows;
    std::string reference_provenance;
    std::string created;

    std::string to_csv() const
    {
        std::ostringstream os;
        os << "resolution,error,rate,cpu_s,mem_values,quad_count\n";
        char buf[256];
        for (const auto& r : rows) {
            std::string rate;
            if (r.rate) {
                std::snprintf(buf, sizeof buf, "%.17g", *r.rate);
                rate = buf;
            }
            std::snprintf(buf, sizeof buf, "%zu,%.17g,%s,%.6f,%zu,%zu\n", r.resolution, r.error,
                          rate.c_str(), r.cpu_seconds, r.mem_values, r.quad_count);
            os << buf;
        }
        return os.str();
    }

    std::string to_markdown() const
    {
        const char* var = config.vary == Refinement::time ? "n" : "m";
        const char* rate = config.vary == Refinement::time ? "R_t" : "R_s";
        std::ostringstream os;
        char buf[256];
        std::snprintf(buf, sizeof buf, "%s scheme, example %s, (alpha(0), alpha(T)) = (%g, %g)\n\n",
                      std::string(to_string(config.scheme)).c_str(),
                      std::string(to_string(config.example)).c_str(), config.alpha0, config.alphaT);
        os << buf;
        os << "| " << var << " | E | " << rate << " | CPU(s) | Memory | N_eps |\n";
        os << "|---:|---:|---:|---:|---:|---:|\n";
        for (const auto& r : rows) {
            std::string rs = "-";
            if (r.rate) {
                std::snprintf(buf, sizeof buf, "%.2f", *r.rate);
                rs = buf;
            }
            const std::string q = r.quad_count ? std::to_string(r.quad_count) : "-";
            const int e = static_cast<int>(std::round(std::log2(static_cast<double>(r.resolution))));
            std::snprintf(buf, sizeof buf, "| 2^%d | %.4e | %s | %.3f | %.2e | %s |\n", e, r.error,
                          rs.c_str(), r.cpu_seconds, static_cast<double>(r.mem_values), q.c_str());
            os << buf;
        }
        os << "\nreference: " << reference_provenance << "\n";
        os << "created: " << created << "\n";
        return os.str();
    }
};

/// Fills rates as log2(E_coarse / E_fine) between adjacent rows.
inline void fill_rates(std::vector<ReportRow>& rows)
{
    for (std::size_t i = 0; i < rows.size(); ++i) {
        rows[i].rate.reset();
        if (i > 0) {
            rows[i].rate = std::log2(rows[i - 1].error / rows[i].error);
        }
    }
}

struct ProbeResult {
    double cpu_seconds = 0.0;
    std::size_t retained_values = 0;
    SolveResult result;
};

/// Wall-clock around `run` only, plus the retained-value count it reports.
inline ProbeResult timing_and_memory_probe(const std::function<SolveResult()>& run)
{
    const auto start = std::chrono::steady_clock::now();
    ProbeResult p;
    p.result = run();
    p.cpu_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    p.retained_values = p.result.stats.retained_values;
    return p;
}

/// Runs one solve of the study's example at (steps, cells) with `scheme`.
inline SolveResult run_example(Example example, Scheme scheme, double alpha0, double alphaT,
                               std::size_t steps, std::size_t cells, const EpsilonPolicy& eps,
                               bool keep_trace = false)
{
    const TimeGrid tgrid(1.0, steps);
    const auto alpha = VoOrderProfile::sine(alpha0, alphaT, tgrid.horizon(), 10 * steps + 1);
    if (example == Example::ode) {
        return solve_ode(scheme, example_ode(), alpha, tgrid, eps, keep_trace);
    }
    const auto problem = example_pde();
    const SpatialGrid xgrid(problem.left, problem.right, cells);
    return solve_pde(scheme, problem, alpha, tgrid, xgrid, eps, keep_trace);
}

inline ReferenceKey reference_key(const StudyConfig& c)
{
    const TimeGrid g(1.0, c.ref_steps());
    return ReferenceKey{c.example, Scheme::rfl1, c.alpha0, c.alphaT,
                        c.ref_steps(), c.ref_cells(), c.epsilon.resolve(g)};
}

/// Reference solution for a study: RF-L1 on the finest grid, loaded from a
/// file, taken from a cache directory, or computed in memory.
inline SolutionField study_reference(const StudyConfig& c, std::string* provenance = nullptr)
{
    const auto key = reference_key(c);
    auto compute = [&] {
        return run_example(c.example, Scheme::rfl1, c.alpha0, c.alphaT, key.steps, key.cells,
                           c.epsilon, c.example == Example::ode)
            .field;
    };
    if (c.reference_file) {
        if (provenance) *provenance = "loaded " + c.reference_file->string();
        return load_reference(*c.reference_file, key);
    }
    if (c.cache_directory) {
        bool loaded = false;
        auto field = cache_reference(key, *c.cache_directory, compute, &loaded);
        if (provenance) {
            *provenance = std::string(loaded ? "cached " : "computed and cached ") +
                          (*c.cache_directory / key.file_name()).string() + " [" + key.canonical() + "]";
        }
        return field;
    }
    if (provenance) *provenance = "computed [" + key.canonical() + "]";
    return compute();
}

inline std::string utc_timestamp()
{
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

/// Solves the example at every resolution, measures the error against the
/// reference, and derives the observed orders. Writes CSV when configured.
inline ConvergenceReport run_convergence_study(const StudyConfig& config)
{
    config.validate();
    ConvergenceReport report;
    report.config = config;
    report.created = utc_timestamp();
    const SolutionField reference = study_reference(config, &report.reference_provenance);

    for (auto r : config.resolutions) {
        const std::size_t steps = config.vary == Refinement::time ? r : config.fixed;
        const std::size_t cells =
            config.example == Example::ode ? 0 : (config.vary == Refinement::space ? r : config.fixed);
        const auto probe = timing_and_memory_probe([&] {
            return run_example(config.example, config.scheme, config.alpha0, config.alphaT, steps,
                               cells, config.epsilon);
        });
        ReportRow row;
        row.resolution = r;
        row.error = compute_error(probe.result.field, reference);
        row.cpu_seconds = probe.cpu_seconds;
        row.mem_values = probe.retained_values;
        row.quad_count = probe.result.stats.quadrature_count;
        report.rows.push_back(row);
    }
    fill_rates(report.rows);

    if (config.output) {
        if (config.output->has_parent_path()) {
            std::filesystem::create_directories(config.output->parent_path());
        }
        std::ofstream os(*config.output);
        if (!os) {
            throw std::runtime_error("cannot write " + config.output->string());
        }
        os << report.to_csv();
    }
    return report;
}

}  // namespace vofrac
