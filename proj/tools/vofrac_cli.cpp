// Command-line front end: single solves, convergence studies and reference
// generation for the variable-order mobile-immobile examples.
//
//   vofrac ode --scheme rfl1 --n 8192 --alpha0 0 --alphaT 0.2
//   vofrac pde --scheme l1 --n 1024 --m 256 --alpha0 0.05 --alphaT 0.5
//   vofrac convergence --example pde --vary space --alpha0 0.05 --alphaT 0.5 --out t3.csv
//   vofrac reference --example ode --n 131072 --alpha0 0.2 --alphaT 0.6 --out ref.bin
//
// Exit status: 0 success, 2 invalid configuration, 1 runtime failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <stdexcept>
#include <string>

#include "CLI11.hpp"
#include "vofrac/vofrac.hpp"

namespace {

using namespace vofrac;

struct CommonOptions {
    std::string scheme = "rfl1";
    double alpha0 = 0.2;
    double alphaT = 0.6;
    std::string epsilon = "dt2";
    std::string ref;
    std::string out;
    std::string cache_dir = ".vofrac_cache";
};

EpsilonPolicy parse_epsilon(const std::string& text)
{
    if (text == "dt2") {
        return EpsilonPolicy::dt_squared();
    }
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != text.size() || !(v > 0.0)) {
        throw std::invalid_argument("--epsilon must be 'dt2' or a positive number");
    }
    return EpsilonPolicy::value(v);
}

// "9:13" -> {2^9, ..., 2^13}
std::vector<std::size_t> parse_levels(const std::string& text)
{
    const auto colon = text.find(':');
    if (colon == std::string::npos) {
        throw std::invalid_argument("--levels expects lo:hi exponents");
    }
    const int lo = std::stoi(text.substr(0, colon));
    const int hi = std::stoi(text.substr(colon + 1));
    if (lo < 1 || hi < lo || hi > 30) {
        throw std::invalid_argument("--levels out of range");
    }
    std::vector<std::size_t> r;
    for (int e = lo; e <= hi; ++e) {
        r.push_back(std::size_t{1} << e);
    }
    return r;
}

void add_common(CLI::App* cmd, CommonOptions& o, bool with_scheme = true)
{
    if (with_scheme) {
        cmd->add_option("--scheme", o.scheme, "l1 | fl1 | rfl1")
            ->check(CLI::IsMember({"l1", "fl1", "rfl1"}));
    }
    cmd->add_option("--alpha0", o.alpha0, "order at t = 0");
    cmd->add_option("--alphaT", o.alphaT, "order at t = T");
    cmd->add_option("--epsilon", o.epsilon, "dt2 or a fixed value");
    cmd->add_option("--out", o.out, "output path");
}

void print_stats(Scheme scheme, const SolveStats& stats)
{
    std::printf("scheme       %s\n", std::string(to_string(scheme)).c_str());
    std::printf("cpu_s        %.6f\n", stats.cpu_seconds);
    std::printf("mem_values   %zu\n", stats.retained_values);
    if (stats.quadrature_count) {
        std::printf("quad_count   %zu\n", stats.quadrature_count);
    }
}

// Error against an RF-L1 reference, when --ref was given.
void report_error(Example example, const CommonOptions& o, std::size_t steps, std::size_t cells,
                  std::size_t ref_steps, std::size_t ref_cells, const SolutionField& field)
{
    if (o.ref.empty()) {
        return;
    }
    StudyConfig c;
    c.example = example;
    c.alpha0 = o.alpha0;
    c.alphaT = o.alphaT;
    c.epsilon = parse_epsilon(o.epsilon);
    c.vary = Refinement::time;
    c.resolutions = {steps};
    c.fixed = cells;
    c.reference_steps = ref_steps;
    if (example == Example::pde && ref_cells != cells) {
        c.vary = Refinement::space;
        c.resolutions = {cells};
        c.fixed = steps;
        c.reference_cells = ref_cells;
        if (ref_steps != steps) {
            throw std::invalid_argument("--ref-n and --ref-m cannot both differ from --n/--m");
        }
    }
    if (o.ref == "auto") {
        c.cache_directory = o.cache_dir;
    } else {
        c.reference_file = o.ref;
    }
    std::string provenance;
    const auto reference = study_reference(c, &provenance);
    std::printf("error        %.10e\n", compute_error(field, reference));
    std::printf("reference    %s\n", provenance.c_str());
}

int run(int argc, char** argv)
{
    CLI::App app{"Variable-order time-fractional diffusion solvers (L1, F-L1, RF-L1)"};
    app.require_subcommand(1);

    CommonOptions o;
    std::size_t n = 1024;
    std::size_t m = 256;
    std::size_t ref_n = 0;
    std::size_t ref_m = 0;

    auto* ode = app.add_subcommand("ode", "solve u' + D^alpha u = 1, u(0) = 1 on [0, 1]");
    add_common(ode, o);
    ode->add_option("--n", n, "time steps")->check(CLI::PositiveNumber);
    ode->add_option("--ref", o.ref, "auto (cached RF-L1 reference) or a reference file");
    ode->add_option("--ref-n", ref_n, "reference steps (default 2^17)");
    ode->add_option("--cache-dir", o.cache_dir, "reference cache directory");

    auto* pde = app.add_subcommand("pde", "solve the sin(pi x) diffusion example on [0, 1]^2");
    add_common(pde, o);
    pde->add_option("--n", n, "time steps")->check(CLI::PositiveNumber);
    pde->add_option("--m", m, "spatial cells")->check(CLI::Range(2, 1 << 24));
    pde->add_option("--ref", o.ref, "auto (cached RF-L1 reference) or a reference file");
    pde->add_option("--ref-n", ref_n, "reference steps (default --n)");
    pde->add_option("--ref-m", ref_m, "reference cells (default --m)");
    pde->add_option("--cache-dir", o.cache_dir, "reference cache directory");

    std::string example_name = "ode";
    std::string vary_name = "time";
    std::string levels;
    std::size_t fixed = 0;
    std::string markdown;
    auto* conv = app.add_subcommand("convergence", "error/rate/cost table over a resolution ladder");
    add_common(conv, o);
    conv->add_option("--example", example_name, "ode | pde")->check(CLI::IsMember({"ode", "pde"}));
    conv->add_option("--vary", vary_name, "time | space")->check(CLI::IsMember({"time", "space"}));
    conv->add_option("--levels", levels, "power-of-two exponents lo:hi");
    conv->add_option("--n", fixed, "fixed steps for space studies");
    conv->add_option("--m", fixed, "fixed cells for PDE time studies");
    conv->add_option("--ref", o.ref, "auto (default), compute, or a reference file");
    conv->add_option("--ref-n", ref_n, "reference steps for time studies");
    conv->add_option("--ref-m", ref_m, "reference cells for space studies");
    conv->add_option("--cache-dir", o.cache_dir, "reference cache directory");
    conv->add_option("--markdown", markdown, "also write a Markdown table here");

    auto* refcmd = app.add_subcommand("reference", "compute and store an RF-L1 reference solution");
    add_common(refcmd, o, false);
    refcmd->add_option("--example", example_name, "ode | pde")->check(CLI::IsMember({"ode", "pde"}));
    refcmd->add_option("--n", n, "time steps")->check(CLI::PositiveNumber);
    refcmd->add_option("--m", m, "spatial cells (pde)")->check(CLI::Range(2, 1 << 24));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    const Scheme scheme = parse_scheme(o.scheme);
    const EpsilonPolicy eps = parse_epsilon(o.epsilon);

    if (*ode || *pde) {
        const Example example = *ode ? Example::ode : Example::pde;
        const std::size_t cells = example == Example::ode ? 0 : m;
        if (scheme == Scheme::fl1 && std::min(o.alpha0, o.alphaT) <= 0.0) {
            throw EsaDivergenceError();
        }
        const auto result = run_example(example, scheme, o.alpha0, o.alphaT, n, cells, eps,
                                        example == Example::ode && !o.out.empty());
        print_stats(scheme, result.stats);
        if (example == Example::ode) {
            std::printf("u(T)         %.17g\n", result.field.final_values[0]);
        } else {
            double peak = 0.0;
            for (double v : result.field.final_values) peak = std::max(peak, std::abs(v));
            std::printf("max|U(T)|    %.17g\n", peak);
        }
        const std::size_t rn = ref_n ? ref_n : (example == Example::ode ? (std::size_t{1} << 17) : n);
        const std::size_t rm = ref_m ? ref_m : cells;
        report_error(example, o, n, cells, rn, rm, result.field);

        if (!o.out.empty()) {
            std::ofstream os(o.out);
            if (!os) throw std::runtime_error("cannot write " + o.out);
            char buf[96];
            if (example == Example::ode) {
                os << "k,t,u\n";
                const TimeGrid g(1.0, n);
                for (std::size_t k = 0; k <= n; ++k) {
                    std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g\n", k, g.node(k), result.field.trace[k]);
                    os << buf;
                }
            } else {
                os << "j,x,u\n";
                const SpatialGrid g(0.0, 1.0, m);
                for (std::size_t j = 0; j <= m; ++j) {
                    std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g\n", j, g.node(j),
                                  result.field.final_values[j]);
                    os << buf;
                }
            }
        }
        return 0;
    }

    if (*conv) {
        StudyConfig c;
        c.example = parse_example(example_name);
        c.scheme = scheme;
        c.alpha0 = o.alpha0;
        c.alphaT = o.alphaT;
        c.vary = vary_name == "space" ? Refinement::space : Refinement::time;
        c.epsilon = eps;
        // desk-scale defaults
        if (c.example == Example::ode) {
            c.resolutions = parse_levels(levels.empty() ? "9:13" : levels);
            c.reference_steps = ref_n ? ref_n : (std::size_t{1} << 17);
        } else if (c.vary == Refinement::time) {
            c.resolutions = parse_levels(levels.empty() ? "8:12" : levels);
            c.fixed = fixed ? fixed : 256;
            c.reference_steps = ref_n ? ref_n : (std::size_t{1} << 15);
        } else {
            c.resolutions = parse_levels(levels.empty() ? "3:6" : levels);
            c.fixed = fixed ? fixed : 4096;
            c.reference_cells = ref_m ? ref_m : 512;
        }
        if (o.ref.empty() || o.ref == "auto") {
            c.cache_directory = o.cache_dir;
        } else if (o.ref != "compute") {
            c.reference_file = o.ref;
        }
        if (!o.out.empty()) {
            c.output = o.out;
        }
        const auto report = run_convergence_study(c);
        std::cout << report.to_markdown();
        if (!markdown.empty()) {
            std::ofstream md(markdown);
            if (!md) throw std::runtime_error("cannot write " + markdown);
            md << report.to_markdown();
        }
        return 0;
    }

    // reference
    StudyConfig c;
    c.example = parse_example(example_name);
    c.alpha0 = o.alpha0;
    c.alphaT = o.alphaT;
    c.epsilon = eps;
    c.vary = Refinement::time;
    c.resolutions = {n};
    c.reference_steps = n;
    c.fixed = c.example == Example::pde ? m : 0;
    c.validate();
    if (o.out.empty()) {
        throw std::invalid_argument("reference: --out is required");
    }
    const auto key = reference_key(c);
    const auto field = run_example(c.example, Scheme::rfl1, c.alpha0, c.alphaT, key.steps, key.cells,
                                   eps, c.example == Example::ode)
                           .field;
    save_reference(o.out, key, field);
    std::printf("wrote %s [%s]\n", o.out.c_str(), key.canonical().c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv)
{
    try {
        return run(argc, argv);
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::domain_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
