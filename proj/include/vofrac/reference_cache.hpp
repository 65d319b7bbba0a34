#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "problem.hpp"
#include "schemes.hpp"

namespace vofrac {

enum class Example { ode, pde };

inline std::string_view to_string(Example e) { return e == Example::ode ? "ode" : "pde"; }

inline Example parse_example(std::string_view name)
{
    if (name == "ode") return Example::ode;
    if (name == "pde") return Example::pde;
    throw std::invalid_argument("unknown example '" + std::string(name) + "'");
}

class StaleCacheError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Identity of a reference solution. Doubles enter the key as hex floats so
/// the hash is exact.
struct ReferenceKey {
    Example example = Example::ode;
    Scheme scheme = Scheme::rfl1;
    double alpha0 = 0.0;
    double alphaT = 0.0;
    std::size_t steps = 0;
    std::size_t cells = 0;
    double epsilon = 0.0;

    std::string canonical() const
    {
        char buf[256];
        std::snprintf(buf, sizeof buf, "example=%s;scheme=%s;alpha0=%a;alphaT=%a;n=%zu;m=%zu;eps=%a",
                      std::string(to_string(example)).c_str(), std::string(to_string(scheme)).c_str(),
                      alpha0, alphaT, steps, cells, epsilon);
        return buf;
    }

    // FNV-1a, 64 bit
    std::uint64_t hash() const
    {
        std::uint64_t h = 0xcbf29ce484222325ULL;
        for (unsigned char c : canonical()) {
            h ^= c;
            h *= 0x100000001b3ULL;
        }
        return h;
    }

    std::string file_name() const
    {
        char buf[40];
        std::snprintf(buf, sizeof buf, "ref_%016llx.bin", static_cast<unsigned long long>(hash()));
        return buf;
    }
};

namespace detail {

inline constexpr std::size_t reference_header_size = 64;
inline constexpr const char* reference_magic = "VOFRACREF1";

inline void put_le(std::ostream& os, double v)
{
    auto bits = std::bit_cast<std::uint64_t>(v);
    std::array<char, 8> bytes;
    for (auto& b : bytes) {
        b = static_cast<char>(bits & 0xff);
        bits >>= 8;
    }
    os.write(bytes.data(), bytes.size());
}

inline double get_le(std::istream& is)
{
    std::array<unsigned char, 8> bytes;
    is.read(reinterpret_cast<char*>(bytes.data()), bytes.size());
    if (!is) {
        throw std::runtime_error("reference file truncated");
    }
    std::uint64_t bits = 0;
    for (std::size_t i = bytes.size(); i-- > 0;) {
        bits = (bits << 8) | bytes[i];
    }
    return std::bit_cast<double>(bits);
}

}  // namespace detail

/// Writes a reference: a 64-byte text header
///   "VOFRACREF1 <hash hex> <n> <m> <count>" space-padded, newline-terminated,
/// then `count` little-endian binary64 values. ODE references store the whole
/// trace u^0..u^n, PDE references the final level U^n_0..U^n_m.
inline void save_reference(const std::filesystem::path& path, const ReferenceKey& key,
                           const SolutionField& field)
{
    const std::vector<double>& payload =
        (field.is_ode() && !field.trace.empty()) ? field.trace : field.final_values;

    char header[detail::reference_header_size + 1];
    const int len = std::snprintf(header, sizeof header, "%s %016llx %zu %zu %zu",
                                  detail::reference_magic,
                                  static_cast<unsigned long long>(key.hash()), field.steps,
                                  field.cells, payload.size());
    if (len < 0 || static_cast<std::size_t>(len) >= detail::reference_header_size) {
        throw std::runtime_error("reference header overflow");
    }
    std::string head(header);
    head.resize(detail::reference_header_size - 1, ' ');
    head.push_back('\n');

    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) {
        throw std::runtime_error("cannot write reference file " + path.string());
    }
    os.write(head.data(), static_cast<std::streamsize>(head.size()));
    for (double v : payload) {
        detail::put_le(os, v);
    }
    if (!os) {
        throw std::runtime_error("failed writing reference file " + path.string());
    }
}

/// Reads a reference and checks it was produced for `expected`.
inline SolutionField load_reference(const std::filesystem::path& path, const ReferenceKey& expected)
{
    std::ifstream is(path, std::ios::binary);
    if (!is) {
        throw std::runtime_error("cannot open reference file " + path.string());
    }
    std::string head(detail::reference_header_size, '\0');
    is.read(head.data(), static_cast<std::streamsize>(head.size()));
    if (!is) {
        throw std::runtime_error("reference file truncated: " + path.string());
    }

    std::istringstream hs(head);
    std::string magic, hash_hex;
    std::size_t steps = 0, cells = 0, count = 0;
    hs >> magic >> hash_hex >> steps >> cells >> count;
    if (!hs || magic != detail::reference_magic) {
        throw std::runtime_error("not a reference file: " + path.string());
    }
    if (std::stoull(hash_hex, nullptr, 16) != expected.hash()) {
        throw StaleCacheError("reference " + path.string() + " was built for a different configuration");
    }

    SolutionField field;
    field.steps = steps;
    field.cells = cells;
    std::vector<double> payload(count);
    for (auto& v : payload) {
        v = detail::get_le(is);
    }
    if (field.is_ode()) {
        if (count == steps + 1) {
            field.final_values = {payload.back()};
            field.trace = std::move(payload);
        } else {
            field.final_values = std::move(payload);
        }
    } else {
        field.final_values = std::move(payload);
    }
    return field;
}

/// Loads `dir / key.file_name()` when present and current; otherwise calls
/// `compute`, stores the result and returns it. A stale file is recomputed.
inline SolutionField cache_reference(const ReferenceKey& key, const std::filesystem::path& dir,
                                     const std::function<SolutionField()>& compute,
                                     bool* loaded = nullptr)
{
    const auto path = dir / key.file_name();
    if (std::filesystem::exists(path)) {
        try {
            auto field = load_reference(path, key);
            if (loaded) *loaded = true;
            return field;
        } catch (const StaleCacheError&) {
        }
    }
    auto field = compute();
    save_reference(path, key, field);
    if (loaded) *loaded = false;
    return field;
}

}  // namespace vofrac
