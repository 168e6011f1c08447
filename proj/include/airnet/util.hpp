#pragma once
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace airnet {

std::vector<std::string> split(const std::string& line, char delim);
std::string trim(const std::string& s);

// FNV-1a 64-bit, used to fingerprint resolved run configurations.
uint64_t fnv1a64(const std::string& data);
std::string to_hex(uint64_t v);

// Deterministic random helpers on top of mt19937_64. The std:: distribution
// classes are implementation-defined, so artifact-producing code rolls its
// own mapping from raw engine output — identical streams on every platform.
struct Rng {
    std::mt19937_64 eng;
    explicit Rng(uint64_t seed) : eng(seed) {}

    // uniform in [0,1) with 53-bit resolution
    double uniform() { return (eng() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    // uniform integer in [lo, hi] inclusive
    int64_t uniform_int(int64_t lo, int64_t hi) {
        return lo + static_cast<int64_t>(uniform() * double(hi - lo + 1));
    }
    // standard normal via Box-Muller (no cached spare: keeps the stream simple)
    double normal() {
        double u1 = uniform(), u2 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }
};

// Fixed-precision float formatting for artifacts: deterministic and compact.
std::string fmt_double(double v, int precision = 9);

} // namespace airnet
