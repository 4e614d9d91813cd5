#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace repeller {

/// Seeded generator; std::mt19937_64 output is fixed by the standard, and the
/// double conversion is done here so streams match across standard libraries.
class SampleStream {
public:
    explicit SampleStream(std::uint64_t seed) : engine_(mix(seed)) {}

    /// Independent stream for a named, indexed consumer.
    SampleStream(std::uint64_t seed, std::string_view tag, int index)
        : engine_(mix(seed ^ mix(hash(tag) + static_cast<std::uint64_t>(index)))) {}

    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    static std::uint64_t hash(std::string_view s) {
        std::uint64_t h = 1469598103934665603ULL;  // FNV-1a
        for (char c : s) h = (h ^ static_cast<unsigned char>(c)) * 1099511628211ULL;
        return h;
    }

    std::mt19937_64 engine_;
};

}  // namespace repeller
