#pragma once

// Independent reference computations for the test suites. Nothing here calls
// into the library's evaluation paths.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

namespace oracle {

/// Integer exponents e_k with a_k = (8C)^{e_k}: e_1 = 0, e_2 = 1,
/// e_{k+1} = 1 + k e_k - sum_{j<k} e_j.
inline std::vector<std::int64_t> scale_exponents(int kmax) {
    std::vector<std::int64_t> e(kmax + 1, 0);
    std::int64_t prefix = 0;  // sum_{j<k} e_j
    for (int k = 1; k < kmax; ++k) {
        e[k + 1] = 1 + k * e[k] - prefix;
        prefix += e[k];
    }
    return e;
}

/// f on the real axis in long double, truncated after M factors, using a_k = (8C)^{e_k}.
inline long double f_real(long double C, int M, long double x) {
    const auto e = scale_exponents(M);
    long double v = C * x;
    for (int k = 1; k <= M; ++k) v *= 1.0L - x / std::pow(8.0L * C, static_cast<long double>(e[k]));
    return v;
}

/// Root of L^{-t} = 1 - 2^{-t} by bisection on the sign of L^{-t} - 1 + 2^{-t}.
inline double closed_form_root(double C) {
    const long double L = C / (4.0L * std::numbers::e_v<long double>);
    long double lo = 1e-12L, hi = 10.0L;
    for (int i = 0; i < 200; ++i) {
        const long double mid = 0.5L * (lo + hi);
        const long double g = std::pow(L, -mid) - 1.0L + std::pow(2.0L, -mid);
        (g > 0 ? lo : hi) = mid;
    }
    return static_cast<double>(0.5L * (lo + hi));
}

/// Deterministic 64-bit generator (splitmix64) for test inputs.
struct SplitMix {
    std::uint64_t state;
    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    double uniform() { return static_cast<double>(next() >> 11) * 0x1p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
};

}  // namespace oracle
