#pragma once

// Orbits of f, their itineraries over A_0, B_0, A_1, B_1, ..., and a three-way
// verdict. Entering a gap B_k with k >= 1 certifies escape because
// f(B_k) lies in B_{k+1}; B_0 is not a certificate.

#include <cstdint>
#include <numbers>
#include <vector>

#include "repeller/construction.hpp"
#include "repeller/parallel.hpp"

namespace repeller {

enum class Verdict : std::uint8_t { BoundedWitness = 0, EscapeCertified = 1, Undecided = 2 };

inline const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::BoundedWitness: return "bounded_witness";
        case Verdict::EscapeCertified: return "escape_certified";
        case Verdict::Undecided: return "undecided";
    }
    return "?";
}

struct OrbitRecord {
    XComplex start;
    std::vector<XComplex> points;
    std::vector<RegionIndex> itinerary;
    Verdict verdict = Verdict::Undecided;
    int entry_step = -1;  // first step in some B_k, k >= 1
    int entry_k = -1;
    bool overflow = false;           // |f^n(z)| left the exponent range
    bool left_tracked_range = false; // orbit passed r_{top+1}
};

/// Highest level whose gaps are still tracked. Points in B_{M-1} have images
/// in B_M, where the truncated product is no longer accurate.
inline int tracked_top(const Scales& sc) { return sc.M() - 1; }

/// Iterates f from z. The verdict is fixed at the first entry into B_k,
/// k >= 1; iteration then continues (to max_iter or until the orbit leaves
/// the tracked levels) so the itinerary records the escape chain.
inline OrbitRecord iterate(const Scales& sc, const XComplex& z, int max_iter = 100) {
    if (max_iter < 1) throw DomainError("iterate: max_iter must be at least 1");
    const int top = tracked_top(sc);
    OrbitRecord rec;
    rec.start = z;
    XComplex w = z;
    for (int step = 0;; ++step) {
        const RegionIndex reg = region_of(sc, top, w);
        rec.points.push_back(w);
        rec.itinerary.push_back(reg);
        if (rec.entry_step < 0 && reg.is_gap() && reg.k >= 1) {
            rec.entry_step = step;
            rec.entry_k = reg.k;
            rec.verdict = Verdict::EscapeCertified;
        }
        if (reg.is_beyond()) {
            rec.left_tracked_range = true;
            break;
        }
        if (step == max_iter) break;
        try {
            w = eval_f_value(sc, w);
        } catch (const RangeError&) {
            rec.overflow = true;
            break;
        }
    }
    if (rec.verdict == Verdict::EscapeCertified) return rec;
    bool confined = !rec.left_tracked_range && !rec.overflow;
    for (const auto& reg : rec.itinerary) {
        const bool ok = (reg.is_annulus() && reg.k <= sc.N()) || (reg.is_gap() && reg.k == 0);
        if (!ok) confined = false;
    }
    rec.verdict = confined ? Verdict::BoundedWitness : Verdict::Undecided;
    return rec;
}

/// Rectangle in (log2 |z|, arg z).
struct LogPolarWindow {
    double log2_r_lo = -40.0;
    double log2_r_hi = 0.0;
    double theta_lo = -std::numbers::pi;
    double theta_hi = std::numbers::pi;
};

/// Center of cell (i, j): row i along log-radius, column j along angle.
inline XComplex cell_center(const LogPolarWindow& w, int nr, int ntheta, int i, int j) {
    const double lr = w.log2_r_lo + (w.log2_r_hi - w.log2_r_lo) * (i + 0.5) / nr;
    const double th = w.theta_lo + (w.theta_hi - w.theta_lo) * (j + 0.5) / ntheta;
    return XComplex::from_polar(lr, th);
}

inline void validate_window(const Scales& sc, const LogPolarWindow& w, int nr, int ntheta) {
    if (nr < 1 || ntheta < 1) throw DomainError("classify_grid: resolution must be positive");
    if (!(w.log2_r_lo < w.log2_r_hi) || !(w.theta_lo < w.theta_hi) ||
        w.theta_hi - w.theta_lo > 2.0 * std::numbers::pi + 1e-12) {
        throw DomainError("classify_grid: empty or inverted window");
    }
    const double top = sc.s[sc.N()].log2();
    if (w.log2_r_lo < -40.0 - 1e-12 || w.log2_r_hi > top + 1e-9) {
        throw DomainError("classify_grid: window must lie within magnitudes [2^-40, s_N]");
    }
}

/// Verdict codes for every cell center, row-major in (log-radius, angle).
inline std::vector<Verdict> classify_grid(const Scales& sc, const LogPolarWindow& w, int nr, int ntheta,
                                          int max_iter = 100) {
    validate_window(sc, w, nr, ntheta);
    std::vector<Verdict> out(static_cast<std::size_t>(nr) * ntheta);
    parallel_for(out.size(), [&](std::size_t idx) {
        const int i = static_cast<int>(idx / ntheta), j = static_cast<int>(idx % ntheta);
        out[idx] = iterate(sc, cell_center(w, nr, ntheta, i, j), max_iter).verdict;
    });
    return out;
}

/// Region of every cell center, same layout as classify_grid.
inline std::vector<RegionIndex> region_grid(const Scales& sc, const LogPolarWindow& w, int nr, int ntheta) {
    validate_window(sc, w, nr, ntheta);
    std::vector<RegionIndex> out;
    out.reserve(static_cast<std::size_t>(nr) * ntheta);
    for (int i = 0; i < nr; ++i)
        for (int j = 0; j < ntheta; ++j) out.push_back(region_of(sc, cell_center(w, nr, ntheta, i, j)));
    return out;
}

}  // namespace repeller
