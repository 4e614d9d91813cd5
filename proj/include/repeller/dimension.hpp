#pragma once

// Pressure sums over preimage trees, the finite-depth Bowen zero, the
// closed-form dimension ceiling t* (root of L^-t = 1 - 2^-t), and covering
// sums sum (2 / |(F^n)'|)^t.

#include <cmath>
#include <string>
#include <vector>

#include "repeller/inverse.hpp"

namespace repeller {

namespace detail {

inline const std::vector<TreeNode>& level_of(const PreimageTree& tree, int depth) {
    if (tree.partial) throw PartialTreeError("preimage tree is partial; refusing to sum over it");
    if (depth < 0) depth = tree.depth;
    if (depth < 1 || depth > tree.depth) throw DomainError("depth outside the tree");
    return tree.levels[depth];
}

// Fixed pairwise reduction so the result does not depend on anything but the order of terms.
inline XReal balanced_sum(const std::vector<XReal>& v, std::size_t lo, std::size_t hi) {
    if (hi - lo == 1) return v[lo];
    const std::size_t mid = lo + (hi - lo) / 2;
    return balanced_sum(v, lo, mid) + balanced_sum(v, mid, hi);
}

inline XReal sum_powers(const std::vector<TreeNode>& nodes, const XReal& numerator, double t) {
    if (!(t >= 0.0) || !std::isfinite(t)) throw DomainError("t must be a nonnegative real");
    if (nodes.empty()) return XReal{};
    std::vector<XReal> terms;
    terms.reserve(nodes.size());
    for (const auto& n : nodes) terms.push_back(pow(numerator / n.accumulated, t));
    return balanced_sum(terms, 0, terms.size());
}

}  // namespace detail

/// S_n(t) = sum over depth-n nodes of |(F^n)'|^-t; depth -1 means the full tree.
inline XReal pressure_sum(const PreimageTree& tree, double t, int depth = -1) {
    return detail::sum_powers(detail::level_of(tree, depth), XReal::one(), t);
}

/// (1/n) ln S_n(t).
inline double pressure(const PreimageTree& tree, double t, int depth = -1) {
    const int n = depth < 0 ? tree.depth : depth;
    return pressure_sum(tree, t, n).log2() * std::numbers::ln2 / n;
}

/// sum over depth-n nodes of (2 / |(F^n)'|)^t.
inline XReal cover_sum(const PreimageTree& tree, double t, int depth = -1) {
    return detail::sum_powers(detail::level_of(tree, depth), XReal(2.0), t);
}

/// L^-t / (1 - 2^-t), the per-level factor of the pressure ceiling.
inline double ceiling_factor(double L, double t) {
    if (!(t > 0.0)) throw DomainError("ceiling_factor: t must be positive");
    return std::pow(L, -t) / -std::expm1(-t * std::numbers::ln2);
}

/// (L^-t / (1 - 2^-t))^n in extended range.
inline XReal pressure_ceiling(double L, double t, int n) {
    return XReal::exp2(n * std::log2(ceiling_factor(L, t)));
}

/// Unique root t* of L^-t = 1 - 2^-t for L = C/(4e) > 1.
inline double closed_form_bound(double C) {
    const double L = expansion_constant(C);
    if (!(L > 1.0)) throw DomainError("closed_form_bound: need L = C/(4e) > 1 (C > 4e)");
    // L^-t/(1 - 2^-t) falls from +inf at 0+ through 1 at t*; t* < 1 since L > 1
    double lo = 0.0, hi = 1.0;
    while (hi - lo > 1e-13) {
        const double mid = 0.5 * (lo + hi);
        (ceiling_factor(L, mid) > 1.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

inline constexpr double kDefaultTLo = 1e-3;
inline constexpr double kDefaultTHi = 1.5;
inline constexpr double kBowenWidth = 1e-4;

/// Zero of t -> S_n(t) - 1 by bisection to bracket width 1e-4. S_n decreases
/// strictly in t since every accumulated derivative exceeds 1.
inline double bowen_zero(const PreimageTree& tree, int depth = -1, double t_lo = kDefaultTLo,
                         double t_hi = kDefaultTHi) {
    if (!(t_lo >= 0.0 && t_lo < t_hi)) throw DomainError("bowen_zero: need 0 <= t_lo < t_hi");
    const XReal one = XReal::one();
    if (!(pressure_sum(tree, t_lo, depth) > one) || !(pressure_sum(tree, t_hi, depth) < one)) {
        throw DomainError("bowen_zero: pressure does not change sign on [t_lo, t_hi]; widen the t range");
    }
    double lo = t_lo, hi = t_hi;
    while (hi - lo > kBowenWidth) {
        const double mid = 0.5 * (lo + hi);
        (pressure_sum(tree, mid, depth) > one ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

struct PressureCurve {
    XComplex base;
    int depth = 0;
    std::vector<double> t_values;
    std::vector<XReal> sums;      // S_n(t)
    std::vector<double> pressures;  // (1/n) ln S_n(t)
    std::vector<double> ceilings;   // ln(L^-t / (1 - 2^-t))
};

inline PressureCurve pressure_curve(const Scales& sc, const PreimageTree& tree, const std::vector<double>& ts,
                                    int depth = -1) {
    PressureCurve pc;
    pc.base = tree.root;
    pc.depth = depth < 0 ? tree.depth : depth;
    const double L = sc.L.to_double();
    for (double t : ts) {
        pc.t_values.push_back(t);
        pc.sums.push_back(pressure_sum(tree, t, pc.depth));
        pc.pressures.push_back(pc.sums.back().log2() * std::numbers::ln2 / pc.depth);
        pc.ceilings.push_back(std::log(ceiling_factor(L, t)));
    }
    return pc;
}

/// Evenly spaced t values on [lo, hi].
inline std::vector<double> t_grid(double lo, double hi, int count) {
    if (count < 2 || !(lo < hi)) throw DomainError("t_grid: need count >= 2 and lo < hi");
    std::vector<double> ts;
    for (int i = 0; i < count; ++i) ts.push_back(lo + (hi - lo) * i / (count - 1));
    return ts;
}

/// t_1, ..., t_n from a single depth-n tree.
inline std::vector<double> t_sequence(const PreimageTree& tree, double t_lo = kDefaultTLo,
                                      double t_hi = kDefaultTHi) {
    std::vector<double> out;
    for (int d = 1; d <= tree.depth; ++d) out.push_back(bowen_zero(tree, d, t_lo, t_hi));
    return out;
}

/// cover_sum at depth d+1 over depth d, for d = 1..n-1.
inline std::vector<double> cover_ratios(const PreimageTree& tree, double t) {
    std::vector<double> out;
    for (int d = 1; d < tree.depth; ++d) out.push_back((cover_sum(tree, t, d + 1) / cover_sum(tree, t, d)).to_double());
    return out;
}

}  // namespace repeller
