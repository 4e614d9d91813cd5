#pragma once

// The entire function f(z) = C z prod_{k>=1} (1 - z/a_k), its scale sequence,
// and the annulus/gap geometry used throughout the library.
//
// Scale recursion: a_1 = 1, a_{k+1} = 8C a_k prod_{j<k} (a_k / a_j).
// Radii: r_k = (2k+1)/(2k+2) a_k, s_k = 10 a_k for k >= 1; r_0 = 0, s_0 = 16/C.
// Annuli A_k = {r_k <= |z| <= s_k} (closed), gaps B_k = {s_k < |z| < r_{k+1}} (open).

#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "repeller/errors.hpp"
#include "repeller/xnum.hpp"

namespace repeller {

struct Params {
    double C = 2000.0;
    int N = 3;
    int M = 11;  // product truncation, at least N + 2
    double tail_tol = 1e-10;
    int samples_per_circle = 256;

    /// Defaults with truncation M = N + 8.
    static Params make(double C, int N) {
        Params p;
        p.C = C;
        p.N = N;
        p.M = N + 8;
        return p;
    }
};

inline void validate(const Params& p) {
    if (!(p.C > 0.0) || !std::isfinite(p.C)) throw DomainError("C must be a positive finite real");
    if (p.N < 0) throw DomainError("N must be nonnegative");
    if (p.M < p.N + 2) throw DomainError("truncation M must satisfy M >= N + 2");
    if (!(p.tail_tol > 0.0 && p.tail_tol <= 1e-6)) throw DomainError("tail_tol must lie in (0, 1e-6]");
    if (p.samples_per_circle < 1) throw DomainError("samples_per_circle must be positive");
}

/// Scale sequence and radii. Index 0 holds the a_0 = 0 convention; entries
/// run to M + 1 so the truncation tail can be bounded.
struct Scales {
    Params params;
    std::vector<XReal> a;
    std::vector<XReal> r;
    std::vector<XReal> s;
    std::vector<double> log2_a;  // log2_a[0] = -inf
    XReal L;

    int N() const { return params.N; }
    int M() const { return params.M; }
    double C() const { return params.C; }
};

inline double expansion_constant(double C) { return C / (4.0 * std::numbers::e); }

inline Scales build_scales(const Params& p) {
    validate(p);
    const int M = p.M;
    Scales sc;
    sc.params = p;
    sc.a.assign(M + 2, XReal{});
    sc.a[1] = XReal::one();
    const XReal eight_c(8.0 * p.C);
    for (int k = 1; k <= M; ++k) {
        try {
            XReal v = eight_c * sc.a[k];
            for (int j = 1; j < k; ++j) v *= sc.a[k] / sc.a[j];
            sc.a[k + 1] = v;
        } catch (const RangeError&) {
            throw RangeError("scale a_" + std::to_string(k + 1) + " exceeds the exponent range");
        }
    }

    sc.r.assign(M + 2, XReal{});
    sc.s.assign(M + 2, XReal{});
    sc.s[0] = XReal(16.0 / p.C);
    for (int k = 1; k <= M + 1; ++k) {
        sc.r[k] = sc.a[k] * XReal((2.0 * k + 1.0) / (2.0 * k + 2.0));
        sc.s[k] = sc.a[k] * XReal(10.0);
    }
    sc.L = XReal(expansion_constant(p.C));

    sc.log2_a.assign(M + 2, -std::numeric_limits<double>::infinity());
    for (int k = 1; k <= M + 1; ++k) sc.log2_a[k] = sc.a[k].log2();

    const double log2_8c = std::log2(8.0 * p.C);
    for (int k = 1; k <= M; ++k) {
        if (!(sc.a[k] < sc.a[k + 1])) {
            throw ConstructionError("scales not increasing at k = " + std::to_string(k));
        }
        if (sc.log2_a[k + 1] - sc.log2_a[k] < k * log2_8c - 1e-9 * std::max(1.0, sc.log2_a[k + 1])) {
            throw ConstructionError("growth floor a_{k+1}/a_k >= (8C)^k violated at k = " + std::to_string(k));
        }
    }
    if (!(sc.s[0] < sc.r[1])) throw ConstructionError("interleaving violated: s_0 >= r_1");
    for (int k = 1; k <= M; ++k) {
        if (!(sc.r[k] < sc.a[k] && sc.a[k] < sc.s[k] && sc.s[k] < sc.r[k + 1])) {
            throw ConstructionError("interleaving r_k < a_k < s_k < r_{k+1} violated at k = " +
                                    std::to_string(k));
        }
    }
    return sc;
}

// --- region geometry --------------------------------------------------------

struct RegionIndex {
    enum class Kind { A, B, BeyondTop };
    Kind kind = Kind::A;
    int k = 0;

    static RegionIndex annulus(int k) { return {Kind::A, k}; }
    static RegionIndex gap(int k) { return {Kind::B, k}; }
    static RegionIndex beyond(int top) { return {Kind::BeyondTop, top}; }

    bool is_annulus() const { return kind == Kind::A; }
    bool is_gap() const { return kind == Kind::B; }
    bool is_beyond() const { return kind == Kind::BeyondTop; }

    friend bool operator==(const RegionIndex&, const RegionIndex&) = default;
};

inline std::string to_string(const RegionIndex& r) {
    switch (r.kind) {
        case RegionIndex::Kind::A: return "A" + std::to_string(r.k);
        case RegionIndex::Kind::B: return "B" + std::to_string(r.k);
        case RegionIndex::Kind::BeyondTop: return "beyond";
    }
    return "?";
}

/// Locates a modulus among A_0, B_0, ..., A_top, B_top. Equality with r_k or
/// s_k resolves to the closed annulus A_k.
inline RegionIndex region_of(const Scales& sc, int top, const XReal& modulus) {
    if (top < 0 || top > sc.M()) throw DomainError("region_of: top level out of range");
    for (int k = 0; k <= top; ++k) {
        if (modulus <= sc.s[k]) return RegionIndex::annulus(k);
        if (modulus < sc.r[k + 1]) return RegionIndex::gap(k);
    }
    return RegionIndex::beyond(top);
}

inline RegionIndex region_of(const Scales& sc, int top, const XComplex& z) {
    return region_of(sc, top, z.abs());
}

inline RegionIndex region_of(const Scales& sc, const XComplex& z) { return region_of(sc, sc.N(), z); }

// --- points anchored at a zero ----------------------------------------------

/// z = a_anchor + offset. Anchoring at a zero of f keeps full relative
/// precision for points extremely close to that zero.
struct AnchoredPoint {
    int anchor = 0;
    XComplex offset;
};

inline XComplex value(const Scales& sc, const AnchoredPoint& p) {
    if (p.anchor == 0) return p.offset;
    return XComplex(sc.a[p.anchor]) + p.offset;
}

/// Re-anchors an ordinary point at zero index `anchor`.
inline AnchoredPoint anchor_at(const Scales& sc, const XComplex& z, int anchor) {
    if (anchor == 0) return {0, z};
    return {anchor, z - XComplex(sc.a[anchor])};
}

// --- evaluation -------------------------------------------------------------

inline constexpr double kUnitRoundoff = 0x1p-53;

/// Bound on the relative perturbation from omitted factors j > M for |z| <= R.
/// Unchecked variant; any R is allowed.
inline XReal tail_bound_any(const Scales& sc, int M, const XReal& R) {
    if (M < 1 || M > sc.M()) throw DomainError("tail_bound: truncation outside built scales");
    if (R.is_zero()) return XReal{};
    const XReal S = R / sc.a[M + 1] * XReal(1.0 / (1.0 - 1.0 / (8.0 * sc.C())));
    if (S <= XReal(1e-3)) return S * (XReal::one() + S);  // expm1(S) <= S + S^2 on [0, 1]
    const double sd = S.to_double();
    if (sd < 700.0) return XReal(std::expm1(sd));
    return XReal::exp2(sd * std::numbers::log2e);
}

/// Relative tail bound for |z| <= R <= s_N.
inline XReal tail_bound(const Scales& sc, int M, const XReal& R) {
    if (sc.s[sc.N()] < R) throw DomainError("tail_bound: R exceeds s_N");
    if (M < sc.N() + 2) throw DomainError("tail_bound: M must be at least N + 2");
    return tail_bound_any(sc, M, R);
}

struct Evaluation {
    XComplex value;
    double rel_err = 0.0;
    bool flagged = false;
};

namespace detail {

// Factors g_0 = z, g_i = 1 - z/a_i (i = 1..M), with g_anchor = -offset/a_anchor.
struct Factors {
    XComplex z;
    std::vector<XComplex> g;
    double rounding = 0.0;  // accumulated first-order relative rounding bound
    bool exact_zero = false;
};

inline Factors factors(const Scales& sc, const AnchoredPoint& p, bool track) {
    const int M = sc.M();
    Factors f;
    f.z = value(sc, p);
    f.g.resize(M + 1);
    f.g[0] = f.z;
    if (f.z.is_zero()) f.exact_zero = true;
    for (int i = 1; i <= M; ++i) {
        if (i == p.anchor) {
            f.g[i] = -(p.offset / sc.a[i]);
            if (track) f.rounding += 3 * kUnitRoundoff;
        } else {
            const XComplex q = f.z / sc.a[i];
            f.g[i] = XComplex(XReal::one()) - q;
            if (track && !f.g[i].is_zero()) {
                const double cond = (q.abs() / f.g[i].abs()).to_double();
                f.rounding += kUnitRoundoff * (4.0 + 2.0 * cond);
            }
        }
        if (f.g[i].is_zero()) f.exact_zero = true;
    }
    return f;
}

inline double tail_rel(const Scales& sc, const XComplex& z) {
    return tail_bound_any(sc, sc.M(), z.abs()).to_double();
}

}  // namespace detail

/// f(z) truncated after M factors, with a first-order relative error bound.
inline Evaluation eval_f(const Scales& sc, const AnchoredPoint& p) {
    const detail::Factors fac = detail::factors(sc, p, true);
    if (fac.exact_zero) return {XComplex{}, 0.0, false};
    XComplex v = fac.g[0] * XReal(sc.C());
    for (std::size_t i = 1; i < fac.g.size(); ++i) v *= fac.g[i];
    Evaluation e;
    e.value = v;
    e.rel_err = fac.rounding + 6.0 * kUnitRoundoff * (sc.M() + 1) + detail::tail_rel(sc, fac.z);
    e.flagged = e.rel_err > sc.params.tail_tol;
    return e;
}

inline Evaluation eval_f(const Scales& sc, const XComplex& z) { return eval_f(sc, AnchoredPoint{0, z}); }

/// f(z) without error tracking; used on contours where only the argument matters.
inline XComplex eval_f_value(const Scales& sc, const XComplex& z) {
    XComplex v = z * XReal(sc.C());
    const XComplex one(XReal::one());
    for (int i = 1; i <= sc.M(); ++i) v *= one - z / sc.a[i];
    return v;
}

inline constexpr double kNearZeroSwitch = 1e-9;

enum class DerivativePath { Auto, LogDerivative, ProductRule };

/// f'(z). Away from the zeros this is f(z) (1/z + sum 1/(z - a_j)); within
/// relative distance 1e-9 of a zero the product rule with prefix and suffix
/// partial products is used instead, which stays finite at the zeros.
inline Evaluation eval_f_prime(const Scales& sc, const AnchoredPoint& p,
                               DerivativePath path = DerivativePath::Auto) {
    const int M = sc.M();
    const detail::Factors fac = detail::factors(sc, p, true);
    const XReal C(sc.C());

    bool near = fac.z.is_zero();
    for (int i = 1; i <= M && !near; ++i) {
        // |z - a_i| / a_i == |g_i|
        if (fac.g[i].abs() <= XReal(kNearZeroSwitch)) near = true;
    }
    if (path == DerivativePath::LogDerivative && near) {
        throw DomainError("eval_f_prime: logarithmic-derivative path undefined at a zero");
    }
    if (path == DerivativePath::ProductRule) near = true;

    Evaluation e;
    const double tail = detail::tail_rel(sc, fac.z);
    if (!near) {
        XComplex fv = fac.g[0] * C;
        for (int i = 1; i <= M; ++i) fv *= fac.g[i];
        const XComplex one(XReal::one());
        XComplex sum = one / fac.z;
        XReal mass = sum.abs();
        for (int i = 1; i <= M; ++i) {
            // 1/(z - a_i) = -1/(a_i g_i)
            const XComplex term = -(one / (fac.g[i] * sc.a[i]));
            sum += term;
            mass += term.abs();
        }
        e.value = fv * sum;
        const double cancel = sum.is_zero() ? HUGE_VAL : (mass / sum.abs()).to_double();
        e.rel_err = fac.rounding + 6.0 * kUnitRoundoff * (M + 1) + 4.0 * kUnitRoundoff * (M + 1) * cancel + tail;
    } else {
        std::vector<XComplex> prefix(M + 2), suffix(M + 2);
        prefix[0] = XComplex(XReal::one());
        for (int i = 0; i <= M; ++i) prefix[i + 1] = prefix[i] * fac.g[i];
        suffix[M + 1] = XComplex(XReal::one());
        for (int i = M; i >= 0; --i) suffix[i] = suffix[i + 1] * fac.g[i];
        XComplex sum = prefix[0] * suffix[1];  // derivative of g_0 is 1
        XReal mass = sum.abs();
        for (int i = 1; i <= M; ++i) {
            const XComplex term = (prefix[i] * suffix[i + 1]) * (-(XReal::one() / sc.a[i]));
            sum += term;
            mass += term.abs();
        }
        e.value = sum * C;
        const double cancel = sum.is_zero() ? HUGE_VAL : (mass / sum.abs()).to_double();
        e.rel_err = fac.rounding + 8.0 * kUnitRoundoff * (M + 2) * cancel + tail;
    }
    e.flagged = e.rel_err > sc.params.tail_tol;
    return e;
}

inline Evaluation eval_f_prime(const Scales& sc, const XComplex& z,
                               DerivativePath path = DerivativePath::Auto) {
    return eval_f_prime(sc, AnchoredPoint{0, z}, path);
}

/// x f'(x) / f(x) = 1 + sum_j x / (x - a_j) for real x > 0.
inline double log_derivative(const Scales& sc, const XReal& x) {
    if (x.sign() <= 0) throw DomainError("log_derivative: x must be positive");
    double sum = 1.0;
    for (int j = 1; j <= sc.M(); ++j) {
        const XReal q = sc.a[j] / x;  // a_j / x
        const XReal gap = (x - sc.a[j]).abs();
        if (gap <= sc.a[j] * XReal(1e-12)) {
            throw PoleError("log_derivative: x coincides with zero a_" + std::to_string(j));
        }
        // x / (x - a_j) = 1 / (1 - a_j/x)
        if (q.log2() > 80.0) {
            sum -= (XReal::one() / q).to_double();
        } else {
            sum += 1.0 / (1.0 - q.to_double());
        }
    }
    return sum;
}

}  // namespace repeller
