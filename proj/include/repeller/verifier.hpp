#pragma once

// Numerical verification of the inequalities behind the mapping scheme
// f(B_k) subset B_{k+1} and the derivative floor |f'| >= 2^k L on A_k.
//
// Every check reports a signed margin in the asserted direction. Non-strict
// relations get a slack of 1e-9 so that identities that hold with equality
// (for example a_2/a_1 = 8C) register as passes. These are high-precision
// numerical checks at sample points, not proofs.

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "repeller/construction.hpp"
#include "repeller/random.hpp"

namespace repeller {

enum class Relation { Greater, GreaterEqual, Less, LessEqual };
enum class Units { Log2, Linear };

inline constexpr double kNonStrictSlack = 1e-9;
inline constexpr std::uint64_t kDefaultSeed = 20100101;

struct CheckResult {
    std::string name;
    int k = 0;
    double lhs = 0.0;
    double rhs = 0.0;
    double margin = 0.0;
    Units units = Units::Log2;
    Relation relation = Relation::Greater;
    bool pass = false;
    std::string note;  // empty, or why a check could not conclude
};

struct VerificationReport {
    Params params;
    std::uint64_t seed = kDefaultSeed;
    std::vector<CheckResult> checks;
    bool all_pass = false;
    std::string error;  // construction failure, checks empty
};

inline CheckResult make_check(std::string name, int k, double lhs, double rhs, Relation rel,
                              Units units = Units::Log2) {
    CheckResult c;
    c.name = std::move(name);
    c.k = k;
    c.lhs = lhs;
    c.rhs = rhs;
    c.units = units;
    c.relation = rel;
    switch (rel) {
        case Relation::Greater: c.margin = lhs - rhs; break;
        case Relation::GreaterEqual: c.margin = lhs - rhs + kNonStrictSlack; break;
        case Relation::Less: c.margin = rhs - lhs; break;
        case Relation::LessEqual: c.margin = rhs - lhs + kNonStrictSlack; break;
    }
    if (std::isnan(c.margin)) c.margin = -std::numeric_limits<double>::infinity();
    c.pass = c.margin > 0.0;
    return c;
}

inline CheckResult inconclusive(CheckResult c, std::string why) {
    c.pass = false;
    c.note = std::move(why);
    return c;
}

// --- growth of the scale sequence --------------------------------------------

/// a_{k+1}/a_k >= (8C)^k and a_{k+1}/a_k > 320 e (k+1) for k = 1..N+1.
inline std::vector<CheckResult> check_growth(const Scales& sc) {
    std::vector<CheckResult> out;
    const double log2_8c = std::log2(8.0 * sc.C());
    for (int k = 1; k <= sc.N() + 1; ++k) {
        const double ratio = (sc.a[k + 1] / sc.a[k]).log2();
        out.push_back(make_check("growth.power_floor", k, ratio, k * log2_8c, Relation::GreaterEqual));
        out.push_back(make_check("growth.linear_floor", k, ratio,
                                 std::log2(320.0 * std::numbers::e * (k + 1)), Relation::Greater));
    }
    return out;
}

// --- tail products -------------------------------------------------------------

/// prod_{j>k}(1 + 10 a_k/a_j) <= 2 and prod_{j>k}(1 - 10 a_k/a_j) >= 9/10,
/// with factors beyond M bounded analytically.
inline std::vector<CheckResult> check_tails(const Scales& sc) {
    std::vector<CheckResult> out;
    const int M = sc.M();
    for (int k = 1; k <= sc.N(); ++k) {
        const XReal ten_ak = sc.a[k] * XReal(10.0);
        double upper = 0.0, lower = 0.0;
        for (int j = k + 1; j <= M; ++j) {
            const double x = (ten_ak / sc.a[j]).to_double();
            upper += std::log1p(x);
            lower += x < 1.0 ? std::log1p(-x) : -std::numeric_limits<double>::infinity();
        }
        const double x_next = (ten_ak / sc.a[M + 1]).to_double();
        const double S = x_next / (1.0 - 1.0 / (8.0 * sc.C()));
        upper += S;
        lower -= x_next < 1.0 ? S / (1.0 - x_next) : std::numeric_limits<double>::infinity();
        out.push_back(make_check("tail.upper_product", k, upper / std::numbers::ln2, 1.0, Relation::LessEqual));
        out.push_back(make_check("tail.lower_product", k, lower / std::numbers::ln2, std::log2(0.9),
                                 Relation::GreaterEqual));
    }
    return out;
}

// --- images of circles and gaps -------------------------------------------------

namespace detail {

struct ImageStats {
    double min_log2 = std::numeric_limits<double>::infinity();
    double max_log2 = -std::numeric_limits<double>::infinity();
    bool flagged = false;
};

inline void accumulate(ImageStats& st, const Evaluation& e) {
    if (e.flagged) st.flagged = true;
    if (e.value.is_zero()) {
        st.min_log2 = -std::numeric_limits<double>::infinity();
        return;
    }
    const double l = e.value.abs().log2();
    st.min_log2 = std::min(st.min_log2, l);
    st.max_log2 = std::max(st.max_log2, l);
}

/// |f| over equally spaced samples on |z| = 2^log2_r with a seeded phase,
/// plus the two real-axis points where the extremes of |f| sit for real zeros.
inline ImageStats sample_circle(const Scales& sc, double log2_r, int samples, SampleStream& rng) {
    ImageStats st;
    accumulate(st, eval_f(sc, XComplex::from_polar(log2_r, 0.0)));
    accumulate(st, eval_f(sc, XComplex(-XReal::exp2(log2_r))));
    const double step = 2.0 * std::numbers::pi / samples;
    const double phase = rng.uniform(0.0, step);
    for (int i = 0; i < samples; ++i) {
        accumulate(st, eval_f(sc, XComplex::from_polar(log2_r, phase + i * step - std::numbers::pi)));
    }
    return st;
}

inline CheckResult with_flag(CheckResult c, bool flagged) {
    return flagged ? inconclusive(std::move(c), "numerically inconclusive: evaluation error above tail_tol")
                   : c;
}

}  // namespace detail

/// Circle images: |z| = r_k lands in B_k and |z| = s_k lands in B_{k+1}, plus
/// the intermediate modulus bounds and sampled interiors of the gaps.
inline std::vector<CheckResult> check_circle_maps(const Scales& sc, std::uint64_t seed) {
    std::vector<CheckResult> out;
    const int N = sc.N();
    const int n = sc.params.samples_per_circle;
    for (int k = 1; k <= N; ++k) {
        SampleStream rng(seed, "inner_circle", k);
        const auto st = detail::sample_circle(sc, sc.r[k].log2(), n, rng);
        out.push_back(detail::with_flag(
            make_check("inner_circle.image_beyond_s_k", k, st.min_log2, sc.s[k].log2(), Relation::Greater), st.flagged));
        out.push_back(detail::with_flag(
            make_check("inner_circle.image_below_r_k+1", k, st.max_log2, sc.r[k + 1].log2(), Relation::Less),
            st.flagged));
        out.push_back(detail::with_flag(make_check("inner_circle.half_next_scale", k, st.max_log2,
                                                   sc.a[k + 1].log2() - 1.0, Relation::LessEqual),
                                        st.flagged));
    }
    for (int k = 0; k <= N; ++k) {
        SampleStream rng(seed, "outer_circle", k);
        const auto st = detail::sample_circle(sc, sc.s[k].log2(), n, rng);
        out.push_back(detail::with_flag(make_check("outer_circle.image_beyond_s_k+1", k, st.min_log2,
                                                   sc.s[k + 1].log2(), Relation::Greater),
                                        st.flagged));
        out.push_back(detail::with_flag(
            make_check("outer_circle.image_below_r_k+2", k, st.max_log2, sc.r[k + 2].log2(), Relation::Less),
            st.flagged));
        const double floor = k >= 1 ? (k + 1) * std::log2(9.0) + sc.a[k + 1].log2() - 3.0
                                    : std::log2(sc.C() * sc.s[0].to_double() * 0.9);
        out.push_back(detail::with_flag(
            make_check("outer_circle.product_floor", k, st.min_log2, floor, Relation::GreaterEqual), st.flagged));
    }
    // interior of each gap: the worst of the two distances to the edges of B_{k+1}
    for (int k = 1; k <= N; ++k) {
        SampleStream rng(seed, "gap_interior", k);
        const double lo = sc.s[k].log2(), hi = sc.r[k + 1].log2();
        const double target_lo = sc.s[k + 1].log2(), target_hi = sc.r[k + 2].log2();
        double worst = std::numeric_limits<double>::infinity();
        bool flagged = false;
        for (int i = 0; i < n; ++i) {
            // open interval: keep samples off the boundary circles
            const double lr = lo + (hi - lo) * (1e-9 + (1.0 - 2e-9) * rng.uniform());
            const double th = rng.uniform(-std::numbers::pi, std::numbers::pi);
            const auto e = eval_f(sc, XComplex::from_polar(lr, th));
            flagged = flagged || e.flagged;
            const double l = e.value.is_zero() ? -std::numeric_limits<double>::infinity() : e.value.abs().log2();
            worst = std::min({worst, l - target_lo, target_hi - l});
        }
        out.push_back(detail::with_flag(
            make_check("gap.interior_maps_forward", k, worst, 0.0, Relation::Greater), flagged));
    }
    return out;
}

// --- sign of the logarithmic derivative -----------------------------------------

/// x f'(x)/f(x) <= -2 on [r_k, a_k) and >= 1/2 on (a_k, s_k] (for k = 0 on
/// (0, s_0]), on geometric grids of 128 points.
inline std::vector<CheckResult> check_zero_free(const Scales& sc) {
    constexpr int kGrid = 128;
    std::vector<CheckResult> out;
    for (int k = 0; k <= sc.N(); ++k) {
        if (k >= 1) {
            const double lo = sc.r[k].log2(), hi = sc.log2_a[k];
            double worst = -std::numeric_limits<double>::infinity();
            for (int i = 0; i < kGrid; ++i) {
                worst = std::max(worst, log_derivative(sc, XReal::exp2(lo + (hi - lo) * i / kGrid)));
            }
            out.push_back(make_check("zero_free.below_zero", k, worst, -2.0 + 1e-6, Relation::LessEqual, Units::Linear));
        }
        const double lo = k >= 1 ? sc.log2_a[k] : sc.s[0].log2() - 40.0;
        const double hi = sc.s[k].log2();
        double worst = std::numeric_limits<double>::infinity();
        for (int i = 1; i <= kGrid; ++i) {
            worst = std::min(worst, log_derivative(sc, XReal::exp2(lo + (hi - lo) * i / kGrid)));
        }
        out.push_back(make_check("zero_free.above_zero", k, worst, 0.5 - 1e-6, Relation::GreaterEqual, Units::Linear));
    }
    return out;
}

// --- derivative floor -------------------------------------------------------------

/// |f'| >= 2^k L on A_k through the endpoint reduction min over A_k equal to
/// min(|f'(r_k)|, |f'(s_k)|), plus direct checks at random points of A_k.
/// The endpoint checks are only conclusive when `zero_free_ok`.
inline std::vector<CheckResult> check_derivative_floor(const Scales& sc, std::uint64_t seed, bool zero_free_ok,
                                                       int interior_samples = 64) {
    std::vector<CheckResult> out;
    auto log2_abs = [](const Evaluation& e) {
        return e.value.is_zero() ? -std::numeric_limits<double>::infinity() : e.value.abs().log2();
    };
    auto reduction = [&](CheckResult c) {
        return zero_free_ok ? c : inconclusive(std::move(c), "endpoint reduction needs the zero-free checks");
    };
    const double log2_L = sc.L.log2();
    for (int k = 0; k <= sc.N(); ++k) {
        const double floor = k + log2_L;
        const XComplex inner = k == 0 ? XComplex{} : XComplex(sc.r[k]);
        const XComplex outer(sc.s[k]);
        const auto d_inner = eval_f_prime(sc, inner);
        const auto d_outer = eval_f_prime(sc, outer);
        const double li = log2_abs(d_inner), lo = log2_abs(d_outer);
        out.push_back(reduction(detail::with_flag(
            make_check("derivative.inner_endpoint", k, li, floor, Relation::GreaterEqual), d_inner.flagged)));
        out.push_back(reduction(detail::with_flag(
            make_check("derivative.outer_endpoint", k, lo, floor, Relation::GreaterEqual), d_outer.flagged)));
        if (k >= 1) {
            const auto f_inner = eval_f(sc, inner);
            out.push_back(detail::with_flag(make_check("derivative.inner_via_image", k, li,
                                                       1.0 + log2_abs(f_inner) - sc.r[k].log2(),
                                                       Relation::GreaterEqual),
                                            f_inner.flagged || d_inner.flagged));
            const auto f_outer = eval_f(sc, outer);
            out.push_back(detail::with_flag(make_check("derivative.outer_via_image", k, lo,
                                                       -1.0 + log2_abs(f_outer) - sc.s[k].log2(),
                                                       Relation::GreaterEqual),
                                            f_outer.flagged || d_outer.flagged));
        } else {
            out.push_back(detail::with_flag(make_check("derivative.outer_via_image", 0, lo,
                                                       -1.0 + sc.s[1].log2() - sc.s[0].log2(),
                                                       Relation::GreaterEqual),
                                            d_outer.flagged));
        }

        SampleStream rng(seed, "derivative_interior", k);
        const double r_lo = k == 0 ? sc.s[0].log2() - 40.0 : sc.r[k].log2();
        const double r_hi = sc.s[k].log2();
        double worst_floor = std::numeric_limits<double>::infinity();
        double worst_axis = std::numeric_limits<double>::infinity();
        bool flagged = false;
        for (int i = 0; i < interior_samples; ++i) {
            const double lr = rng.uniform(r_lo, r_hi);
            const double th = rng.uniform(-std::numbers::pi, std::numbers::pi);
            const auto d = eval_f_prime(sc, XComplex::from_polar(lr, th));
            const auto d_axis = eval_f_prime(sc, XComplex(XReal::exp2(lr)));
            flagged = flagged || d.flagged || d_axis.flagged;
            const double l = log2_abs(d);
            worst_floor = std::min(worst_floor, l);
            worst_axis = std::min(worst_axis, l - log2_abs(d_axis));
        }
        out.push_back(detail::with_flag(
            make_check("derivative.interior_samples", k, worst_floor, floor, Relation::GreaterEqual), flagged));
        out.push_back(detail::with_flag(
            make_check("derivative.circle_minimum_on_axis", k, worst_axis, 0.0, Relation::GreaterEqual), flagged));
    }
    return out;
}

inline bool all_pass(const std::vector<CheckResult>& checks) {
    for (const auto& c : checks)
        if (!c.pass) return false;
    return true;
}

/// Builds the scales and runs every check in a fixed order.
inline VerificationReport run_all(const Params& p, std::uint64_t seed = kDefaultSeed) {
    VerificationReport report;
    report.params = p;
    report.seed = seed;
    Scales sc;
    try {
        sc = build_scales(p);
    } catch (const std::exception& e) {
        report.error = e.what();
        return report;
    }
    auto append = [&](std::vector<CheckResult> part) {
        for (auto& c : part) report.checks.push_back(std::move(c));
    };
    append(check_growth(sc));
    append(check_tails(sc));
    append(check_circle_maps(sc, seed));
    auto zero_free = check_zero_free(sc);
    const bool zero_free_ok = all_pass(zero_free);
    append(std::move(zero_free));
    append(check_derivative_floor(sc, seed, zero_free_ok));
    report.all_pass = all_pass(report.checks);
    return report;
}

}  // namespace repeller
