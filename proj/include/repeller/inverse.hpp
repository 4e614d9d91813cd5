#pragma once

// Preimages of a point under F = f restricted to A_0 u ... u A_N.
//
// Solutions are counted with the argument principle (continuous argument of
// f - a along the boundary of a log-polar sector) and located by sector
// bisection plus Newton steps taken in coordinates anchored at the nearest
// zero a_j. Preimages in A_j for j >= k sit within relative 10^-100 or so of
// a_j, which is why the anchored form is kept all the way into the tree.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "repeller/construction.hpp"
#include "repeller/parallel.hpp"

namespace repeller {

/// log2_r_lo = -inf describes the disk |z| <= 2^log2_r_hi (full angle only).
struct SectorRegion {
    double log2_r_lo = 0.0;
    double log2_r_hi = 1.0;
    double theta_lo = -std::numbers::pi;
    double theta_hi = std::numbers::pi;

    bool is_disk() const { return std::isinf(log2_r_lo); }
    bool full_angle() const { return theta_hi - theta_lo >= 2.0 * std::numbers::pi - 1e-12; }
};

/// Angular cut for full annuli, kept off the real axis where real targets
/// have real preimages.
inline constexpr double kAngleOffset = 0.0123456789;

inline SectorRegion annulus_region(const Scales& sc, int j) {
    SectorRegion r;
    r.log2_r_lo = j == 0 ? -std::numeric_limits<double>::infinity() : sc.r[j].log2();
    r.log2_r_hi = sc.s[j].log2();
    r.theta_lo = kAngleOffset - std::numbers::pi;
    r.theta_hi = kAngleOffset + std::numbers::pi;
    return r;
}

inline void validate(const SectorRegion& r) {
    const double span = r.theta_hi - r.theta_lo;
    if (!(r.log2_r_lo < r.log2_r_hi) || !std::isfinite(r.log2_r_hi)) {
        throw DomainError("SectorRegion: need log2_r_lo < log2_r_hi");
    }
    if (!(span > 0.0) || span > 2.0 * std::numbers::pi + 1e-12) {
        throw DomainError("SectorRegion: need 0 < theta_hi - theta_lo <= 2 pi");
    }
    if (r.is_disk() && !r.full_angle()) throw DomainError("SectorRegion: a disk must cover the full angle");
}

namespace detail {

struct BoundaryZero {};

class ArgumentTracker {
public:
    ArgumentTracker(const Scales& sc, const XComplex& a) : sc_(sc), a_(a), scale_(a.abs() * XReal(1e-12)) {}

    /// Total argument change of f - a along the straight log-polar leg from
    /// (lr0, th0) to (lr1, th1). Throws BoundaryZero.
    double leg(double lr0, double th0, double lr1, double th1, int n0) {
        double total = 0.0;
        double prev_arg = arg_at(lr0, th0);
        for (int i = 1; i <= n0; ++i) {
            const double u0 = static_cast<double>(i - 1) / n0, u1 = static_cast<double>(i) / n0;
            const double next_arg = arg_at(lr0 + (lr1 - lr0) * u1, th0 + (th1 - th0) * u1);
            total += refine(lr0, th0, lr1, th1, u0, u1, prev_arg, next_arg, 0);
            prev_arg = next_arg;
        }
        return total;
    }

private:
    static constexpr int kMaxDepth = 40;

    double arg_at(double lr, double th) {
        const XComplex g = eval_f_value(sc_, XComplex::from_polar(lr, th)) - a_;
        if (g.is_zero() || (!scale_.is_zero() && g.abs() <= scale_)) throw BoundaryZero{};
        return g.polar().argument;
    }

    static double wrap(double d) {
        while (d > std::numbers::pi) d -= 2.0 * std::numbers::pi;
        while (d <= -std::numbers::pi) d += 2.0 * std::numbers::pi;
        return d;
    }

    double refine(double lr0, double th0, double lr1, double th1, double u0, double u1, double arg0, double arg1,
                  int depth) {
        const double d = wrap(arg1 - arg0);
        if (std::fabs(d) < 0.5 * std::numbers::pi) return d;
        if (depth >= kMaxDepth) throw BoundaryZero{};
        const double um = 0.5 * (u0 + u1);
        const double argm = arg_at(lr0 + (lr1 - lr0) * um, th0 + (th1 - th0) * um);
        return refine(lr0, th0, lr1, th1, u0, um, arg0, argm, depth + 1) +
               refine(lr0, th0, lr1, th1, um, u1, argm, arg1, depth + 1);
    }

    const Scales& sc_;
    XComplex a_;
    XReal scale_;
};

/// Total argument change of f - a around the boundary in turns, or nullopt
/// if f - a vanishes (to working precision) on it.
inline std::optional<double> boundary_turns(const Scales& sc, const SectorRegion& r, const XComplex& a) {
    ArgumentTracker tr(sc, a);
    const double span = r.theta_hi - r.theta_lo;
    const int n_arc = std::max(8, static_cast<int>(std::ceil(128.0 * span / (2.0 * std::numbers::pi))));
    double total = 0.0;
    try {
        total += tr.leg(r.log2_r_hi, r.theta_lo, r.log2_r_hi, r.theta_hi, n_arc);
        if (!r.is_disk()) {
            if (!r.full_angle()) total += tr.leg(r.log2_r_hi, r.theta_hi, r.log2_r_lo, r.theta_hi, 16);
            total += tr.leg(r.log2_r_lo, r.theta_hi, r.log2_r_lo, r.theta_lo, n_arc);
            if (!r.full_angle()) total += tr.leg(r.log2_r_lo, r.theta_lo, r.log2_r_hi, r.theta_lo, 16);
        }
    } catch (const BoundaryZero&) {
        return std::nullopt;
    }
    return total / (2.0 * std::numbers::pi);
}

inline std::optional<int> winding_once(const Scales& sc, const SectorRegion& r, const XComplex& a) {
    const auto turns = boundary_turns(sc, r, a);
    if (!turns) return std::nullopt;
    const double rounded = std::round(*turns);
    if (std::fabs(*turns - rounded) > 1e-3) throw NumericalError("winding_count: non-integer winding");
    return static_cast<int>(rounded);
}

}  // namespace detail

/// Number of solutions of f(z) = a inside the region. A zero of f - a on the
/// boundary triggers retries with the radii moved by 1e-6 (log2).
inline int winding_count(const Scales& sc, const SectorRegion& region, const XComplex& a) {
    validate(region);
    static constexpr double kJitter[] = {0.0, 1e-6, -1e-6, 2e-6, -2e-6};
    for (double j : kJitter) {
        SectorRegion r = region;
        r.log2_r_hi += j;
        if (!r.is_disk()) r.log2_r_lo -= j;
        if (auto w = detail::winding_once(sc, r, a)) return *w;
    }
    throw GeometryError("winding_count: f - a vanishes on the region boundary");
}

// --- locating solutions -------------------------------------------------------

struct Solution {
    AnchoredPoint point;
    double residual = 0.0;  // |f(z) - a| / |a|, or |f(z)| for a = 0
};

inline constexpr double kResidualTol = 1e-10;
inline constexpr double kDistinctTol = 1e-8;

namespace detail {

inline double angle_in(const SectorRegion& r, double th) {
    while (th < r.theta_lo) th += 2.0 * std::numbers::pi;
    while (th > r.theta_hi) th -= 2.0 * std::numbers::pi;
    return th;
}

inline bool inside(const SectorRegion& r, const XComplex& z) {
    if (z.is_zero()) return r.is_disk();
    const Polar p = z.polar();
    if (p.log2_magnitude > r.log2_r_hi || (!r.is_disk() && p.log2_magnitude < r.log2_r_lo)) return false;
    if (r.full_angle()) return true;
    const double th = angle_in(r, p.argument);
    return th >= r.theta_lo && th <= r.theta_hi;
}

/// Nearest zero index in log2 (within 4 octaves), else 0.
inline int nearest_anchor(const Scales& sc, const XComplex& z) {
    if (z.is_zero()) return 0;
    const double l = z.abs().log2();
    int best = 0;
    double best_d = 4.0;
    for (int i = 1; i <= sc.M(); ++i) {
        const double d = std::fabs(l - sc.log2_a[i]);
        if (d < best_d) {
            best_d = d;
            best = i;
        }
    }
    return best;
}

inline double residual(const Scales& sc, const AnchoredPoint& p, const XComplex& a) {
    const XComplex d = eval_f(sc, p).value - a;
    if (a.is_zero()) return d.is_zero() ? 0.0 : d.abs().to_double();
    return (d.abs() / a.abs()).to_double();
}

/// Newton iteration on f(z) = a, carrying the iterate as anchor + offset.
inline std::optional<Solution> newton(const Scales& sc, AnchoredPoint p, const XComplex& a,
                                      const SectorRegion& piece) {
    const double lr_floor = piece.is_disk() ? -std::numeric_limits<double>::infinity() : piece.log2_r_lo - 2.0;
    const double lr_ceil = piece.log2_r_hi + 2.0;
    double res = residual(sc, p, a);
    for (int step = 0; step < 64 && res >= 1e-13; ++step) {
        try {
            const Evaluation fv = eval_f(sc, p);
            const Evaluation dv = eval_f_prime(sc, p);
            if (dv.value.is_zero()) return std::nullopt;
            p.offset -= (fv.value - a) / dv.value;
        } catch (const DomainError&) {
            return std::nullopt;
        }
        const XComplex z = value(sc, p);
        if (!z.is_zero()) {
            const double lr = z.abs().log2();
            if (lr < lr_floor || lr > lr_ceil) return std::nullopt;
        }
        const int anchor = nearest_anchor(sc, z);
        if (anchor != p.anchor) p = anchor_at(sc, z, anchor);
        const double next = residual(sc, p, a);
        if (step > 8 && next >= res) {
            res = std::min(res, next);
            break;
        }
        res = next;
    }
    if (!(res < kResidualTol)) return std::nullopt;
    if (!inside(piece, value(sc, p))) return std::nullopt;
    return Solution{p, res};
}

inline std::vector<AnchoredPoint> newton_starts(const Scales& sc, const SectorRegion& r) {
    std::vector<AnchoredPoint> starts;
    if (r.is_disk()) starts.push_back({0, XComplex{}});
    for (int i = 1; i <= sc.M(); ++i) {
        if (inside(r, XComplex(sc.a[i]))) starts.push_back({i, XComplex{}});
    }
    const double lr = r.is_disk() ? r.log2_r_hi - 1.0 : 0.5 * (r.log2_r_lo + r.log2_r_hi);
    const XComplex center = XComplex::from_polar(lr, 0.5 * (r.theta_lo + r.theta_hi));
    starts.push_back(anchor_at(sc, center, nearest_anchor(sc, center)));
    return starts;
}

inline double log_polar_distance(const Scales& sc, const AnchoredPoint& p, const AnchoredPoint& q) {
    if (p.anchor == q.anchor && p.anchor != 0) {
        // both near a_j: compare offsets relative to a_j
        return ((p.offset - q.offset).abs() / sc.a[p.anchor]).to_double();
    }
    const XComplex zp = value(sc, p), zq = value(sc, q);
    if (zp.is_zero() || zq.is_zero()) return zp.is_zero() && zq.is_zero() ? 0.0 : HUGE_VAL;
    const Polar a = zp.polar(), b = zq.polar();
    double dth = std::fabs(a.argument - b.argument);
    dth = std::min(dth, 2.0 * std::numbers::pi - dth);
    return std::hypot(a.log2_magnitude - b.log2_magnitude, dth);
}

struct Solver {
    const Scales& sc;
    XComplex a;
    std::vector<Solution> found;

    static constexpr int kMaxDepth = 48;

    // Split point with a small offset so that cuts avoid symmetric positions.
    static std::pair<SectorRegion, SectorRegion> split(const SectorRegion& r, int depth, double jitter) {
        SectorRegion lo = r, hi = r;
        const bool radial = depth % 2 == 0;
        if (r.is_disk()) {
            lo.log2_r_hi = hi.log2_r_lo = r.log2_r_hi - 1.0 + jitter;
        } else if (radial) {
            lo.log2_r_hi = hi.log2_r_lo = 0.5 * (r.log2_r_lo + r.log2_r_hi) + jitter * (r.log2_r_hi - r.log2_r_lo);
        } else {
            lo.theta_hi = hi.theta_lo = 0.5 * (r.theta_lo + r.theta_hi) + jitter * (r.theta_hi - r.theta_lo);
        }
        return {lo, hi};
    }

    void solve(const SectorRegion& r, int count, int depth) {
        if (count == 0) return;
        if (count == 1) {
            for (const auto& start : newton_starts(sc, r)) {
                if (auto s = newton(sc, start, a, r)) {
                    found.push_back(*s);
                    return;
                }
            }
        }
        if (depth >= kMaxDepth) throw NumericalError("solve_in_region: bisection depth exhausted");
        static constexpr double kSplitJitter[] = {1e-7, -3e-7, 7e-7, -1.3e-6, 2.9e-6};
        for (double jitter : kSplitJitter) {
            auto [lo, hi] = split(r, depth, jitter);
            const auto wl = winding_once(sc, lo, a);
            const auto wh = winding_once(sc, hi, a);
            if (!wl || !wh || *wl < 0 || *wh < 0 || *wl + *wh != count) continue;
            solve(lo, *wl, depth + 1);
            solve(hi, *wh, depth + 1);
            return;
        }
        throw NumericalError("solve_in_region: inconsistent winding under subdivision");
    }
};

}  // namespace detail

/// All solutions of f(z) = a inside the region, in the order found.
inline std::vector<Solution> solve_in_region(const Scales& sc, const SectorRegion& region, const XComplex& a,
                                             int count) {
    validate(region);
    detail::Solver solver{sc, a, {}};
    solver.solve(region, count, 0);
    auto& f = solver.found;
    for (std::size_t i = 0; i < f.size(); ++i)
        for (std::size_t j = i + 1; j < f.size(); ++j)
            if (detail::log_polar_distance(sc, f[i].point, f[j].point) <= kDistinctTol) {
                throw NumericalError("solve_in_region: solutions not distinct");
            }
    if (static_cast<int>(f.size()) != count) throw NumericalError("solve_in_region: solution count mismatch");
    return f;
}

inline std::vector<Solution> solve_in_region(const Scales& sc, const SectorRegion& region, const XComplex& a) {
    return solve_in_region(sc, region, a, winding_count(sc, region, a));
}

struct AnnulusPreimages {
    int j = 0;
    int winding = 0;
    std::vector<Solution> solutions;
};

/// Preimages of a in each of A_0..A_N.
inline std::vector<AnnulusPreimages> find_preimages(const Scales& sc, const XComplex& a) {
    std::vector<AnnulusPreimages> out;
    for (int j = 0; j <= sc.N(); ++j) {
        const SectorRegion r = annulus_region(sc, j);
        AnnulusPreimages ap;
        ap.j = j;
        ap.winding = winding_count(sc, r, a);
        ap.solutions = solve_in_region(sc, r, a, ap.winding);
        out.push_back(std::move(ap));
    }
    return out;
}

// --- preimage trees --------------------------------------------------------------

struct TreeNode {
    AnchoredPoint point;
    int parent = -1;  // index into the previous level
    int depth = 0;
    RegionIndex region;
    XReal derivative;   // |f'(point)|
    XReal accumulated;  // product of |f'| from this node up to the root
    double residual = 0.0;
};

struct PreimageTree {
    XComplex root;
    int N = 0;
    int depth = 0;
    std::vector<std::vector<TreeNode>> levels;  // levels[0] holds the root
    bool partial = false;
    std::vector<std::string> failures;

    const std::vector<TreeNode>& leaves() const { return levels.back(); }
};

inline constexpr double kDefaultNodeBudget = 1e6;

namespace detail {

// Canonical child order: region index, then angle, then log-radius.
inline void sort_children(const Scales& sc, std::vector<TreeNode>& nodes) {
    struct Key {
        int j;
        double th;
        double lr;
    };
    std::vector<std::pair<Key, TreeNode>> keyed;
    for (auto& n : nodes) {
        const XComplex z = value(sc, n.point);
        Key k{n.region.k, 0.0, -HUGE_VAL};
        if (!z.is_zero()) {
            const Polar p = z.polar();
            k.th = p.argument;
            k.lr = p.log2_magnitude;
        }
        keyed.push_back({k, std::move(n)});
    }
    std::stable_sort(keyed.begin(), keyed.end(), [](const auto& x, const auto& y) {
        if (x.first.j != y.first.j) return x.first.j < y.first.j;
        if (x.first.th != y.first.th) return x.first.th < y.first.th;
        return x.first.lr < y.first.lr;
    });
    nodes.clear();
    for (auto& kv : keyed) nodes.push_back(std::move(kv.second));
}

}  // namespace detail

/// Depth-n tree of F-preimages of a. The budget bounds the leaf count
/// (N+1)^n and is checked before any work.
inline PreimageTree build_tree(const Scales& sc, const XComplex& a, int n, double budget = kDefaultNodeBudget) {
    if (n < 1) throw DomainError("build_tree: depth must be at least 1");
    if (std::pow(static_cast<double>(sc.N() + 1), n) > budget) {
        throw BudgetError("build_tree: (N+1)^n exceeds the node budget");
    }
    const RegionIndex root_region = region_of(sc, a);
    if (!root_region.is_annulus()) throw DomainError("build_tree: base point must lie in some A_k, k <= N");

    PreimageTree tree;
    tree.root = a;
    tree.N = sc.N();
    tree.depth = n;
    TreeNode root;
    root.point = {0, a};
    root.region = root_region;
    root.derivative = XReal::one();
    root.accumulated = XReal::one();
    tree.levels.push_back({root});

    for (int d = 1; d <= n; ++d) {
        const auto& parents = tree.levels.back();
        std::vector<std::vector<TreeNode>> kids(parents.size());
        std::vector<std::string> errors(parents.size());
        parallel_for(parents.size(), [&](std::size_t i) {
            const XComplex target = value(sc, parents[i].point);
            try {
                for (const auto& ap : find_preimages(sc, target)) {
                    for (const auto& s : ap.solutions) {
                        TreeNode c;
                        c.point = s.point;
                        c.parent = static_cast<int>(i);
                        c.depth = d;
                        c.region = RegionIndex::annulus(ap.j);
                        c.derivative = eval_f_prime(sc, s.point).value.abs();
                        c.accumulated = c.derivative * parents[i].accumulated;
                        c.residual = s.residual;
                        kids[i].push_back(c);
                    }
                }
                if (static_cast<int>(kids[i].size()) != sc.N() + 1) {
                    errors[i] = "node " + std::to_string(i) + " at depth " + std::to_string(d - 1) + ": found " +
                                std::to_string(kids[i].size()) + " preimages";
                }
            } catch (const std::exception& e) {
                errors[i] = "node " + std::to_string(i) + " at depth " + std::to_string(d - 1) + ": " + e.what();
                kids[i].clear();
            }
            detail::sort_children(sc, kids[i]);
        });
        std::vector<TreeNode> level;
        for (std::size_t i = 0; i < kids.size(); ++i) {
            if (!errors[i].empty()) {
                tree.partial = true;
                tree.failures.push_back(errors[i]);
            }
            for (auto& c : kids[i]) level.push_back(std::move(c));
        }
        tree.levels.push_back(std::move(level));
    }
    return tree;
}

}  // namespace repeller
