#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "repeller/inverse.hpp"
#include "support/oracles.hpp"

using namespace repeller;

namespace {

const Scales& desk_scales() {
    static const Scales sc = build_scales(Params::make(2000.0, 3));
    return sc;
}

// Seeded points spread over A_1, A_2, A_3 (log-polar uniform).
XComplex point_in(const Scales& sc, int k, oracle::SplitMix& rng) {
    const double lo = sc.r[k].log2(), hi = sc.s[k].log2();
    return XComplex::from_polar(rng.uniform(lo, hi), rng.uniform(-3.1, 3.1));
}

}  // namespace

TEST(WindingCount, PerAnnulusCounts) {
    const Scales& sc = desk_scales();
    oracle::SplitMix rng{21};
    for (int k = 1; k <= 3; ++k) {
        for (int trial = 0; trial < 3; ++trial) {
            const XComplex a = point_in(sc, k, rng);
            int total = 0;
            for (int j = 0; j <= sc.N(); ++j) {
                const int w = winding_count(sc, annulus_region(sc, j), a);
                total += w;
                // measured count in A_{k-1}: N+1 total minus N-k+1 above
                const int expected = j >= k ? 1 : j == k - 1 ? k : 0;
                EXPECT_EQ(w, expected) << "k=" << k << " j=" << j;
            }
            EXPECT_EQ(total, sc.N() + 1);
        }
    }
}

TEST(WindingCount, EmptySector) {
    const Scales& sc = desk_scales();
    const SectorRegion tiny{2.0, 2.001, 1.0, 1.001};
    EXPECT_EQ(winding_count(sc, tiny, XComplex(1.0)), 0);
}

TEST(WindingCount, AdditiveOverRandomPartitions) {
    const Scales& sc = desk_scales();
    const SectorRegion a1 = annulus_region(sc, 1);
    oracle::SplitMix rng{4};
    for (int trial = 0; trial < 5; ++trial) {
        // a in A_2 has two preimages in A_1
        const XComplex a = point_in(sc, 2, rng);
        const int whole = winding_count(sc, a1, a);
        ASSERT_EQ(whole, 2);
        const double cut_r = rng.uniform(a1.log2_r_lo + 0.1, a1.log2_r_hi - 0.1);
        const double cut_t1 = rng.uniform(a1.theta_lo + 0.1, a1.theta_lo + 3.0);
        const double cut_t2 = rng.uniform(cut_t1 + 0.1, a1.theta_hi - 0.1);
        int sum = 0;
        for (auto [rl, rh] : {std::pair{a1.log2_r_lo, cut_r}, std::pair{cut_r, a1.log2_r_hi}}) {
            for (auto [tl, th] : {std::pair{a1.theta_lo, cut_t1}, std::pair{cut_t1, cut_t2}, std::pair{cut_t2, a1.theta_hi}}) {
                sum += winding_count(sc, SectorRegion{rl, rh, tl, th}, a);
            }
        }
        EXPECT_EQ(sum, whole);
    }
}

TEST(WindingCount, RejectsBadRegions) {
    const Scales& sc = desk_scales();
    EXPECT_THROW(winding_count(sc, SectorRegion{1.0, 0.0, 0.0, 1.0}, XComplex(1.0)), DomainError);
    EXPECT_THROW(winding_count(sc, SectorRegion{0.0, 1.0, 0.0, 7.0}, XComplex(1.0)), DomainError);
    EXPECT_THROW(winding_count(sc, SectorRegion{-INFINITY, 1.0, 0.0, 1.0}, XComplex(1.0)), DomainError);
}

TEST(SolveInRegion, ZerosOfF) {
    const Scales& sc = desk_scales();
    for (int j = 1; j <= 3; ++j) {
        const auto sol = solve_in_region(sc, annulus_region(sc, j), XComplex{});
        ASSERT_EQ(sol.size(), 1u);
        EXPECT_EQ(value(sc, sol[0].point), XComplex(sc.a[j]));
    }
}

TEST(SolveInRegion, RealSolutionNearFirstZero) {
    const Scales& sc = desk_scales();
    const auto sol = solve_in_region(sc, annulus_region(sc, 1), XComplex(1.0));
    ASSERT_EQ(sol.size(), 1u);
    const XComplex z = value(sc, sol[0].point);
    EXPECT_TRUE(z.im.is_zero() || std::fabs(z.im.to_double()) < 1e-15);
    // f < 0 on (a_1, a_2), so the real root lies in [r_1, a_1)
    EXPECT_NEAR(z.re.to_double(), 0.99949971848208521514, 1e-14);
    EXPECT_LT(z.re, sc.a[1]);
    EXPECT_GE(z.re, sc.r[1]);
    // long-double bisection oracle on [r_1, a_1), where f decreases to 0
    long double lo = 0.75L, hi = 1.0L - 1e-12L;
    for (int i = 0; i < 100; ++i) {
        const long double mid = 0.5L * (lo + hi);
        (oracle::f_real(2000.0L, sc.M(), mid) > 1.0L ? lo : hi) = mid;
    }
    EXPECT_NEAR(z.re.to_double(), static_cast<double>(lo), 1e-14);
}

TEST(SolveInRegion, OriginDiskRoot) {
    const Scales& sc = desk_scales();
    const auto sol = solve_in_region(sc, annulus_region(sc, 0), XComplex(1.0));
    ASSERT_EQ(sol.size(), 1u);
    EXPECT_NEAR(value(sc, sol[0].point).re.to_double(), 0.0005002502659614158, 1e-17);
}

TEST(FindPreimages, TotalsResidualsAndDerivativeFloor) {
    const Scales& sc = desk_scales();
    oracle::SplitMix rng{77};
    for (int k = 1; k <= 3; ++k) {
        const XComplex a = point_in(sc, k, rng);
        const auto res = find_preimages(sc, a);
        int total = 0;
        for (const auto& ap : res) {
            total += static_cast<int>(ap.solutions.size());
            for (const auto& s : ap.solutions) {
                EXPECT_LT(s.residual, kResidualTol);
                EXPECT_EQ(region_of(sc, value(sc, s.point)), RegionIndex::annulus(ap.j));
                const double floor = ap.j + sc.L.log2();
                EXPECT_GE(eval_f_prime(sc, s.point).value.abs().log2(), floor);
            }
        }
        EXPECT_EQ(total, sc.N() + 1);
    }
}

TEST(FindPreimages, ConjugationSymmetryForRealTarget) {
    const Scales& sc = desk_scales();
    // a in A_3 on the negative axis: three preimages in A_2, one of them real
    const XComplex a(-(sc.a[3] * XReal(2.0)));
    for (const auto& ap : find_preimages(sc, a)) {
        for (const auto& s : ap.solutions) {
            const XComplex z = value(sc, s.point);
            double best = HUGE_VAL;
            for (const auto& t : ap.solutions) {
                best = std::min(best, ((value(sc, t.point) - z.conj()).abs() / z.abs()).to_double());
            }
            EXPECT_LT(best, 1e-12);
        }
    }
}

TEST(BuildTree, DepthOneHasNPlusOneLeaves) {
    const auto tree = build_tree(desk_scales(), XComplex(1.0), 1);
    EXPECT_FALSE(tree.partial);
    EXPECT_EQ(tree.leaves().size(), 4u);
}

TEST(BuildTree, DepthThreeInvariants) {
    const Scales& sc = desk_scales();
    const auto tree = build_tree(sc, XComplex(1.0), 3);
    ASSERT_FALSE(tree.partial);
    EXPECT_EQ(tree.leaves().size(), 64u);
    const double l3 = 3.0 * sc.L.log2();
    for (int d = 1; d <= 3; ++d) {
        for (const auto& node : tree.levels[d]) {
            const auto& parent = tree.levels[d - 1][node.parent];
            const XComplex target = value(sc, parent.point);
            const XComplex image = eval_f(sc, node.point).value;
            EXPECT_LT(((image - target).abs() / target.abs()).to_double(), 1e-9);
            EXPECT_TRUE(node.region.is_annulus());
            EXPECT_LE(node.region.k, sc.N());
            EXPECT_EQ(region_of(sc, value(sc, node.point)), node.region);
            const double expect = node.derivative.log2() + parent.accumulated.log2();
            EXPECT_NEAR(node.accumulated.log2(), expect, 1e-12 * std::fabs(expect));
        }
    }
    for (const auto& leaf : tree.leaves()) EXPECT_GE(leaf.accumulated.log2(), l3);
}

TEST(BuildTree, ChildrenCanonicallyOrdered) {
    const auto tree = build_tree(desk_scales(), XComplex(1.0), 2);
    const auto& level = tree.levels[2];
    for (std::size_t i = 1; i < level.size(); ++i) {
        if (level[i].parent != level[i - 1].parent) {
            EXPECT_GT(level[i].parent, level[i - 1].parent);
            continue;
        }
        EXPECT_LE(level[i - 1].region.k, level[i].region.k);
    }
}

TEST(BuildTree, BudgetCheckedFirst) {
    EXPECT_THROW(build_tree(desk_scales(), XComplex(1.0), 10), BudgetError);
    EXPECT_THROW(build_tree(desk_scales(), XComplex(1.0), 2, 10.0), BudgetError);
}

TEST(BuildTree, BaseMustLieInAnnulus) {
    const Scales& sc = desk_scales();
    EXPECT_THROW(build_tree(sc, XComplex(sqrt(sc.s[1] * sc.r[2])), 1), DomainError);
    EXPECT_THROW(build_tree(sc, XComplex(1.0), 0), DomainError);
}

TEST(BuildTree, ScheduleIndependent) {
    setenv("REPELLER_THREADS", "1", 1);
    const auto serial = build_tree(desk_scales(), XComplex(0.3, 2.0), 2);
    unsetenv("REPELLER_THREADS");
    const auto other = build_tree(desk_scales(), XComplex(0.3, 2.0), 2);
    ASSERT_EQ(serial.leaves().size(), other.leaves().size());
    for (std::size_t i = 0; i < serial.leaves().size(); ++i) {
        EXPECT_EQ(serial.leaves()[i].point.offset, other.leaves()[i].point.offset);
        EXPECT_EQ(serial.leaves()[i].accumulated, other.leaves()[i].accumulated);
    }
}
