#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "repeller/xnum.hpp"
#include "support/oracles.hpp"

using repeller::DomainError;
using repeller::RangeError;
using repeller::XComplex;
using repeller::XReal;

namespace {

void expect_parts(const XReal& x, int sign, double sig, std::int64_t exp) {
    EXPECT_EQ(x.sign(), sign);
    EXPECT_EQ(x.significand(), sig);
    EXPECT_EQ(x.exponent(), exp);
}

}  // namespace

TEST(XRealNormalize, ShiftsSignificandIntoUnitOctave) {
    expect_parts(XReal::normalize(1, 0.75, 0), 1, 1.5, -1);
    expect_parts(XReal::normalize(-1, 6.0, 10), -1, 1.5, 12);
}

TEST(XRealNormalize, ZeroIsCanonical) {
    expect_parts(XReal::normalize(1, 0.0, 0), 0, 1.0, 0);
    expect_parts(XReal::normalize(-1, 0.0, 12345), 0, 1.0, 0);
    expect_parts(XReal(0.0), 0, 1.0, 0);
}

TEST(XRealNormalize, RejectsNonFiniteAndOutOfRange) {
    EXPECT_THROW(XReal::normalize(1, INFINITY, 0), DomainError);
    EXPECT_THROW(XReal::normalize(1, NAN, 0), DomainError);
    EXPECT_THROW(XReal::normalize(1, 1.0, XReal::kExponentLimit), RangeError);
    EXPECT_THROW(XReal::normalize(1, 1.0, -XReal::kExponentLimit), RangeError);
}

TEST(XRealMul, ExactSignificandProduct) {
    const XReal a = XReal::normalize(1, 1.5, 100);
    const XReal b = XReal::normalize(1, 1.5, 200);
    expect_parts(a * b, 1, 1.125, 301);
}

TEST(XRealMul, ZeroAbsorbs) {
    const XReal a = XReal::normalize(-1, 1.25, 77);
    expect_parts(a * XReal{}, 0, 1.0, 0);
}

TEST(XRealMul, ExponentOverflow) {
    const XReal big = XReal::normalize(1, 1.0, std::int64_t{1} << 61);
    EXPECT_THROW(big * big, RangeError);
}

TEST(XRealAdd, EqualExponents) {
    const XReal x = XReal::exp2(100);
    expect_parts(x + x, 1, 1.0, 101);
}

TEST(XRealAdd, StickyDropBeyondGap) {
    const XReal big = XReal::exp2(100);
    const XReal tiny = XReal::exp2(-100);
    EXPECT_EQ(big + tiny, big);
    EXPECT_EQ(tiny + big, big);
}

TEST(XRealAdd, ExactCancellation) {
    const XReal x = XReal::exp2(100);
    expect_parts(x + (-x), 0, 1.0, 0);
}

TEST(XRealLog2, Values) {
    EXPECT_EQ(XReal::exp2(500).log2(), 500.0);
    EXPECT_NEAR(XReal(1.5).log2(), 0.5849625007211562, 1e-15);
    EXPECT_THROW(XReal{}.log2(), DomainError);
    EXPECT_THROW(XReal(-2.0).log2(), DomainError);
}

TEST(XComplexPolar, Axes) {
    const auto p = XComplex(XReal::exp2(300), XReal{}).polar();
    EXPECT_EQ(p.log2_magnitude, 300.0);
    EXPECT_EQ(p.argument, 0.0);
    const auto q = XComplex(XReal{}, -XReal::exp2(300)).polar();
    EXPECT_EQ(q.log2_magnitude, 300.0);
    EXPECT_DOUBLE_EQ(q.argument, -std::numbers::pi / 2);
    EXPECT_THROW(XComplex{}.polar(), DomainError);
}

TEST(XComplexPolar, ThreeFourFive) {
    const XComplex z(XReal(3.0) * XReal::exp2(100), XReal(4.0) * XReal::exp2(100));
    const auto p = z.polar();
    EXPECT_NEAR(p.log2_magnitude, 100.0 + std::log2(5.0), 1e-13);
    EXPECT_NEAR(p.argument, std::atan(4.0 / 3.0), 1e-15);
}

TEST(XComplexPolar, ArgumentIgnoresCommonExponentShift) {
    oracle::SplitMix rng{42};
    for (int i = 0; i < 200; ++i) {
        const double x = rng.uniform(-2, 2), y = rng.uniform(-2, 2);
        const auto shift = static_cast<std::int64_t>(rng.uniform(-1e6, 1e6));
        const XComplex z{XReal(x), XReal(y)};
        const XComplex zs{XReal(x) * XReal::normalize(1, 1.0, shift), XReal(y) * XReal::normalize(1, 1.0, shift)};
        EXPECT_EQ(z.polar().argument, zs.polar().argument);
        EXPECT_NEAR(zs.polar().log2_magnitude - z.polar().log2_magnitude, static_cast<double>(shift), 1e-6);
    }
}

// Product chains versus a log-domain oracle that sums integer exponents and
// significand logs separately.
TEST(XRealProperty, ProductChainMatchesLogOracle) {
    oracle::SplitMix rng{7};
    for (int trial = 0; trial < 100; ++trial) {
        XReal prod = XReal::one();
        std::int64_t exp_sum = 0;
        long double frac_sum = 0;
        for (int i = 0; i < 1000; ++i) {
            const double sig = rng.uniform(1.0, 2.0);
            const auto e = static_cast<std::int64_t>(std::llround(rng.uniform(-1e6, 1e6)));
            prod *= XReal::normalize(1, sig, e);
            exp_sum += e;
            frac_sum += std::log2(static_cast<long double>(sig));
        }
        const long double diff = static_cast<long double>(prod.exponent() - exp_sum) +
                                 (std::log2(static_cast<long double>(prod.significand())) - frac_sum);
        EXPECT_LT(std::fabs(static_cast<double>(diff)), 1e-9);
    }
}

TEST(XRealProperty, OrderAgreesWithLog2) {
    oracle::SplitMix rng{99};
    for (int i = 0; i < 20000; ++i) {
        const XReal a = XReal::normalize(1, rng.uniform(1, 2), static_cast<std::int64_t>(rng.uniform(-50, 50)));
        const XReal b = XReal::normalize(1, rng.uniform(1, 2), static_cast<std::int64_t>(rng.uniform(-50, 50)));
        const double la = a.log2(), lb = b.log2();
        if (std::fabs(la - lb) > 1e-12) {
            EXPECT_EQ(a < b, la < lb);
        }
    }
}

TEST(XRealOrder, SignsAndZero) {
    EXPECT_LT(XReal(-3.0), XReal(-2.0));
    EXPECT_LT(XReal(-2.0), XReal{});
    EXPECT_LT(XReal{}, XReal(1e-300));
    EXPECT_LT(XReal(1.0), XReal::exp2(1e6));
}

TEST(XRealRender, DecimalAndExact) {
    EXPECT_EQ(repeller::to_decimal(XReal(16000.0)), "+1.600000e+04");
    EXPECT_EQ(repeller::to_decimal(XReal(-0.75)), "-7.500000e-01");
    EXPECT_EQ(repeller::to_decimal(XReal{}), "+0.000000e+00");
    EXPECT_EQ(repeller::to_exact(XReal(0.75)), "+1.5*2^-1");
    EXPECT_EQ(repeller::to_exact(XReal{}), "0*2^0");
    // 2^1000 = 1.0715086e+301
    EXPECT_EQ(repeller::to_decimal(XReal::exp2(1000)), "+1.071509e+301");
}

TEST(XRealMisc, PowSqrtToDouble) {
    EXPECT_NEAR(repeller::pow(XReal(8.0), 1.0 / 3.0).to_double(), 2.0, 1e-14);
    EXPECT_EQ(repeller::sqrt(XReal::exp2(301)).log2(), 150.5);
    EXPECT_EQ(XReal::exp2(2000).to_double(), HUGE_VAL);
    EXPECT_EQ(XReal::exp2(-2000).to_double(), 0.0);
}

TEST(XComplexArith, DivisionRoundTrip) {
    oracle::SplitMix rng{5};
    for (int i = 0; i < 100; ++i) {
        const XComplex a(XReal(rng.uniform(-1, 1)) * XReal::exp2(rng.uniform(-900, 900)), XReal(rng.uniform(-1, 1)));
        const XComplex b(XReal(rng.uniform(-1, 1)), XReal(rng.uniform(-1, 1)) * XReal::exp2(400));
        const XComplex back = (a / b) * b;
        EXPECT_LT(((back - a).abs() / a.abs()).to_double(), 1e-14);
    }
}
