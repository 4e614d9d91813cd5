#pragma once

// Extended-exponent real and complex arithmetic.
//
// An XReal is sign * significand * 2^exponent with the significand held as a
// binary64 in [1, 2) and a 64-bit exponent. This covers magnitudes far beyond
// the scale values of the construction (a_6 is about 10^643 at C = 2000) while
// keeping the cost of a hardware double per operation.

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstdint>
#include <cstdio>
#include <numbers>
#include <string>

#include "repeller/errors.hpp"

namespace repeller {

class XReal {
public:
    /// Exponents must satisfy |exponent| < 2^62.
    static constexpr std::int64_t kExponentLimit = std::int64_t{1} << 62;

    /// Addends whose exponents differ by more than this are dropped.
    static constexpr std::int64_t kStickyGap = 64;

    constexpr XReal() = default;

    explicit XReal(double v) {
        if (!std::isfinite(v)) throw DomainError("XReal: non-finite double");
        if (v == 0.0) return;
        *this = normalize(v < 0 ? -1 : 1, std::fabs(v), 0);
    }

    /// Canonicalizes sign * significand * 2^exponent.
    static XReal normalize(int sign, double significand, std::int64_t exponent) {
        return normalize_wide(sign, significand, static_cast<__int128>(exponent));
    }

    /// 2^x for an ordinary real x.
    static XReal exp2(double x) {
        if (!std::isfinite(x)) throw DomainError("XReal::exp2: non-finite argument");
        const double whole = std::floor(x);
        if (std::fabs(whole) >= static_cast<double>(kExponentLimit)) {
            throw RangeError("XReal::exp2: exponent out of range");
        }
        return normalize(1, std::exp2(x - whole), static_cast<std::int64_t>(whole));
    }

    static XReal one() { return XReal(1.0); }

    int sign() const { return sign_; }
    double significand() const { return sig_; }
    std::int64_t exponent() const { return exp_; }
    bool is_zero() const { return sign_ == 0; }

    /// Nearest double; saturates to +-inf or 0 outside binary64 range.
    double to_double() const {
        if (sign_ == 0) return 0.0;
        if (exp_ > 1100) return sign_ * HUGE_VAL;
        if (exp_ < -1100) return sign_ * 0.0;
        return sign_ * std::ldexp(sig_, static_cast<int>(exp_));
    }

    /// log2 of a positive value as an ordinary real.
    double log2() const {
        if (sign_ != 1) throw DomainError("XReal::log2: nonpositive argument");
        return static_cast<double>(exp_) + std::log2(sig_);
    }

    XReal abs() const {
        XReal r = *this;
        if (r.sign_ < 0) r.sign_ = 1;
        return r;
    }

    XReal operator-() const {
        XReal r = *this;
        r.sign_ = -r.sign_;
        return r;
    }

    friend XReal operator*(const XReal& a, const XReal& b) {
        if (a.sign_ == 0 || b.sign_ == 0) return XReal{};
        return normalize_wide(a.sign_ * b.sign_, a.sig_ * b.sig_,
                              static_cast<__int128>(a.exp_) + b.exp_);
    }

    friend XReal operator/(const XReal& a, const XReal& b) {
        if (b.sign_ == 0) throw DomainError("XReal: division by zero");
        if (a.sign_ == 0) return XReal{};
        return normalize_wide(a.sign_ * b.sign_, a.sig_ / b.sig_,
                              static_cast<__int128>(a.exp_) - b.exp_);
    }

    friend XReal operator+(const XReal& a, const XReal& b) {
        if (a.sign_ == 0) return b;
        if (b.sign_ == 0) return a;
        const XReal& hi = a.exp_ >= b.exp_ ? a : b;
        const XReal& lo = a.exp_ >= b.exp_ ? b : a;
        const std::int64_t gap = hi.exp_ - lo.exp_;
        if (gap > kStickyGap) return hi;
        const double s = hi.sign_ * hi.sig_ + lo.sign_ * std::ldexp(lo.sig_, static_cast<int>(-gap));
        if (s == 0.0) return XReal{};
        return normalize_wide(s < 0 ? -1 : 1, std::fabs(s), hi.exp_);
    }

    friend XReal operator-(const XReal& a, const XReal& b) { return a + (-b); }

    XReal& operator*=(const XReal& b) { return *this = *this * b; }
    XReal& operator/=(const XReal& b) { return *this = *this / b; }
    XReal& operator+=(const XReal& b) { return *this = *this + b; }
    XReal& operator-=(const XReal& b) { return *this = *this - b; }

    /// Lexicographic order on (sign, exponent, significand).
    friend std::strong_ordering operator<=>(const XReal& a, const XReal& b) {
        if (a.sign_ != b.sign_) return a.sign_ <=> b.sign_;
        if (a.sign_ == 0) return std::strong_ordering::equal;
        std::strong_ordering mag = a.exp_ != b.exp_ ? a.exp_ <=> b.exp_
                                   : a.sig_ < b.sig_ ? std::strong_ordering::less
                                   : a.sig_ > b.sig_ ? std::strong_ordering::greater
                                                     : std::strong_ordering::equal;
        if (a.sign_ > 0) return mag;
        return 0 <=> mag;
    }

    friend bool operator==(const XReal& a, const XReal& b) {
        return a.sign_ == b.sign_ && a.sig_ == b.sig_ && a.exp_ == b.exp_;
    }

private:
    static XReal normalize_wide(int sign, double significand, __int128 exponent) {
        if (!std::isfinite(significand)) throw DomainError("XReal: non-finite significand");
        if (significand < 0.0) throw DomainError("XReal: negative significand");
        if (sign == 0 || significand == 0.0) return XReal{};
        int shift = 0;
        const double m = std::frexp(significand, &shift);
        const __int128 e = exponent + shift - 1;
        if (e >= kExponentLimit || e <= -kExponentLimit) {
            throw RangeError("XReal: exponent out of range");
        }
        XReal r;
        r.sign_ = sign < 0 ? -1 : 1;
        r.sig_ = 2.0 * m;
        r.exp_ = static_cast<std::int64_t>(e);
        return r;
    }

    int sign_ = 0;
    double sig_ = 1.0;
    std::int64_t exp_ = 0;
};

inline double log2(const XReal& x) { return x.log2(); }

/// x^t for x >= 0, evaluated through the log domain.
inline XReal pow(const XReal& x, double t) {
    if (x.sign() < 0) throw DomainError("pow: negative base");
    if (x.is_zero()) {
        if (t > 0) return XReal{};
        throw DomainError("pow: zero base with nonpositive exponent");
    }
    return XReal::exp2(t * x.log2());
}

inline XReal sqrt(const XReal& x) {
    if (x.sign() < 0) throw DomainError("sqrt: negative argument");
    if (x.is_zero()) return x;
    double s = x.significand();
    std::int64_t e = x.exponent();
    if (e % 2 != 0) {
        s *= 2.0;
        e -= 1;
    }
    return XReal::normalize(1, std::sqrt(s), e / 2);
}

inline XReal min(const XReal& a, const XReal& b) { return b < a ? b : a; }
inline XReal max(const XReal& a, const XReal& b) { return a < b ? b : a; }

/// Decimal rendering "+d.dddddde+E".
inline std::string to_decimal(const XReal& x, int digits = 6) {
    char buf[96];
    if (x.is_zero()) {
        std::snprintf(buf, sizeof buf, "+%.*fe+00", digits, 0.0);
        return buf;
    }
    const long double l10 = static_cast<long double>(x.exponent()) * std::numbers::ln2_v<long double> /
                                std::numbers::ln10_v<long double> +
                            std::log10(static_cast<long double>(x.significand()));
    long double e10 = std::floor(l10);
    long double mant = std::pow(10.0L, l10 - e10);
    const long double unit = std::pow(10.0L, -digits);
    mant = std::round(mant / unit) * unit;
    if (mant >= 10.0L) {
        mant /= 10.0L;
        e10 += 1.0L;
    }
    std::snprintf(buf, sizeof buf, "%c%.*Lfe%+03lld", x.sign() < 0 ? '-' : '+', digits, mant,
                  static_cast<long long>(e10));
    return buf;
}

/// Exact rendering "+m*2^e" with a round-trip significand.
inline std::string to_exact(const XReal& x) {
    char buf[96];
    if (x.is_zero()) return "0*2^0";
    std::snprintf(buf, sizeof buf, "%c%.17g*2^%lld", x.sign() < 0 ? '-' : '+', x.significand(),
                  static_cast<long long>(x.exponent()));
    return buf;
}

struct Polar {
    double log2_magnitude;
    double argument;  // in (-pi, pi]
};

struct XComplex {
    XReal re;
    XReal im;

    XComplex() = default;
    XComplex(XReal r, XReal i = XReal{}) : re(r), im(i) {}
    explicit XComplex(double r, double i = 0.0) : re(r), im(i) {}

    /// r * e^{i theta} with r = 2^log2_r.
    static XComplex from_polar(double log2_r, double theta) {
        const XReal r = XReal::exp2(log2_r);
        return {r * XReal(std::cos(theta)), r * XReal(std::sin(theta))};
    }

    bool is_zero() const { return re.is_zero() && im.is_zero(); }

    XComplex conj() const { return {re, -im}; }

    XReal norm() const { return re * re + im * im; }

    /// Exponent-aligned hypot.
    XReal abs() const {
        if (is_zero()) return XReal{};
        const auto [e, x, y] = aligned();
        return XReal::normalize(1, std::hypot(x, y), e);
    }

    Polar polar() const {
        if (is_zero()) throw DomainError("polar: zero argument");
        const auto [e, x, y] = aligned();
        return {static_cast<double>(e) + std::log2(std::hypot(x, y)), std::atan2(y, x)};
    }

    friend XComplex operator+(const XComplex& a, const XComplex& b) { return {a.re + b.re, a.im + b.im}; }
    friend XComplex operator-(const XComplex& a, const XComplex& b) { return {a.re - b.re, a.im - b.im}; }
    friend XComplex operator-(const XComplex& a) { return {-a.re, -a.im}; }

    friend XComplex operator*(const XComplex& a, const XComplex& b) {
        return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
    }
    friend XComplex operator*(const XComplex& a, const XReal& s) { return {a.re * s, a.im * s}; }
    friend XComplex operator*(const XReal& s, const XComplex& a) { return a * s; }
    friend XComplex operator/(const XComplex& a, const XReal& s) { return {a.re / s, a.im / s}; }

    friend XComplex operator/(const XComplex& a, const XComplex& b) {
        if (b.im.is_zero()) return a / b.re;
        const XReal d = b.norm();
        return {(a.re * b.re + a.im * b.im) / d, (a.im * b.re - a.re * b.im) / d};
    }

    XComplex& operator+=(const XComplex& b) { return *this = *this + b; }
    XComplex& operator-=(const XComplex& b) { return *this = *this - b; }
    XComplex& operator*=(const XComplex& b) { return *this = *this * b; }
    XComplex& operator/=(const XComplex& b) { return *this = *this / b; }

    friend bool operator==(const XComplex& a, const XComplex& b) { return a.re == b.re && a.im == b.im; }

private:
    struct Aligned {
        std::int64_t exponent;
        double x;
        double y;
    };

    // Both components rescaled to the larger exponent.
    Aligned aligned() const {
        const std::int64_t e = re.is_zero() ? im.exponent()
                               : im.is_zero() ? re.exponent()
                                              : std::max(re.exponent(), im.exponent());
        auto scaled = [e](const XReal& v) {
            if (v.is_zero()) return 0.0;
            const std::int64_t d = v.exponent() - e;
            if (d < -1100) return 0.0;
            return v.sign() * std::ldexp(v.significand(), static_cast<int>(d));
        };
        return {e, scaled(re), scaled(im)};
    }
};

inline XComplex conj(const XComplex& z) { return z.conj(); }
inline XReal abs(const XComplex& z) { return z.abs(); }

inline std::string to_decimal(const XComplex& z, int digits = 6) {
    return to_decimal(z.re, digits) + "," + to_decimal(z.im, digits);
}

inline std::string to_exact(const XComplex& z) { return to_exact(z.re) + "," + to_exact(z.im); }

}  // namespace repeller
