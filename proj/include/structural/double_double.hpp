#pragma once

// Compensated double-double arithmetic: a value is the unevaluated sum
// hi + lo of two doubles with |lo| <= ulp(hi)/2, giving roughly 106 bits
// (about 31 decimal digits) of significand.

#include <cmath>
#include <compare>
#include <iosfwd>
#include <string>
#include <string_view>

namespace structural {

struct SumErr {
    double s;
    double e;
};

// Error-free transforms. two_sum is valid for any finite a, b;
// quick_two_sum requires |a| >= |b| (or a == 0).
inline SumErr two_sum(double a, double b) noexcept
{
    const double s = a + b;
    const double bb = s - a;
    const double e = (a - (s - bb)) + (b - bb);
    return {s, e};
}

inline SumErr quick_two_sum(double a, double b) noexcept
{
    const double s = a + b;
    const double e = b - (s - a);
    return {s, e};
}

inline SumErr two_prod(double a, double b) noexcept
{
    const double p = a * b;
    const double e = std::fma(a, b, -p);
    return {p, e};
}

class DoubleDouble {
public:
    constexpr DoubleDouble() noexcept = default;
    constexpr DoubleDouble(double x) noexcept : hi_(x) {}
    constexpr DoubleDouble(int x) noexcept : hi_(static_cast<double>(x)) {}
    constexpr DoubleDouble(long x) noexcept : hi_(static_cast<double>(x)) {}

    // Renormalises (hi, lo) so that hi = fl(hi + lo).
    static DoubleDouble from_parts(double hi, double lo) noexcept
    {
        const SumErr r = quick_two_sum(hi, lo);
        return raw(r.s, r.e);
    }

    constexpr double hi() const noexcept { return hi_; }
    constexpr double lo() const noexcept { return lo_; }

    explicit constexpr operator double() const noexcept { return hi_ + lo_; }

    DoubleDouble operator-() const noexcept { return raw(-hi_, -lo_); }

    DoubleDouble& operator+=(const DoubleDouble& b) noexcept
    {
        SumErr s = two_sum(hi_, b.hi_);
        const SumErr t = two_sum(lo_, b.lo_);
        s.e += t.s;
        s = quick_two_sum(s.s, s.e);
        s.e += t.e;
        s = quick_two_sum(s.s, s.e);
        hi_ = s.s;
        lo_ = s.e;
        return *this;
    }

    DoubleDouble& operator-=(const DoubleDouble& b) noexcept { return *this += -b; }

    DoubleDouble& operator*=(const DoubleDouble& b) noexcept
    {
        SumErr p = two_prod(hi_, b.hi_);
        p.e += hi_ * b.lo_ + lo_ * b.hi_;
        p = quick_two_sum(p.s, p.e);
        hi_ = p.s;
        lo_ = p.e;
        return *this;
    }

    DoubleDouble& operator/=(const DoubleDouble& b) noexcept;

    friend DoubleDouble operator+(DoubleDouble a, const DoubleDouble& b) noexcept { return a += b; }
    friend DoubleDouble operator-(DoubleDouble a, const DoubleDouble& b) noexcept { return a -= b; }
    friend DoubleDouble operator*(DoubleDouble a, const DoubleDouble& b) noexcept { return a *= b; }
    friend DoubleDouble operator/(DoubleDouble a, const DoubleDouble& b) noexcept { return a /= b; }

    friend bool operator==(const DoubleDouble& a, const DoubleDouble& b) noexcept
    {
        return a.hi_ == b.hi_ && a.lo_ == b.lo_;
    }
    friend std::partial_ordering operator<=>(const DoubleDouble& a, const DoubleDouble& b) noexcept
    {
        if (auto c = a.hi_ <=> b.hi_; c != 0) {
            return c;
        }
        return a.lo_ <=> b.lo_;
    }

private:
    static constexpr DoubleDouble raw(double hi, double lo) noexcept
    {
        DoubleDouble r;
        r.hi_ = hi;
        r.lo_ = lo;
        return r;
    }

    double hi_ = 0.0;
    double lo_ = 0.0;
};

// Named form of the product, used by tests and documentation.
inline DoubleDouble dd_mul(const DoubleDouble& a, const DoubleDouble& b) noexcept { return a * b; }

inline DoubleDouble abs(const DoubleDouble& x) noexcept { return x.hi() < 0.0 ? -x : x; }
inline bool isfinite(const DoubleDouble& x) noexcept { return std::isfinite(x.hi()) && std::isfinite(x.lo()); }
inline DoubleDouble ldexp(const DoubleDouble& x, int e) noexcept
{
    return DoubleDouble::from_parts(std::ldexp(x.hi(), e), std::ldexp(x.lo(), e));
}

// Nearest integer (ties away from zero), exact.
DoubleDouble round(const DoubleDouble& x) noexcept;
DoubleDouble floor(const DoubleDouble& x) noexcept;

DoubleDouble sqrt(const DoubleDouble& x);
DoubleDouble sin(const DoubleDouble& x);
DoubleDouble cos(const DoubleDouble& x);
DoubleDouble log(const DoubleDouble& x);

enum class Elementary { Sqrt, Sin, Cos, Log };

DoubleDouble dd_elementary(Elementary f, const DoubleDouble& x);

namespace dd_constants {
inline const DoubleDouble pi = DoubleDouble::from_parts(3.141592653589793116e+00, 1.224646799147353207e-16);
inline const DoubleDouble half_pi = DoubleDouble::from_parts(1.570796326794896558e+00, 6.123233995736766036e-17);
inline const DoubleDouble ln2 = DoubleDouble::from_parts(6.931471805599452862e-01, 2.319046813846299558e-17);
} // namespace dd_constants

// Exact decimal-to-double-double conversion (no intermediate rounding
// through a single double). Throws DomainError on malformed input.
DoubleDouble parse_dd(std::string_view text);

// Scientific notation with `digits` significant digits, e.g. 1.2345e-03.
std::string to_string(const DoubleDouble& x, int digits = 32);

std::ostream& operator<<(std::ostream& os, const DoubleDouble& x);

} // namespace structural
