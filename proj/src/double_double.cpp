#include "structural/double_double.hpp"

#include "structural/errors.hpp"

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <ostream>

namespace structural {

DoubleDouble& DoubleDouble::operator/=(const DoubleDouble& b) noexcept
{
    // Two correction steps of long division.
    const double q1 = hi_ / b.hi_;
    DoubleDouble r = *this - b * DoubleDouble(q1);
    const double q2 = r.hi_ / b.hi_;
    r -= b * DoubleDouble(q2);
    const double q3 = r.hi_ / b.hi_;
    SumErr s = quick_two_sum(q1, q2);
    DoubleDouble out = raw(s.s, s.e);
    out += DoubleDouble(q3);
    *this = out;
    return *this;
}

DoubleDouble round(const DoubleDouble& x) noexcept
{
    double hi = std::round(x.hi());
    if (hi == x.hi()) {
        // hi already integral; the fraction lives in lo.
        double lo = std::round(x.lo());
        const double frac = x.lo() - std::trunc(x.lo());
        if (std::abs(frac) == 0.5) {
            // Tie in lo; decide by the sign of the whole value.
            lo = (x.hi() >= 0.0) ? std::ceil(x.lo()) : std::floor(x.lo());
        }
        return DoubleDouble::from_parts(hi, lo);
    }
    if (std::abs(hi - x.hi()) == 0.5 && x.lo() != 0.0) {
        // Tie at the hi level broken by lo.
        if (x.lo() > 0.0 && hi < x.hi()) {
            hi += 1.0;
        } else if (x.lo() < 0.0 && hi > x.hi()) {
            hi -= 1.0;
        }
    }
    return DoubleDouble(hi);
}

DoubleDouble floor(const DoubleDouble& x) noexcept
{
    const double hi = std::floor(x.hi());
    if (hi == x.hi()) {
        return DoubleDouble::from_parts(hi, std::floor(x.lo()));
    }
    return DoubleDouble(hi);
}

DoubleDouble sqrt(const DoubleDouble& x)
{
    if (x.hi() < 0.0) {
        throw DomainError("sqrt of negative number");
    }
    if (x.hi() == 0.0) {
        return DoubleDouble(0.0);
    }
    const double q = std::sqrt(x.hi());
    const SumErr sq = two_prod(q, q);
    DoubleDouble resid = x - DoubleDouble::from_parts(sq.s, sq.e);
    return DoubleDouble(q) + DoubleDouble(resid.hi() / (2.0 * q));
}

namespace {

constexpr double series_cutoff = 1e-35;

// |r| <= pi/4
DoubleDouble sin_taylor(const DoubleDouble& r)
{
    if (r.hi() == 0.0) {
        return r;
    }
    const DoubleDouble r2 = -(r * r);
    DoubleDouble term = r;
    DoubleDouble sum = r;
    for (int k = 1; k < 60; ++k) {
        term = term * r2 / DoubleDouble(static_cast<double>((2 * k) * (2 * k + 1)));
        sum += term;
        if (std::abs(term.hi()) < series_cutoff * std::abs(sum.hi())) {
            break;
        }
    }
    return sum;
}

DoubleDouble cos_taylor(const DoubleDouble& r)
{
    const DoubleDouble r2 = -(r * r);
    DoubleDouble term(1.0);
    DoubleDouble sum(1.0);
    if (r.hi() == 0.0) {
        return sum;
    }
    for (int k = 1; k < 60; ++k) {
        term = term * r2 / DoubleDouble(static_cast<double>((2 * k - 1) * (2 * k)));
        sum += term;
        if (std::abs(term.hi()) < series_cutoff * std::abs(sum.hi())) {
            break;
        }
    }
    return sum;
}

// x = k*(pi/2) + r, returns k mod 4 and r.
int reduce_half_pi(const DoubleDouble& x, DoubleDouble& r)
{
    const DoubleDouble k = round(x / dd_constants::half_pi);
    if (std::abs(k.hi()) < 0x1p30) {
        // k is a small integer: subtract k * (pi/2) term by term with exact
        // products and a third constant so cancellation near the zeros of
        // sin and cos keeps full relative accuracy
        constexpr double c3 = -1.4973849048591698e-33;
        const double kk = k.hi();
        const SumErr a = two_prod(kk, dd_constants::half_pi.hi());
        const SumErr b = two_prod(kk, dd_constants::half_pi.lo());
        r = x - DoubleDouble(a.s);
        r -= DoubleDouble(a.e);
        r -= DoubleDouble(b.s);
        r -= DoubleDouble(b.e);
        r -= DoubleDouble(kk * c3);
    } else {
        r = x - k * dd_constants::half_pi;
    }
    const double kd = std::fmod(k.hi(), 4.0) + std::fmod(k.lo(), 4.0);
    int q = static_cast<int>(std::fmod(kd, 4.0));
    if (q < 0) {
        q += 4;
    }
    return q;
}

} // namespace

DoubleDouble sin(const DoubleDouble& x)
{
    if (!isfinite(x)) {
        throw DomainError("sin of non-finite argument");
    }
    DoubleDouble r;
    switch (reduce_half_pi(x, r)) {
    case 0: return sin_taylor(r);
    case 1: return cos_taylor(r);
    case 2: return -sin_taylor(r);
    default: return -cos_taylor(r);
    }
}

DoubleDouble cos(const DoubleDouble& x)
{
    if (!isfinite(x)) {
        throw DomainError("cos of non-finite argument");
    }
    DoubleDouble r;
    switch (reduce_half_pi(x, r)) {
    case 0: return cos_taylor(r);
    case 1: return -sin_taylor(r);
    case 2: return -cos_taylor(r);
    default: return sin_taylor(r);
    }
}

DoubleDouble log(const DoubleDouble& x)
{
    if (x.hi() <= 0.0) {
        throw DomainError("log of non-positive number");
    }
    int e = 0;
    std::frexp(x.hi(), &e);
    // mantissa in [1, 2)
    const DoubleDouble m = ldexp(x, 1 - e);
    const int k = e - 1;

    const DoubleDouble s = (m - DoubleDouble(1.0)) / (m + DoubleDouble(1.0));
    const DoubleDouble s2 = s * s;
    DoubleDouble pw = s;
    DoubleDouble sum = s;
    for (int j = 1; j < 200; ++j) {
        pw *= s2;
        const DoubleDouble term = pw / DoubleDouble(static_cast<double>(2 * j + 1));
        sum += term;
        if (std::abs(term.hi()) <= series_cutoff * std::abs(sum.hi())) {
            break;
        }
    }
    return ldexp(sum, 1) + dd_constants::ln2 * DoubleDouble(static_cast<double>(k));
}

DoubleDouble dd_elementary(Elementary f, const DoubleDouble& x)
{
    switch (f) {
    case Elementary::Sqrt: return sqrt(x);
    case Elementary::Sin: return sin(x);
    case Elementary::Cos: return cos(x);
    case Elementary::Log: return log(x);
    }
    throw InternalError("unknown elementary function");
}

namespace {

DoubleDouble pow10(int n)
{
    DoubleDouble result(1.0);
    DoubleDouble base(10.0);
    int e = n < 0 ? -n : n;
    while (e > 0) {
        if (e & 1) {
            result *= base;
        }
        base *= base;
        e >>= 1;
    }
    return result;
}

} // namespace

DoubleDouble parse_dd(std::string_view text)
{
    std::size_t i = 0;
    const std::size_t n = text.size();
    while (i < n && std::isspace(static_cast<unsigned char>(text[i]))) {
        ++i;
    }
    bool neg = false;
    if (i < n && (text[i] == '+' || text[i] == '-')) {
        neg = text[i] == '-';
        ++i;
    }
    DoubleDouble v(0.0);
    int exp10 = 0;
    int ndig = 0;
    bool seen_point = false;
    for (; i < n; ++i) {
        const char c = text[i];
        if (c == '.') {
            if (seen_point) {
                throw DomainError("malformed number: " + std::string(text));
            }
            seen_point = true;
            continue;
        }
        if (!std::isdigit(static_cast<unsigned char>(c))) {
            break;
        }
        v = v * DoubleDouble(10.0) + DoubleDouble(static_cast<double>(c - '0'));
        ++ndig;
        if (seen_point) {
            --exp10;
        }
    }
    if (ndig == 0) {
        throw DomainError("malformed number: " + std::string(text));
    }
    if (i < n && (text[i] == 'e' || text[i] == 'E')) {
        ++i;
        bool eneg = false;
        if (i < n && (text[i] == '+' || text[i] == '-')) {
            eneg = text[i] == '-';
            ++i;
        }
        int ev = 0;
        int edig = 0;
        for (; i < n && std::isdigit(static_cast<unsigned char>(text[i])); ++i) {
            ev = ev * 10 + (text[i] - '0');
            ++edig;
            if (ev > 100000) {
                throw DomainError("exponent out of range: " + std::string(text));
            }
        }
        if (edig == 0) {
            throw DomainError("malformed exponent: " + std::string(text));
        }
        exp10 += eneg ? -ev : ev;
    }
    while (i < n && std::isspace(static_cast<unsigned char>(text[i]))) {
        ++i;
    }
    if (i != n) {
        throw DomainError("trailing characters in number: " + std::string(text));
    }
    if (exp10 > 0) {
        v *= pow10(exp10);
    } else if (exp10 < 0) {
        v /= pow10(-exp10);
    }
    return neg ? -v : v;
}

std::string to_string(const DoubleDouble& x, int digits)
{
    if (digits < 1) {
        digits = 1;
    }
    if (std::isnan(x.hi())) {
        return "nan";
    }
    if (std::isinf(x.hi())) {
        return x.hi() > 0 ? "inf" : "-inf";
    }
    std::string out;
    DoubleDouble v = x;
    if (v.hi() < 0.0) {
        out.push_back('-');
        v = -v;
    }
    if (v.hi() == 0.0) {
        out += "0.";
        out.append(static_cast<std::size_t>(digits - 1), '0');
        out += "e+00";
        return out;
    }
    int e = static_cast<int>(std::floor(std::log10(v.hi())));
    DoubleDouble r = e >= 0 ? v / pow10(e) : v * pow10(-e);
    if (r.hi() >= 10.0) {
        r /= DoubleDouble(10.0);
        ++e;
    } else if (r.hi() < 1.0) {
        r *= DoubleDouble(10.0);
        --e;
    }

    std::string d;
    for (int k = 0; k <= digits; ++k) {
        int dig = static_cast<int>(std::floor(r.hi()));
        if (dig < 0) {
            dig = 0;
        }
        if (dig > 9) {
            dig = 9;
        }
        d.push_back(static_cast<char>('0' + dig));
        r = (r - DoubleDouble(static_cast<double>(dig))) * DoubleDouble(10.0);
    }
    // round on the guard digit
    const bool up = d.back() >= '5';
    d.pop_back();
    if (up) {
        int k = digits - 1;
        while (k >= 0) {
            if (d[k] == '9') {
                d[k] = '0';
                --k;
            } else {
                ++d[k];
                break;
            }
        }
        if (k < 0) {
            d.insert(d.begin(), '1');
            d.pop_back();
            ++e;
        }
    }
    out.push_back(d[0]);
    if (digits > 1) {
        out.push_back('.');
        out.append(d, 1, std::string::npos);
    }
    char buf[16];
    std::snprintf(buf, sizeof buf, "e%+03d", e);
    out += buf;
    return out;
}

std::ostream& operator<<(std::ostream& os, const DoubleDouble& x)
{
    return os << to_string(x, 32);
}

} // namespace structural
