#pragma once

// Uniform math entry points over the two scalar backends, so templated
// solver code can write num::sqrt(x) etc. without caring which one it has.

#include "structural/double_double.hpp"
#include "structural/errors.hpp"

#include <charconv>
#include <cmath>
#include <concepts>
#include <cstdio>
#include <limits>
#include <string>
#include <string_view>

namespace structural {

template <class T>
concept Real = std::same_as<T, double> || std::same_as<T, DoubleDouble>;

enum class Precision { Double, DDouble };

namespace num {

inline double sqrt(double x)
{
    if (x < 0.0) {
        throw DomainError("sqrt of negative number");
    }
    return std::sqrt(x);
}
inline double sin(double x) { return std::sin(x); }
inline double cos(double x) { return std::cos(x); }
inline double log(double x)
{
    if (x <= 0.0) {
        throw DomainError("log of non-positive number");
    }
    return std::log(x);
}
inline double abs(double x) { return std::abs(x); }
inline bool isfinite(double x) { return std::isfinite(x); }
inline double to_double(double x) { return x; }

inline DoubleDouble sqrt(const DoubleDouble& x) { return structural::sqrt(x); }
inline DoubleDouble sin(const DoubleDouble& x) { return structural::sin(x); }
inline DoubleDouble cos(const DoubleDouble& x) { return structural::cos(x); }
inline DoubleDouble log(const DoubleDouble& x) { return structural::log(x); }
inline DoubleDouble abs(const DoubleDouble& x) { return structural::abs(x); }
inline bool isfinite(const DoubleDouble& x) { return structural::isfinite(x); }
inline double to_double(const DoubleDouble& x) { return static_cast<double>(x); }

template <Real T>
T parse(std::string_view text)
{
    if constexpr (std::same_as<T, DoubleDouble>) {
        return parse_dd(text);
    } else {
        double v = 0.0;
        const char* first = text.data();
        const char* last = first + text.size();
        if (first != last && *first == '+') {
            ++first;
        }
        auto [ptr, ec] = std::from_chars(first, last, v);
        if (ec != std::errc{} || ptr != last) {
            throw DomainError("malformed number: " + std::string(text));
        }
        return v;
    }
}

template <Real T>
T pi()
{
    if constexpr (std::same_as<T, DoubleDouble>) {
        return dd_constants::pi;
    } else {
        return 3.141592653589793;
    }
}

// Unit roundoff scale of the backend.
template <Real T>
double epsilon()
{
    if constexpr (std::same_as<T, DoubleDouble>) {
        return 0x1p-104;
    } else {
        return std::numeric_limits<double>::epsilon();
    }
}

template <Real T>
T max(const T& a, const T& b)
{
    return a < b ? b : a;
}

template <Real T>
T sq(const T& a)
{
    return a * a;
}

template <Real T>
std::string to_string(const T& x, int digits)
{
    if constexpr (std::same_as<T, DoubleDouble>) {
        return structural::to_string(x, digits);
    } else {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.*e", digits - 1, x);
        return buf;
    }
}

} // namespace num
} // namespace structural
