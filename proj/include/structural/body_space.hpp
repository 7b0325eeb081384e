#pragma once

// I x K matrix of positions or momenta: column k holds body k.

#include "structural/errors.hpp"
#include "structural/scalar.hpp"

#include <cstddef>
#include <vector>

namespace structural {

template <Real T>
class BodySpace {
public:
    BodySpace() = default;
    BodySpace(int I, int K) : I_(I), K_(K), v_(static_cast<std::size_t>(I) * K, T(0.0)) {}
    BodySpace(int I, int K, std::vector<T> values) : I_(I), K_(K), v_(std::move(values))
    {
        if (v_.size() != static_cast<std::size_t>(I) * K) {
            throw InternalError("body space: value count does not match I*K");
        }
    }

    int I() const { return I_; }
    int K() const { return K_; }
    std::size_t size() const { return v_.size(); }

    T& operator()(int i, int k) { return v_[static_cast<std::size_t>(k) * I_ + i]; }
    const T& operator()(int i, int k) const { return v_[static_cast<std::size_t>(k) * I_ + i]; }
    T& operator[](std::size_t n) { return v_[n]; }
    const T& operator[](std::size_t n) const { return v_[n]; }

    bool same_shape(const BodySpace& o) const { return I_ == o.I_ && K_ == o.K_; }

    void fill(const T& x)
    {
        for (auto& e : v_) {
            e = x;
        }
    }

    BodySpace& operator+=(const BodySpace& o)
    {
        for (std::size_t n = 0; n < v_.size(); ++n) {
            v_[n] += o.v_[n];
        }
        return *this;
    }
    BodySpace& operator-=(const BodySpace& o)
    {
        for (std::size_t n = 0; n < v_.size(); ++n) {
            v_[n] -= o.v_[n];
        }
        return *this;
    }
    BodySpace& operator*=(const T& a)
    {
        for (auto& e : v_) {
            e *= a;
        }
        return *this;
    }

    // this += a * o
    void axpy(const T& a, const BodySpace& o)
    {
        for (std::size_t n = 0; n < v_.size(); ++n) {
            v_[n] += a * o.v_[n];
        }
    }

    friend BodySpace operator+(BodySpace a, const BodySpace& b) { return a += b; }
    friend BodySpace operator-(BodySpace a, const BodySpace& b) { return a -= b; }
    friend BodySpace operator*(const T& s, BodySpace a) { return a *= s; }
    friend BodySpace operator-(BodySpace a)
    {
        for (auto& e : a.v_) {
            e = -e;
        }
        return a;
    }

    T max_norm() const
    {
        T m(0.0);
        for (const auto& e : v_) {
            m = num::max(m, num::abs(e));
        }
        return m;
    }

    bool all_finite() const
    {
        for (const auto& e : v_) {
            if (!num::isfinite(e)) {
                return false;
            }
        }
        return true;
    }

    const std::vector<T>& values() const { return v_; }

private:
    int I_ = 0;
    int K_ = 0;
    std::vector<T> v_;
};

template <Real T>
T max_abs_diff(const BodySpace<T>& a, const BodySpace<T>& b)
{
    T m(0.0);
    for (std::size_t n = 0; n < a.size(); ++n) {
        m = num::max(m, num::abs(a[n] - b[n]));
    }
    return m;
}

} // namespace structural
