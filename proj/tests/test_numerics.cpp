#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "structural/double_double.hpp"
#include "structural/errors.hpp"
#include "structural/scalar.hpp"

#include <mpfr.h>

#include <cmath>
#include <random>

using namespace structural;

namespace {

// RAII wrapper; 2200 bits hold any sum or product of two doubles exactly.
struct Big {
    mpfr_t v;
    explicit Big(mpfr_prec_t prec = 2200) { mpfr_init2(v, prec); mpfr_set_zero(v, 1); }
    Big(const Big&) = delete;
    ~Big() { mpfr_clear(v); }
};

void set_dd(Big& out, const DoubleDouble& x)
{
    Big lo;
    mpfr_set_d(out.v, x.hi(), MPFR_RNDN);
    mpfr_set_d(lo.v, x.lo(), MPFR_RNDN);
    mpfr_add(out.v, out.v, lo.v, MPFR_RNDN);
}

// |x - ref| / |ref| in double
double rel_err(const DoubleDouble& x, const Big& ref)
{
    Big d;
    set_dd(d, x);
    mpfr_sub(d.v, d.v, ref.v, MPFR_RNDN);
    if (mpfr_zero_p(ref.v)) {
        return std::abs(mpfr_get_d(d.v, MPFR_RNDN));
    }
    mpfr_div(d.v, d.v, ref.v, MPFR_RNDN);
    return std::abs(mpfr_get_d(d.v, MPFR_RNDN));
}

DoubleDouble random_dd(std::mt19937_64& rng, double lo, double hi)
{
    std::uniform_real_distribution<double> u(lo, hi);
    std::uniform_real_distribution<double> tail(-1.0, 1.0);
    const double h = u(rng);
    return DoubleDouble::from_parts(h, tail(rng) * std::abs(h) * 0x1p-54);
}

} // namespace

TEST_CASE("two_sum examples")
{
    auto r = two_sum(1.0, 1.0);
    CHECK(r.s == 2.0);
    CHECK(r.e == 0.0);
    r = two_sum(1.0, 0x1p-60);
    CHECK(r.s == 1.0);
    CHECK(r.e == 0x1p-60);
    r = two_sum(0.1, 0.2);
    CHECK(r.s == 0.30000000000000004);
    Big a, b;
    mpfr_set_d(a.v, 0.1, MPFR_RNDN);
    mpfr_set_d(b.v, 0.2, MPFR_RNDN);
    mpfr_add(a.v, a.v, b.v, MPFR_RNDN);
    mpfr_set_d(b.v, r.s, MPFR_RNDN);
    Big e;
    mpfr_set_d(e.v, r.e, MPFR_RNDN);
    mpfr_add(b.v, b.v, e.v, MPFR_RNDN);
    CHECK(mpfr_equal_p(a.v, b.v));
}

TEST_CASE("two_sum is error-free on a million random pairs")
{
    std::mt19937_64 rng(12345);
    std::uniform_real_distribution<double> mant(-1.0, 1.0);
    std::uniform_int_distribution<int> ex(-300, 300);
    Big exact, got, tmp;
    long bad = 0;
    for (int n = 0; n < 1000000; ++n) {
        const double a = std::ldexp(mant(rng), ex(rng));
        const double b = std::ldexp(mant(rng), ex(rng) / 8 + (n % 2 ? 0 : ex(rng) / 40));
        const SumErr r = two_sum(a, b);
        mpfr_set_d(exact.v, a, MPFR_RNDN);
        mpfr_set_d(tmp.v, b, MPFR_RNDN);
        mpfr_add(exact.v, exact.v, tmp.v, MPFR_RNDN);
        mpfr_set_d(got.v, r.s, MPFR_RNDN);
        mpfr_set_d(tmp.v, r.e, MPFR_RNDN);
        mpfr_add(got.v, got.v, tmp.v, MPFR_RNDN);
        if (!mpfr_equal_p(exact.v, got.v) || r.s != a + b) {
            ++bad;
        }
    }
    CHECK(bad == 0);
}

TEST_CASE("dd_mul examples and random products")
{
    const DoubleDouble x = parse_dd("1.2345678901234567890123456789");
    CHECK(dd_mul(DoubleDouble(1.0), x) == x);

    const DoubleDouble third = DoubleDouble(1.0) / DoubleDouble(3.0);
    Big one;
    mpfr_set_d(one.v, 1.0, MPFR_RNDN);
    CHECK(rel_err(dd_mul(third, DoubleDouble(3.0)), one) <= 0x1p-100);

    const DoubleDouble a = DoubleDouble::from_parts(0x1p50, 0x1p-50);
    const DoubleDouble b = DoubleDouble::from_parts(0x1p50, -0x1p-50);
    Big ref, t;
    mpfr_set_d(ref.v, 0x1p100, MPFR_RNDN);
    mpfr_set_d(t.v, 0x1p-100, MPFR_RNDN);
    mpfr_sub(ref.v, ref.v, t.v, MPFR_RNDN);
    CHECK(rel_err(dd_mul(a, b), ref) <= 0x1p-100);

    std::mt19937_64 rng(7);
    double worst = 0.0;
    for (int n = 0; n < 20000; ++n) {
        const DoubleDouble p = random_dd(rng, -1e3, 1e3), q = random_dd(rng, -1e3, 1e3);
        Big bp, bq;
        set_dd(bp, p);
        set_dd(bq, q);
        mpfr_mul(bp.v, bp.v, bq.v, MPFR_RNDN);
        worst = std::max(worst, rel_err(p * q, bp));
    }
    CHECK(worst <= 0x1p-100);
}

TEST_CASE("division and sums against the big-float oracle")
{
    std::mt19937_64 rng(99);
    double worst_div = 0.0, worst_add = 0.0;
    for (int n = 0; n < 20000; ++n) {
        const DoubleDouble p = random_dd(rng, -50.0, 50.0), q = random_dd(rng, 0.5, 20.0);
        Big bp, bq, r;
        set_dd(bp, p);
        set_dd(bq, q);
        mpfr_div(r.v, bp.v, bq.v, MPFR_RNDN);
        worst_div = std::max(worst_div, rel_err(p / q, r));
        mpfr_add(r.v, bp.v, bq.v, MPFR_RNDN);
        worst_add = std::max(worst_add, rel_err(p + q, r));
    }
    CHECK(worst_div <= 0x1p-100);
    CHECK(worst_add <= 0x1p-100);
}

TEST_CASE("addition is associative up to 4 * 2^-100")
{
    std::mt19937_64 rng(2024);
    long bad = 0;
    for (int n = 0; n < 100000; ++n) {
        const DoubleDouble a = random_dd(rng, 0.5, 2.0), b = random_dd(rng, 0.5, 2.0), c = random_dd(rng, 0.5, 2.0);
        const DoubleDouble l = (a + b) + c, r = a + (b + c);
        const double bound = 4.0 * 0x1p-100 * static_cast<double>(abs(a + b + c));
        if (static_cast<double>(abs(l - r)) > bound) {
            ++bad;
        }
    }
    CHECK(bad == 0);
}

TEST_CASE("elementary function examples")
{
    CHECK(sqrt(DoubleDouble(4.0)) == DoubleDouble(2.0));
    CHECK(sin(DoubleDouble(0.0)) == DoubleDouble(0.0));
    CHECK(cos(DoubleDouble(0.0)) == DoubleDouble(1.0));
    const DoubleDouble s1 = parse_dd("0.8414709848078965066525023216303");
    CHECK(static_cast<double>(abs(sin(DoubleDouble(1.0)) - s1) / s1) <= 1e-28);
    CHECK_THROWS_AS(sqrt(DoubleDouble(-1.0)), DomainError);
    CHECK_THROWS_AS(log(DoubleDouble(-1.0)), DomainError);
    CHECK_THROWS_AS(log(DoubleDouble(0.0)), DomainError);
    CHECK_THROWS_AS(num::sqrt(-1.0), DomainError);
    CHECK_THROWS_AS(num::log(0.0), DomainError);
    CHECK(dd_elementary(Elementary::Cos, DoubleDouble(0.0)) == DoubleDouble(1.0));
}

TEST_CASE("elementary functions within 1e-28 relative of the big-float oracle")
{
    std::mt19937_64 rng(31337);
    double worst[4] = {0, 0, 0, 0};
    for (int n = 0; n < 4000; ++n) {
        const DoubleDouble x = random_dd(rng, -10.0, 10.0);
        const DoubleDouble y = random_dd(rng, 1e-3, 1e3);
        Big bx, by, r;
        set_dd(bx, x);
        set_dd(by, y);
        mpfr_sin(r.v, bx.v, MPFR_RNDN);
        worst[0] = std::max(worst[0], rel_err(sin(x), r));
        mpfr_cos(r.v, bx.v, MPFR_RNDN);
        worst[1] = std::max(worst[1], rel_err(cos(x), r));
        mpfr_sqrt(r.v, by.v, MPFR_RNDN);
        worst[2] = std::max(worst[2], rel_err(sqrt(y), r));
        mpfr_log(r.v, by.v, MPFR_RNDN);
        worst[3] = std::max(worst[3], rel_err(log(y), r));
    }
    CHECK(worst[0] <= 1e-28);
    CHECK(worst[1] <= 1e-28);
    CHECK(worst[2] <= 1e-28);
    CHECK(worst[3] <= 1e-28);
}

TEST_CASE("sin^2 + cos^2 = 1 within 1e-27")
{
    std::mt19937_64 rng(5);
    double worst = 0.0;
    for (int n = 0; n < 10000; ++n) {
        const DoubleDouble x = random_dd(rng, -10.0, 10.0);
        const DoubleDouble s = sin(x), c = cos(x);
        worst = std::max(worst, static_cast<double>(abs(s * s + c * c - DoubleDouble(1.0))));
    }
    CHECK(worst <= 1e-27);
}

TEST_CASE("decimal parsing and printing")
{
    Big ref(400);
    mpfr_set_str(ref.v, "0.1", 10, MPFR_RNDN);
    CHECK(rel_err(parse_dd("0.1"), ref) <= 0x1p-104);
    mpfr_set_str(ref.v, "-2.95912208286e-4", 10, MPFR_RNDN);
    CHECK(rel_err(parse_dd("-2.95912208286e-4"), ref) <= 0x1p-104);
    CHECK(parse_dd("+3") == DoubleDouble(3.0));
    CHECK_THROWS_AS(parse_dd("1.2.3"), DomainError);
    CHECK_THROWS_AS(parse_dd("abc"), DomainError);

    const DoubleDouble third = DoubleDouble(1.0) / DoubleDouble(3.0);
    const DoubleDouble back = parse_dd(to_string(third));
    CHECK(static_cast<double>(abs(back - third)) <= 1e-31);
    CHECK(num::parse<double>("0.25") == 0.25);
    CHECK(num::epsilon<DoubleDouble>() == 0x1p-104);
}
