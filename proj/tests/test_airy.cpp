#include "doctest.h"

#include <cmath>
#include <random>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "qsrc/airy.hpp"
#include "qsrc/errors.hpp"

using namespace qsrc;
using Big = boost::multiprecision::number<boost::multiprecision::cpp_bin_float<110>>;

namespace {

constexpr double inv_pi = 0.31830988618379067154;

struct RefAiry {
    double ai, ai_prime, bi, bi_prime;
};

// Maclaurin series in 110-digit arithmetic:
//   f = sum 3^k (1/3)_k x^(3k) / (3k)!,  g = sum 3^k (2/3)_k x^(3k+1) / (3k+1)!
//   Ai = c1 f - c2 g,  Bi = sqrt(3) (c1 f + c2 g).
RefAiry reference(double xd) {
    using boost::multiprecision::pow;
    using boost::multiprecision::sqrt;
    const Big x = xd;
    const Big third = Big(1) / 3;
    const Big c1 = pow(Big(3), -2 * third) / boost::multiprecision::tgamma(2 * third);
    const Big c2 = pow(Big(3), -third) / boost::multiprecision::tgamma(third);
    Big f = 0, g = 0, fp = 0, gp = 0;
    Big tf = 1, tg = x;  // current terms of f and g
    const Big x3 = x * x * x;
    for (int k = 0; k < 400; ++k) {
        f += tf;
        g += tg;
        if (k > 0) fp += tf * (3 * k) / x;
        gp += tg * (3 * k + 1) / x;
        // ratio of consecutive terms
        tf *= x3 / Big((3 * k + 1) * (3 * k + 2) * (3 * k + 3)) * (3 * k + 1);
        tg *= x3 / Big((3 * k + 2) * (3 * k + 3) * (3 * k + 4)) * (3 * k + 2);
        if (k > 20 && abs(tf) < Big("1e-80") && abs(tg) < Big("1e-80")) break;
    }
    if (xd == 0.0) {
        fp = 0;
        gp = 1;
    }
    const Big s3 = sqrt(Big(3));
    return {static_cast<double>(c1 * f - c2 * g), static_cast<double>(c1 * fp - c2 * gp),
            static_cast<double>(s3 * (c1 * f + c2 * g)), static_cast<double>(s3 * (c1 * fp + c2 * gp))};
}

// Error scale: |value| for x >= 0, the modulus sqrt(Ai^2 + Bi^2) in the
// oscillatory region (plain relative error is meaningless at the zeros).
double ai_error(double x, double got, const RefAiry& r) {
    const double scale = x >= 0.0 ? std::fabs(r.ai) : std::hypot(r.ai, r.bi);
    return std::fabs(got - r.ai) / scale;
}

}  // namespace

TEST_CASE("values at zero") {
    const auto a = airy::airy_all(0.0);
    CHECK(a.ai == doctest::Approx(0.35502805388781723926).epsilon(1e-15));
    CHECK(a.ai_prime == doctest::Approx(-0.25881940379280679840).epsilon(1e-15));
    CHECK(a.ai * a.bi_prime - a.ai_prime * a.bi == doctest::Approx(inv_pi).epsilon(1e-15));
    CHECK(a.ci.real() == a.bi);
    CHECK(a.ci.imag() == a.ai);
    CHECK(a.ci_prime.real() == a.bi_prime);
    CHECK(a.ci_prime.imag() == a.ai_prime);
}

TEST_CASE("series oracle agrees with known values") {
    const auto r0 = reference(0.0);
    CHECK(r0.ai == doctest::Approx(0.35502805388781723926).epsilon(1e-16));
    CHECK(reference(-5.0).ai == doctest::Approx(0.35076100902411431978).epsilon(1e-15));
}

TEST_CASE("spot values") {
    CHECK(airy::airy_all(-5.0).ai == doctest::Approx(0.35076100902411431978).epsilon(1e-12));
    const auto r = reference(-10.0);
    CHECK(airy::airy_all(-10.0).ai == doctest::Approx(r.ai).epsilon(1e-12));
    CHECK(airy::airy_modulus_asymptotic(-13.0).ai == doctest::Approx(reference(-13.0).ai).epsilon(1e-10));
}

TEST_CASE("100-point panel against the arbitrary-precision series") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(-20.0, 10.0);
    double worst = 0.0, worst_p = 0.0;
    for (int i = 0; i < 100; ++i) {
        const double x = u(rng);
        const auto r = reference(x);
        const auto a = airy::airy_all(x);
        worst = std::max(worst, ai_error(x, a.ai, r));
        const double pscale = x >= 0.0 ? std::fabs(r.ai_prime) : std::hypot(r.ai_prime, r.bi_prime);
        worst_p = std::max(worst_p, std::fabs(a.ai_prime - r.ai_prime) / pscale);
        const double bscale = x >= 0.0 ? std::fabs(r.bi) : std::hypot(r.ai, r.bi);
        CHECK(std::fabs(a.bi - r.bi) / bscale < 1e-10);
    }
    MESSAGE("worst Ai error " << worst << ", Ai' error " << worst_p);
    CHECK(worst < 1e-10);
    CHECK(worst_p < 1e-10);
}

TEST_CASE("errors") {
    CHECK_THROWS_AS(airy::airy_all(std::nan("")), DomainError);
    CHECK_THROWS_AS(airy::airy_all(100.5), RangeError);
    CHECK_THROWS_AS(airy::airy_all(-101.0), RangeError);
    CHECK_NOTHROW(airy::airy_all(100.0));
    CHECK_NOTHROW(airy::airy_scaled(500.0));
}

TEST_CASE("property: Wronskian at 10,000 points") {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-airy::x_max, 8.0);
    double worst = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const double x = u(rng);
        const auto a = airy::airy_all(x);
        const double w = a.ai * a.bi_prime - a.ai_prime * a.bi;
        worst = std::max(worst, std::fabs(w - inv_pi) / inv_pi);
    }
    CHECK(worst <= 1e-10);
    // tighter inside |x| <= 8
    std::uniform_real_distribution<double> v(-8.0, 8.0);
    for (int i = 0; i < 2000; ++i) {
        const double x = v(rng);
        const auto a = airy::airy_all(x);
        CHECK(std::fabs(a.ai * a.bi_prime - a.ai_prime * a.bi - inv_pi) <= 1e-12 * inv_pi);
    }
}

TEST_CASE("property: derivative and ODE consistency") {
    const double h = 1e-5, h2 = 1e-3;
    for (double x = -20.0; x <= 5.0; x += 0.0731) {
        const double fd = (airy::airy_ai(x + h) - airy::airy_ai(x - h)) / (2.0 * h);
        CHECK(std::fabs(fd - airy::airy_all(x).ai_prime) < 1e-8);
        const double d2 = (airy::airy_ai(x + h2) - 2.0 * airy::airy_ai(x) + airy::airy_ai(x - h2)) / (h2 * h2);
        CHECK(std::fabs(d2 - x * airy::airy_ai(x)) < 1e-4);
    }
}

TEST_CASE("property: branch continuity across each switchover") {
    auto rel = [](double a, double b, double scale) { return std::fabs(a - b) / scale; };
    // series / table around 2 and -2
    for (double x : {1.5, 1.75, 2.0, 2.25, 2.5, -1.5, -2.0, -2.5}) {
        const auto s = airy::detail::series(x);
        const auto t = airy::detail::table(x);
        const double sc = x > 0 ? std::fabs(s.ai) : std::hypot(s.ai, s.bi);
        CHECK(rel(s.ai, t.ai, sc) < 1e-10);
        CHECK(rel(s.bi, t.bi, x > 0 ? std::fabs(s.bi) : sc) < 1e-10);
    }
    // table / positive asymptotics around 10
    for (double x = 9.5; x <= 10.5; x += 0.125) {
        const auto t = airy::detail::table(x);
        const auto a = airy::detail::asymptotic_positive(x);
        CHECK(rel(t.ai, a.ai, std::fabs(a.ai)) < 1e-10);
        CHECK(rel(t.ai_prime, a.ai_prime, std::fabs(a.ai_prime)) < 1e-10);
        CHECK(rel(t.bi, a.bi, std::fabs(a.bi)) < 1e-10);
    }
    // table / oscillatory asymptotics around -12
    for (double x = -12.5; x <= -11.5; x += 0.125) {
        const auto t = airy::detail::table(x);
        const auto a = airy::detail::modulus_asymptotic(x);
        const double sc = std::hypot(a.ai, a.bi);
        CHECK(rel(t.ai, a.ai, sc) < 1e-10);
        CHECK(rel(t.bi, a.bi, sc) < 1e-10);
        CHECK(rel(t.ai_prime, a.ai_prime, std::hypot(a.ai_prime, a.bi_prime)) < 1e-10);
    }
}

TEST_CASE("modulus asymptote at x = -50") {
    const double x = -50.0;
    const auto a = airy::airy_modulus_asymptotic(x);
    const double m2 = a.ai * a.ai + a.bi * a.bi;
    const double ax = std::fabs(x);
    // M^2 = (1 / pi sqrt|x|) (1 - 5 / (32 |x|^3) + ...)
    const double lead = inv_pi / std::sqrt(ax);
    CHECK(m2 == doctest::Approx(lead * (1.0 - 5.0 / (32.0 * ax * ax * ax))).epsilon(1e-9));
    CHECK(std::fabs(m2 / lead - 1.0) < 2e-6);
}

TEST_CASE("flux bracket equals Ai'^2 - x Ai^2 and its integral form") {
    for (double x : {-30.0, -7.3, -1.0, 0.0, 0.5, 3.0, 9.9, 10.1, 15.0}) {
        const auto a = airy::airy_all(x);
        const double direct = a.ai_prime * a.ai_prime - x * a.ai * a.ai;
        const auto b = airy::flux_bracket(x);
        CHECK(b.value * std::exp(-b.decay) == doctest::Approx(direct).epsilon(x > 9 ? 1e-9 : 1e-11));
    }
    // B'(x) = -Ai(x)^2
    for (double x : {-5.0, 0.3, 4.0, 12.0}) {
        const double h = 1e-4;
        auto B = [](double t) { auto b = airy::flux_bracket(t); return b.value * std::exp(-b.decay); };
        const double ai = airy::airy_ai(x);
        CHECK((B(x + h) - B(x - h)) / (2 * h) == doctest::Approx(-ai * ai).epsilon(1e-6));
    }
    // large x: B ~ e^{-4/3 x^{3/2}} / (8 pi x)
    const auto b = airy::flux_bracket(80.0);
    CHECK(b.value * 8.0 * 3.14159265358979323846 * 80.0 == doctest::Approx(1.0).epsilon(1e-3));
}
