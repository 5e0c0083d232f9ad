#pragma once

// Real-argument Airy functions Ai, Bi, their derivatives, and
// Ci = Bi + i Ai.
//
// Evaluation branches:
//   |x| <= 2          Maclaurin series
//   2 < |x|, x in [-12, 10]
//                     Taylor expansion of y'' = x y about the nearest node of a
//                     table (spacing 1/4) built once from the series and the
//                     asymptotic expansions by stepping the ODE in the stable
//                     direction
//   x > 10            exponentially scaled asymptotic series
//   x < -12           modulus/phase asymptotic series
//
// Errors are below 1e-12 (relative; relative to the envelope near the zeros
// of the oscillatory region).  For very negative x the absolute phase error
// grows like 1e-16 |x|^(3/2).

#include <complex>

namespace qsrc::airy {

/// Largest |x| accepted by airy_all.  Bi(x) overflows a double near x = 104.
inline constexpr double x_max = 100.0;

struct ComplexAiryPair {
    double ai = 0.0;
    double ai_prime = 0.0;
    double bi = 0.0;
    double bi_prime = 0.0;
    std::complex<double> ci;
    std::complex<double> ci_prime;
};

/// Airy values with the exponential behaviour factored out for x > 0:
///   Ai = ai * exp(-scale),  Bi = bi * exp(+scale),  scale = 2/3 x^(3/2).
/// For x <= 0 the scale is 0 and the values are unscaled.
struct ScaledAiry {
    double ai = 0.0;
    double ai_prime = 0.0;
    double bi = 0.0;
    double bi_prime = 0.0;
    double scale = 0.0;
};

/// All six values at x.  NaN -> DomainError, |x| > x_max -> RangeError.
ComplexAiryPair airy_all(double x);

/// Scaled values for x >= -1e10 (no overflow cap: Bi is returned scaled).
ScaledAiry airy_scaled(double x);

/// Ai(x) alone; underflows to 0 for large positive x.
double airy_ai(double x);

/// The combination B(x) = Ai'(x)^2 - x Ai(x)^2 = \int_x^inf Ai(t)^2 dt,
/// returned as value * exp(-decay) with decay = 4/3 x^(3/2) for x > 0 (0
/// otherwise).  For large x the leading terms of Ai'^2 and x Ai^2 cancel;
/// the asymptotic branch forms the difference analytically.
struct ScaledBracket {
    double value = 0.0;
    double decay = 0.0;
};
ScaledBracket flux_bracket(double x);

namespace detail {
// Individual branches, exposed for branch-consistency tests.  No range checks.
ScaledAiry series(double x);
ScaledAiry table(double x);
ScaledAiry asymptotic_positive(double x);
/// Negative-argument (oscillatory) asymptotics; x <= -x_switch expected.
ScaledAiry modulus_asymptotic(double x);

inline constexpr double series_limit = 2.0;
inline constexpr double positive_switch = 10.0;
inline constexpr double negative_switch = 12.0;
}  // namespace detail

/// Public name of the negative-argument branch: (Ai, Ai', Bi, Bi') for
/// x <= -x_switch.
inline ScaledAiry airy_modulus_asymptotic(double x) { return detail::modulus_asymptotic(x); }

}  // namespace qsrc::airy
