#pragma once

// Retarded energy Green function of H = p^2/2m - F z.
//
//   G(r, r'; E) = (m / 2 hbar^2) / |r - r'| * [Ci(a+) Ai'(a-) - Ci'(a+) Ai(a-)]
//   a(+/-) = -beta [2E + F (z + z') +/- F |r - r'|]
//
// In scaled variables G = 2 beta (beta F)^3 * W / rho, where W is the Airy
// bracket.  green_closed is the production path; green_oracle evaluates the
// Laplace transform of the time propagator numerically and exists for
// validation.

#include <complex>

#include "qsrc/scaling.hpp"

namespace qsrc::green {

struct GreenArgs {
    double alpha_plus = 0.0;
    double alpha_minus = 0.0;
};

/// Airy arguments for field point r and source point src (both scaled),
/// computed without cancellation in rho - (zeta + zeta').
GreenArgs green_args(const ScaledPoint& r, const ScaledPoint& src, double epsilon);

/// Scaled distance |r - src|.
double scaled_distance(const ScaledPoint& r, const ScaledPoint& src);

/// Dimensionless kernel W / rho, multiplied by exp(log_weight).  The weight is
/// folded into the exponential scaling of the Airy factors so that a huge
/// weight times a tiny kernel does not overflow.
std::complex<double> green_kernel(const ScaledPoint& r, const ScaledPoint& src, double epsilon,
                                  double log_weight = 0.0);

/// Conversion from the dimensionless kernel to SI: 2 beta (beta F)^3.
double kernel_to_si(const PhysicalSystem& sys);

struct GreenValue {
    std::complex<double> scaled;  ///< W / rho
    double to_si = 1.0;           ///< multiply `scaled` by this for kg / (J s)^2 / m units

    std::complex<double> si() const { return scaled * to_si; }
};

/// Closed Airy form.  Coincident points throw DomainError (use the
/// diagonal-limit total current instead).
GreenValue green_closed(const PhysicalSystem& sys, const Vec3& r, const Vec3& r_src,
                        double energy);

struct OracleOptions {
    /// Largest damping energy eta_0 in joules; <= 0 selects 2 beta eta_0 = 0.1.
    double eta0 = 0.0;
    /// Number of damping levels eta_k = eta_0 / 2^k used for extrapolation.
    int levels = 7;
    double rel_tol = 1e-12;
    /// Error estimates above this (relative) raise NumericalError.
    double fail_above = 1e-8;
};

struct OracleResult {
    GreenValue value;
    double error_estimate = 0.0;  ///< absolute, in units of value.scaled
};

/// (1 / i hbar) \int_0^inf dt exp(i (E + i eta) t / hbar) K(r, t | r', 0), with
/// the time contour deformed into the lower half plane and polynomial
/// extrapolation eta -> 0.
OracleResult green_oracle(const PhysicalSystem& sys, const Vec3& r, const Vec3& r_src,
                          double energy, const OracleOptions& options = {});

namespace detail {

struct LaplaceIntegral {
    std::complex<double> value;
    double error = 0.0;
    bool converged = false;
};

/// -i \int_0^inf dtau (i pi tau)^(-3/2) exp(i rho2/tau + i c tau - i tau^3/12 - kappa tau).
/// For kappa = 0 this equals W/rho with rho^2 = rho2 and c = zeta + zeta' - epsilon.
LaplaceIntegral propagator_laplace(double rho2, double c, double kappa, double rel_tol = 1e-12);

}  // namespace detail

}  // namespace qsrc::green
