#pragma once

// Point and Gaussian quantum sources in a uniform force field.
//
// A point source sigma(r) = C delta(r) radiates psi = C G(r, 0; E).  A
// Gaussian source sigma(r) = hbar Omega N0 exp(-r^2 / 2a^2) has a far field
// identical to a point source displaced upstream by m F a^4 / 2 hbar^2 with
// the energy-dependent weight Lambda.  In scaled variables (alpha = beta F a):
//
//   zeta~ = zeta + 2 alpha^4,   epsilon~ = epsilon + 4 alpha^4,
//   Lambda = hbar Omega (2 sqrt(pi) a)^(3/2) exp(2 alpha^2 (epsilon~ - 4 alpha^4 / 3)).
//
// All SI outputs: wavefunctions in the units of C G, current densities in
// 1/(m^2 s) per |C|^2 unit (or per atom for Gaussian sources), total currents
// in 1/s.

#include <complex>
#include <optional>
#include <utility>
#include <variant>

#include "qsrc/scaling.hpp"

namespace qsrc::sources {

struct PointSource {
    std::complex<double> strength{1.0, 0.0};
};

struct GaussianSource {
    double width = 0.0;  ///< a (m)
    double omega = 0.0;  ///< coupling Omega (rad/s)
};

using SourceModel = std::variant<PointSource, GaussianSource>;

/// Validated constructor: a > 0, Omega > 0.
GaussianSource make_gaussian(double width, double omega);

struct GaussianScaled {
    double alpha = 0.0;
    double zeta_tilde = 0.0;
    double epsilon_tilde = 0.0;
    double rho_tilde = 0.0;
    double lateral2 = 0.0;       ///< xi^2 + nu_y^2
    double log_weight = 0.0;     ///< 2 alpha^2 (epsilon~ - 4 alpha^4 / 3)
    double point_strength = 0.0; ///< hbar Omega (2 sqrt(pi) a)^(3/2)

    /// Lambda(epsilon~); overflows for wide sources, prefer log_weight.
    double lambda() const;
};

GaussianScaled gaussian_scaled(const PhysicalSystem& sys, const GaussianSource& src,
                               const Vec3& r, double energy);

/// Strength C of the point source that a vanishingly narrow Gaussian reduces to.
double equivalent_point_strength(const PhysicalSystem& sys, const GaussianSource& src);

/// Upstream displacement of the virtual point source, m F a^4 / 2 hbar^2 (m).
double virtual_source_offset(const PhysicalSystem& sys, const GaussianSource& src);

/// sigma(r) = hbar Omega N0 exp(-r^2 / 2 a^2).
double source_function(const PhysicalSystem& sys, const GaussianSource& src, const Vec3& r);

// --- point source --------------------------------------------------------

std::complex<double> psi_point(const PhysicalSystem& sys, const PointSource& src, const Vec3& r,
                               double energy);

/// z component of the probability current density.
double current_density_point(const PhysicalSystem& sys, const PointSource& src, const Vec3& r,
                             double energy);

/// J(E) = (2 |C|^2 m beta F / hbar^3) {Ai'(-2 beta E)^2 + 2 beta E Ai(-2 beta E)^2}.
double total_current_point(const PhysicalSystem& sys, const PointSource& src, double energy);

// --- Gaussian source ---------------------------------------------------------

enum class FieldZone { Near, Transition, Far };

/// Near: rho~ <= 3 alpha (far-field formulas rejected); Transition: up to
/// 5 alpha (accepted, callers may warn); Far beyond.
FieldZone field_zone(const PhysicalSystem& sys, const GaussianSource& src, const Vec3& r);

/// Virtual-point-source far field.  Throws PreconditionError in the near zone.
std::complex<double> psi_gauss_far(const PhysicalSystem& sys, const GaussianSource& src,
                                   const Vec3& r, double energy);

/// Leading asymptotic form of the near-field (imaginary-axis) contribution.
double psi_gauss_near(const PhysicalSystem& sys, const GaussianSource& src, const Vec3& r,
                      double energy);

struct GaussQuadrature {
    std::complex<double> psi;           ///< near_segment + far_segment
    double near_segment = 0.0;          ///< imaginary-axis part (real)
    std::complex<double> far_segment;   ///< real-axis part
    double error = 0.0;                 ///< absolute estimate
};

/// Direct numerical evaluation of the complex u-contour integral, split at u = 0.
GaussQuadrature psi_gauss_quadrature(const PhysicalSystem& sys, const GaussianSource& src,
                                     const Vec3& r, double energy, double rel_tol = 1e-12);

/// Exact wavefunction: near segment by quadrature plus closed-form far part.
/// Valid everywhere, including inside the source.
std::complex<double> psi_gauss(const PhysicalSystem& sys, const GaussianSource& src,
                               const Vec3& r, double energy);

/// Far-field j_z (shift-substituted point formula).  Throws in the near zone.
double current_density_gauss(const PhysicalSystem& sys, const GaussianSource& src, const Vec3& r,
                             double energy);

/// Exact total current.  Evaluated in log space; RangeError if the result
/// itself overflows.
double total_current_gauss(const PhysicalSystem& sys, const GaussianSource& src, double energy);

/// Saddle-point ("slicing") approximation (2 sqrt(pi) hbar Omega^2 beta / alpha) exp(-eps^2 / 4 alpha^2).
double total_current_slicing(const PhysicalSystem& sys, const GaussianSource& src, double energy);

/// Either total current, dispatched on the model.
double total_current(const PhysicalSystem& sys, const SourceModel& model, double energy);

struct SumRule {
    double lhs = 0.0;       ///< \int J(E) dE (1/s * J)
    double rhs = 0.0;       ///< 2 pi hbar Omega^2
    double error = 0.0;     ///< quadrature + tail estimate on lhs
    double e_min = 0.0;     ///< integration range actually used (J)
    double e_max = 0.0;
    bool converged = false;

    double ratio() const { return lhs / rhs; }
};

/// Integrates J(E) numerically, extending `energy_range` until the tail
/// contribution drops below `tolerance` (relative).  Point sources throw
/// UnsupportedModelError: the L2 norm of delta(r) is undefined.
SumRule sum_rule_check(const PhysicalSystem& sys, const SourceModel& model,
                       std::optional<std::pair<double, double>> energy_range = std::nullopt,
                       double tolerance = 1e-6);

/// Revolved integral 2 pi \int j_z R dR over the plane z = const (downstream
/// of the real or virtual source).  Independent route to the total current.
struct PlaneFlux {
    double value = 0.0;
    double error = 0.0;
};
PlaneFlux detector_plane_flux(const PhysicalSystem& sys, const SourceModel& model, double energy,
                              double z);

}  // namespace qsrc::sources
