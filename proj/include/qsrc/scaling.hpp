#pragma once

// Physical constants, unit conversions and the dimensionless variables used
// throughout the library.  With beta = (m / (4 hbar^2 F^2))^(1/3):
//
//   xi = beta F x,  nu_y = beta F y,  zeta = beta F z,  rho = beta F |r|
//   epsilon = -2 beta E,  tau = t / (2 hbar beta)
//
// beta F is an inverse length and 2 beta an inverse energy.  Everything past
// the API boundary is computed in these variables.

#include <array>

namespace qsrc {

namespace constants {
inline constexpr double hbar = 1.054571817e-34;           // J s
inline constexpr double elementary_charge = 1.602176634e-19;  // C
inline constexpr double electron_mass = 9.1093837015e-31;     // kg
inline constexpr double atomic_mass_unit = 1.66053906660e-27; // kg
inline constexpr double rb87_mass = 86.909180527 * atomic_mass_unit;
inline constexpr double standard_gravity = 9.81;              // m/s^2
inline constexpr double pi = 3.14159265358979323846;
}  // namespace constants

using Vec3 = std::array<double, 3>;

enum class EnergyUnit { Joule, ElectronVolt, Hertz };

/// Converts an energy given in `unit` to joules.  Hertz means E = 2 pi hbar nu.
double energy_to_joule(double value, EnergyUnit unit);
double joule_to_energy(double joule, EnergyUnit unit);

/// Force in eV/m (electron in a field of that many V/m) to newtons.
inline double ev_per_meter_to_newton(double value) {
    return value * constants::elementary_charge;
}

struct ScaledPoint {
    double xi = 0.0;
    double nu_y = 0.0;
    double zeta = 0.0;
    double rho = 0.0;
};

struct ScaledEnergy {
    double epsilon = 0.0;
};

struct ScaledTime {
    double tau = 0.0;
};

/// Particle of mass m in a uniform force of magnitude F along +z.
class PhysicalSystem {
public:
    double mass() const { return mass_; }
    double force() const { return force_; }
    double hbar() const { return hbar_; }
    double beta() const { return beta_; }

    /// beta F, the inverse length scale.
    double inverse_length() const { return beta_ * force_; }
    /// 2 beta, the inverse energy scale.
    double inverse_energy() const { return 2.0 * beta_; }

    ScaledPoint scale_point(const Vec3& r) const;
    Vec3 unscale_point(const ScaledPoint& p) const;
    ScaledEnergy scale_energy(double energy_joule) const;
    double unscale_energy(ScaledEnergy e) const;
    ScaledTime scale_time(double t) const;
    double unscale_time(ScaledTime t) const;

    double scale_length(double length) const { return inverse_length() * length; }
    double unscale_length(double scaled) const { return scaled / inverse_length(); }

private:
    friend PhysicalSystem make_system(double mass, double force, double hbar);
    PhysicalSystem(double m, double f, double h, double b)
        : mass_(m), force_(f), hbar_(h), beta_(b) {}

    double mass_;
    double force_;
    double hbar_;
    double beta_;
};

/// Throws DomainError naming the offending field when an input is not
/// strictly positive and finite.
PhysicalSystem make_system(double mass, double force, double hbar = constants::hbar);

/// Electron in a static field given as a force in eV/m.
PhysicalSystem electron_in_field(double force_ev_per_m);

/// Atom of the given mass falling under gravity, F = m g.
PhysicalSystem atom_under_gravity(double mass, double g = constants::standard_gravity);

/// Makes a ScaledPoint from already-scaled components, recomputing rho.
ScaledPoint make_scaled_point(double xi, double nu_y, double zeta);

}  // namespace qsrc
