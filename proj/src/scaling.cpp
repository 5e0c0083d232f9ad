#include "qsrc/scaling.hpp"

#include <cmath>
#include <string>

#include "qsrc/errors.hpp"

namespace qsrc {

double energy_to_joule(double value, EnergyUnit unit) {
    switch (unit) {
        case EnergyUnit::Joule:
            return value;
        case EnergyUnit::ElectronVolt:
            return value * constants::elementary_charge;
        case EnergyUnit::Hertz:
            return 2.0 * constants::pi * constants::hbar * value;
    }
    throw DomainError("unknown energy unit");
}

double joule_to_energy(double joule, EnergyUnit unit) {
    switch (unit) {
        case EnergyUnit::Joule:
            return joule;
        case EnergyUnit::ElectronVolt:
            return joule / constants::elementary_charge;
        case EnergyUnit::Hertz:
            return joule / (2.0 * constants::pi * constants::hbar);
    }
    throw DomainError("unknown energy unit");
}

namespace {
void require_positive(double value, const char* name) {
    if (!(value > 0.0) || !std::isfinite(value)) {
        throw DomainError(std::string("make_system: ") + name +
                          " must be positive and finite, got " + std::to_string(value));
    }
}
}  // namespace

PhysicalSystem make_system(double mass, double force, double hbar) {
    require_positive(mass, "mass");
    require_positive(force, "force");
    require_positive(hbar, "hbar");
    // Split the cube root so that SI magnitudes (1e-100 and below) never
    // appear as an intermediate.
    const double beta = std::cbrt(mass / 4.0) / (std::cbrt(hbar) * std::cbrt(hbar) *
                                                 std::cbrt(force) * std::cbrt(force));
    if (!(beta > 0.0) || !std::isfinite(beta)) {
        throw DomainError("make_system: beta is not finite for the given inputs");
    }
    return PhysicalSystem(mass, force, hbar, beta);
}

PhysicalSystem electron_in_field(double force_ev_per_m) {
    return make_system(constants::electron_mass, ev_per_meter_to_newton(force_ev_per_m));
}

PhysicalSystem atom_under_gravity(double mass, double g) {
    return make_system(mass, mass * g);
}

ScaledPoint make_scaled_point(double xi, double nu_y, double zeta) {
    return {xi, nu_y, zeta, std::sqrt(xi * xi + nu_y * nu_y + zeta * zeta)};
}

ScaledPoint PhysicalSystem::scale_point(const Vec3& r) const {
    const double k = inverse_length();
    return make_scaled_point(k * r[0], k * r[1], k * r[2]);
}

Vec3 PhysicalSystem::unscale_point(const ScaledPoint& p) const {
    const double k = inverse_length();
    return {p.xi / k, p.nu_y / k, p.zeta / k};
}

ScaledEnergy PhysicalSystem::scale_energy(double energy_joule) const {
    return {-inverse_energy() * energy_joule};
}

double PhysicalSystem::unscale_energy(ScaledEnergy e) const {
    return -e.epsilon / inverse_energy();
}

ScaledTime PhysicalSystem::scale_time(double t) const { return {t / (2.0 * hbar_ * beta_)}; }

double PhysicalSystem::unscale_time(ScaledTime t) const { return t.tau * 2.0 * hbar_ * beta_; }

}  // namespace qsrc
