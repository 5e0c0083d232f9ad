#include "doctest.h"

#include <cmath>
#include <random>

#include "qsrc/errors.hpp"
#include "qsrc/scaling.hpp"

using namespace qsrc;

namespace {
// beta from the definition, in long double.
long double beta_ref(long double m, long double f, long double h) {
    return std::cbrt(m / (4.0L * h * h * f * f));
}
}  // namespace

TEST_CASE("make_system rejects non-positive inputs by name") {
    CHECK_THROWS_WITH_AS(make_system(0.0, 1.0, 1.0), doctest::Contains("mass"), DomainError);
    CHECK_THROWS_WITH_AS(make_system(1.0, -1.0, 1.0), doctest::Contains("force"), DomainError);
    CHECK_THROWS_WITH_AS(make_system(1.0, 1.0, 0.0), doctest::Contains("hbar"), DomainError);
    CHECK_THROWS_AS(make_system(std::nan(""), 1.0, 1.0), DomainError);
    CHECK_THROWS_AS(make_system(1.0, INFINITY, 1.0), DomainError);
}

TEST_CASE("beta for unit-normalized inputs") {
    // m = 1, F = 1/2, hbar = 1 gives m / (4 hbar^2 F^2) = 1.
    CHECK(make_system(1.0, 0.5, 1.0).beta() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(make_system(4.0, 0.5, 1.0).beta() == doctest::Approx(std::cbrt(4.0)).epsilon(1e-15));
}

TEST_CASE("beta for the O- and Rb-87 systems") {
    const auto o = electron_in_field(423.0);
    const long double f = 423.0L * 1.602176634e-19L;
    CHECK(o.beta() == doctest::Approx(double(beta_ref(9.1093837015e-31L, f, 1.054571817e-34L))).epsilon(1e-13));
    CHECK(o.beta() == doctest::Approx(1.646e23).epsilon(1e-3));
    CHECK(o.inverse_length() == doctest::Approx(1.1157e7).epsilon(1e-3));

    const auto rb = atom_under_gravity(constants::rb87_mass);
    const long double m = 86.909180527L * 1.66053906660e-27L;
    CHECK(rb.beta() == doctest::Approx(double(beta_ref(m, m * 9.81L, 1.054571817e-34L))).epsilon(1e-13));
    CHECK(rb.inverse_length() == doctest::Approx(1.66225e6).epsilon(1e-4));
}

TEST_CASE("scale_point") {
    const auto sys = make_system(1.0, 0.5, 1.0);  // beta = 1, beta F = 1/2
    const auto o = sys.scale_point({0.0, 0.0, 0.0});
    CHECK(o.rho == 0.0);
    // beta F = 2: m = 16, F = 2, hbar = 1 gives beta = 1.
    const auto s2 = make_system(16.0, 2.0, 1.0);
    REQUIRE(s2.inverse_length() == doctest::Approx(2.0).epsilon(1e-15));
    const auto p = s2.scale_point({1.0, 2.0, 3.0});
    CHECK(p.xi == doctest::Approx(2.0));
    CHECK(p.nu_y == doctest::Approx(4.0));
    CHECK(p.zeta == doctest::Approx(6.0));
    CHECK(p.rho == doctest::Approx(2.0 * std::sqrt(14.0)).epsilon(1e-14));

    const auto om = electron_in_field(423.0);
    const auto d = om.scale_point({0.0, 0.0, 0.514});
    const long double bf = beta_ref(9.1093837015e-31L, 423.0L * 1.602176634e-19L, 1.054571817e-34L) *
                           423.0L * 1.602176634e-19L;
    CHECK(d.zeta == doctest::Approx(double(bf * 0.514L)).epsilon(1e-13));
    CHECK(d.zeta == doctest::Approx(5.73e6).epsilon(1e-3));
}

TEST_CASE("scale_energy sign convention") {
    const auto sys = make_system(1.0, 0.5, 1.0);
    CHECK(sys.scale_energy(0.0).epsilon == 0.0);
    CHECK(sys.scale_energy(1.0).epsilon == doctest::Approx(-2.0));
    const auto om = electron_in_field(423.0);
    const double e = energy_to_joule(100.5e-6, EnergyUnit::ElectronVolt);
    CHECK(om.scale_energy(e).epsilon == doctest::Approx(-2.0 * om.beta() * e).epsilon(1e-15));
    CHECK(om.scale_energy(e).epsilon == doctest::Approx(-5.30).epsilon(1e-3));
    CHECK(om.scale_energy(e).epsilon < 0.0);
}

TEST_CASE("energy units") {
    CHECK(energy_to_joule(1.0, EnergyUnit::ElectronVolt) == doctest::Approx(1.602176634e-19).epsilon(1e-15));
    CHECK(energy_to_joule(1.0, EnergyUnit::Hertz) == doctest::Approx(2.0 * constants::pi * constants::hbar).epsilon(1e-15));
    for (auto u : {EnergyUnit::Joule, EnergyUnit::ElectronVolt, EnergyUnit::Hertz}) {
        CHECK(joule_to_energy(energy_to_joule(3.25, u), u) == doctest::Approx(3.25).epsilon(1e-15));
    }
    const auto rb = atom_under_gravity(constants::rb87_mass);
    CHECK(rb.scale_energy(energy_to_joule(1e3, EnergyUnit::Hertz)).epsilon == doctest::Approx(-1.556).epsilon(1e-3));
}

TEST_CASE("property: round trips and F^(-2/3) scaling") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> logu(-3.0, 3.0), coord(-1.0, 1.0);
    for (int i = 0; i < 200; ++i) {
        const double m = std::pow(10.0, logu(rng)) * 1e-27;
        const double f = std::pow(10.0, logu(rng)) * 1e-20;
        const auto sys = make_system(m, f, constants::hbar);
        const double scale = 1.0 / sys.inverse_length();
        const Vec3 r{coord(rng) * scale, coord(rng) * scale, coord(rng) * scale};
        const auto p = sys.scale_point(r);
        const auto back = sys.unscale_point(p);
        for (int k = 0; k < 3; ++k) CHECK(back[k] == doctest::Approx(r[k]).epsilon(1e-12));
        CHECK(p.rho * p.rho == doctest::Approx(p.xi * p.xi + p.nu_y * p.nu_y + p.zeta * p.zeta).epsilon(1e-12));
        const double e = coord(rng) / sys.beta();
        CHECK(sys.unscale_energy(sys.scale_energy(e)) == doctest::Approx(e).epsilon(1e-12));
        const double t = std::fabs(coord(rng)) * sys.hbar() * sys.beta();
        CHECK(sys.unscale_time(sys.scale_time(t)) == doctest::Approx(t).epsilon(1e-12));
        CHECK(sys.scale_time(t).tau >= 0.0);
        for (double k : {2.0, 10.0, 100.0}) {
            CHECK(make_system(m, k * f, constants::hbar).beta() ==
                  doctest::Approx(std::pow(k, -2.0 / 3.0) * sys.beta()).epsilon(1e-12));
        }
    }
}
