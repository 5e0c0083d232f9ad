#pragma once

// Presets and observables for photodetachment in an electric field and for
// an atom laser outcoupled from a condensate falling under gravity.

#include <string>
#include <vector>

#include "qsrc/output.hpp"
#include "qsrc/scaling.hpp"
#include "qsrc/sources.hpp"

namespace qsrc::scenarios {

struct PhotodetachmentPreset {
    std::string species;
    double force_ev_per_m = 0.0;
    double mass = constants::electron_mass;
    double e_min = 0.0;           ///< scan range (J)
    double e_max = 0.0;
    double energy = 0.0;          ///< fixed energy for images (J)
    double detector_z = 0.0;      ///< m
    double image_half_width = 0.0;///< m
    double strength2 = 1.0;       ///< |C|^2 scale factor

    PhysicalSystem system() const;
    void validate() const;
};

/// S- near-threshold photocurrent (staircase regime).
PhotodetachmentPreset s_minus();
/// O- photodetachment microscopy image.
PhotodetachmentPreset o_minus();

struct AtomLaserPreset {
    double mass = constants::rb87_mass;
    double g = constants::standard_gravity;
    double width = 0.0;           ///< condensate width a (m)
    double omega = 0.0;           ///< coupling Omega (rad/s)
    double nu_min = 0.0;          ///< detuning scan (Hz)
    double nu_max = 0.0;
    double time = 0.0;            ///< operation time T (s)
    double n0 = 1.0;              ///< initial atom number; 1 reports fractions
    double z = 0.0;               ///< profile distance (m)
    double nu = 0.0;              ///< detuning for profiles (Hz)
    double profile_half_width = 0.0;
    std::vector<double> widths;   ///< width family for transition / profile studies (m)
    bool flip_detuning = false;   ///< E = -2 pi hbar nu instead of +2 pi hbar nu

    PhysicalSystem system() const;
    sources::GaussianSource source() const;
    double energy(double detuning) const;
    void validate() const;
};

/// Depletion measurement: a = 2.8 um, Omega = 2 pi 105.585 Hz, T = 20 ms.
AtomLaserPreset rb_atom_laser();
/// Width study: Omega = 2 pi 100 Hz, nu = 2.5 kHz, z = 1 mm, a in {0.2, 0.4, 0.8, 1.6} um.
AtomLaserPreset rb_beam_study();

struct DepletionCurve {
    std::vector<double> detuning;   ///< Hz
    std::vector<double> current;    ///< J (1/s)
    std::vector<double> remaining;  ///< N(T) / N(0) times n0

    output::ScanResult to_scan(const AtomLaserPreset& p) const;
};

std::vector<double> linspace(double lo, double hi, std::size_t n);

/// J(E) = strength2 * total_current_point over the grid (energies in J).
output::ScanResult photodetachment_cross_section(const PhotodetachmentPreset& p,
                                                 const std::vector<double>& energies);

/// j_z(R) on the plane z for either source model.
std::vector<double> radial_profile(const PhysicalSystem& sys, const sources::SourceModel& model,
                                   double energy, double z, const std::vector<double>& radii);

/// Square raster of j_z over [-half_width, half_width]^2, built from a fine
/// radial profile and revolved.  resolution <= 0 throws DomainError.
output::RasterImage detector_image(const PhysicalSystem& sys, const sources::SourceModel& model,
                                   double energy, double z, double half_width, int resolution);
output::RasterImage detector_image(const PhotodetachmentPreset& p, int resolution);
output::RasterImage detector_image(const AtomLaserPreset& p, int resolution);

DepletionCurve atom_laser_depletion(const AtomLaserPreset& p, const std::vector<double>& detunings);

/// Lateral profile j_z(x, 0, z) on n points over [-half_width, half_width].
output::ScanResult lateral_profile(const PhysicalSystem& sys, const sources::GaussianSource& src,
                                   double energy, double z, double half_width, std::size_t n);

/// One lateral profile per width at the preset's nu and z.
std::vector<output::ScanResult> beam_profile_family(const AtomLaserPreset& p,
                                                    const std::vector<double>& widths,
                                                    std::size_t n = 801);

struct TransitionCurve {
    double width = 0.0;
    output::ScanResult exact;
    output::ScanResult slicing;
    double area_exact = 0.0;       ///< trapezoid area over the detuning grid (1/s * Hz)
    double area_slicing = 0.0;
    double max_deviation = 0.0;    ///< max |J - J_sp| / max J
    int oscillation_maxima = 0;    ///< local maxima of dJ/dnu
    double peak_exact = 0.0;       ///< detuning of the exact maximum (Hz)
    double peak_slicing = 0.0;
};

std::vector<TransitionCurve> current_transition_scan(const AtomLaserPreset& p,
                                                     const std::vector<double>& widths,
                                                     const std::vector<double>& detunings);

/// Largest pairwise relative difference between the exact-curve areas.
double area_spread(const std::vector<TransitionCurve>& curves);

/// Strict interior local maxima (plateaus count once).
int count_local_maxima(const std::vector<double>& v);

/// Abscissae of the interior local maxima, refined by a parabola through the
/// three samples around each.
std::vector<double> local_maxima_positions(const std::vector<double>& x,
                                           const std::vector<double>& v);

/// Central differences (one-sided at the ends).
std::vector<double> derivative(const std::vector<double>& x, const std::vector<double>& v);

double trapezoid(const std::vector<double>& x, const std::vector<double>& v);

}  // namespace qsrc::scenarios
