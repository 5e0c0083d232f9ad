#include "qsrc/scenarios.hpp"

#include <algorithm>
#include <cmath>

#include "qsrc/errors.hpp"
#include "qsrc/parallel.hpp"

namespace qsrc::scenarios {

namespace {

using output::format_number;
using output::Metadata;

double ev(double x) { return energy_to_joule(x, EnergyUnit::ElectronVolt); }

void add_system(Metadata& m, const PhysicalSystem& sys) {
    m.emplace_back("mass_kg", format_number(sys.mass()));
    m.emplace_back("force_N", format_number(sys.force()));
    m.emplace_back("hbar_Js", format_number(sys.hbar()));
    m.emplace_back("beta_per_J", format_number(sys.beta()));
    m.emplace_back("beta_F_per_m", format_number(sys.inverse_length()));
}

Metadata photodetachment_metadata(const PhotodetachmentPreset& p) {
    Metadata m;
    m.emplace_back("species", p.species);
    m.emplace_back("field_eV_per_m", format_number(p.force_ev_per_m));
    add_system(m, p.system());
    m.emplace_back("strength2", format_number(p.strength2));
    return m;
}

Metadata atom_metadata(const AtomLaserPreset& p, double width) {
    Metadata m;
    const PhysicalSystem sys = p.system();
    m.emplace_back("species", "Rb-87");
    m.emplace_back("g_m_per_s2", format_number(p.g));
    add_system(m, sys);
    m.emplace_back("width_m", format_number(width));
    m.emplace_back("alpha", format_number(sys.scale_length(width)));
    m.emplace_back("omega_rad_per_s", format_number(p.omega));
    m.emplace_back("flip_detuning", p.flip_detuning ? "true" : "false");
    return m;
}

double interpolate(const std::vector<double>& x, const std::vector<double>& y, double at) {
    if (at <= x.front()) return y.front();
    if (at >= x.back()) return y.back();
    const auto it = std::upper_bound(x.begin(), x.end(), at);
    const std::size_t i = static_cast<std::size_t>(it - x.begin());
    const double t = (at - x[i - 1]) / (x[i] - x[i - 1]);
    return y[i - 1] + t * (y[i] - y[i - 1]);
}

}  // namespace

// --- presets ---------------------------------------------------------------

PhysicalSystem PhotodetachmentPreset::system() const {
    return make_system(mass, ev_per_meter_to_newton(force_ev_per_m));
}

void PhotodetachmentPreset::validate() const {
    if (!(force_ev_per_m > 0.0)) throw DomainError("photodetachment preset: field must be positive");
    if (!(mass > 0.0)) throw DomainError("photodetachment preset: mass must be positive");
    if (!(detector_z > 0.0)) throw DomainError("photodetachment preset: detector distance must be positive");
    if (!(strength2 >= 0.0)) throw DomainError("photodetachment preset: |C|^2 must be >= 0");
}

PhotodetachmentPreset s_minus() {
    PhotodetachmentPreset p;
    p.species = "S-";
    p.force_ev_per_m = 2.205e4;
    p.e_min = ev(-0.5e-3);
    p.e_max = ev(3e-3);
    p.energy = ev(1e-3);
    p.detector_z = 0.5;
    p.image_half_width = 1e-3;
    return p;
}

PhotodetachmentPreset o_minus() {
    PhotodetachmentPreset p;
    p.species = "O-";
    p.force_ev_per_m = 423.0;
    p.e_min = ev(-20e-6);
    p.e_max = ev(200e-6);
    p.energy = ev(100.5e-6);
    p.detector_z = 0.514;
    p.image_half_width = 1e-3;
    return p;
}

PhysicalSystem AtomLaserPreset::system() const { return atom_under_gravity(mass, g); }

sources::GaussianSource AtomLaserPreset::source() const { return sources::make_gaussian(width, omega); }

double AtomLaserPreset::energy(double detuning) const {
    const double e = energy_to_joule(detuning, EnergyUnit::Hertz);
    return flip_detuning ? -e : e;
}

void AtomLaserPreset::validate() const {
    if (!(mass > 0.0)) throw DomainError("atom-laser preset: mass must be positive");
    if (!(g > 0.0)) throw DomainError("atom-laser preset: g must be positive");
    if (!(width > 0.0)) throw DomainError("atom-laser preset: width must be positive");
    if (!(omega > 0.0)) throw DomainError("atom-laser preset: omega must be positive");
    if (!(time >= 0.0)) throw DomainError("atom-laser preset: time must be >= 0");
    if (!(n0 > 0.0)) throw DomainError("atom-laser preset: N(0) must be positive");
    if (!(z > 0.0)) throw DomainError("atom-laser preset: profile distance must be positive");
    for (double a : widths) {
        if (!(a > 0.0)) throw DomainError("atom-laser preset: widths must be positive");
    }
}

AtomLaserPreset rb_atom_laser() {
    AtomLaserPreset p;
    p.width = 2.8e-6;
    p.omega = 2.0 * constants::pi * 105.585;
    p.nu_min = -30e3;
    p.nu_max = 30e3;
    p.time = 20e-3;
    p.z = 1e-3;
    p.nu = 2.5e3;
    p.profile_half_width = 100e-6;
    p.widths = {2.8e-6};
    return p;
}

AtomLaserPreset rb_beam_study() {
    AtomLaserPreset p = rb_atom_laser();
    p.omega = 2.0 * constants::pi * 100.0;
    p.width = 0.4e-6;
    p.nu_min = -10e3;
    p.nu_max = 10e3;
    p.widths = {0.2e-6, 0.4e-6, 0.8e-6, 1.6e-6};
    return p;
}

// --- helpers -------------------------------------------------------------------

std::vector<double> linspace(double lo, double hi, std::size_t n) {
    if (n < 2) throw DomainError("grid: at least two points are required");
    if (!(hi > lo)) throw DomainError("grid: minimum must be below maximum");
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) {
        v[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    }
    v.back() = hi;
    return v;
}

int count_local_maxima(const std::vector<double>& v) {
    int count = 0;
    std::size_t i = 1;
    while (i + 1 < v.size()) {
        if (v[i] > v[i - 1]) {
            std::size_t j = i;
            while (j + 1 < v.size() && v[j + 1] == v[i]) ++j;
            if (j + 1 < v.size() && v[j + 1] < v[i]) ++count;
            i = j + 1;
        } else {
            ++i;
        }
    }
    return count;
}

std::vector<double> local_maxima_positions(const std::vector<double>& x,
                                           const std::vector<double>& v) {
    std::vector<double> out;
    for (std::size_t i = 1; i + 1 < v.size(); ++i) {
        if (!(v[i] > v[i - 1] && v[i] >= v[i + 1])) continue;
        const double d1 = v[i] - v[i - 1], d2 = v[i + 1] - v[i];
        const double curv = d2 - d1;
        double shift = curv < 0.0 ? 0.5 * (d1 + d2) / -curv : 0.0;
        shift = std::clamp(shift, -0.5, 0.5);
        const double h = shift >= 0.0 ? x[i + 1] - x[i] : x[i] - x[i - 1];
        out.push_back(x[i] + shift * h);
    }
    return out;
}

std::vector<double> derivative(const std::vector<double>& x, const std::vector<double>& v) {
    const std::size_t n = v.size();
    std::vector<double> d(n, 0.0);
    if (n < 2) return d;
    d[0] = (v[1] - v[0]) / (x[1] - x[0]);
    d[n - 1] = (v[n - 1] - v[n - 2]) / (x[n - 1] - x[n - 2]);
    for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (v[i + 1] - v[i - 1]) / (x[i + 1] - x[i - 1]);
    return d;
}

double trapezoid(const std::vector<double>& x, const std::vector<double>& v) {
    double s = 0.0;
    for (std::size_t i = 1; i < x.size(); ++i) s += 0.5 * (x[i] - x[i - 1]) * (v[i] + v[i - 1]);
    return s;
}

// --- observables ---------------------------------------------------------------

output::ScanResult photodetachment_cross_section(const PhotodetachmentPreset& p,
                                                 const std::vector<double>& energies) {
    p.validate();
    const PhysicalSystem sys = p.system();
    const sources::PointSource src{{1.0, 0.0}};
    output::ScanResult r;
    r.x_label = "E_eV";
    r.y_label = "J_per_s";
    r.x.resize(energies.size());
    r.y.resize(energies.size());
    parallel::for_each_index(energies.size(), [&](std::size_t i) {
        r.x[i] = joule_to_energy(energies[i], EnergyUnit::ElectronVolt);
        r.y[i] = p.strength2 * sources::total_current_point(sys, src, energies[i]);
    });
    r.metadata = photodetachment_metadata(p);
    r.metadata.emplace_back("observable", "total current of a point source, J(E) |C|^2 scaled");
    if (!energies.empty()) {
        r.metadata.emplace_back("epsilon_range",
                                format_number(sys.scale_energy(energies.front()).epsilon) + " .. " +
                                    format_number(sys.scale_energy(energies.back()).epsilon));
    }
    return r;
}

std::vector<double> radial_profile(const PhysicalSystem& sys, const sources::SourceModel& model,
                                   double energy, double z, const std::vector<double>& radii) {
    std::vector<double> out(radii.size());
    parallel::for_each_index(radii.size(), [&](std::size_t i) {
        const Vec3 r{radii[i], 0.0, z};
        if (const auto* p = std::get_if<sources::PointSource>(&model)) {
            out[i] = sources::current_density_point(sys, *p, r, energy);
        } else {
            out[i] = sources::current_density_gauss(sys, std::get<sources::GaussianSource>(model),
                                                    r, energy);
        }
    });
    return out;
}

output::RasterImage detector_image(const PhysicalSystem& sys, const sources::SourceModel& model,
                                   double energy, double z, double half_width, int resolution) {
    if (resolution <= 0) throw DomainError("detector_image: resolution must be positive");
    if (!(half_width > 0.0)) throw DomainError("detector_image: half width must be positive");
    if (!(z > 0.0)) throw PreconditionError("detector_image: detector must lie downstream (z > 0)");

    const std::size_t n_r = std::max<std::size_t>(4000, 8 * static_cast<std::size_t>(resolution));
    const std::vector<double> radii = linspace(0.0, half_width * std::sqrt(2.0), n_r);
    const std::vector<double> profile = radial_profile(sys, model, energy, z, radii);

    output::RasterImage img;
    img.width = img.height = resolution;
    img.x_min = img.y_min = -half_width;
    img.x_max = img.y_max = half_width;
    img.values.resize(static_cast<std::size_t>(resolution) * resolution);
    const double pixel = 2.0 * half_width / resolution;
    for (int row = 0; row < resolution; ++row) {
        const double y = half_width - (row + 0.5) * pixel;
        for (int col = 0; col < resolution; ++col) {
            const double x = -half_width + (col + 0.5) * pixel;
            const double v = interpolate(radii, profile, std::hypot(x, y));
            img.values[static_cast<std::size_t>(row) * resolution + col] = std::max(v, 0.0);
        }
    }
    add_system(img.metadata, sys);
    img.metadata.emplace_back("energy_J", format_number(energy));
    img.metadata.emplace_back("epsilon", format_number(sys.scale_energy(energy).epsilon));
    img.metadata.emplace_back("z_m", format_number(z));
    img.metadata.emplace_back("zeta", format_number(sys.scale_length(z)));
    img.metadata.emplace_back("observable", "j_z per unit source strength, 1/(m^2 s)");
    if (const auto* g = std::get_if<sources::GaussianSource>(&model)) {
        img.metadata.emplace_back("width_m", format_number(g->width));
        img.metadata.emplace_back("alpha", format_number(sys.scale_length(g->width)));
        img.metadata.emplace_back("omega_rad_per_s", format_number(g->omega));
    }
    return img;
}

output::RasterImage detector_image(const PhotodetachmentPreset& p, int resolution) {
    p.validate();
    auto img = detector_image(p.system(), sources::PointSource{{1.0, 0.0}}, p.energy, p.detector_z,
                              p.image_half_width, resolution);
    for (double& v : img.values) v *= p.strength2;
    img.metadata.insert(img.metadata.begin(), {"species", p.species});
    img.metadata.emplace_back("strength2", format_number(p.strength2));
    return img;
}

output::RasterImage detector_image(const AtomLaserPreset& p, int resolution) {
    p.validate();
    auto img = detector_image(p.system(), p.source(), p.energy(p.nu), p.z, p.profile_half_width,
                              resolution);
    img.metadata.emplace_back("detuning_Hz", format_number(p.nu));
    return img;
}

output::ScanResult DepletionCurve::to_scan(const AtomLaserPreset& p) const {
    output::ScanResult r;
    r.x_label = "nu_Hz";
    r.y_label = p.n0 == 1.0 ? "remaining_fraction" : "remaining_atoms";
    r.x = detuning;
    r.y = remaining;
    r.extra.push_back({"J_per_s", current});
    r.metadata = atom_metadata(p, p.width);
    r.metadata.emplace_back("time_s", format_number(p.time));
    r.metadata.emplace_back("n0", format_number(p.n0));
    return r;
}

DepletionCurve atom_laser_depletion(const AtomLaserPreset& p, const std::vector<double>& detunings) {
    p.validate();
    const PhysicalSystem sys = p.system();
    const sources::GaussianSource src = p.source();
    DepletionCurve c;
    c.detuning = detunings;
    c.current.resize(detunings.size());
    c.remaining.resize(detunings.size());
    parallel::for_each_index(detunings.size(), [&](std::size_t i) {
        const double j = sources::total_current_gauss(sys, src, p.energy(detunings[i]));
        c.current[i] = j;
        c.remaining[i] = p.n0 * std::exp(-j * p.time);
    });
    return c;
}

output::ScanResult lateral_profile(const PhysicalSystem& sys, const sources::GaussianSource& src,
                                   double energy, double z, double half_width, std::size_t n) {
    const std::vector<double> x = linspace(-half_width, half_width, n);
    std::vector<double> r(n);
    for (std::size_t i = 0; i < n; ++i) r[i] = std::fabs(x[i]);
    output::ScanResult out;
    out.x_label = "x_m";
    out.y_label = "j_z_per_m2_s";
    out.x = x;
    out.y = radial_profile(sys, src, energy, z, r);
    add_system(out.metadata, sys);
    out.metadata.emplace_back("width_m", format_number(src.width));
    out.metadata.emplace_back("alpha", format_number(sys.scale_length(src.width)));
    out.metadata.emplace_back("omega_rad_per_s", format_number(src.omega));
    out.metadata.emplace_back("energy_J", format_number(energy));
    out.metadata.emplace_back("z_m", format_number(z));
    return out;
}

std::vector<output::ScanResult> beam_profile_family(const AtomLaserPreset& p,
                                                    const std::vector<double>& widths,
                                                    std::size_t n) {
    p.validate();
    const PhysicalSystem sys = p.system();
    std::vector<output::ScanResult> out;
    for (double a : widths) {
        auto prof = lateral_profile(sys, sources::make_gaussian(a, p.omega), p.energy(p.nu), p.z,
                                    p.profile_half_width, n);
        prof.metadata.emplace_back("detuning_Hz", format_number(p.nu));
        out.push_back(std::move(prof));
    }
    return out;
}

std::vector<TransitionCurve> current_transition_scan(const AtomLaserPreset& p,
                                                     const std::vector<double>& widths,
                                                     const std::vector<double>& detunings) {
    p.validate();
    const PhysicalSystem sys = p.system();
    std::vector<TransitionCurve> out;
    for (double a : widths) {
        const auto src = sources::make_gaussian(a, p.omega);
        TransitionCurve c;
        c.width = a;
        std::vector<double> exact(detunings.size()), slicing(detunings.size());
        parallel::for_each_index(detunings.size(), [&](std::size_t i) {
            const double e = p.energy(detunings[i]);
            exact[i] = sources::total_current_gauss(sys, src, e);
            slicing[i] = sources::total_current_slicing(sys, src, e);
        });
        const double peak = *std::max_element(exact.begin(), exact.end());
        double dev = 0.0;
        for (std::size_t i = 0; i < exact.size(); ++i) dev = std::max(dev, std::fabs(exact[i] - slicing[i]));
        c.max_deviation = dev / peak;
        c.area_exact = trapezoid(detunings, exact);
        c.area_slicing = trapezoid(detunings, slicing);
        c.oscillation_maxima = count_local_maxima(derivative(detunings, exact));
        c.peak_exact = detunings[static_cast<std::size_t>(
            std::max_element(exact.begin(), exact.end()) - exact.begin())];
        c.peak_slicing = detunings[static_cast<std::size_t>(
            std::max_element(slicing.begin(), slicing.end()) - slicing.begin())];

        for (auto* s : {&c.exact, &c.slicing}) {
            s->x_label = "nu_Hz";
            s->x = detunings;
            s->metadata = atom_metadata(p, a);
        }
        c.exact.y_label = "J_exact_per_s";
        c.exact.y = std::move(exact);
        c.slicing.y_label = "J_slicing_per_s";
        c.slicing.y = std::move(slicing);
        out.push_back(std::move(c));
    }
    return out;
}

double area_spread(const std::vector<TransitionCurve>& curves) {
    double spread = 0.0;
    for (const auto& a : curves) {
        for (const auto& b : curves) {
            spread = std::max(spread, std::fabs(a.area_exact - b.area_exact) / std::fabs(b.area_exact));
        }
    }
    return spread;
}

}  // namespace qsrc::scenarios
