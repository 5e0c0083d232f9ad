#include "qsrc/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <regex>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "qsrc/errors.hpp"
#include "qsrc/green.hpp"
#include "qsrc/output.hpp"
#include "qsrc/parallel.hpp"
#include "qsrc/scenarios.hpp"

namespace qsrc::cli {

namespace fs = std::filesystem;
using output::format_number;

// --- quantities --------------------------------------------------------------

namespace {

const std::map<std::string, double>& unit_table(Dimension dim) {
    static const std::map<std::string, double> energy{
        {"J", 1.0},
        {"eV", constants::elementary_charge},
        {"meV", 1e-3 * constants::elementary_charge},
        {"ueV", 1e-6 * constants::elementary_charge},
        {"neV", 1e-9 * constants::elementary_charge},
    };
    static const std::map<std::string, double> frequency{
        {"mHz", 1e-3}, {"Hz", 1.0}, {"kHz", 1e3}, {"MHz", 1e6}};
    static const std::map<std::string, double> length{
        {"nm", 1e-9}, {"um", 1e-6}, {"mm", 1e-3}, {"cm", 1e-2}, {"m", 1.0}};
    static const std::map<std::string, double> time{{"us", 1e-6}, {"ms", 1e-3}, {"s", 1.0}};
    static const std::map<std::string, double> force{
        {"N", 1.0}, {"eV/m", constants::elementary_charge}, {"V/m", constants::elementary_charge}};
    static const std::map<std::string, double> mass{{"kg", 1.0}, {"u", constants::atomic_mass_unit}};
    static const std::map<std::string, double> accel{{"m/s2", 1.0}, {"m/s^2", 1.0}};
    switch (dim) {
        case Dimension::Energy: return energy;
        case Dimension::Frequency: return frequency;
        case Dimension::Length: return length;
        case Dimension::Time: return time;
        case Dimension::Force: return force;
        case Dimension::Mass: return mass;
        case Dimension::Acceleration: return accel;
    }
    return energy;
}

const char* dimension_name(Dimension dim) {
    switch (dim) {
        case Dimension::Energy: return "energy";
        case Dimension::Frequency: return "frequency";
        case Dimension::Length: return "length";
        case Dimension::Time: return "time";
        case Dimension::Force: return "force";
        case Dimension::Mass: return "mass";
        case Dimension::Acceleration: return "acceleration";
    }
    return "quantity";
}

}  // namespace

double parse_quantity(const std::string& text, Dimension dim) {
    static const std::regex re(R"(^\s*([+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)\s*([A-Za-z/^0-9]*)\s*$)");
    std::smatch m;
    if (!std::regex_match(text, m, re)) {
        throw UsageError("'" + text + "' is not a " + std::string(dimension_name(dim)) +
                         " (expected <number><unit>)");
    }
    const std::string unit = m[2].str();
    const auto& table = unit_table(dim);
    std::string known;
    for (const auto& [k, v] : table) known += (known.empty() ? "" : ", ") + k;
    if (unit.empty()) {
        throw UsageError("'" + text + "': missing unit for " + dimension_name(dim) + " (one of " +
                         known + ")");
    }
    const auto it = table.find(unit);
    if (it == table.end()) {
        throw UsageError("'" + text + "': unknown " + std::string(dimension_name(dim)) +
                         " unit '" + unit + "' (one of " + known + ")");
    }
    const double v = std::strtod(m[1].str().c_str(), nullptr) * it->second;
    if (!std::isfinite(v)) throw UsageError("'" + text + "' is out of range");
    return v;
}

std::vector<double> parse_quantity_list(const std::string& text, Dimension dim) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_quantity(item, dim));
    if (out.empty()) throw UsageError("empty list");
    return out;
}

namespace {

// --- options -------------------------------------------------------------------

struct Options {
    std::string preset, output, format;
    std::string field, mass, g, energy, emin, emax, z, half_width, width, omega;
    std::string numin, numax, nu, time, widths, overlay, suite = "all";
    double strength2 = 1.0;
    double n0 = 1.0;
    int n = 0;
    bool flip = false;
};

std::optional<double> quantity(const std::string& s, Dimension d) {
    if (s.empty()) return std::nullopt;
    return parse_quantity(s, d);
}

bool is_photodetachment(const std::string& name) { return name == "s-minus" || name == "o-minus"; }
bool is_atom(const std::string& name) { return name == "rb-atom-laser" || name == "rb-beam"; }

scenarios::PhotodetachmentPreset photodetachment_preset(const Options& o) {
    auto p = o.preset == "s-minus" ? scenarios::s_minus() : scenarios::o_minus();
    if (auto f = quantity(o.field, Dimension::Force)) p.force_ev_per_m = *f / constants::elementary_charge;
    if (auto m = quantity(o.mass, Dimension::Mass)) p.mass = *m;
    if (auto e = quantity(o.emin, Dimension::Energy)) p.e_min = *e;
    if (auto e = quantity(o.emax, Dimension::Energy)) p.e_max = *e;
    if (auto e = quantity(o.energy, Dimension::Energy)) p.energy = *e;
    if (auto z = quantity(o.z, Dimension::Length)) p.detector_z = *z;
    if (auto h = quantity(o.half_width, Dimension::Length)) p.image_half_width = *h;
    p.strength2 = o.strength2;
    try {
        p.validate();
    } catch (const DomainError& e) {
        throw UsageError(e.what());
    }
    return p;
}

scenarios::AtomLaserPreset atom_preset(const Options& o) {
    auto p = o.preset == "rb-beam" ? scenarios::rb_beam_study() : scenarios::rb_atom_laser();
    if (auto m = quantity(o.mass, Dimension::Mass)) p.mass = *m;
    if (auto g = quantity(o.g, Dimension::Acceleration)) p.g = *g;
    if (auto a = quantity(o.width, Dimension::Length)) p.width = *a;
    if (auto w = quantity(o.omega, Dimension::Frequency)) p.omega = 2.0 * constants::pi * *w;
    if (auto v = quantity(o.numin, Dimension::Frequency)) p.nu_min = *v;
    if (auto v = quantity(o.numax, Dimension::Frequency)) p.nu_max = *v;
    if (auto v = quantity(o.nu, Dimension::Frequency)) p.nu = *v;
    if (auto t = quantity(o.time, Dimension::Time)) p.time = *t;
    if (auto z = quantity(o.z, Dimension::Length)) p.z = *z;
    if (auto h = quantity(o.half_width, Dimension::Length)) p.profile_half_width = *h;
    if (!o.widths.empty()) p.widths = parse_quantity_list(o.widths, Dimension::Length);
    p.n0 = o.n0;
    p.flip_detuning = o.flip;
    try {
        p.validate();
    } catch (const DomainError& e) {
        throw UsageError(e.what());
    }
    return p;
}

std::vector<double> grid(double lo, double hi, int n) {
    if (n < 2) throw UsageError("grid count must be at least 2");
    if (!(hi > lo)) throw UsageError("grid minimum must be below maximum");
    return scenarios::linspace(lo, hi, static_cast<std::size_t>(n));
}

fs::path resolve_output(const std::string& given, const std::string& fallback) {
    fs::path p = given.empty() ? fs::path(fallback) : fs::path(given);
    if (p.is_relative()) {
        if (const char* dir = std::getenv(output_dir_env); dir && *dir) p = fs::path(dir) / p;
    }
    return p;
}

std::string format_or(const Options& o, const std::string& fallback) {
    return o.format.empty() ? fallback : o.format;
}

void write_scan(const output::ScanResult& r, const fs::path& path, const std::string& format) {
    if (format == "csv") {
        output::write_csv(r, path);
    } else if (format == "json") {
        output::write_json(r, path);
    } else {
        throw UsageError("format '" + format + "' does not apply to scan output (use csv or json)");
    }
}

std::string join_args(const std::vector<std::string>& args) {
    std::string s;
    for (std::size_t i = 1; i < args.size(); ++i) s += (i > 1 ? " " : "") + args[i];
    return s;
}

std::string short_num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

// --- subcommands ---------------------------------------------------------------

struct Context {
    Options opt;
    std::string command_line;
    std::ostream& out;
};

int cmd_total_current(Context& c) {
    const Options& o = c.opt;
    const std::string preset = o.preset.empty() ? "s-minus" : o.preset;
    Options po = o;
    po.preset = preset;
    output::ScanResult r;
    std::string summary;
    if (is_photodetachment(preset)) {
        const auto p = photodetachment_preset(po);
        r = scenarios::photodetachment_cross_section(p, grid(p.e_min, p.e_max, o.n ? o.n : 1000));
        const auto peak = std::max_element(r.y.begin(), r.y.end()) - r.y.begin();
        summary = p.species + ": " + std::to_string(r.x.size()) + " points, peak J = " +
                  short_num(r.y[peak]) + " 1/s at E = " + short_num(r.x[peak]) + " eV";
    } else {
        const auto p = atom_preset(po);
        const auto nus = grid(p.nu_min, p.nu_max, o.n ? o.n : 601);
        const auto curve = scenarios::atom_laser_depletion(p, nus);
        r.x_label = "nu_Hz";
        r.y_label = "J_per_s";
        r.x = curve.detuning;
        r.y = curve.current;
        r.metadata = curve.to_scan(p).metadata;
        const auto sr = sources::sum_rule_check(p.system(), p.source());
        r.metadata.emplace_back("sum_rule_ratio", format_number(sr.ratio()));
        const auto peak = std::max_element(r.y.begin(), r.y.end()) - r.y.begin();
        summary = "Rb-87 a=" + short_num(p.width * 1e6) + "um: peak J = " + short_num(r.y[peak]) +
                  " 1/s at nu = " + short_num(r.x[peak]) + " Hz, sum-rule ratio = " +
                  short_num(sr.ratio());
    }
    r.metadata.emplace_back("preset", preset);
    r.metadata.emplace_back("command", c.command_line);
    const auto path = resolve_output(o.output, "total-current." + format_or(o, "csv"));
    write_scan(r, path, format_or(o, "csv"));
    c.out << "total-current: " << summary << " -> " << path.string() << '\n';
    return 0;
}

int cmd_density_profile(Context& c) {
    const Options& o = c.opt;
    const std::string preset = o.preset.empty() ? "o-minus" : o.preset;
    Options po = o;
    po.preset = preset;
    output::ScanResult r;
    const int n = o.n ? o.n : 1001;
    if (n < 2) throw UsageError("grid count must be at least 2");
    if (is_photodetachment(preset)) {
        const auto p = photodetachment_preset(po);
        const auto sys = p.system();
        r.x = grid(-p.image_half_width, p.image_half_width, n);
        std::vector<double> radii(r.x.size());
        for (std::size_t i = 0; i < radii.size(); ++i) radii[i] = std::fabs(r.x[i]);
        r.y = scenarios::radial_profile(sys, sources::PointSource{}, p.energy, p.detector_z, radii);
        for (double& v : r.y) v *= p.strength2;
        r.x_label = "x_m";
        r.y_label = "j_z_per_m2_s";
        r.metadata.emplace_back("species", p.species);
        r.metadata.emplace_back("beta_per_J", format_number(sys.beta()));
        r.metadata.emplace_back("beta_F_per_m", format_number(sys.inverse_length()));
        r.metadata.emplace_back("energy_J", format_number(p.energy));
        r.metadata.emplace_back("epsilon", format_number(sys.scale_energy(p.energy).epsilon));
        r.metadata.emplace_back("z_m", format_number(p.detector_z));
        r.metadata.emplace_back("zeta", format_number(sys.scale_length(p.detector_z)));
        r.metadata.emplace_back("strength2", format_number(p.strength2));
    } else {
        const auto p = atom_preset(po);
        r = scenarios::lateral_profile(p.system(), p.source(), p.energy(p.nu), p.z,
                                       p.profile_half_width, static_cast<std::size_t>(n));
        r.metadata.emplace_back("detuning_Hz", format_number(p.nu));
    }
    r.metadata.emplace_back("preset", preset);
    r.metadata.emplace_back("command", c.command_line);
    const auto path = resolve_output(o.output, "density-profile." + format_or(o, "csv"));
    write_scan(r, path, format_or(o, "csv"));
    c.out << "density-profile: " << preset << ", peak j_z = " << short_num(r.peak())
          << " 1/(m^2 s), " << scenarios::count_local_maxima(r.y) << " local maxima -> "
          << path.string() << '\n';
    return 0;
}

int cmd_detector_image(Context& c) {
    const Options& o = c.opt;
    const std::string preset = o.preset.empty() ? "o-minus" : o.preset;
    Options po = o;
    po.preset = preset;
    const int n = o.n ? o.n : 512;
    if (n <= 0) throw UsageError("resolution must be positive");
    const std::string format = format_or(o, "pgm");
    if (format != "pgm") throw UsageError("detector-image writes pgm only");
    output::RasterImage img;
    if (is_photodetachment(preset)) {
        img = scenarios::detector_image(photodetachment_preset(po), n);
    } else {
        img = scenarios::detector_image(atom_preset(po), n);
    }
    img.metadata.emplace_back("preset", preset);
    img.metadata.emplace_back("command", c.command_line);
    const auto path = resolve_output(o.output, "detector-image.pgm");
    const auto side = output::write_pgm(img, path);
    // Bright rings along the central row, right half.
    const std::size_t row = static_cast<std::size_t>(n / 2);
    std::vector<double> half(img.values.begin() + row * n + n / 2, img.values.begin() + (row + 1) * n);
    c.out << "detector-image: " << preset << ", " << n << "x" << n << ", peak j_z = "
          << short_num(img.max_value()) << " 1/(m^2 s), " << scenarios::count_local_maxima(half)
          << " bright rings -> " << path.string() << " (+ " << side.filename().string() << ")\n";
    return 0;
}

int cmd_atom_laser(Context& c) {
    const Options& o = c.opt;
    const std::string preset = o.preset.empty() ? "rb-atom-laser" : o.preset;
    if (!is_atom(preset)) throw UsageError("atom-laser needs an atom-laser preset");
    Options po = o;
    po.preset = preset;
    const auto p = atom_preset(po);
    const auto nus = grid(p.nu_min, p.nu_max, o.n ? o.n : 601);
    const auto curve = scenarios::atom_laser_depletion(p, nus);
    auto r = curve.to_scan(p);

    const auto sys = p.system();
    const auto src = p.source();
    std::vector<double> slicing(nus.size());
    for (std::size_t i = 0; i < nus.size(); ++i) {
        slicing[i] = sources::total_current_slicing(sys, src, p.energy(nus[i]));
    }
    const auto imin = std::min_element(curve.remaining.begin(), curve.remaining.end()) - curve.remaining.begin();
    const auto islice = std::max_element(slicing.begin(), slicing.end()) - slicing.begin();
    r.metadata.emplace_back("exact_peak_detuning_Hz", format_number(nus[imin]));
    r.metadata.emplace_back("slicing_peak_detuning_Hz", format_number(nus[islice]));
    r.metadata.emplace_back("preset", preset);
    r.metadata.emplace_back("command", c.command_line);
    const std::string format = format_or(o, "csv");
    const auto path = resolve_output(o.output, "atom-laser." + format);
    write_scan(r, path, format);

    std::string overlay_note;
    if (!o.overlay.empty()) {
        auto data = output::read_csv(o.overlay);
        std::vector<std::size_t> order(data.x.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](auto a, auto b) { return data.x[a] < data.x[b]; });
        output::ScanResult ov;
        ov.x_label = "nu_Hz";
        ov.y_label = "measured";
        std::vector<double> model;
        for (auto i : order) {
            ov.x.push_back(data.x[i]);
            ov.y.push_back(data.y[i]);
            model.push_back(p.n0 * std::exp(-sources::total_current_gauss(sys, src, p.energy(data.x[i])) * p.time));
        }
        ov.extra.push_back({"model", model});
        ov.metadata = r.metadata;
        ov.metadata.emplace_back("overlay_source", o.overlay);
        auto ov_path = path;
        ov_path.replace_extension(".overlay.csv");
        output::write_csv(ov, ov_path);
        overlay_note = " (+ " + ov_path.filename().string() + ")";
    }
    c.out << "atom-laser: minimum remaining " << (p.n0 == 1.0 ? "fraction " : "atoms ")
          << short_num(curve.remaining[imin]) << " at nu = " << short_num(nus[imin])
          << " Hz (slicing peak at " << short_num(nus[islice]) << " Hz) -> " << path.string()
          << overlay_note << '\n';
    return 0;
}

int cmd_transition(Context& c) {
    const Options& o = c.opt;
    const std::string preset = o.preset.empty() ? "rb-beam" : o.preset;
    if (!is_atom(preset)) throw UsageError("transition needs an atom-laser preset");
    Options po = o;
    po.preset = preset;
    const auto p = atom_preset(po);
    const auto nus = grid(p.nu_min, p.nu_max, o.n ? o.n : 2001);
    const auto curves = scenarios::current_transition_scan(p, p.widths, nus);

    output::ScanResult r;
    r.x_label = "nu_Hz";
    r.x = nus;
    r.metadata = curves.front().exact.metadata;
    std::string details;
    for (std::size_t k = 0; k < curves.size(); ++k) {
        const auto& cv = curves[k];
        const std::string tag = "a=" + short_num(cv.width * 1e6) + "um";
        if (k == 0) {
            r.y_label = "J_exact_" + tag;
            r.y = cv.exact.y;
        } else {
            r.extra.push_back({"J_exact_" + tag, cv.exact.y});
        }
        r.extra.push_back({"J_slicing_" + tag, cv.slicing.y});
        r.metadata.emplace_back(tag, "alpha=" + format_number(p.system().scale_length(cv.width)) +
                                         " max_deviation=" + format_number(cv.max_deviation) +
                                         " oscillation_maxima=" + std::to_string(cv.oscillation_maxima) +
                                         " area_ratio=" + format_number(cv.area_exact / cv.area_slicing));
        details += " " + tag + ":dev=" + short_num(cv.max_deviation);
    }
    const double spread = scenarios::area_spread(curves);
    r.metadata.emplace_back("area_spread", format_number(spread));
    r.metadata.emplace_back("preset", preset);
    r.metadata.emplace_back("command", c.command_line);
    const std::string format = format_or(o, "csv");
    const auto path = resolve_output(o.output, "transition." + format);
    write_scan(r, path, format);
    c.out << "transition: area spread " << short_num(spread) << ";" << details << " -> "
          << path.string() << '\n';
    return 0;
}

// --- validate ----------------------------------------------------------------

struct Check {
    std::string name;
    bool pass;
    std::string detail;
};

std::vector<Check> check_sum_rule() {
    std::vector<Check> out;
    const auto p = scenarios::rb_beam_study();
    for (double a : {0.2e-6, 0.5e-6, 1.0e-6, 2.8e-6}) {
        const auto sr = sources::sum_rule_check(p.system(), sources::make_gaussian(a, p.omega));
        out.push_back({"sum-rule a=" + short_num(a * 1e6) + "um", std::fabs(sr.ratio() - 1.0) <= 5e-3,
                       "ratio=" + format_number(sr.ratio())});
    }
    return out;
}

std::vector<Check> check_oracle() {
    std::vector<Check> out;
    const auto sys = atom_under_gravity(constants::rb87_mass);
    std::uint64_t state = 0x9e3779b97f4a7c15ull;
    auto uniform = [&](double lo, double hi) {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        return lo + (hi - lo) * static_cast<double>(state >> 11) * 0x1.0p-53;
    };
    double worst = 0.0;
    for (int i = 0; i < 10; ++i) {
        const double rho = uniform(0.1, 10.0);
        const double ct = uniform(-1.0, 1.0), phi = uniform(0.0, 2.0 * constants::pi);
        const double st = std::sqrt(1.0 - ct * ct);
        const double zs = uniform(-3.0, 3.0);
        const ScaledPoint src = make_scaled_point(0.0, 0.0, zs);
        const ScaledPoint r = make_scaled_point(rho * st * std::cos(phi), rho * st * std::sin(phi), zs + rho * ct);
        const double eps = r.zeta + src.zeta - uniform(-10.0, 10.0);
        const Vec3 rs = sys.unscale_point(r), ss = sys.unscale_point(src);
        const double e = sys.unscale_energy({eps});
        const auto closed = green::green_closed(sys, rs, ss, e).scaled;
        const auto oracle = green::green_oracle(sys, rs, ss, e).value.scaled;
        worst = std::max(worst, std::abs(closed - oracle) / std::abs(oracle));
    }
    out.push_back({"oracle 10 points", worst <= 1e-6, "worst relative=" + format_number(worst)});
    return out;
}

std::vector<Check> check_flux() {
    std::vector<Check> out;
    const auto o = scenarios::o_minus();
    for (double z : {o.detector_z, 0.25}) {
        const auto sys = o.system();
        const double j = sources::total_current_point(sys, {}, o.energy);
        const double f = sources::detector_plane_flux(sys, sources::PointSource{}, o.energy, z).value;
        out.push_back({"flux O- z=" + short_num(z) + "m", std::fabs(f / j - 1.0) <= 1e-3,
                       "relative=" + format_number(f / j - 1.0)});
    }
    auto p = scenarios::rb_beam_study();
    p.width = 0.4e-6;
    for (double z : {1e-3, 2e-3}) {
        const double e = p.energy(p.nu);
        const double j = sources::total_current_gauss(p.system(), p.source(), e);
        const double f = sources::detector_plane_flux(p.system(), p.source(), e, z).value;
        out.push_back({"flux Rb a=0.4um z=" + short_num(z * 1e3) + "mm", std::fabs(f / j - 1.0) <= 1e-3,
                       "relative=" + format_number(f / j - 1.0)});
    }
    return out;
}

int cmd_validate(Context& c) {
    const std::string& suite = c.opt.suite;
    std::vector<Check> checks;
    const bool all = suite == "all";
    if (!all && suite != "sum-rule" && suite != "oracle" && suite != "flux") {
        throw UsageError("unknown suite '" + suite + "' (all, sum-rule, oracle, flux)");
    }
    auto append = [&](std::vector<Check> v) { checks.insert(checks.end(), v.begin(), v.end()); };
    if (all || suite == "sum-rule") append(check_sum_rule());
    if (all || suite == "oracle") append(check_oracle());
    if (all || suite == "flux") append(check_flux());
    int failed = 0;
    for (const auto& ch : checks) {
        c.out << (ch.pass ? "PASS " : "FAIL ") << ch.name << "  " << ch.detail << '\n';
        failed += ch.pass ? 0 : 1;
    }
    c.out << "validate: " << checks.size() - failed << "/" << checks.size() << " checks passed\n";
    return failed == 0 ? 0 : 1;
}

// --- config ------------------------------------------------------------------

const std::vector<std::string> subcommands{"total-current", "density-profile", "detector-image",
                                           "atom-laser",    "transition",      "validate"};
const std::vector<std::string> global_keys{"threads"};

// Splices the keys of a JSON config into the argument list as flags, ahead
// of the user's own flags so that the command line wins.
std::vector<std::string> expand_config(const std::vector<std::string>& args) {
    std::vector<std::string> rest;
    std::optional<std::string> config;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config") {
            if (i + 1 >= args.size()) throw UsageError("--config needs a file");
            config = args[++i];
        } else if (args[i].rfind("--config=", 0) == 0) {
            config = args[i].substr(9);
        } else {
            rest.push_back(args[i]);
        }
    }
    if (!config) return rest;

    std::ifstream f(*config);
    if (!f) throw IoError("cannot read config '" + *config + "'");
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(f);
    } catch (const nlohmann::json::exception& e) {
        throw UsageError("config '" + *config + "': " + e.what());
    }
    if (!j.is_object()) throw UsageError("config '" + *config + "' must hold a JSON object");

    std::vector<std::string> globals, locals;
    std::optional<std::string> command;
    for (const auto& [key, value] : j.items()) {
        if (key == "command") {
            if (!value.is_string()) throw UsageError("config: 'command' must be a string");
            command = value.get<std::string>();
            continue;
        }
        auto& target = std::find(global_keys.begin(), global_keys.end(), key) != global_keys.end() ? globals : locals;
        const std::string flag = "--" + key;
        if (value.is_boolean()) {
            if (value.get<bool>()) target.push_back(flag);
        } else if (value.is_string()) {
            target.push_back(flag);
            target.push_back(value.get<std::string>());
        } else if (value.is_number_integer()) {
            target.push_back(flag);
            target.push_back(std::to_string(value.get<long long>()));
        } else if (value.is_number()) {
            target.push_back(flag);
            target.push_back(format_number(value.get<double>()));
        } else if (value.is_array()) {
            std::string joined;
            for (const auto& item : value) {
                if (!item.is_string()) throw UsageError("config: list '" + key + "' must hold strings");
                joined += (joined.empty() ? "" : ",") + item.get<std::string>();
            }
            target.push_back(flag);
            target.push_back(joined);
        } else {
            throw UsageError("config: unsupported value for '" + key + "'");
        }
    }

    std::vector<std::string> out;
    out.push_back(rest.empty() ? "qsrc" : rest.front());
    std::size_t sub = rest.size();
    for (std::size_t i = 1; i < rest.size(); ++i) {
        if (std::find(subcommands.begin(), subcommands.end(), rest[i]) != subcommands.end()) {
            sub = i;
            break;
        }
    }
    for (const auto& g : globals) out.push_back(g);
    for (std::size_t i = 1; i < std::min(sub, rest.size()); ++i) out.push_back(rest[i]);
    if (sub < rest.size()) {
        out.push_back(rest[sub]);
    } else if (command) {
        out.push_back(*command);
    } else {
        throw UsageError("config: no subcommand given");
    }
    for (const auto& l : locals) out.push_back(l);
    for (std::size_t i = sub + 1; i < rest.size(); ++i) out.push_back(rest[i]);
    return out;
}

void add_grid_options(CLI::App* sub, Options& o) {
    sub->add_option("-n,--n", o.n, "grid count (pixels per side for images)");
}

void add_output_options(CLI::App* sub, Options& o, const std::string& formats) {
    sub->add_option("-o,--output", o.output, std::string("output file (relative paths go under $") + output_dir_env + ")");
    sub->add_option("--format", o.format, "output format")->check(CLI::IsMember(
        [&] {
            std::vector<std::string> v;
            std::stringstream ss(formats);
            std::string s;
            while (std::getline(ss, s, ',')) v.push_back(s);
            return v;
        }()));
}

void add_photo_options(CLI::App* sub, Options& o) {
    sub->add_option("--field", o.field, "force, e.g. 423eV/m");
    sub->add_option("--emin", o.emin, "scan start energy, e.g. -50ueV");
    sub->add_option("--emax", o.emax, "scan end energy");
    sub->add_option("--energy", o.energy, "fixed energy for images and profiles");
    sub->add_option("--strength2", o.strength2, "|C|^2 scale factor")->check(CLI::NonNegativeNumber);
}

void add_atom_options(CLI::App* sub, Options& o) {
    sub->add_option("--g", o.g, "gravitational acceleration, e.g. 9.81m/s2");
    sub->add_option("--width", o.width, "condensate width a, e.g. 2.8um");
    sub->add_option("--omega", o.omega, "coupling Omega / 2 pi, e.g. 105.585Hz");
    sub->add_option("--numin", o.numin, "detuning scan start, e.g. -10kHz");
    sub->add_option("--numax", o.numax, "detuning scan end");
    sub->add_option("--nu", o.nu, "detuning for profiles and images");
    sub->add_flag("--flip-detuning", o.flip, "use E = -2 pi hbar nu");
}

void add_geometry_options(CLI::App* sub, Options& o) {
    sub->add_option("--z", o.z, "detector distance, e.g. 1mm");
    sub->add_option("--half-width", o.half_width, "lateral half width of profiles and images");
    sub->add_option("--mass", o.mass, "particle mass, e.g. 86.909u");
}

}  // namespace

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
    std::vector<std::string> args;
    try {
        args = expand_config(raw_args);
    } catch (const UsageError& e) {
        err << "qsrc: " << e.what() << '\n';
        return 2;
    } catch (const IoError& e) {
        err << "qsrc: " << e.what() << '\n';
        return 1;
    }

    CLI::App app{"Quantum sources in a uniform force field"};
    app.name("qsrc");
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app.require_subcommand(1);
    unsigned threads = 0;
    app.add_option("--threads", threads, "cap on worker threads (default: all cores)")->check(CLI::PositiveNumber);
    app.add_option("--config", "JSON file whose keys mirror the long flag names");

    Options o;
    const std::string presets = "s-minus,o-minus,rb-atom-laser,rb-beam";
    auto preset_check = CLI::IsMember({"s-minus", "o-minus", "rb-atom-laser", "rb-beam"});

    auto* tc = app.add_subcommand("total-current", "J(E) scan (photodetachment) or J(nu) scan (atom laser)");
    tc->add_option("--preset", o.preset, presets)->check(preset_check);
    add_photo_options(tc, o);
    add_atom_options(tc, o);
    tc->add_option("--mass", o.mass, "particle mass, e.g. 86.909u");
    add_grid_options(tc, o);
    add_output_options(tc, o, "csv,json");

    auto* dp = app.add_subcommand("density-profile", "lateral current density profile j_z(x, 0, z)");
    dp->add_option("--preset", o.preset, presets)->check(preset_check);
    add_photo_options(dp, o);
    add_atom_options(dp, o);
    add_geometry_options(dp, o);
    add_grid_options(dp, o);
    add_output_options(dp, o, "csv,json");

    auto* di = app.add_subcommand("detector-image", "j_z raster over the detector plane");
    di->add_option("--preset", o.preset, presets)->check(preset_check);
    add_photo_options(di, o);
    add_atom_options(di, o);
    add_geometry_options(di, o);
    add_grid_options(di, o);
    add_output_options(di, o, "pgm");

    auto* al = app.add_subcommand("atom-laser", "remaining atoms after outcoupling for time T");
    al->add_option("--preset", o.preset, "rb-atom-laser,rb-beam")->check(CLI::IsMember({"rb-atom-laser", "rb-beam"}));
    add_atom_options(al, o);
    al->add_option("--mass", o.mass, "atomic mass, e.g. 86.909u");
    al->add_option("--time", o.time, "operation time T, e.g. 20ms");
    al->add_option("--n0", o.n0, "initial atom number (1 reports fractions)")->check(CLI::PositiveNumber);
    al->add_option("--overlay", o.overlay, "CSV of measured (nu_Hz, value) points to compare against")
        ->check(CLI::ExistingFile);
    add_grid_options(al, o);
    add_output_options(al, o, "csv,json");

    auto* tr = app.add_subcommand("transition", "exact vs slicing total current for several widths");
    tr->add_option("--preset", o.preset, "rb-atom-laser,rb-beam")->check(CLI::IsMember({"rb-atom-laser", "rb-beam"}));
    add_atom_options(tr, o);
    tr->add_option("--mass", o.mass, "atomic mass, e.g. 86.909u");
    tr->add_option("--widths", o.widths, "comma-separated widths, e.g. 0.2um,0.4um,0.8um,1.6um");
    add_grid_options(tr, o);
    add_output_options(tr, o, "csv,json");

    auto* va = app.add_subcommand("validate", "sum-rule, oracle-agreement and flux-conservation checks");
    va->add_option("--suite", o.suite, "all, sum-rule, oracle or flux")
        ->check(CLI::IsMember({"all", "sum-rule", "oracle", "flux"}));

    std::vector<std::string> reversed(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    parallel::set_thread_limit(threads);
    Context ctx{o, join_args(args), out};
    try {
        if (*tc) return cmd_total_current(ctx);
        if (*dp) return cmd_density_profile(ctx);
        if (*di) return cmd_detector_image(ctx);
        if (*al) return cmd_atom_laser(ctx);
        if (*tr) return cmd_transition(ctx);
        if (*va) return cmd_validate(ctx);
    } catch (const UsageError& e) {
        err << "qsrc: " << e.what() << '\n';
        return 2;
    } catch (const DomainError& e) {
        err << "qsrc: invalid parameters: " << e.what() << '\n';
        return 2;
    } catch (const PreconditionError& e) {
        err << "qsrc: " << e.what() << '\n';
        return 2;
    } catch (const UnsupportedModelError& e) {
        err << "qsrc: " << e.what() << '\n';
        return 2;
    } catch (const NumericalError& e) {
        err << "qsrc: numerical failure: " << e.what() << " (error estimate "
            << format_number(e.error_estimate()) << ")\n";
        return 1;
    } catch (const std::exception& e) {
        err << "qsrc: " << e.what() << '\n';
        return 1;
    }
    return 2;
}

int run(int argc, char** argv) {
    std::vector<std::string> args(argv, argv + argc);
    return run(args, std::cout, std::cerr);
}

}  // namespace qsrc::cli
