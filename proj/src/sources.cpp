#include "qsrc/sources.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "qsrc/airy.hpp"
#include "qsrc/errors.hpp"
#include "qsrc/green.hpp"
#include "qsrc/quadrature.hpp"

namespace qsrc::sources {

namespace {

constexpr double kPi = 3.14159265358979323846;
using cplx = std::complex<double>;

double pow4(double x) { return (x * x) * (x * x); }

// 2 beta (beta F)^5 / (pi hbar): converts the scaled bracket / rho^3 into j_z
// per unit |C|^2.
double density_prefactor(const PhysicalSystem& sys) {
    const double k = sys.inverse_length();
    return 2.0 * sys.beta() * std::pow(k, 5) / (kPi * sys.hbar());
}

// {zeta Ai'(x)^2 + (zeta (zeta - eps) + rho^2) Ai(x)^2} exp(exponent) / rho^power,
// with Ai values scaled and the Airy decay folded into `exponent` by the caller.
double flux_bracket_density(double zeta, double rho, double eps, const airy::ScaledAiry& a,
                            double exponent, int power) {
    const double q =
        zeta * a.ai_prime * a.ai_prime + (zeta * (zeta - eps) + rho * rho) * a.ai * a.ai;
    return q * std::exp(exponent) / std::pow(rho, power);
}

// 2 log(Lambda / C0) - 4/3 x^{3/2} for x = eps~ + w (w >= 0), without forming
// the large cancelling terms when eps~ > 0.
double gauss_density_exponent(double alpha, double eps, double eps_tilde, double w) {
    const double c = 2.0 * alpha * alpha;
    const double x = eps_tilde + w;
    if (eps_tilde > 0.0) {
        const double s = std::sqrt(eps_tilde);
        const double d = eps / (s + c);  // s - c
        const double f = -(2.0 / 3.0) * d * d * (2.0 * s + c);
        const double sx = std::sqrt(x);
        const double extra = w * (x + sx * s + eps_tilde) / (sx + s);  // x^{3/2} - eps~^{3/2}
        return f - (4.0 / 3.0) * extra;
    }
    const double log_weight2 = 2.0 * c * (eps_tilde - (4.0 / 3.0) * pow4(alpha));
    return log_weight2 - (x > 0.0 ? (4.0 / 3.0) * x * std::sqrt(x) : 0.0);
}

// J / (hbar Omega^2 beta) as a function of the scaled energy.
double gauss_current_scaled(double alpha, double eps) {
    const double eps_tilde = eps + 4.0 * pow4(alpha);
    const airy::ScaledBracket b = airy::flux_bracket(eps_tilde);
    double exponent;
    if (eps_tilde > 0.0) {
        const double c = 2.0 * alpha * alpha;
        const double s = std::sqrt(eps_tilde);
        const double d = eps / (s + c);
        exponent = -(2.0 / 3.0) * d * d * (2.0 * s + c);
    } else {
        exponent = 4.0 * alpha * alpha * (eps_tilde - (4.0 / 3.0) * pow4(alpha));
    }
    if (exponent > 700.0) {
        throw RangeError("total_current_gauss: exponent " + std::to_string(exponent) +
                         " overflows");
    }
    return 64.0 * std::pow(kPi, 1.5) * alpha * alpha * alpha * std::exp(exponent) * b.value;
}

void require_gaussian(const GaussianSource& src) {
    if (!(src.width > 0.0) || !std::isfinite(src.width)) {
        throw DomainError("Gaussian source: width must be positive");
    }
    if (!(src.omega > 0.0) || !std::isfinite(src.omega)) {
        throw DomainError("Gaussian source: omega must be positive");
    }
}

ScaledPoint virtual_source_scaled(double alpha) { return {0.0, 0.0, -2.0 * pow4(alpha), 2.0 * pow4(alpha)}; }

// rho~ - zeta~ without cancellation.
double downstream_excess(double lateral2, double zeta, double rho) {
    return zeta > 0.0 ? lateral2 / (rho + zeta) : rho - zeta;
}

void require_far(const GaussianScaled& g, const char* what) {
    if (g.rho_tilde <= 3.0 * g.alpha) {
        throw PreconditionError(std::string(what) +
                                ": point lies inside the source core (rho~ <= 3 alpha); "
                                "the far-field formula does not apply there");
    }
}

}  // namespace

GaussianSource make_gaussian(double width, double omega) {
    GaussianSource g{width, omega};
    require_gaussian(g);
    return g;
}

double GaussianScaled::lambda() const { return point_strength * std::exp(log_weight); }

GaussianScaled gaussian_scaled(const PhysicalSystem& sys, const GaussianSource& src,
                               const Vec3& r, double energy) {
    require_gaussian(src);
    const ScaledPoint p = sys.scale_point(r);
    GaussianScaled g;
    g.alpha = sys.scale_length(src.width);
    const double a4 = pow4(g.alpha);
    g.zeta_tilde = p.zeta + 2.0 * a4;
    g.epsilon_tilde = sys.scale_energy(energy).epsilon + 4.0 * a4;
    g.lateral2 = p.xi * p.xi + p.nu_y * p.nu_y;
    g.rho_tilde = std::sqrt(g.lateral2 + g.zeta_tilde * g.zeta_tilde);
    g.log_weight = 2.0 * g.alpha * g.alpha * (g.epsilon_tilde - (4.0 / 3.0) * a4);
    g.point_strength = equivalent_point_strength(sys, src);
    return g;
}

double equivalent_point_strength(const PhysicalSystem& sys, const GaussianSource& src) {
    require_gaussian(src);
    return sys.hbar() * src.omega * std::pow(2.0 * std::sqrt(kPi) * src.width, 1.5);
}

double virtual_source_offset(const PhysicalSystem& sys, const GaussianSource& src) {
    require_gaussian(src);
    return sys.mass() * sys.force() * pow4(src.width) / (2.0 * sys.hbar() * sys.hbar());
}

double source_function(const PhysicalSystem& sys, const GaussianSource& src, const Vec3& r) {
    require_gaussian(src);
    const double a = src.width;
    const double r2 = r[0] * r[0] + r[1] * r[1] + r[2] * r[2];
    const double norm = std::pow(a, -1.5) * std::pow(kPi, -0.75);
    return sys.hbar() * src.omega * norm * std::exp(-r2 / (2.0 * a * a));
}

// --- point source --------------------------------------------------------

cplx psi_point(const PhysicalSystem& sys, const PointSource& src, const Vec3& r, double energy) {
    if (r[0] == 0.0 && r[1] == 0.0 && r[2] == 0.0) {
        throw DomainError("psi_point: the wavefunction diverges at the source point");
    }
    return src.strength * green::green_closed(sys, r, {0.0, 0.0, 0.0}, energy).si();
}

double current_density_point(const PhysicalSystem& sys, const PointSource& src, const Vec3& r,
                             double energy) {
    const ScaledPoint p = sys.scale_point(r);
    if (!(p.rho > 0.0)) {
        throw DomainError("current_density_point: undefined at the source point");
    }
    const double eps = sys.scale_energy(energy).epsilon;
    const double x = eps + downstream_excess(p.xi * p.xi + p.nu_y * p.nu_y, p.zeta, p.rho);
    const airy::ScaledAiry a = airy::airy_scaled(x);
    return std::norm(src.strength) * density_prefactor(sys) *
           flux_bracket_density(p.zeta, p.rho, eps, a, -2.0 * a.scale, 3);
}

double total_current_point(const PhysicalSystem& sys, const PointSource& src, double energy) {
    const double eps = sys.scale_energy(energy).epsilon;
    const airy::ScaledBracket b = airy::flux_bracket(eps);
    const double k = sys.inverse_length();
    // 2 m beta F / hbar^3 = 8 beta (beta F)^3 / hbar
    return std::norm(src.strength) * 8.0 * sys.beta() * k * k * k / sys.hbar() * b.value *
           std::exp(-b.decay);
}

// --- Gaussian source ---------------------------------------------------------

FieldZone field_zone(const PhysicalSystem& sys, const GaussianSource& src, const Vec3& r) {
    const GaussianScaled g = gaussian_scaled(sys, src, r, 0.0);
    const double ratio = g.rho_tilde / g.alpha;
    if (ratio <= 3.0) return FieldZone::Near;
    if (ratio <= 5.0) return FieldZone::Transition;
    return FieldZone::Far;
}

namespace {
cplx psi_far_unchecked(const PhysicalSystem& sys, const GaussianScaled& g, const Vec3& r,
                       double energy) {
    const ScaledPoint p = sys.scale_point(r);
    const double eps = sys.scale_energy(energy).epsilon;
    return g.point_strength * green::kernel_to_si(sys) *
           green::green_kernel(p, virtual_source_scaled(g.alpha), eps, g.log_weight);
}

double near_segment(const PhysicalSystem& sys, const GaussianScaled& g, const Vec3& r,
                    double rel_tol, double* error) {
    const ScaledPoint p = sys.scale_point(r);
    const double s0 = 2.0 * g.alpha * g.alpha;
    const double rt2 = g.rho_tilde * g.rho_tilde;
    const double c = g.zeta_tilde - g.epsilon_tilde;
    const double base = -(p.rho * p.rho) / (2.0 * g.alpha * g.alpha);  // exponent at s0
    auto integrand = [&](double s) {
        const double e = base + rt2 * (1.0 / s0 - 1.0 / s) + (s - s0) * c +
                         (s * s * s - s0 * s0 * s0) / 12.0;
        if (e < -745.0) return 0.0;
        return std::exp(e) * std::pow(kPi * s, -1.5);
    };
    std::vector<double> breaks{0.0};
    for (int k = 24; k >= 0; --k) breaks.push_back(s0 * std::pow(0.7, k));
    auto res = quad::integrate<double>(integrand, std::span<const double>(breaks),
                                       {rel_tol, 0.0, 4000});
    const double k3 = green::kernel_to_si(sys);  // 2 beta (beta F)^3
    if (error) *error = std::fabs(g.point_strength * k3 * res.error);
    return g.point_strength * k3 * res.value;
}
}  // namespace

cplx psi_gauss_far(const PhysicalSystem& sys, const GaussianSource& src, const Vec3& r,
                   double energy) {
    const GaussianScaled g = gaussian_scaled(sys, src, r, energy);
    require_far(g, "psi_gauss_far");
    return psi_far_unchecked(sys, g, r, energy);
}

double psi_gauss_near(const PhysicalSystem& sys, const GaussianSource& src, const Vec3& r,
                      double energy) {
    const GaussianScaled g = gaussian_scaled(sys, src, r, energy);
    const double k3 = green::kernel_to_si(sys) / 2.0;  // beta (beta F)^3
    const double a = g.alpha;
    const double exponent = g.log_weight - g.rho_tilde * g.rho_tilde / (2.0 * a * a);
    return g.point_strength * 2.0 * k3 / std::pow(kPi, 1.5) * std::sqrt(2.0) * a /
           (g.rho_tilde * g.rho_tilde) * std::exp(exponent);
}

GaussQuadrature psi_gauss_quadrature(const PhysicalSystem& sys, const GaussianSource& src,
                                     const Vec3& r, double energy, double rel_tol) {
    const GaussianScaled g = gaussian_scaled(sys, src, r, energy);
    GaussQuadrature out;
    double near_error = 0.0;
    out.near_segment = near_segment(sys, g, r, rel_tol, &near_error);
    const auto tail = green::detail::propagator_laplace(
        g.rho_tilde * g.rho_tilde, g.zeta_tilde - g.epsilon_tilde, 0.0, rel_tol);
    const double weight = g.point_strength * std::exp(g.log_weight) * green::kernel_to_si(sys);
    out.far_segment = weight * tail.value;
    out.psi = out.near_segment + out.far_segment;
    out.error = near_error + weight * tail.error;
    if (!tail.converged && tail.error > 1e-8 * std::abs(tail.value)) {
        throw NumericalError("psi_gauss_quadrature: contour integral did not converge",
                             out.error);
    }
    return out;
}

cplx psi_gauss(const PhysicalSystem& sys, const GaussianSource& src, const Vec3& r,
               double energy) {
    const GaussianScaled g = gaussian_scaled(sys, src, r, energy);
    return near_segment(sys, g, r, 1e-14, nullptr) + psi_far_unchecked(sys, g, r, energy);
}

double current_density_gauss(const PhysicalSystem& sys, const GaussianSource& src, const Vec3& r,
                             double energy) {
    const GaussianScaled g = gaussian_scaled(sys, src, r, energy);
    require_far(g, "current_density_gauss");
    const double eps = sys.scale_energy(energy).epsilon;
    const double w = downstream_excess(g.lateral2, g.zeta_tilde, g.rho_tilde);
    const airy::ScaledAiry a = airy::airy_scaled(g.epsilon_tilde + w);
    const double exponent = gauss_density_exponent(g.alpha, eps, g.epsilon_tilde, w);
    return g.point_strength * g.point_strength * density_prefactor(sys) *
           flux_bracket_density(g.zeta_tilde, g.rho_tilde, g.epsilon_tilde, a, exponent, 3);
}

double total_current_gauss(const PhysicalSystem& sys, const GaussianSource& src, double energy) {
    require_gaussian(src);
    const double alpha = sys.scale_length(src.width);
    const double eps = sys.scale_energy(energy).epsilon;
    return sys.hbar() * src.omega * src.omega * sys.beta() * gauss_current_scaled(alpha, eps);
}

double total_current_slicing(const PhysicalSystem& sys, const GaussianSource& src,
                             double energy) {
    require_gaussian(src);
    const double alpha = sys.scale_length(src.width);
    const double eps = sys.scale_energy(energy).epsilon;
    return 2.0 * std::sqrt(kPi) * sys.hbar() * src.omega * src.omega * sys.beta() / alpha *
           std::exp(-eps * eps / (4.0 * alpha * alpha));
}

double total_current(const PhysicalSystem& sys, const SourceModel& model, double energy) {
    return std::visit(
        [&](const auto& s) {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, PointSource>) {
                return total_current_point(sys, s, energy);
            } else {
                return total_current_gauss(sys, s, energy);
            }
        },
        model);
}

SumRule sum_rule_check(const PhysicalSystem& sys, const SourceModel& model,
                       std::optional<std::pair<double, double>> energy_range, double tolerance) {
    if (std::holds_alternative<PointSource>(model)) {
        throw UnsupportedModelError(
            "sum_rule_check: the sum rule is not applicable to point sources, since the L2 "
            "norm of delta(r) is not defined");
    }
    const GaussianSource& src = std::get<GaussianSource>(model);
    require_gaussian(src);
    const double alpha = sys.scale_length(src.width);
    const double floor_eps = -airy::x_max - 4.0 * pow4(alpha);

    double lo, hi;
    if (energy_range) {
        const double e1 = sys.scale_energy(energy_range->first).epsilon;
        const double e2 = sys.scale_energy(energy_range->second).epsilon;
        lo = std::min(e1, e2);
        hi = std::max(e1, e2);
    } else {
        const double half = 6.0 * std::sqrt(2.0) * alpha + 10.0;
        lo = -half;
        hi = half;
    }
    lo = std::max(lo, floor_eps);
    if (!(hi > lo)) throw DomainError("sum_rule_check: empty energy range");

    auto j = [&](double eps) { return gauss_current_scaled(alpha, eps); };
    const quad::Tolerance qt{1e-12, 0.0, 20000};
    auto piece = [&](double a, double b, double* err, bool* ok) {
        const int n = std::clamp(static_cast<int>(std::ceil((b - a) / 2.0)), 2, 2000);
        std::vector<double> breaks;
        for (int k = 0; k <= n; ++k) breaks.push_back(a + (b - a) * k / n);
        auto r = quad::integrate<double>(j, std::span<const double>(breaks), qt);
        *err += r.error;
        *ok = *ok && r.converged;
        return r.value;
    };

    double error = 0.0;
    bool ok = true;
    double total = piece(lo, hi, &error, &ok);
    const double width = hi - lo;

    // Extend in geometrically growing steps until a step adds less than
    // tolerance / 10 of the running total.
    bool left_done = false;
    double step = width;
    for (int it = 0; it < 60 && !left_done; ++it, step *= 2.0) {
        const double next = std::max(lo - step, floor_eps);
        if (next >= lo) {
            // Hit the Airy range cap: bound the remaining tail by the local
            // value times the exponential decay length 1 / (4 alpha^2).
            error += j(lo) / (4.0 * alpha * alpha);
            break;
        }
        const double add = piece(next, lo, &error, &ok);
        total += add;
        lo = next;
        left_done = std::fabs(add) < 0.1 * tolerance * std::fabs(total);
    }
    bool right_done = false;
    step = width;
    for (int it = 0; it < 60 && !right_done; ++it, step *= 2.0) {
        const double next = hi + step;
        const double add = piece(hi, next, &error, &ok);
        total += add;
        hi = next;
        right_done = std::fabs(add) < 0.1 * tolerance * std::fabs(total);
    }

    SumRule out;
    const double conv = sys.hbar() * src.omega * src.omega * sys.beta() / sys.inverse_energy();
    out.lhs = conv * total;
    out.error = conv * error;
    out.rhs = 2.0 * kPi * sys.hbar() * src.omega * src.omega;
    out.e_min = sys.unscale_energy({hi});
    out.e_max = sys.unscale_energy({lo});
    out.converged = ok && right_done && out.error <= tolerance * std::fabs(out.lhs);
    return out;
}

PlaneFlux detector_plane_flux(const PhysicalSystem& sys, const SourceModel& model, double energy,
                              double z) {
    const double eps = sys.scale_energy(energy).epsilon;
    double zeta_rel, eps_rel, weight;
    std::optional<double> alpha;
    if (const auto* p = std::get_if<PointSource>(&model)) {
        zeta_rel = sys.scale_length(z);
        eps_rel = eps;
        weight = std::norm(p->strength);
    } else {
        const auto& g = std::get<GaussianSource>(model);
        const GaussianScaled gs = gaussian_scaled(sys, g, {0.0, 0.0, z}, energy);
        zeta_rel = gs.zeta_tilde;
        eps_rel = gs.epsilon_tilde;
        weight = gs.point_strength * gs.point_strength;
        alpha = gs.alpha;
        if (gs.rho_tilde <= 3.0 * gs.alpha) {
            throw PreconditionError("detector_plane_flux: plane intersects the source core");
        }
    }
    if (!(zeta_rel > 0.0)) {
        throw PreconditionError("detector_plane_flux: plane must lie downstream of the source");
    }
    // Substituting w = rho - zeta gives R dR = rho dw.
    auto integrand = [&](double w) {
        const double rho = zeta_rel + w;
        const airy::ScaledAiry a = airy::airy_scaled(eps_rel + w);
        const double exponent =
            alpha ? gauss_density_exponent(*alpha, eps, eps_rel, w) : -2.0 * a.scale;
        return flux_bracket_density(zeta_rel, rho, eps_rel, a, exponent, 2);
    };
    const double allowed = std::max(-eps_rel, 0.0);
    const double end = allowed + 30.0;
    std::vector<double> breaks{0.0};
    const int n_osc = 4 + static_cast<int>(2.0 * std::pow(allowed, 1.5));
    for (int k = 1; k <= n_osc && allowed > 0.0; ++k) breaks.push_back(allowed * k / n_osc);
    for (int k = 1; k <= 30; ++k) breaks.push_back(allowed + (end - allowed) * k / 30.0);
    auto r = quad::integrate<double>(integrand, std::span<const double>(breaks),
                                     {1e-12, 0.0, 20000});
    const double k = sys.inverse_length();
    const double conv = 2.0 * kPi * weight * density_prefactor(sys) / (k * k);
    return {conv * r.value, conv * r.error};
}

}  // namespace qsrc::sources
