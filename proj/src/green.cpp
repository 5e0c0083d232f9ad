#include "qsrc/green.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "qsrc/airy.hpp"
#include "qsrc/errors.hpp"
#include "qsrc/quadrature.hpp"

namespace qsrc::green {

namespace {
constexpr double kPi = 3.14159265358979323846;
using cplx = std::complex<double>;
}  // namespace

double scaled_distance(const ScaledPoint& r, const ScaledPoint& src) {
    const double dx = r.xi - src.xi, dy = r.nu_y - src.nu_y, dz = r.zeta - src.zeta;
    return std::sqrt(dx * dx + dy * dy + dz * dz);
}

GreenArgs green_args(const ScaledPoint& r, const ScaledPoint& src, double epsilon) {
    const double dx = r.xi - src.xi, dy = r.nu_y - src.nu_y;
    const double rho = scaled_distance(r, src);
    const double zsum = r.zeta + src.zeta;
    // rho^2 - zsum^2 = lateral^2 - 4 zeta zeta'
    const double diff = dx * dx + dy * dy - 4.0 * r.zeta * src.zeta;
    GreenArgs a;
    if (zsum > 0.0) {
        a.alpha_minus = epsilon + diff / (rho + zsum);
        a.alpha_plus = epsilon - zsum - rho;
    } else {
        a.alpha_minus = epsilon - zsum + rho;
        a.alpha_plus = epsilon - diff / (rho - zsum);
    }
    return a;
}

std::complex<double> green_kernel(const ScaledPoint& r, const ScaledPoint& src, double epsilon,
                                  double log_weight) {
    const double rho = scaled_distance(r, src);
    if (!(rho > 0.0)) {
        throw DomainError(
            "green: field and source points coincide; use the diagonal-limit total current");
    }
    const GreenArgs a = green_args(r, src, epsilon);
    const airy::ScaledAiry p = airy::airy_scaled(a.alpha_plus);
    const airy::ScaledAiry m = airy::airy_scaled(a.alpha_minus);
    // Ci(a+) = e^{s+} (Bi_s + i Ai_s e^{-2 s+}),  Ai(a-) = e^{-s-} Ai_s
    const double cross = std::exp(-2.0 * p.scale);
    const cplx ci(p.bi, p.ai * cross);
    const cplx cip(p.bi_prime, p.ai_prime * cross);
    const cplx w = ci * m.ai_prime - cip * m.ai;
    return w * (std::exp(log_weight + p.scale - m.scale) / rho);
}

double kernel_to_si(const PhysicalSystem& sys) {
    const double k = sys.inverse_length();
    return 2.0 * sys.beta() * k * k * k;
}

GreenValue green_closed(const PhysicalSystem& sys, const Vec3& r, const Vec3& r_src,
                        double energy) {
    const ScaledPoint p = sys.scale_point(r);
    const ScaledPoint s = sys.scale_point(r_src);
    return {green_kernel(p, s, sys.scale_energy(energy).epsilon), kernel_to_si(sys)};
}

namespace detail {

namespace {

struct Exponent {
    double rho2, c, kappa;

    // Full log of the integrand (without the -i prefactor and path Jacobian).
    cplx operator()(cplx tau) const {
        const cplx i(0.0, 1.0);
        return i * rho2 / tau + i * c * tau - i * tau * tau * tau / 12.0 - kappa * tau -
               1.5 * std::log(i * kPi * tau);
    }
};

// Piecewise-linear contour 0 -> corner -> corner + s e^{i dir}, s in [0, inf).
struct Contour {
    cplx corner;
    cplx direction;
    double peak = -INFINITY;
    double length_far = 0.0;
};

const cplx kFarDirection = std::polar(1.0, -kPi / 6.0);

Contour evaluate_contour(const Exponent& ex, cplx corner) {
    Contour c{corner, kFarDirection};
    double peak = -INFINITY;
    // Near segment: sample t in (0, 1].
    if (std::abs(corner) > 0.0) {
        for (int k = 1; k <= 64; ++k) {
            const double t = std::pow(double(k) / 64.0, 2.0);
            peak = std::max(peak, ex(corner * t).real());
        }
    }
    // Far segment: walk out until the integrand is negligible.
    double s = 1e-3 * std::max(1.0, std::abs(corner));
    double far_end = 0.0;
    for (int k = 0; k < 400; ++k) {
        const cplx tau = corner + s * kFarDirection;
        if (std::abs(tau) == 0.0) {
            s *= 1.2;
            continue;
        }
        const double v = ex(tau).real();
        peak = std::max(peak, v);
        far_end = s;
        if (v < peak - 80.0 && s > 1.0) break;
        s *= 1.08;
    }
    c.peak = peak;
    c.length_far = far_end;
    return c;
}

Contour choose_contour(const Exponent& ex) {
    Contour best = evaluate_contour(ex, 0.0);
    const std::array<double, 7> angles = {-kPi / 2, -5 * kPi / 12, -kPi / 3, -kPi / 4,
                                          -kPi / 6, -kPi / 12, -kPi / 24};
    const double scale = std::max({1.0, std::sqrt(std::fabs(ex.c)), std::sqrt(ex.rho2)});
    for (double angle : angles) {
        for (int k = 0; k < 40; ++k) {
            const double radius = 0.02 * std::pow(1.2, k) * scale;
            if (radius > 20.0 * scale) break;
            Contour c = evaluate_contour(ex, std::polar(radius, angle));
            if (c.peak < best.peak - 1e-9) best = c;
        }
    }
    return best;
}

}  // namespace

LaplaceIntegral propagator_laplace(double rho2, double c, double kappa, double rel_tol) {
    const Exponent ex{rho2, c, kappa};
    const Contour path = choose_contour(ex);
    const cplx minus_i(0.0, -1.0);
    const double abs_floor = std::exp(path.peak) * 1e-17;
    quad::Tolerance tol{rel_tol, abs_floor, 8000};

    LaplaceIntegral out;
    out.converged = true;

    auto integrand_at = [&](cplx tau, cplx jacobian) -> cplx {
        const cplx e = ex(tau);
        if (e.real() < -700.0) return 0.0;
        return minus_i * std::exp(e) * jacobian;
    };

    if (std::abs(path.corner) > 0.0) {
        auto near = [&](double t) { return integrand_at(path.corner * t, path.corner); };
        std::vector<double> breaks{0.0};
        for (int k = 20; k >= 0; --k) breaks.push_back(std::pow(0.6, k));
        auto r = quad::integrate<cplx>(near, std::span<const double>(breaks), tol);
        out.value += r.value;
        out.error += r.error;
        out.converged = out.converged && r.converged;
    }
    {
        auto far = [&](double s) { return integrand_at(path.corner + s * path.direction, path.direction); };
        std::vector<double> breaks{0.0};
        const double end = path.length_far;
        const double first = std::abs(path.corner) > 0.0 ? 1e-3 * end : std::min(1e-6, rho2 * 1e-3);
        const int pieces = 40;
        for (int k = 0; k <= pieces; ++k) {
            breaks.push_back(first * std::pow(end / first, double(k) / pieces));
        }
        auto r = quad::integrate<cplx>(far, std::span<const double>(breaks), tol);
        out.value += r.value;
        out.error += r.error;
        out.converged = out.converged && r.converged;
    }
    return out;
}

}  // namespace detail

OracleResult green_oracle(const PhysicalSystem& sys, const Vec3& r, const Vec3& r_src,
                          double energy, const OracleOptions& options) {
    const ScaledPoint p = sys.scale_point(r);
    const ScaledPoint s = sys.scale_point(r_src);
    const double rho = scaled_distance(p, s);
    if (!(rho > 0.0)) {
        throw DomainError("green_oracle: field and source points coincide");
    }
    if (options.levels < 2) throw DomainError("green_oracle: need at least two damping levels");
    if (options.eta0 < 0.0) throw DomainError("green_oracle: eta must be positive");
    const double kappa0 = options.eta0 > 0.0 ? sys.inverse_energy() * options.eta0 : 0.1;
    const double eps = sys.scale_energy(energy).epsilon;
    const double c = p.zeta + s.zeta - eps;

    // Neville tableau in kappa, evaluated at kappa = 0.
    const int n = options.levels;
    std::vector<double> kappas(n);
    std::vector<cplx> tableau(n);
    double quad_error = 0.0;
    cplx previous_estimate = 0.0;
    cplx estimate = 0.0;
    for (int k = 0; k < n; ++k) {
        kappas[k] = kappa0 / std::pow(2.0, k);
        const auto li = detail::propagator_laplace(rho * rho, c, kappas[k], options.rel_tol);
        quad_error = std::max(quad_error, li.error);
        tableau[k] = li.value;
        for (int j = k - 1; j >= 0; --j) {
            // P_{j..k}(0) from P_{j..k-1} and P_{j+1..k}
            tableau[j] = (kappas[k] * tableau[j] - kappas[j] * tableau[j + 1]) /
                         (kappas[k] - kappas[j]);
        }
        previous_estimate = estimate;
        estimate = tableau[0];
    }
    const double extrapolation_error = std::abs(estimate - previous_estimate);
    OracleResult out;
    out.value = {estimate, kernel_to_si(sys)};
    out.error_estimate = extrapolation_error + quad_error;
    if (!(out.error_estimate <= options.fail_above * std::abs(estimate))) {
        throw NumericalError("green_oracle: error estimate " + std::to_string(out.error_estimate) +
                                 " exceeds tolerance for |G| = " + std::to_string(std::abs(estimate)),
                             out.error_estimate);
    }
    return out;
}

}  // namespace qsrc::green
