#include "qsrc/airy.hpp"

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "qsrc/errors.hpp"

namespace qsrc::airy {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kSqrtPi = 1.77245385090551602730;
constexpr double kSqrt3 = 1.73205080756887729353;
constexpr double kAi0 = 0.355028053887817239260;   // Ai(0)
constexpr double kAip0 = 0.258819403792806798405;  // -Ai'(0)

// Asymptotic coefficients u_k and v_k (DLMF 9.7.2).
struct AsymptoticCoefficients {
    static constexpr int n = 40;
    std::array<double, n> u{};
    std::array<double, n> v{};

    AsymptoticCoefficients() {
        u[0] = 1.0;
        v[0] = 1.0;
        for (int k = 1; k < n; ++k) {
            const double kk = k;
            u[k] = u[k - 1] * (6 * kk - 5) * (6 * kk - 3) * (6 * kk - 1) /
                   ((2 * kk - 1) * 216.0 * kk);
            v[k] = -u[k] * (6 * kk + 1) / (6 * kk - 1);
        }
    }
};

const AsymptoticCoefficients& coefficients() {
    static const AsymptoticCoefficients c;
    return c;
}

// Sums sum_k sign^k c_k / z^k, stopping once terms drop below 1e-17 of the
// partial sum or start to grow.
template <typename Coeff>
double asymptotic_sum(const Coeff& c, double z, double sign, int first = 0, int stride = 1) {
    double sum = 0.0;
    double previous = INFINITY;
    const double zinv = 1.0 / z;
    double power = std::pow(zinv, first);
    const double step = std::pow(sign * zinv, stride);
    if (first % 2 == 1 && sign < 0) power = -power;
    for (int k = first; k < AsymptoticCoefficients::n; k += stride) {
        const double term = c[k] * power;
        if (std::fabs(term) > previous) break;
        sum += term;
        if (std::fabs(term) <= 1e-17 * std::fabs(sum)) break;
        previous = std::fabs(term);
        power *= step;
    }
    return sum;
}

// Taylor step for y'' = x y: given (y, y') at x0, returns (y, y') at x0 + h.
std::array<double, 2> taylor_step(double x0, double y, double yp, double h) {
    double c_prev2 = y;       // c_{n-2}
    double c_prev1 = yp;      // c_{n-1}
    double c_prev3 = 0.0;     // c_{n-3}
    double value = y + yp * h;
    double deriv = yp;
    double hpow = h;          // h^(n-1)
    int small = 0;
    for (int n = 2; n < 200; ++n) {
        const double c = (x0 * c_prev2 + c_prev3) / (double(n) * (n - 1));
        const double dv = n * c * hpow;
        hpow *= h;
        const double v = c * hpow;
        value += v;
        deriv += dv;
        c_prev3 = c_prev2;
        c_prev2 = c_prev1;
        c_prev1 = c;
        const double scale = std::fabs(value) + std::fabs(deriv) * std::fabs(h);
        if (std::fabs(v) + std::fabs(dv * h) <= 1e-19 * scale) {
            if (++small >= 3) break;
        } else {
            small = 0;
        }
    }
    return {value, deriv};
}

// Node table on [-table_low, table_high] with spacing 1/4.
struct NodeTable {
    static constexpr double spacing = 0.25;
    static constexpr double low = -13.0;
    static constexpr double high = 11.0;
    static constexpr int count = static_cast<int>((high - low) / spacing) + 1;

    std::vector<double> ai, aip, bi, bip;

    static double node(int i) { return low + i * spacing; }

    NodeTable() : ai(count), aip(count), bi(count), bip(count) {
        const int left = static_cast<int>(std::lround((-detail::series_limit - low) / spacing));
        const int right = static_cast<int>(std::lround((detail::series_limit - low) / spacing));

        for (int i = left; i <= right; ++i) {
            ScaledAiry s = detail::series(node(i));
            const double up = std::exp(s.scale);
            ai[i] = s.ai / up;
            aip[i] = s.ai_prime / up;
            bi[i] = s.bi * up;
            bip[i] = s.bi_prime * up;
        }

        // Oscillatory side: both solutions are stable stepping away from 0.
        for (int i = left - 1; i >= 0; --i) {
            auto a = taylor_step(node(i + 1), ai[i + 1], aip[i + 1], -spacing);
            auto b = taylor_step(node(i + 1), bi[i + 1], bip[i + 1], -spacing);
            ai[i] = a[0];
            aip[i] = a[1];
            bi[i] = b[0];
            bip[i] = b[1];
        }

        // Bi is dominant for x > 0: step outwards.
        for (int i = right + 1; i < count; ++i) {
            auto b = taylor_step(node(i - 1), bi[i - 1], bip[i - 1], spacing);
            bi[i] = b[0];
            bip[i] = b[1];
        }

        // Ai is recessive for x > 0: start from the asymptotic series at the
        // far end and step inwards, where Ai is the growing solution.
        {
            const double x = node(count - 1);
            const ScaledAiry s = detail::asymptotic_positive(x);
            const double decay = std::exp(-s.scale);
            ai[count - 1] = s.ai * decay;
            aip[count - 1] = s.ai_prime * decay;
        }
        for (int i = count - 2; i > right; --i) {
            auto a = taylor_step(node(i + 1), ai[i + 1], aip[i + 1], -spacing);
            ai[i] = a[0];
            aip[i] = a[1];
        }
    }
};

const NodeTable& node_table() {
    static const NodeTable table;
    return table;
}

double positive_scale(double x) { return x > 0.0 ? (2.0 / 3.0) * x * std::sqrt(x) : 0.0; }

ScaledAiry apply_scale(double ai, double aip, double bi, double bip, double x) {
    ScaledAiry s{ai, aip, bi, bip, positive_scale(x)};
    if (s.scale > 0.0) {
        const double up = std::exp(s.scale);
        s.ai *= up;
        s.ai_prime *= up;
        s.bi /= up;
        s.bi_prime /= up;
    }
    return s;
}

}  // namespace

namespace detail {

ScaledAiry series(double x) {
    // Ai = c1 f - c2 g,  Bi = sqrt3 (c1 f + c2 g), with
    //   f = sum x^{3k} / prod (3j-1)(3j),  g = sum x^{3k+1} / prod (3j)(3j+1).
    const double x3 = x * x * x;
    double f = 1.0, fp = 0.0, g = x, gp = 1.0;
    double tf = 1.0, tg = x, tfp = x * x / 2.0, tgp = 1.0;
    fp = tfp;
    for (int k = 1; k < 100; ++k) {
        const double kk = k;
        tf *= x3 / ((3 * kk - 1) * (3 * kk));
        tg *= x3 / ((3 * kk) * (3 * kk + 1));
        tgp *= x3 / ((3 * kk - 2) * (3 * kk));
        f += tf;
        g += tg;
        gp += tgp;
        if (k >= 2) {
            tfp *= x3 / ((3 * kk - 3) * (3 * kk - 1));
            fp += tfp;
        }
        if (std::fabs(tf) + std::fabs(tg) + std::fabs(tfp) + std::fabs(tgp) <
            1e-18 * (std::fabs(f) + std::fabs(g) + std::fabs(fp) + std::fabs(gp)))
            break;
    }
    const double ai = kAi0 * f - kAip0 * g;
    const double aip = kAi0 * fp - kAip0 * gp;
    const double bi = kSqrt3 * (kAi0 * f + kAip0 * g);
    const double bip = kSqrt3 * (kAi0 * fp + kAip0 * gp);
    return apply_scale(ai, aip, bi, bip, x);
}

ScaledAiry table(double x) {
    const NodeTable& t = node_table();
    int i = static_cast<int>(std::lround((x - NodeTable::low) / NodeTable::spacing));
    if (i < 0) i = 0;
    if (i >= NodeTable::count) i = NodeTable::count - 1;
    const double x0 = NodeTable::node(i);
    const double h = x - x0;
    auto a = taylor_step(x0, t.ai[i], t.aip[i], h);
    auto b = taylor_step(x0, t.bi[i], t.bip[i], h);
    return apply_scale(a[0], a[1], b[0], b[1], x);
}

ScaledAiry asymptotic_positive(double x) {
    const auto& c = coefficients();
    const double z = positive_scale(x);
    const double q = std::pow(x, 0.25);
    ScaledAiry s;
    s.scale = z;
    s.ai = asymptotic_sum(c.u, z, -1.0) / (2.0 * kSqrtPi * q);
    s.ai_prime = -q * asymptotic_sum(c.v, z, -1.0) / (2.0 * kSqrtPi);
    s.bi = asymptotic_sum(c.u, z, 1.0) / (kSqrtPi * q);
    s.bi_prime = q * asymptotic_sum(c.v, z, 1.0) / kSqrtPi;
    return s;
}

ScaledAiry modulus_asymptotic(double x) {
    // DLMF 9.7.9 - 9.7.11 with y = -x > 0.
    const auto& c = coefficients();
    const double y = -x;
    const double z = (2.0 / 3.0) * y * std::sqrt(y);
    const double q = std::pow(y, 0.25);
    // Even and odd parts: sum (-1)^k c_{2k} z^{-2k}, sum (-1)^k c_{2k+1} z^{-2k-1}.
    auto even = [&](const auto& cc) {
        double sum = 0.0, prev = INFINITY, zp = 1.0, sign = 1.0;
        for (int k = 0; 2 * k < AsymptoticCoefficients::n; ++k) {
            const double term = sign * cc[2 * k] * zp;
            if (std::fabs(term) > prev) break;
            sum += term;
            if (std::fabs(term) <= 1e-17 * std::fabs(sum)) break;
            prev = std::fabs(term);
            zp /= z * z;
            sign = -sign;
        }
        return sum;
    };
    auto odd = [&](const auto& cc) {
        double sum = 0.0, prev = INFINITY, zp = 1.0 / z, sign = 1.0;
        for (int k = 0; 2 * k + 1 < AsymptoticCoefficients::n; ++k) {
            const double term = sign * cc[2 * k + 1] * zp;
            if (std::fabs(term) > prev) break;
            sum += term;
            if (std::fabs(term) <= 1e-17 * std::fabs(sum) + 1e-300) break;
            prev = std::fabs(term);
            zp /= z * z;
            sign = -sign;
        }
        return sum;
    };
    const double ue = even(c.u), uo = odd(c.u);
    const double ve = even(c.v), vo = odd(c.v);
    // cos(z - pi/4) and sin(z - pi/4) without forming z - pi/4.
    const double cz = std::cos(z), sz = std::sin(z);
    const double cp = (cz + sz) / std::sqrt(2.0);
    const double sp = (sz - cz) / std::sqrt(2.0);
    ScaledAiry s;
    s.scale = 0.0;
    s.ai = (cp * ue + sp * uo) / (kSqrtPi * q);
    s.bi = (-sp * ue + cp * uo) / (kSqrtPi * q);
    s.ai_prime = q * (sp * ve - cp * vo) / kSqrtPi;
    s.bi_prime = q * (cp * ve + sp * vo) / kSqrtPi;
    return s;
}

}  // namespace detail

ScaledAiry airy_scaled(double x) {
    if (std::isnan(x)) throw DomainError("airy: argument is NaN");
    // Below this the phase 2/3 |x|^(3/2) is no longer resolved in double.
    if (x < -1e10) throw RangeError("airy: argument " + std::to_string(x) + " too negative");
    if (std::fabs(x) <= detail::series_limit) return detail::series(x);
    if (x > detail::positive_switch) return detail::asymptotic_positive(x);
    if (x < -detail::negative_switch) return detail::modulus_asymptotic(x);
    return detail::table(x);
}

ComplexAiryPair airy_all(double x) {
    if (std::isnan(x)) throw DomainError("airy: argument is NaN");
    if (std::fabs(x) > x_max) {
        throw RangeError("airy: |x| = " + std::to_string(std::fabs(x)) +
                         " exceeds the Bi overflow cap " + std::to_string(x_max));
    }
    const ScaledAiry s = airy_scaled(x);
    ComplexAiryPair p;
    if (s.scale > 0.0) {
        const double down = std::exp(-s.scale);
        const double up = std::exp(s.scale);
        p.ai = s.ai * down;
        p.ai_prime = s.ai_prime * down;
        p.bi = s.bi * up;
        p.bi_prime = s.bi_prime * up;
    } else {
        p.ai = s.ai;
        p.ai_prime = s.ai_prime;
        p.bi = s.bi;
        p.bi_prime = s.bi_prime;
    }
    p.ci = {p.bi, p.ai};
    p.ci_prime = {p.bi_prime, p.ai_prime};
    return p;
}

double airy_ai(double x) {
    const ScaledAiry s = airy_scaled(x);
    return s.scale > 0.0 ? s.ai * std::exp(-s.scale) : s.ai;
}

ScaledBracket flux_bracket(double x) {
    if (std::isnan(x)) throw DomainError("flux_bracket: argument is NaN");
    if (x > detail::positive_switch) {
        // Ai ~ e^{-z} x^{-1/4}/(2 sqrt pi) U,  Ai' ~ -e^{-z} x^{1/4}/(2 sqrt pi) V
        // B e^{2z} = sqrt(x)/(4 pi) (V - U)(V + U), with
        // V - U = sum_{k>=1} (-1)^k (v_k - u_k) z^{-k},  v_k - u_k = -12k/(6k-1) u_k.
        const auto& c = coefficients();
        const double z = positive_scale(x);
        std::array<double, AsymptoticCoefficients::n> diff{};
        for (int k = 1; k < AsymptoticCoefficients::n; ++k) {
            diff[k] = -12.0 * k / (6.0 * k - 1.0) * c.u[k];
        }
        const double vmu = asymptotic_sum(diff, z, -1.0, 1);
        const double vpu = asymptotic_sum(c.v, z, -1.0) + asymptotic_sum(c.u, z, -1.0);
        return {std::sqrt(x) / (4.0 * kPi) * vmu * vpu, 2.0 * z};
    }
    const ScaledAiry s = airy_scaled(x);
    return {s.ai_prime * s.ai_prime - x * s.ai * s.ai, 2.0 * s.scale};
}

}  // namespace qsrc::airy
