#pragma once

// Globally adaptive Gauss-Kronrod (7/15) quadrature for real or complex
// integrands on a finite interval.  The caller supplies breakpoints; the
// interval with the largest error estimate is bisected until the summed
// estimate meets max(abs_tol, rel_tol * |I|).

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <queue>
#include <span>
#include <vector>

namespace qsrc::quad {

struct Tolerance {
    double rel = 1e-12;
    double abs = 0.0;
    std::size_t max_intervals = 4000;
};

template <typename T>
struct Result {
    T value{};
    double error = 0.0;
    std::size_t evaluations = 0;
    bool converged = false;
};

namespace detail {

inline constexpr std::array<double, 8> kronrod_nodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kronrod_weights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> gauss_weights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

inline double magnitude(double v) { return std::fabs(v); }
inline double magnitude(const std::complex<double>& v) { return std::abs(v); }

template <typename T>
struct Segment {
    double a, b;
    T value;
    double error;
    bool operator<(const Segment& o) const { return error < o.error; }
};

template <typename T, typename F>
Segment<T> gk15(F& f, double a, double b) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    T fc = f(center);
    T kronrod = fc * kronrod_weights[7];
    T gauss = fc * gauss_weights[3];
    for (int j = 0; j < 7; ++j) {
        const double dx = half * kronrod_nodes[j];
        const T sum = f(center - dx) + f(center + dx);
        kronrod += sum * kronrod_weights[j];
        if (j % 2 == 1) gauss += sum * gauss_weights[j / 2];
    }
    kronrod *= half;
    gauss *= half;
    double err = magnitude(kronrod - gauss);
    // QUADPACK-style sharpening of the raw estimate.
    err = err > 0.0 ? std::min(err, err * std::pow(200.0 * err / (magnitude(kronrod) + 1e-300), 1.5))
                    : 0.0;
    err = std::max(err, 50.0 * 2.2e-16 * magnitude(kronrod));
    return {a, b, kronrod, err};
}

}  // namespace detail

/// Integrates f over the piecewise interval defined by sorted `breaks`
/// (at least two entries).
template <typename T, typename F>
Result<T> integrate(F&& f, std::span<const double> breaks, const Tolerance& tol = {}) {
    std::priority_queue<detail::Segment<T>> heap;
    Result<T> result;
    T total{};
    double error = 0.0;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        if (breaks[i + 1] <= breaks[i]) continue;
        auto s = detail::gk15<T>(f, breaks[i], breaks[i + 1]);
        total += s.value;
        error += s.error;
        heap.push(s);
    }
    result.evaluations = 15 * heap.size();
    while (!heap.empty()) {
        const double target = std::max(tol.abs, tol.rel * detail::magnitude(total));
        if (error <= target) {
            result.converged = true;
            break;
        }
        if (heap.size() >= tol.max_intervals) break;
        auto worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b)) break;
        auto left = detail::gk15<T>(f, worst.a, mid);
        auto right = detail::gk15<T>(f, mid, worst.b);
        total += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        result.evaluations += 30;
    }
    // Re-sum to drop accumulated cancellation in the running total.
    T sum{};
    double err = 0.0;
    std::vector<detail::Segment<T>> segments;
    while (!heap.empty()) {
        segments.push_back(heap.top());
        heap.pop();
    }
    std::sort(segments.begin(), segments.end(),
              [](const auto& l, const auto& r) { return l.a < r.a; });
    for (const auto& s : segments) {
        sum += s.value;
        err += s.error;
    }
    result.value = sum;
    result.error = err;
    if (!result.converged) {
        result.converged = err <= std::max(tol.abs, tol.rel * detail::magnitude(sum));
    }
    return result;
}

template <typename T, typename F>
Result<T> integrate(F&& f, double a, double b, const Tolerance& tol = {}) {
    const std::array<double, 2> breaks{a, b};
    return integrate<T>(std::forward<F>(f), std::span<const double>(breaks), tol);
}

}  // namespace qsrc::quad
