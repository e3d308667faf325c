#pragma once

// Independent reference implementations used only by the tests.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

#include "anisoqubit/qubit.h"

namespace testsupport {

using cd = std::complex<double>;
using M2 = std::array<cd, 4>;  // row-major

inline M2 mul(const M2 &a, const M2 &b) {
    return {a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3], a[2] * b[0] + a[3] * b[2],
            a[2] * b[1] + a[3] * b[3]};
}

inline M2 dagger(const M2 &a) { return {std::conj(a[0]), std::conj(a[2]), std::conj(a[1]), std::conj(a[3])}; }

/// exp(A) by scaling and squaring with a 30-term Taylor series.
inline M2 expm(const M2 &a) {
    double norm = 0.0;
    for (const auto &e : a) norm = std::max(norm, std::abs(e));
    int squarings = 0;
    while (norm > 0.125) {
        norm /= 2.0;
        ++squarings;
    }
    double scale = std::ldexp(1.0, -squarings);
    M2 x{a[0] * scale, a[1] * scale, a[2] * scale, a[3] * scale};
    M2 result{1.0, 0.0, 0.0, 1.0};
    M2 term{1.0, 0.0, 0.0, 1.0};
    for (int k = 1; k <= 30; ++k) {
        term = mul(term, x);
        for (auto &e : term) e /= static_cast<double>(k);
        for (int i = 0; i < 4; ++i) result[i] += term[i];
    }
    for (int s = 0; s < squarings; ++s) result = mul(result, result);
    return result;
}

/// exp(-i dt H) for H = omega sz/2 + ex sx + ey sy.
inline M2 propagator(double omega, double ex, double ey, double dt) {
    M2 h{cd(omega / 2.0), cd(ex, -ey), cd(ex, ey), cd(-omega / 2.0)};
    for (auto &e : h) e *= cd(0.0, -dt);
    return expm(h);
}

inline M2 to_matrix(const anisoqubit::DensityMatrix &rho) {
    return {cd(rho.rho00()), rho.rho01(), std::conj(rho.rho01()), cd(1.0 - rho.rho00())};
}

inline M2 conjugate(const M2 &u, const M2 &rho) { return mul(mul(u, rho), dagger(u)); }

/// Naive O(N^2) |DFT|^2 for k = 0..N/2.
inline std::vector<double> naive_power(std::span<const double> x) {
    const std::size_t n = x.size();
    std::vector<double> out(n / 2 + 1);
    for (std::size_t k = 0; k < out.size(); ++k) {
        cd acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            double arg = -2.0 * std::numbers::pi * static_cast<double>(k * j % n) / static_cast<double>(n);
            acc += x[j] * cd(std::cos(arg), std::sin(arg));
        }
        out[k] = std::norm(acc);
    }
    return out;
}

/// Moving average with a triangular kernel of `width` samples (odd), edge-renormalized.
inline std::vector<double> triangular_smooth(std::span<const double> x, std::size_t width) {
    const long half = static_cast<long>(width / 2);
    const long n = static_cast<long>(x.size());
    std::vector<double> out(x.size());
    for (long i = 0; i < n; ++i) {
        double acc = 0.0;
        double norm = 0.0;
        for (long k = -half; k <= half; ++k) {
            long j = i + k;
            if (j < 0 || j >= n) continue;
            double w = static_cast<double>(half + 1 - std::abs(k));
            acc += w * x[static_cast<std::size_t>(j)];
            norm += w;
        }
        out[static_cast<std::size_t>(i)] = acc / norm;
    }
    return out;
}

/// Ensemble purity of the exact quasistatic Ramsey evolution, averaged over Gaussian
/// eta ~ N(0, sigma^2) with a trapezoid rule on +-10 sigma. Noise along sigma_y, start
/// (|0> + e^{i phi}|1>)/sqrt(2).
inline double gaussian_quasistatic_purity(double sigma, double omega, double phi, double t, int nodes = 801) {
    M2 rho0{0.5, 0.5 * std::exp(cd(0.0, -phi)), 0.5 * std::exp(cd(0.0, phi)), 0.5};
    M2 mean{0.0, 0.0, 0.0, 0.0};
    double total = 0.0;
    const double span = 10.0;
    for (int i = 0; i < nodes; ++i) {
        double u = -span + 2.0 * span * i / (nodes - 1);
        double w = std::exp(-0.5 * u * u) * ((i == 0 || i == nodes - 1) ? 0.5 : 1.0);
        M2 rho = conjugate(propagator(omega, 0.0, sigma * u, t), rho0);
        for (int k = 0; k < 4; ++k) mean[k] += w * rho[k];
        total += w;
    }
    for (auto &e : mean) e /= total;
    return std::real(mul(mean, mean)[0] + mul(mean, mean)[3]);
}

}  // namespace testsupport
