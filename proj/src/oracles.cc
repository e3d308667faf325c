#include "anisoqubit/oracles.h"

#include <cmath>
#include <numbers>

namespace anisoqubit::oracles {

double quasistatic_ramsey_purity(double eta_var, double omega, double phi, double t) {
    double d = std::sin(phi) - std::sin(omega * t + phi);
    return 1.0 - 2.0 * eta_var / (omega * omega) * d * d;
}

double quasistatic_ramsey_purity_theta(double eta_var, double omega, double theta, double t) {
    double d = std::cos(theta) - std::cos(omega * t - theta);
    return 1.0 - 2.0 * eta_var / (omega * omega) * d * d;
}

double lindblad_ramsey_purity(double gamma, double omega, double theta, double t) {
    return 1.0 - gamma * t + gamma / (2.0 * omega) * (std::sin(2.0 * theta) - std::sin(2.0 * theta - 2.0 * omega * t));
}

double lindblad_ramsey_purity_rate(double gamma, double omega, double theta, double t) {
    return -gamma + gamma * std::cos(2.0 * theta - 2.0 * omega * t);
}

double quasistatic_relaxation_purity(double eta_var, double omega, double t) {
    return 1.0 - 4.0 * eta_var / (omega * omega) * (1.0 - std::cos(omega * t));
}

double isotropic_lindblad_purity(double gamma, double t) { return 0.5 * (1.0 + std::exp(-2.0 * gamma * t)); }

double damping_time_estimate(double omega, double eta) {
    if (eta == 0.0) throw DivergentEstimate("damping time diverges for zero noise amplitude");
    return std::numbers::pi * std::abs(omega) / (2.0 * eta * eta);
}

std::optional<std::string> quasistatic_validity(double eta_var, double omega) {
    double ratio = eta_var / (omega * omega);
    if (ratio > 0.25) {
        return "<eta^2>/omega^2 = " + std::to_string(ratio) + " is far outside the perturbative regime (> 0.25)";
    }
    if (ratio > 0.01) {
        return "<eta^2>/omega^2 = " + std::to_string(ratio) + " exceeds 0.01; O(eta^4/omega^4) terms may be visible";
    }
    return std::nullopt;
}

std::optional<std::string> lindblad_validity(double gamma, double t) {
    double gt = gamma * t;
    if (gt > 0.2) return "Gamma t = " + std::to_string(gt) + " is outside the first-order regime (> 0.2)";
    if (gt > 0.05) return "Gamma t = " + std::to_string(gt) + " exceeds 0.05; O(Gamma^2) terms may be visible";
    return std::nullopt;
}

}  // namespace anisoqubit::oracles
