#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace anisoqubit::oracles {

// Closed-form purity predictions for H = +omega sz/2 + eta (cos(theta) sx + sin(theta) sy).
//
// The published expressions are written for H = -omega sz/2; flipping the sign of omega
// mirrors the XY plane, so they are used here with phi -> -phi (theta -> -theta). The
// two conventions agree whenever the noise axis is parallel or perpendicular to the
// initial state. Nothing in this file depends on the dynamics engine.

/// Quasistatic noise, initial state (|0> + e^{i phi}|1>)/sqrt(2), noise along sigma_y:
/// 1 - (2 <eta^2>/omega^2) (sin(phi) - sin(omega t + phi))^2.
double quasistatic_ramsey_purity(double eta_var, double omega, double phi, double t);

/// Same prediction with the initial state on +x and the noise axis at angle theta from x:
/// 1 - (2 <eta^2>/omega^2) (cos(theta) - cos(omega t - theta))^2. theta = pi/2 - phi.
double quasistatic_ramsey_purity_theta(double eta_var, double omega, double theta, double t);

/// First-order purity of the single-jump Lindblad model started on +x:
/// 1 - Gamma t + (Gamma/2 omega)(sin(2 theta) - sin(2 theta - 2 omega t)).
double lindblad_ramsey_purity(double gamma, double omega, double theta, double t);

/// d/dt of lindblad_ramsey_purity: -Gamma + Gamma cos(2 theta - 2 omega t), in [-2 Gamma, 0].
double lindblad_ramsey_purity_rate(double gamma, double omega, double theta, double t);

/// Quasistatic noise starting from a pole: 1 - (4 <eta^2>/omega^2)(1 - cos(omega t)).
double quasistatic_relaxation_purity(double eta_var, double omega, double t);

/// Isotropic Markovian noise: (1 + exp(-2 Gamma t))/2.
double isotropic_lindblad_purity(double gamma, double t);

class DivergentEstimate : public std::domain_error {
   public:
    using std::domain_error::domain_error;
};

/// Time for orbits with and without quasistatic noise eta to dephase by pi:
/// pi omega / (2 eta^2). Throws DivergentEstimate for eta = 0.
double damping_time_estimate(double omega, double eta);

/// Warning text when <eta^2>/omega^2 leaves the perturbative regime (> 0.01), empty otherwise.
std::optional<std::string> quasistatic_validity(double eta_var, double omega);
/// Warning text when Gamma t exceeds the first-order regime (> 0.05), empty otherwise.
std::optional<std::string> lindblad_validity(double gamma, double t);

}  // namespace anisoqubit::oracles
