#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "anisoqubit/noise.h"
#include "anisoqubit/qubit.h"

namespace anisoqubit {

/// Fixed-step time grid. Stores every `record_stride`-th state, starting with the
/// initial one.
struct TrajectoryGrid {
    double dt = 0.01;
    std::size_t n_steps = 0;
    std::size_t record_stride = 1;

    std::size_t n_records() const { return n_steps / record_stride + 1; }
    /// Throws GridResolutionError unless dt <= tau_L/200 for the given qubit frequency.
    void validate(double omega) const;
};

/// Largest integration step that resolves both the Larmor phase and the noise
/// switching: min(tau_L/200, 1/(20 rate)).
double default_time_step(double omega, double fastest_noise_rate);

/// exp(-i dt [omega sz/2 + eta_x sx + eta_y sy]) in closed form.
Su2 su2_propagator(double omega, double eta_x, double eta_y, double dt);

DensityMatrix su2_step(const DensityMatrix &rho, double omega, double eta_x, double eta_y, double dt);

/// Sequential su2_step with noise held constant over each sample.
std::vector<DensityMatrix> propagate_trajectory(const DensityMatrix &rho0, double omega, const NoiseTrace &eta_x,
                                                const NoiseTrace &eta_y, const TrajectoryGrid &grid);

/// First and second moments of a set of Bloch vectors (one per shot).
///
/// Averaging Bloch vectors is the same as averaging density matrices, so the purity of
/// the ensemble-averaged state follows from the mean.
struct BlochMoments {
    double count = 0.0;
    std::array<double, 3> sum{};
    /// xx, yy, zz, xy, xz, yz
    std::array<double, 6> sum_sq{};

    void add(const BlochVector &b);
    void merge(const BlochMoments &other);

    BlochVector mean() const;
    /// Sample covariance of the projections r.b_s.
    double projected_variance(const BlochVector &r) const;
    /// Standard error of the mean of r.b_s.
    double projected_stderr(const BlochVector &r) const;
    /// tr(rho^2) of the averaged state.
    double purity() const;
    /// Delta-method standard error of purity().
    double purity_stderr() const;
};

/// Pairwise (recursive halving) merge in index order.
BlochMoments reduce_pairwise(std::span<const BlochMoments> parts);

struct EnsembleSeries {
    std::vector<DensityMatrix> mean;
    std::vector<double> purity;
    std::vector<BlochVector> bloch_mean;
    std::vector<double> stderr_z;
};

/// Averages density matrices pointwise, then takes the purity of the average.
EnsembleSeries ensemble_average(std::span<const std::vector<DensityMatrix>> trajectories);

using Matrix2 = std::array<std::complex<double>, 4>;  // row-major

struct JumpOperator {
    double rate = 0.0;
    Matrix2 op{};
};

/// Single-jump model L = cos(theta) sx + sin(theta) sy at rate gamma.
struct LindbladParams {
    double omega = 0.0;
    double gamma = 0.0;
    double theta = 0.0;
};

struct LindbladModel {
    double omega = 0.0;
    std::vector<JumpOperator> jumps;

    static LindbladModel single_axis(const LindbladParams &params);
    /// Jump operators sx/sqrt(2) and sy/sqrt(2), both at rate gamma.
    static LindbladModel isotropic_xy(double omega, double gamma);
    double total_rate() const;
    /// (d rho00/dt, d Re rho01/dt, d Im rho01/dt).
    std::array<double, 3> derivative(const DensityMatrix &rho) const;
};

/// Fixed-step RK4 integration of the master equation on (rho00, Re rho01, Im rho01).
/// Throws GridResolutionError when total_rate * dt > 0.01.
std::vector<DensityMatrix> lindblad_evolve(const DensityMatrix &rho0, const LindbladModel &model,
                                           const TrajectoryGrid &grid);
std::vector<DensityMatrix> lindblad_evolve(const DensityMatrix &rho0, const LindbladParams &params,
                                           const TrajectoryGrid &grid);

}  // namespace anisoqubit
