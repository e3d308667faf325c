#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <vector>

#include "anisoqubit/dynamics.h"
#include "anisoqubit/noise.h"
#include "anisoqubit/qubit.h"

namespace anisoqubit {

/// One injected-noise experiment. Frequencies in MHz, times in ns, angles in radians.
///
/// Sequence: ideal pi/2 pulse preparing (|0> + e^{i phi}|1>)/sqrt(2) at t = 0, noise-free
/// buffer tau_b, gated noise for tau_n (raised-cosine ramps of t_ramp inside the window),
/// second buffer tau_b, then an ideal pi/2 transfer pulse about the preparation axis in
/// the frame rotating at f01 + detuning_correction.
struct ProtocolConfig {
    double f01_mhz = 243.7;
    double phi = 0.0;
    double tau_b = 10.0;
    std::vector<double> tau_n_grid;
    double t_ramp = 0.5;
    std::optional<NoiseSpec> noise_x;
    std::optional<NoiseSpec> noise_y;
    TwoAxisMode two_axis;
    std::size_t n_shots = 1000;
    std::uint64_t seed = 1;
    double detuning_correction_mhz = 0.0;
    /// Upper bound on the integration step; 0 selects default_time_step.
    double dt_max = 0.0;

    double omega() const;
    void validate() const;
};

struct ExecutionOptions {
    unsigned threads = 1;
};

/// Integration step and the tau_n grid quantized onto it.
struct ResolvedGrid {
    double dt = 0.0;
    std::vector<std::size_t> steps;  // tau_n_i / dt
    std::vector<double> tau_n;       // steps_i * dt
};

ResolvedGrid resolve_grid(const ProtocolConfig &config);

struct EnsembleResult {
    std::vector<double> tau_n;
    std::vector<double> tau_total;
    /// tr(rho^2) of the ensemble-averaged state before the transfer pulse.
    std::vector<double> purity;
    /// <sigma_z>^2/2 + 1/2 after the transfer pulse (relaxation: no pulse).
    std::vector<double> approx_purity;
    /// Ensemble-mean lab-frame Bloch vector before the transfer pulse.
    std::vector<BlochVector> bloch_mean;
    /// Shot-statistics standard error of the measured <sigma_z>.
    std::vector<double> stderr_z;
    std::vector<double> stderr_purity;
    double dt = 0.0;
    std::size_t samples = 0;  // trajectories averaged per point

    std::size_t size() const { return tau_n.size(); }
    /// Delta-method standard error of approx_purity[i].
    double approx_purity_stderr(std::size_t i) const;
};

/// Density matrix after the transfer pulse that closes the Ramsey sequence.
DensityMatrix transfer_pulse(const DensityMatrix &lab_state, double phi, double omega_ref, double tau_total);

/// The preparation pulse: ideal pi/2 rotation of |0> about (-sin phi, cos phi, 0).
DensityMatrix prepare_equatorial(double phi);

EnsembleResult run_ramsey(const ProtocolConfig &config, const ExecutionOptions &exec = {});

/// Starts from |1><1| and reads out without a transfer pulse.
EnsembleResult run_relaxation(const ProtocolConfig &config, const ExecutionOptions &exec = {});

struct PhaseSweepResult {
    std::vector<double> phi;
    std::vector<EnsembleResult> rows;
};

/// run_ramsey for each phi with the same noise realizations (shared seeds).
PhaseSweepResult run_phase_sweep(const ProtocolConfig &config, const std::vector<double> &phi_values,
                                 const ExecutionOptions &exec = {});

/// Averages `rotations` copies of every shot with the noise vector rotated by
/// 2 pi k/rotations about z before taking the purity.
EnsembleResult run_isotropic_ensemble(const ProtocolConfig &config, int rotations, const ExecutionOptions &exec = {});

/// Header: tau_n_ns,tau_total_ns,purity,approx_purity,bloch_x,bloch_y,bloch_z,stderr_z,stderr_purity
void write_ensemble_csv(std::ostream &out, const EnsembleResult &result);
void write_ensemble_csv(const std::filesystem::path &path, const EnsembleResult &result);
/// Long format, header: phi_deg,tau_n_ns,approx_purity
void write_phase_map_csv(std::ostream &out, const PhaseSweepResult &result);
void write_phase_map_csv(const std::filesystem::path &path, const PhaseSweepResult &result);

}  // namespace anisoqubit
