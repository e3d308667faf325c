#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace anisoqubit {

/// Uniformly sampled real noise amplitude eta(t) in rad/ns.
///
/// Sample j holds its value over [t0 + j*dt, t0 + (j+1)*dt) (sample-and-hold).
struct NoiseTrace {
    std::vector<double> samples;
    double dt = 1.0;
    double t0 = 0.0;

    std::size_t size() const { return samples.size(); }
    double duration() const { return dt * static_cast<double>(samples.size()); }
    double time_of(std::size_t j) const { return t0 + dt * static_cast<double>(j); }
    void validate() const;
};

enum class NoiseKind { rts, gaussian_white, lowpass_rts, quasistatic };
enum class AmplitudeDistribution { bimodal, gaussian, uniform };

/// Declarative noise source, in user units (MHz).
///
/// amplitude_mhz is eta/2pi: the RTS level +-a, the Gaussian standard deviation, or the
/// half-width of the uniform distribution. switching_rate_mhz is the mean number of RTS
/// sign flips per microsecond. cutoff_mhz is the low-pass corner (lowpass-rts) or the
/// band edge of band-limited Gaussian white noise (optional for gaussian-white).
/// `seed` is a salt mixed into every per-shot seed of this source.
struct NoiseSpec {
    NoiseKind kind = NoiseKind::rts;
    double amplitude_mhz = 0.0;
    double switching_rate_mhz = 0.0;
    double cutoff_mhz = 0.0;
    AmplitudeDistribution distribution = AmplitudeDistribution::bimodal;
    std::uint64_t seed = 0;

    void validate() const;
    /// <eta^2> in (rad/ns)^2 for the stationary process.
    double variance() const;
    /// Largest rate (1/ns) the integration grid has to resolve; 0 for quasistatic noise.
    double fastest_rate() const;
};

enum class AxisRouting { x_only, y_only, correlated, uncorrelated };

/// Routing of noise sources onto sigma_x / sigma_y plus the number of noise-frame
/// rotations (2 pi k / rotations, k = 0..rotations-1) averaged by the protocol layer.
struct TwoAxisMode {
    AxisRouting routing = AxisRouting::y_only;
    int rotations = 1;

    void validate() const;
};

class GridResolutionError : public std::invalid_argument {
   public:
    using std::invalid_argument::invalid_argument;
};

class GridMismatch : public std::invalid_argument {
   public:
    using std::invalid_argument::invalid_argument;
};

std::string_view to_string(NoiseKind kind);
std::string_view to_string(AmplitudeDistribution d);
std::string_view to_string(AxisRouting r);
NoiseKind parse_noise_kind(std::string_view s);
AmplitudeDistribution parse_distribution(std::string_view s);
AxisRouting parse_routing(std::string_view s);

/// Number of samples covering `duration` at spacing dt (at least one).
std::size_t samples_for(double duration, double dt);

/// Two-valued +-amplitude telegraph signal; sign flips form a Poisson process of
/// `switching_rate` events per ns, so the autocorrelation is a^2 exp(-2 rate tau).
/// Throws GridResolutionError when dt > 1/(10 rate).
NoiseTrace gen_rts(double amplitude, double switching_rate, double duration, double dt, std::uint64_t seed);

/// Band-limited white Gaussian noise: i.i.d. N(0, sigma^2) values held for
/// max(dt, 1/(2 cutoff)) each. cutoff <= 0 holds each value for a single sample.
NoiseTrace gen_gaussian_white(double sigma, double cutoff, double duration, double dt, std::uint64_t seed);

/// One constant amplitude (rad/ns) per shot drawn from spec.distribution.
std::vector<double> gen_quasistatic(const NoiseSpec &spec, std::size_t n_shots, std::uint64_t seed);

/// Single-pole low-pass y[n] = y[n-1] + alpha (x[n] - y[n-1]), alpha = 1 - exp(-dt/tau),
/// tau = 1/(2 pi cutoff); the filter starts settled at x[0]. Throws when cutoff >= Nyquist.
NoiseTrace lowpass_filter(const NoiseTrace &trace, double cutoff);

/// Raised-cosine gate envelope at time t (relative to the start of the trace).
///
/// Zero outside [tau_b, tau_b + tau_n]. Inside, it rises as (1 - cos(pi s))/2 over the
/// first t_ramp, holds 1, and falls over the last t_ramp; the ramp length is capped at
/// tau_n/2 so the envelope always closes within the window.
double gate_envelope(double t, double tau_b, double tau_n, double t_ramp);

/// Multiplies each sample by the envelope evaluated at the sample midpoint.
NoiseTrace gate(const NoiseTrace &trace, double tau_b, double tau_n, double t_ramp);

/// Stationary trace of the given duration for any noise kind. Quasistatic specs produce
/// one constant draw; lowpass-rts discards a five-time-constant lead-in so the output is
/// stationary from its first sample.
NoiseTrace generate_trace(const NoiseSpec &spec, double duration, double dt, std::uint64_t seed);

/// (eta_x, eta_y) for the base rotation k = 0. x-only / y-only use one source and zero
/// the other axis; correlated copies `primary` onto both axes; uncorrelated uses
/// `primary` on x and `secondary` on y.
std::pair<NoiseTrace, NoiseTrace> compose_two_axis(AxisRouting routing, const NoiseTrace &primary,
                                                   const NoiseTrace *secondary = nullptr);

/// Rotates the noise vector (eta_x, eta_y) by `angle` about z in place.
void rotate_noise_axes(std::vector<double> &eta_x, std::vector<double> &eta_y, double angle);

/// CSV with header "t_ns,amplitude_MHz"; amplitudes are eta/2pi.
void write_trace_csv(std::ostream &out, const NoiseTrace &trace);
void write_trace_csv(const std::filesystem::path &path, const NoiseTrace &trace);
/// Reads the same format. Times must be uniformly spaced to 1e-6 relative.
NoiseTrace read_trace_csv(std::istream &in);
NoiseTrace read_trace_csv(const std::filesystem::path &path);

}  // namespace anisoqubit
