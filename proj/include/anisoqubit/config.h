#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "anisoqubit/protocols.h"
#include "anisoqubit/spectral.h"

namespace anisoqubit {

/// Schema violation or parse failure. `where` is a dotted field path or "line L, column C".
class ConfigError : public std::runtime_error {
   public:
    ConfigError(std::string where, const std::string &what)
        : std::runtime_error(where.empty() ? what : where + ": " + what), where_(std::move(where)) {}
    const std::string &where() const { return where_; }

   private:
    std::string where_;
};

enum class PsdMethod { periodogram, welch };
enum class PsdSeries { approx_purity, purity };

struct PsdSettings {
    PsdMethod method = PsdMethod::periodogram;
    PsdSeries series = PsdSeries::approx_purity;
    Detrend detrend = Detrend::mean;
    std::size_t segment_length = 256;
    double overlap = 0.5;
    /// Noise trace CSV to analyse instead of a simulated purity series.
    std::string input;
};

enum class OracleModel { quasistatic_ramsey, quasistatic_relaxation, lindblad_ramsey, isotropic_lindblad };

struct OracleSettings {
    OracleModel model = OracleModel::quasistatic_ramsey;
    /// Lindblad rate as Gamma/2pi.
    double gamma_mhz = 0.0;
    double theta_deg = 0.0;
    /// rms noise as eta/2pi; unset takes the variance of the configured noise.
    std::optional<double> eta_rms_mhz;
};

struct NoiseGenSettings {
    double duration_ns = 1000.0;
    double dt_ns = 0.1;
    std::size_t traces = 1;
};

struct RunConfig {
    ProtocolConfig protocol;
    std::vector<double> phi_sweep;  // radians
    int isotropic_rotations = 19;
    std::optional<unsigned> threads;
    OracleSettings oracle;
    PsdSettings psd;
    NoiseGenSettings noise_gen;
    std::filesystem::path output_dir = ".";
    std::string prefix;

    /// "path = value" for every optional field that was not given.
    std::vector<std::string> defaulted;
};

/// Strict JSON config: unknown keys are rejected, missing required fields are listed
/// together, and parse errors carry line and column.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::filesystem::path &path);

/// Sorted-key JSON of the fully resolved configuration; identical for configs that differ
/// only in formatting, key order, or spelling out defaults.
std::string canonical_json(const RunConfig &config);
std::string config_digest(const RunConfig &config);

/// Human-readable summary used by the `validate` subcommand.
std::string validation_report(const RunConfig &config);

std::string_view to_string(OracleModel m);

}  // namespace anisoqubit
