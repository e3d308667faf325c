#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace anisoqubit {

/// One-sided power spectral density. freqs in MHz, power in (signal units)^2/MHz,
/// resolution is the bin spacing in MHz. Summing power * resolution over all bins gives
/// the mean square of the (detrended) input.
struct Psd {
    std::vector<double> freqs;
    std::vector<double> power;
    double resolution = 0.0;
};

enum class Detrend { none, mean, linear };
enum class Window { rectangular, hann };

struct PeriodogramOptions {
    Detrend detrend = Detrend::mean;
};

struct WelchOptions {
    std::size_t segment_length = 256;
    double overlap_fraction = 0.5;
    Window window = Window::hann;
    Detrend detrend = Detrend::mean;
};

struct Peak {
    double freq = 0.0;   // MHz, parabolically interpolated
    double power = 0.0;  // power of the maximal bin
    std::size_t bin = 0;
};

class SpectralError : public std::invalid_argument {
   public:
    using std::invalid_argument::invalid_argument;
};

/// S(f) = |DFT{x}|^2 dt/N folded onto non-negative frequencies. dt in ns. Needs >= 8 samples.
Psd periodogram(std::span<const double> x, double dt, const PeriodogramOptions &options = {});

/// Averaged windowed periodograms, each normalized by sum(w^2) instead of N.
Psd welch_psd(std::span<const double> x, double dt, const WelchOptions &options);

/// Maximum-power bin with f_lo <= f <= f_hi (first bin wins ties), refined by three-point
/// parabolic interpolation. The DC bin is skipped unless include_dc is set.
Peak dominant_peak(const Psd &psd, std::pair<double, double> band, bool include_dc = false);

/// Power of the bin closest to f (MHz).
double power_at(const Psd &psd, double f);

/// Removes the mean or least-squares line.
std::vector<double> detrended(std::span<const double> x, Detrend mode);

/// CSV with header "freq_MHz,power_per_MHz".
void write_psd_csv(std::ostream &out, const Psd &psd);
void write_psd_csv(const std::filesystem::path &path, const Psd &psd);

}  // namespace anisoqubit
