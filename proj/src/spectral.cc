#include "anisoqubit/spectral.h"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <memory>
#include <mutex>
#include <numbers>
#include <numeric>
#include <string>

namespace anisoqubit {

namespace {

// The FFTW planner is not thread-safe; execution of an existing plan is.
std::mutex &planner_mutex() {
    static std::mutex m;
    return m;
}

struct FftwFree {
    void operator()(void *p) const { fftw_free(p); }
};

/// |DFT{x}|^2 for k = 0..N/2 via a real-to-complex transform.
std::vector<double> power_spectrum(std::span<const double> x) {
    const std::size_t n = x.size();
    const std::size_t n_out = n / 2 + 1;
    std::unique_ptr<double, FftwFree> in(fftw_alloc_real(n));
    std::unique_ptr<fftw_complex, FftwFree> out(fftw_alloc_complex(n_out));
    if (!in || !out) throw std::bad_alloc();

    fftw_plan plan = nullptr;
    {
        std::lock_guard lock(planner_mutex());
        plan = fftw_plan_dft_r2c_1d(static_cast<int>(n), in.get(), out.get(), FFTW_ESTIMATE);
    }
    if (plan == nullptr) throw std::runtime_error("FFTW failed to create a plan");
    std::copy(x.begin(), x.end(), in.get());
    fftw_execute(plan);
    {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(plan);
    }
    std::vector<double> p(n_out);
    for (std::size_t k = 0; k < n_out; ++k) p[k] = out.get()[k][0] * out.get()[k][0] + out.get()[k][1] * out.get()[k][1];
    return p;
}

std::vector<double> make_window(Window w, std::size_t n) {
    std::vector<double> out(n, 1.0);
    if (w == Window::hann) {
        for (std::size_t i = 0; i < n; ++i) {
            out[i] = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n)));
        }
    }
    return out;
}

/// One-sided PSD of one segment, accumulated into `acc`.
void accumulate_segment(std::span<const double> segment, double dt_us, Detrend detrend, const std::vector<double> &window,
                        double window_power, std::vector<double> &acc) {
    std::vector<double> x = detrended(segment, detrend);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] *= window[i];
    std::vector<double> p = power_spectrum(x);
    const std::size_t n = segment.size();
    for (std::size_t k = 0; k < p.size(); ++k) {
        double s = p[k] * dt_us / window_power;
        bool unpaired = (k == 0) || (n % 2 == 0 && k == n / 2);
        acc[k] += unpaired ? s : 2.0 * s;
    }
}

Psd empty_psd(std::size_t segment_length, double dt_us) {
    Psd psd;
    std::size_t n_out = segment_length / 2 + 1;
    psd.resolution = 1.0 / (static_cast<double>(segment_length) * dt_us);
    psd.freqs.resize(n_out);
    for (std::size_t k = 0; k < n_out; ++k) psd.freqs[k] = static_cast<double>(k) * psd.resolution;
    psd.power.assign(n_out, 0.0);
    return psd;
}

}  // namespace

std::vector<double> detrended(std::span<const double> x, Detrend mode) {
    std::vector<double> out(x.begin(), x.end());
    if (mode == Detrend::none || out.empty()) return out;
    const double n = static_cast<double>(out.size());
    if (mode == Detrend::mean) {
        double mean = std::accumulate(out.begin(), out.end(), 0.0) / n;
        for (auto &v : out) v -= mean;
        return out;
    }
    double ti = (n - 1.0) / 2.0;
    double sxx = 0.0;
    double sxy = 0.0;
    double mean = std::accumulate(out.begin(), out.end(), 0.0) / n;
    for (std::size_t i = 0; i < out.size(); ++i) {
        double dx = static_cast<double>(i) - ti;
        sxx += dx * dx;
        sxy += dx * (out[i] - mean);
    }
    double slope = sxx > 0.0 ? sxy / sxx : 0.0;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] -= mean + slope * (static_cast<double>(i) - ti);
    return out;
}

Psd periodogram(std::span<const double> x, double dt, const PeriodogramOptions &options) {
    return welch_psd(x, dt, {x.size(), 0.0, Window::rectangular, options.detrend});
}

Psd welch_psd(std::span<const double> x, double dt, const WelchOptions &options) {
    if (x.size() < 8) throw SpectralError("PSD needs at least 8 samples, got " + std::to_string(x.size()));
    if (!(dt > 0.0)) throw SpectralError("sample interval must be positive");
    const std::size_t seg = options.segment_length;
    if (seg < 8 || seg > x.size()) {
        throw SpectralError("segment length " + std::to_string(seg) + " must be in [8, " + std::to_string(x.size()) +
                            "]");
    }
    if (!(options.overlap_fraction >= 0.0 && options.overlap_fraction <= 0.9)) {
        throw SpectralError("overlap fraction must be in [0, 0.9]");
    }
    auto overlap = static_cast<std::size_t>(std::llround(options.overlap_fraction * static_cast<double>(seg)));
    std::size_t step = std::max<std::size_t>(1, seg - std::min(overlap, seg - 1));

    const double dt_us = dt * 1e-3;
    std::vector<double> window = make_window(options.window, seg);
    double window_power = 0.0;
    for (double w : window) window_power += w * w;

    Psd psd = empty_psd(seg, dt_us);
    std::size_t n_segments = 0;
    for (std::size_t start = 0; start + seg <= x.size(); start += step) {
        accumulate_segment(x.subspan(start, seg), dt_us, options.detrend, window, window_power, psd.power);
        ++n_segments;
    }
    if (n_segments > 1) {
        for (auto &p : psd.power) p /= static_cast<double>(n_segments);
    }
    return psd;
}

Peak dominant_peak(const Psd &psd, std::pair<double, double> band, bool include_dc) {
    auto [lo, hi] = band;
    std::size_t best = psd.power.size();
    for (std::size_t k = 0; k < psd.power.size(); ++k) {
        if (k == 0 && !include_dc) continue;
        if (psd.freqs[k] < lo || psd.freqs[k] > hi) continue;
        if (best == psd.power.size() || psd.power[k] > psd.power[best]) best = k;
    }
    if (best == psd.power.size()) {
        throw SpectralError("no PSD bins in band [" + std::to_string(lo) + ", " + std::to_string(hi) + "] MHz");
    }
    Peak peak{psd.freqs[best], psd.power[best], best};
    if (best > 0 && best + 1 < psd.power.size()) {
        double a = psd.power[best - 1];
        double b = psd.power[best];
        double c = psd.power[best + 1];
        double denom = a - 2.0 * b + c;
        if (denom < 0.0) {
            double delta = std::clamp(0.5 * (a - c) / denom, -0.5, 0.5);
            peak.freq += delta * psd.resolution;
        }
    }
    return peak;
}

double power_at(const Psd &psd, double f) {
    if (psd.power.empty()) throw SpectralError("empty PSD");
    auto k = static_cast<long long>(std::llround(f / psd.resolution));
    k = std::clamp<long long>(k, 0, static_cast<long long>(psd.power.size()) - 1);
    return psd.power[static_cast<std::size_t>(k)];
}

void write_psd_csv(std::ostream &out, const Psd &psd) {
    out << "freq_MHz,power_per_MHz\n" << std::setprecision(17);
    for (std::size_t k = 0; k < psd.freqs.size(); ++k) out << psd.freqs[k] << ',' << psd.power[k] << '\n';
}

void write_psd_csv(const std::filesystem::path &path, const Psd &psd) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    write_psd_csv(out, psd);
}

}  // namespace anisoqubit
