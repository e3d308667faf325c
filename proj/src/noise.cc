#include "anisoqubit/noise.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>
#include <sstream>

#include "anisoqubit/random.h"
#include "anisoqubit/units.h"

namespace anisoqubit {

namespace {

constexpr double kGridSlack = 1e-9;

void require_positive_grid(double duration, double dt) {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("sample interval dt must be positive");
    if (!(duration >= dt * (1.0 - kGridSlack))) {
        throw std::invalid_argument("duration " + std::to_string(duration) + " ns is shorter than dt");
    }
}

double draw_amplitude(Rng &rng, AmplitudeDistribution d, double a) {
    switch (d) {
        case AmplitudeDistribution::bimodal:
            return a * rng.sign();
        case AmplitudeDistribution::gaussian:
            return a * rng.normal();
        case AmplitudeDistribution::uniform:
            return rng.uniform(-a, a);
    }
    return 0.0;
}

}  // namespace

void NoiseTrace::validate() const {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("noise trace dt must be positive");
    if (samples.empty()) throw std::invalid_argument("noise trace is empty");
    for (double v : samples) {
        if (!std::isfinite(v)) throw std::invalid_argument("noise trace contains a non-finite sample");
    }
}

void NoiseSpec::validate() const {
    if (!(amplitude_mhz >= 0.0) || !std::isfinite(amplitude_mhz)) {
        throw std::invalid_argument("noise amplitude must be finite and >= 0");
    }
    switch (kind) {
        case NoiseKind::rts:
            if (!(switching_rate_mhz >= 0.0)) throw std::invalid_argument("switching rate must be >= 0");
            break;
        case NoiseKind::lowpass_rts:
            if (!(switching_rate_mhz >= 0.0)) throw std::invalid_argument("switching rate must be >= 0");
            if (!(cutoff_mhz > 0.0)) throw std::invalid_argument("lowpass-rts needs cutoff > 0");
            break;
        case NoiseKind::gaussian_white:
            if (!(cutoff_mhz >= 0.0)) throw std::invalid_argument("cutoff must be >= 0");
            break;
        case NoiseKind::quasistatic:
            break;
    }
}

double NoiseSpec::variance() const {
    double a = mhz_to_angular(amplitude_mhz);
    switch (kind) {
        case NoiseKind::rts:
        case NoiseKind::gaussian_white:
            return a * a;
        case NoiseKind::lowpass_rts: {
            // Exponential autocorrelation (rate 2g) through a single pole (rate b):
            // output variance a^2 b/(2g + b).
            double b = kTwoPi * mhz_to_rate(cutoff_mhz);
            double g2 = 2.0 * mhz_to_rate(switching_rate_mhz);
            return a * a * b / (g2 + b);
        }
        case NoiseKind::quasistatic:
            return distribution == AmplitudeDistribution::uniform ? a * a / 3.0 : a * a;
    }
    return 0.0;
}

double NoiseSpec::fastest_rate() const {
    switch (kind) {
        case NoiseKind::rts:
            return mhz_to_rate(switching_rate_mhz);
        case NoiseKind::lowpass_rts:
            return std::max(mhz_to_rate(switching_rate_mhz), mhz_to_rate(cutoff_mhz));
        case NoiseKind::gaussian_white:
            return 2.0 * mhz_to_rate(cutoff_mhz);
        case NoiseKind::quasistatic:
            return 0.0;
    }
    return 0.0;
}

void TwoAxisMode::validate() const {
    if (rotations < 1) throw std::invalid_argument("rotated ensemble needs at least one rotation");
}

std::string_view to_string(NoiseKind kind) {
    switch (kind) {
        case NoiseKind::rts:
            return "rts";
        case NoiseKind::gaussian_white:
            return "gaussian-white";
        case NoiseKind::lowpass_rts:
            return "lowpass-rts";
        case NoiseKind::quasistatic:
            return "quasistatic";
    }
    return "?";
}

std::string_view to_string(AmplitudeDistribution d) {
    switch (d) {
        case AmplitudeDistribution::bimodal:
            return "bimodal";
        case AmplitudeDistribution::gaussian:
            return "gaussian";
        case AmplitudeDistribution::uniform:
            return "uniform";
    }
    return "?";
}

std::string_view to_string(AxisRouting r) {
    switch (r) {
        case AxisRouting::x_only:
            return "x-only";
        case AxisRouting::y_only:
            return "y-only";
        case AxisRouting::correlated:
            return "correlated";
        case AxisRouting::uncorrelated:
            return "uncorrelated";
    }
    return "?";
}

NoiseKind parse_noise_kind(std::string_view s) {
    for (auto k : {NoiseKind::rts, NoiseKind::gaussian_white, NoiseKind::lowpass_rts, NoiseKind::quasistatic}) {
        if (s == to_string(k)) return k;
    }
    throw std::invalid_argument("unknown noise kind '" + std::string(s) + "'");
}

AmplitudeDistribution parse_distribution(std::string_view s) {
    for (auto d : {AmplitudeDistribution::bimodal, AmplitudeDistribution::gaussian, AmplitudeDistribution::uniform}) {
        if (s == to_string(d)) return d;
    }
    throw std::invalid_argument("unknown amplitude distribution '" + std::string(s) + "'");
}

AxisRouting parse_routing(std::string_view s) {
    for (auto r : {AxisRouting::x_only, AxisRouting::y_only, AxisRouting::correlated, AxisRouting::uncorrelated}) {
        if (s == to_string(r)) return r;
    }
    throw std::invalid_argument("unknown axis routing '" + std::string(s) + "'");
}

std::size_t samples_for(double duration, double dt) {
    double n = std::ceil(duration / dt - kGridSlack);
    return std::max<std::size_t>(1, static_cast<std::size_t>(n));
}

NoiseTrace gen_rts(double amplitude, double switching_rate, double duration, double dt, std::uint64_t seed) {
    require_positive_grid(duration, dt);
    if (!(amplitude >= 0.0) || !(switching_rate >= 0.0)) {
        throw std::invalid_argument("RTS amplitude and switching rate must be >= 0");
    }
    if (dt * 10.0 * switching_rate > 1.0 + kGridSlack) {
        throw GridResolutionError("dt = " + std::to_string(dt) + " ns does not resolve RTS switching at " +
                                  std::to_string(switching_rate) + "/ns (need dt <= 1/(10 rate))");
    }
    NoiseTrace trace;
    trace.dt = dt;
    trace.samples.resize(samples_for(duration, dt));

    Rng rng(seed);
    double sign = rng.sign();
    double next_switch = rng.exponential(switching_rate);
    for (std::size_t j = 0; j < trace.samples.size(); ++j) {
        double t = dt * static_cast<double>(j);
        while (next_switch <= t) {
            sign = -sign;
            next_switch += rng.exponential(switching_rate);
        }
        trace.samples[j] = sign * amplitude;
    }
    return trace;
}

NoiseTrace gen_gaussian_white(double sigma, double cutoff, double duration, double dt, std::uint64_t seed) {
    require_positive_grid(duration, dt);
    if (!(sigma >= 0.0)) throw std::invalid_argument("Gaussian noise sigma must be >= 0");
    double hold = cutoff > 0.0 ? std::max(dt, 0.5 / cutoff) : dt;

    NoiseTrace trace;
    trace.dt = dt;
    trace.samples.resize(samples_for(duration, dt));
    Rng rng(seed);
    long long held_index = -1;
    double value = 0.0;
    for (std::size_t j = 0; j < trace.samples.size(); ++j) {
        auto idx = static_cast<long long>(std::floor((static_cast<double>(j) * dt + 0.5 * dt) / hold));
        while (held_index < idx) {
            value = sigma * rng.normal();
            ++held_index;
        }
        trace.samples[j] = value;
    }
    return trace;
}

std::vector<double> gen_quasistatic(const NoiseSpec &spec, std::size_t n_shots, std::uint64_t seed) {
    spec.validate();
    double a = mhz_to_angular(spec.amplitude_mhz);
    Rng rng(seed);
    std::vector<double> draws(n_shots);
    for (auto &d : draws) d = draw_amplitude(rng, spec.distribution, a);
    return draws;
}

NoiseTrace lowpass_filter(const NoiseTrace &trace, double cutoff) {
    trace.validate();
    double nyquist = 0.5 / trace.dt;
    if (!(cutoff > 0.0) || cutoff >= nyquist) {
        throw GridResolutionError("low-pass cutoff " + std::to_string(cutoff) + "/ns must be in (0, Nyquist = " +
                                  std::to_string(nyquist) + "/ns)");
    }
    double tau = 1.0 / (kTwoPi * cutoff);
    double alpha = -std::expm1(-trace.dt / tau);

    NoiseTrace out = trace;
    double y = trace.samples.front();
    for (auto &v : out.samples) {
        y += alpha * (v - y);
        v = y;
    }
    return out;
}

double gate_envelope(double t, double tau_b, double tau_n, double t_ramp) {
    double from_start = t - tau_b;
    double to_end = tau_b + tau_n - t;
    if (from_start < 0.0 || to_end < 0.0 || tau_n <= 0.0) return 0.0;
    double ramp = std::min(t_ramp, 0.5 * tau_n);
    if (ramp <= 0.0) return 1.0;
    double edge = std::min(from_start, to_end) / ramp;
    if (edge >= 1.0) return 1.0;
    return 0.5 * (1.0 - std::cos(std::numbers::pi * edge));
}

NoiseTrace gate(const NoiseTrace &trace, double tau_b, double tau_n, double t_ramp) {
    trace.validate();
    if (tau_b < 0.0 || tau_n < 0.0 || t_ramp < 0.0) {
        throw std::invalid_argument("gate timings must be non-negative");
    }
    if (tau_b + tau_n > trace.duration() * (1.0 + kGridSlack)) {
        throw std::invalid_argument("gate window [" + std::to_string(tau_b) + ", " + std::to_string(tau_b + tau_n) +
                                    "] ns exceeds the trace length " + std::to_string(trace.duration()) + " ns");
    }
    NoiseTrace out = trace;
    for (std::size_t j = 0; j < out.samples.size(); ++j) {
        double mid = trace.dt * (static_cast<double>(j) + 0.5);
        out.samples[j] *= gate_envelope(mid, tau_b, tau_n, t_ramp);
    }
    return out;
}

NoiseTrace generate_trace(const NoiseSpec &spec, double duration, double dt, std::uint64_t seed) {
    spec.validate();
    require_positive_grid(duration, dt);
    double a = mhz_to_angular(spec.amplitude_mhz);
    switch (spec.kind) {
        case NoiseKind::rts:
            return gen_rts(a, mhz_to_rate(spec.switching_rate_mhz), duration, dt, seed);
        case NoiseKind::gaussian_white:
            return gen_gaussian_white(a, mhz_to_rate(spec.cutoff_mhz), duration, dt, seed);
        case NoiseKind::lowpass_rts: {
            double cutoff = mhz_to_rate(spec.cutoff_mhz);
            double lead_in = 5.0 / (kTwoPi * cutoff);
            std::size_t n_lead = samples_for(lead_in, dt);
            std::size_t n = samples_for(duration, dt);
            NoiseTrace raw = gen_rts(a, mhz_to_rate(spec.switching_rate_mhz), dt * static_cast<double>(n + n_lead), dt,
                                     seed);
            NoiseTrace filtered = lowpass_filter(raw, cutoff);
            NoiseTrace out;
            out.dt = dt;
            out.samples.assign(filtered.samples.begin() + static_cast<std::ptrdiff_t>(n_lead),
                               filtered.samples.begin() + static_cast<std::ptrdiff_t>(n_lead + n));
            return out;
        }
        case NoiseKind::quasistatic: {
            Rng rng(seed);
            NoiseTrace out;
            out.dt = dt;
            out.samples.assign(samples_for(duration, dt), draw_amplitude(rng, spec.distribution, a));
            return out;
        }
    }
    throw std::logic_error("unhandled noise kind");
}

std::pair<NoiseTrace, NoiseTrace> compose_two_axis(AxisRouting routing, const NoiseTrace &primary,
                                                   const NoiseTrace *secondary) {
    primary.validate();
    NoiseTrace zero = primary;
    std::fill(zero.samples.begin(), zero.samples.end(), 0.0);
    switch (routing) {
        case AxisRouting::x_only:
            return {primary, zero};
        case AxisRouting::y_only:
            return {zero, primary};
        case AxisRouting::correlated:
            return {primary, primary};
        case AxisRouting::uncorrelated: {
            if (secondary == nullptr) throw std::invalid_argument("uncorrelated routing needs two noise traces");
            secondary->validate();
            if (secondary->size() != primary.size() || std::abs(secondary->dt - primary.dt) > 1e-12 * primary.dt) {
                throw GridMismatch("uncorrelated noise traces do not share a sample grid");
            }
            return {primary, *secondary};
        }
    }
    throw std::logic_error("unhandled axis routing");
}

void rotate_noise_axes(std::vector<double> &eta_x, std::vector<double> &eta_y, double angle) {
    if (eta_x.size() != eta_y.size()) throw GridMismatch("noise axes have different lengths");
    if (angle == 0.0) return;
    double c = std::cos(angle);
    double s = std::sin(angle);
    for (std::size_t j = 0; j < eta_x.size(); ++j) {
        double x = eta_x[j];
        double y = eta_y[j];
        eta_x[j] = c * x - s * y;
        eta_y[j] = s * x + c * y;
    }
}

void write_trace_csv(std::ostream &out, const NoiseTrace &trace) {
    out << "t_ns,amplitude_MHz\n";
    out << std::setprecision(17);
    for (std::size_t j = 0; j < trace.size(); ++j) {
        out << trace.time_of(j) << ',' << angular_to_mhz(trace.samples[j]) << '\n';
    }
}

void write_trace_csv(const std::filesystem::path &path, const NoiseTrace &trace) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    write_trace_csv(out, trace);
}

NoiseTrace read_trace_csv(std::istream &in) {
    std::string line;
    std::vector<double> times;
    std::vector<double> values;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        if (line_no == 1 && (std::isalpha(static_cast<unsigned char>(line[0])) != 0)) continue;  // header
        std::istringstream row(line);
        double t = 0.0;
        double a = 0.0;
        char comma = 0;
        if (!(row >> t >> comma >> a) || comma != ',') {
            throw std::invalid_argument("noise CSV line " + std::to_string(line_no) + ": expected 't_ns,amplitude_MHz'");
        }
        times.push_back(t);
        values.push_back(mhz_to_angular(a));
    }
    if (times.size() < 2) throw std::invalid_argument("noise CSV needs at least two samples to define dt");
    double dt = times[1] - times[0];
    if (!(dt > 0.0)) throw std::invalid_argument("noise CSV times must increase");
    for (std::size_t j = 1; j < times.size(); ++j) {
        double expected = times[0] + dt * static_cast<double>(j);
        if (std::abs(times[j] - expected) > 1e-6 * dt * static_cast<double>(j)) {
            throw GridMismatch("noise CSV is not uniformly sampled at row " + std::to_string(j + 1));
        }
    }
    NoiseTrace trace{std::move(values), dt, times[0]};
    trace.validate();
    return trace;
}

NoiseTrace read_trace_csv(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    return read_trace_csv(in);
}

}  // namespace anisoqubit
