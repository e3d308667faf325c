#include "anisoqubit/protocols.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <span>
#include <string>

#include "anisoqubit/parallel.h"
#include "anisoqubit/random.h"
#include "anisoqubit/units.h"

namespace anisoqubit {

namespace {

constexpr std::size_t kShotsPerBlock = 64;
constexpr std::uint64_t kStreamX = 0x78;  // 'x'
constexpr std::uint64_t kStreamY = 0x79;  // 'y'

struct RoutedSource {
    const NoiseSpec *spec = nullptr;
    std::uint64_t stream = 0;
};

/// Which generator feeds which axis.
struct Routing {
    AxisRouting mode = AxisRouting::y_only;
    RoutedSource primary;
    RoutedSource secondary;
    bool silent = false;
};

Routing resolve_routing(const ProtocolConfig &c) {
    Routing r;
    r.mode = c.two_axis.routing;
    const NoiseSpec *x = c.noise_x ? &*c.noise_x : nullptr;
    const NoiseSpec *y = c.noise_y ? &*c.noise_y : nullptr;
    auto source = [](const NoiseSpec *s, std::uint64_t tag) { return RoutedSource{s, splitmix64(s->seed) ^ tag}; };
    if (x == nullptr && y == nullptr) {
        r.silent = true;
        return r;
    }
    auto unresolvable = [&](const char *why) {
        return std::invalid_argument(std::string("noise routing '") + std::string(to_string(r.mode)) + "': " + why);
    };
    switch (r.mode) {
        case AxisRouting::x_only:
            if (x == nullptr || y != nullptr) throw unresolvable("needs noise_x only");
            r.primary = source(x, kStreamX);
            break;
        case AxisRouting::y_only:
            if (y == nullptr || x != nullptr) throw unresolvable("needs noise_y only");
            r.primary = source(y, kStreamY);
            break;
        case AxisRouting::correlated:
            if (x != nullptr && y != nullptr) throw unresolvable("needs exactly one noise source");
            r.primary = x != nullptr ? source(x, kStreamX) : source(y, kStreamY);
            break;
        case AxisRouting::uncorrelated:
            if (x == nullptr || y == nullptr) throw unresolvable("needs both noise_x and noise_y");
            r.primary = source(x, kStreamX);
            r.secondary = source(y, kStreamY);
            break;
    }
    return r;
}

/// Raw (ungated) noise for one shot on both axes.
void shot_noise(const Routing &routing, std::uint64_t master, std::size_t shot, std::size_t n, double dt,
                std::vector<double> &ex, std::vector<double> &ey) {
    ex.assign(n, 0.0);
    ey.assign(n, 0.0);
    if (routing.silent) return;
    double duration = dt * static_cast<double>(n);
    auto draw = [&](const RoutedSource &s) {
        return generate_trace(*s.spec, duration, dt, derive_seed(master, s.stream, shot)).samples;
    };
    NoiseTrace primary{draw(routing.primary), dt, 0.0};
    std::optional<NoiseTrace> secondary;
    if (routing.secondary.spec != nullptr) secondary = NoiseTrace{draw(routing.secondary), dt, 0.0};
    auto [x, y] = compose_two_axis(routing.mode, primary, secondary ? &*secondary : nullptr);
    ex = std::move(x.samples);
    ey = std::move(y.samples);
}

struct Variant {
    DensityMatrix initial;
    double noise_rotation = 0.0;
    std::size_t group = 0;
};

/// Reuses the propagator while the (gated) noise value is unchanged.
class StepCache {
   public:
    StepCache(double omega, double dt) : omega_(omega), dt_(dt) {}

    const Su2 &get(double ex, double ey) {
        if (!valid_ || ex != ex_ || ey != ey_) {
            u_ = su2_propagator(omega_, ex, ey, dt_);
            ex_ = ex;
            ey_ = ey;
            valid_ = true;
        }
        return u_;
    }

   private:
    double omega_;
    double dt_;
    double ex_ = 0.0;
    double ey_ = 0.0;
    bool valid_ = false;
    Su2 u_;
};

struct Sequence {
    double omega = 0.0;
    double tau_b = 0.0;
    double t_ramp = 0.0;
    ResolvedGrid grid;
    Su2 buffer;  // free evolution over tau_b
};

double up_ramp(double t, double t_ramp) {
    if (t_ramp <= 0.0) return 1.0;
    double s = t / t_ramp;
    return s >= 1.0 ? 1.0 : 0.5 * (1.0 - std::cos(std::numbers::pi * s));
}

/// Evolves one variant of one shot through every tau_n of the grid.
///
/// Steps whose midpoint lies before tau_n - t_ramp see the same envelope for every
/// tau_n >= 2 t_ramp, so that prefix is propagated once and only the closing ramp is
/// recomputed per grid point.
void evolve_variant(const Sequence &seq, const DensityMatrix &initial, std::span<const double> ex,
                    std::span<const double> ey, std::span<BlochMoments> out) {
    const double dt = seq.grid.dt;
    StepCache cache(seq.omega, dt);
    const DensityMatrix start = conjugate(seq.buffer, initial);
    DensityMatrix prefix = start;
    std::size_t prefix_done = 0;

    for (std::size_t i = 0; i < seq.grid.steps.size(); ++i) {
        const std::size_t n = seq.grid.steps[i];
        const double tau_n = static_cast<double>(n) * dt;
        DensityMatrix rho = start;
        std::size_t j = 0;
        if (!(seq.t_ramp > 0.0 && tau_n < 2.0 * seq.t_ramp)) {
            const double hold_end = tau_n - seq.t_ramp;
            while (prefix_done < n && (static_cast<double>(prefix_done) + 0.5) * dt < hold_end) {
                double env = up_ramp((static_cast<double>(prefix_done) + 0.5) * dt, seq.t_ramp);
                prefix = conjugate(cache.get(env * ex[prefix_done], env * ey[prefix_done]), prefix);
                ++prefix_done;
            }
            rho = prefix;
            j = std::min(prefix_done, n);
        }
        for (; j < n; ++j) {
            double env = gate_envelope((static_cast<double>(j) + 0.5) * dt, 0.0, tau_n, seq.t_ramp);
            rho = conjugate(cache.get(env * ex[j], env * ey[j]), rho);
        }
        rho = conjugate(seq.buffer, rho);
        out[i].add(rho.bloch());
    }
}

/// Runs every shot through every variant. Returns moments indexed [group][point],
/// reduced over fixed blocks of shots in block order.
std::vector<std::vector<BlochMoments>> run_engine(const ProtocolConfig &config, const std::vector<Variant> &variants,
                                                  std::size_t n_groups, const ExecutionOptions &exec,
                                                  ResolvedGrid &grid_out) {
    config.validate();
    Routing routing = resolve_routing(config);
    Sequence seq;
    seq.omega = config.omega();
    seq.tau_b = config.tau_b;
    seq.t_ramp = config.t_ramp;
    seq.grid = resolve_grid(config);
    seq.buffer = su2_propagator(seq.omega, 0.0, 0.0, config.tau_b);
    grid_out = seq.grid;

    const std::size_t n_points = seq.grid.steps.size();
    const std::size_t n_noise = std::max<std::size_t>(1, seq.grid.steps.back());
    const std::size_t n_blocks = (config.n_shots + kShotsPerBlock - 1) / kShotsPerBlock;

    std::vector<std::vector<BlochMoments>> partial(n_blocks);
    parallel_for(n_blocks, exec.threads, [&](std::size_t block) {
        std::vector<BlochMoments> acc(n_groups * n_points);
        std::vector<double> ex;
        std::vector<double> ey;
        std::vector<double> rx;
        std::vector<double> ry;
        std::size_t first = block * kShotsPerBlock;
        std::size_t last = std::min(config.n_shots, first + kShotsPerBlock);
        for (std::size_t shot = first; shot < last; ++shot) {
            shot_noise(routing, config.seed, shot, n_noise, seq.grid.dt, ex, ey);
            for (const Variant &v : variants) {
                std::span<BlochMoments> out(acc.data() + v.group * n_points, n_points);
                if (v.noise_rotation == 0.0) {
                    evolve_variant(seq, v.initial, ex, ey, out);
                } else {
                    rx = ex;
                    ry = ey;
                    rotate_noise_axes(rx, ry, v.noise_rotation);
                    evolve_variant(seq, v.initial, rx, ry, out);
                }
            }
        }
        partial[block] = std::move(acc);
    });

    std::vector<std::vector<BlochMoments>> result(n_groups, std::vector<BlochMoments>(n_points));
    std::vector<BlochMoments> column(n_blocks);
    for (std::size_t g = 0; g < n_groups; ++g) {
        for (std::size_t i = 0; i < n_points; ++i) {
            for (std::size_t b = 0; b < n_blocks; ++b) column[b] = partial[b][g * n_points + i];
            result[g][i] = reduce_pairwise(column);
        }
    }
    return result;
}

std::vector<double> rotation_angles(int rotations) {
    std::vector<double> out;
    for (int k = 0; k < rotations; ++k) out.push_back(kTwoPi * k / rotations);
    return out;
}

EnsembleResult assemble(const ProtocolConfig &config, const ResolvedGrid &grid, const std::vector<BlochMoments> &moments,
                        std::optional<double> transfer_phi) {
    EnsembleResult r;
    r.dt = grid.dt;
    const double omega_ref = config.omega() + mhz_to_angular(config.detuning_correction_mhz);
    for (std::size_t i = 0; i < moments.size(); ++i) {
        const BlochMoments &m = moments[i];
        double tau_n = grid.tau_n[i];
        double tau_total = 2.0 * config.tau_b + tau_n;
        BlochVector mean = m.mean();
        BlochVector readout{0.0, 0.0, 1.0};
        if (transfer_phi) {
            auto z_after = [&](const BlochVector &b) {
                return transfer_pulse(DensityMatrix::from_bloch(b), *transfer_phi, omega_ref, tau_total).bloch().z;
            };
            readout = {z_after({1.0, 0.0, 0.0}), z_after({0.0, 1.0, 0.0}), z_after({0.0, 0.0, 1.0})};
        }
        double z = std::clamp(readout.dot(mean), -1.0, 1.0);
        r.tau_n.push_back(tau_n);
        r.tau_total.push_back(tau_total);
        r.purity.push_back(m.purity());
        r.approx_purity.push_back(approx_purity(z));
        r.bloch_mean.push_back(mean);
        r.stderr_z.push_back(m.projected_stderr(readout));
        r.stderr_purity.push_back(m.purity_stderr());
        r.samples = static_cast<std::size_t>(m.count);
    }
    return r;
}

void write_row(std::ostream &out, std::initializer_list<double> values) {
    bool first = true;
    for (double v : values) {
        if (!first) out << ',';
        out << v;
        first = false;
    }
    out << '\n';
}

}  // namespace

double ProtocolConfig::omega() const { return mhz_to_angular(f01_mhz); }

void ProtocolConfig::validate() const {
    if (!(f01_mhz > 0.0) || !std::isfinite(f01_mhz)) throw std::invalid_argument("f01 must be positive");
    if (!(tau_b >= 0.0)) throw std::invalid_argument("tau_b must be >= 0");
    if (!(t_ramp >= 0.0)) throw std::invalid_argument("t_ramp must be >= 0");
    if (!(dt_max >= 0.0)) throw std::invalid_argument("dt_max must be >= 0");
    if (tau_n_grid.empty()) throw std::invalid_argument("tau_n grid is empty");
    for (std::size_t i = 0; i < tau_n_grid.size(); ++i) {
        if (!(tau_n_grid[i] >= 0.0) || !std::isfinite(tau_n_grid[i])) {
            throw std::invalid_argument("tau_n values must be finite and >= 0");
        }
        if (i > 0 && tau_n_grid[i] < tau_n_grid[i - 1]) throw std::invalid_argument("tau_n grid must be sorted");
    }
    if (n_shots < 1) throw std::invalid_argument("n_shots must be >= 1");
    if (noise_x) noise_x->validate();
    if (noise_y) noise_y->validate();
    two_axis.validate();
    resolve_routing(*this);
}

ResolvedGrid resolve_grid(const ProtocolConfig &config) {
    double fastest = 0.0;
    if (config.noise_x) fastest = std::max(fastest, config.noise_x->fastest_rate());
    if (config.noise_y) fastest = std::max(fastest, config.noise_y->fastest_rate());
    double dt_max = default_time_step(config.omega(), fastest);
    if (config.dt_max > 0.0) dt_max = std::min(dt_max, config.dt_max);

    const auto &g = config.tau_n_grid;
    double dt = dt_max;
    if (g.size() >= 2) {
        double step = g[1] - g[0];
        bool uniform = step > 0.0;
        for (std::size_t i = 2; uniform && i < g.size(); ++i) {
            uniform = std::abs((g[i] - g[i - 1]) - step) <= 1e-9 * step;
        }
        if (uniform) dt = step / std::ceil(step / dt_max - 1e-9);
    }
    ResolvedGrid r;
    r.dt = dt;
    for (double t : g) {
        auto n = static_cast<std::size_t>(std::llround(t / dt));
        r.steps.push_back(n);
        r.tau_n.push_back(static_cast<double>(n) * dt);
    }
    return r;
}

double EnsembleResult::approx_purity_stderr(std::size_t i) const {
    double z = std::sqrt(std::max(0.0, 2.0 * approx_purity[i] - 1.0));
    return z * stderr_z[i];
}

DensityMatrix prepare_equatorial(double phi) {
    return rotate_ideal(DensityMatrix::ground(), {-std::sin(phi), std::cos(phi), 0.0}, 0.5 * std::numbers::pi);
}

DensityMatrix transfer_pulse(const DensityMatrix &lab_state, double phi, double omega_ref, double tau_total) {
    DensityMatrix rotating = to_rotating_frame(lab_state, omega_ref, tau_total);
    return rotate_ideal(rotating, {-std::sin(phi), std::cos(phi), 0.0}, 0.5 * std::numbers::pi);
}

EnsembleResult run_ramsey(const ProtocolConfig &config, const ExecutionOptions &exec) {
    return run_phase_sweep(config, {config.phi}, exec).rows.front();
}

EnsembleResult run_relaxation(const ProtocolConfig &config, const ExecutionOptions &exec) {
    std::vector<Variant> variants;
    for (double angle : rotation_angles(config.two_axis.rotations)) {
        variants.push_back({DensityMatrix::excited(), angle, 0});
    }
    ResolvedGrid grid;
    auto moments = run_engine(config, variants, 1, exec, grid);
    return assemble(config, grid, moments.front(), std::nullopt);
}

PhaseSweepResult run_phase_sweep(const ProtocolConfig &config, const std::vector<double> &phi_values,
                                 const ExecutionOptions &exec) {
    if (phi_values.empty()) throw std::invalid_argument("phase sweep needs at least one phi value");
    std::vector<Variant> variants;
    for (std::size_t g = 0; g < phi_values.size(); ++g) {
        DensityMatrix initial = prepare_equatorial(phi_values[g]);
        for (double angle : rotation_angles(config.two_axis.rotations)) variants.push_back({initial, angle, g});
    }
    ResolvedGrid grid;
    auto moments = run_engine(config, variants, phi_values.size(), exec, grid);
    PhaseSweepResult out;
    out.phi = phi_values;
    for (std::size_t g = 0; g < phi_values.size(); ++g) {
        ProtocolConfig row = config;
        row.phi = phi_values[g];
        out.rows.push_back(assemble(row, grid, moments[g], phi_values[g]));
    }
    return out;
}

EnsembleResult run_isotropic_ensemble(const ProtocolConfig &config, int rotations, const ExecutionOptions &exec) {
    if (rotations < 1) throw std::invalid_argument("isotropic ensemble needs rotations >= 1");
    ProtocolConfig rotated = config;
    rotated.two_axis.rotations = rotations;
    return run_ramsey(rotated, exec);
}

void write_ensemble_csv(std::ostream &out, const EnsembleResult &r) {
    out << "tau_n_ns,tau_total_ns,purity,approx_purity,bloch_x,bloch_y,bloch_z,stderr_z,stderr_purity\n";
    out << std::setprecision(17);
    for (std::size_t i = 0; i < r.size(); ++i) {
        const BlochVector &b = r.bloch_mean[i];
        write_row(out, {r.tau_n[i], r.tau_total[i], r.purity[i], r.approx_purity[i], b.x, b.y, b.z, r.stderr_z[i],
                        r.stderr_purity[i]});
    }
}

void write_ensemble_csv(const std::filesystem::path &path, const EnsembleResult &result) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    write_ensemble_csv(out, result);
}

void write_phase_map_csv(std::ostream &out, const PhaseSweepResult &result) {
    out << "phi_deg,tau_n_ns,approx_purity\n" << std::setprecision(17);
    for (std::size_t g = 0; g < result.rows.size(); ++g) {
        const EnsembleResult &row = result.rows[g];
        for (std::size_t i = 0; i < row.size(); ++i) {
            write_row(out, {rad_to_deg(result.phi[g]), row.tau_n[i], row.approx_purity[i]});
        }
    }
}

void write_phase_map_csv(const std::filesystem::path &path, const PhaseSweepResult &result) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    write_phase_map_csv(out, result);
}

}  // namespace anisoqubit
