// anisoqubit: Ramsey / relaxation purity simulations under anisotropic transverse noise.

#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>

#include "anisoqubit/config.h"
#include "anisoqubit/manifest.h"
#include "anisoqubit/noise.h"
#include "anisoqubit/oracles.h"
#include "anisoqubit/protocols.h"
#include "anisoqubit/random.h"
#include "anisoqubit/spectral.h"
#include "anisoqubit/units.h"

namespace fs = std::filesystem;
using namespace anisoqubit;

namespace {

struct Options {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> threads;
    std::string out;
};

struct Run {
    RunConfig cfg;
    unsigned threads = 1;
    fs::path dir;
    RunManifest manifest;
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

    fs::path output(const std::string &name) const { return dir / (cfg.prefix + name); }

    void record(const fs::path &p) { manifest.outputs.push_back({p.filename().string(), file_digest(p)}); }

    void finish(const std::string &name, double trajectories) {
        double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        manifest.wall_seconds = wall;
        manifest.shots_per_second = wall > 0.0 ? trajectories / wall : 0.0;
        fs::path path = output(name + ".manifest.json");
        write_manifest(path, manifest);
        for (const auto &o : manifest.outputs) std::cout << (dir / o.path).string() << "\n";
        std::cout << path.string() << "\n";
    }
};

unsigned default_threads() {
    if (const char *env = std::getenv("ANISOQUBIT_THREADS")) {
        try {
            int n = std::stoi(env);
            if (n >= 1) return static_cast<unsigned>(n);
        } catch (const std::exception &) {
        }
        std::cerr << "warning: ignoring ANISOQUBIT_THREADS='" << env << "'\n";
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

Run prepare(const Options &opt, const std::string &command) {
    Run run;
    run.cfg = load_config(opt.config);
    if (opt.seed) run.cfg.protocol.seed = *opt.seed;
    if (!opt.out.empty()) run.cfg.output_dir = opt.out;
    run.threads = opt.threads ? *opt.threads : run.cfg.threads ? *run.cfg.threads : default_threads();
    run.dir = run.cfg.output_dir;
    fs::create_directories(run.dir);
    run.manifest.command = command;
    run.manifest.config_digest = config_digest(run.cfg);
    run.manifest.seed = run.cfg.protocol.seed;
    run.manifest.threads = run.threads;
    return run;
}

void warn_validity(const ProtocolConfig &p) {
    for (const auto *spec : {p.noise_x ? &*p.noise_x : nullptr, p.noise_y ? &*p.noise_y : nullptr}) {
        if (spec == nullptr) continue;
        if (auto w = oracles::quasistatic_validity(spec->variance(), p.omega())) std::cerr << "warning: " << *w << "\n";
    }
}

double trajectories(const ProtocolConfig &p, std::size_t variants) {
    return static_cast<double>(p.n_shots) * static_cast<double>(variants) * p.two_axis.rotations;
}

int cmd_ramsey(const Options &opt) {
    Run run = prepare(opt, "ramsey");
    warn_validity(run.cfg.protocol);
    auto result = run_ramsey(run.cfg.protocol, {run.threads});
    fs::path p = run.output("ramsey.csv");
    write_ensemble_csv(p, result);
    run.record(p);
    run.finish("ramsey", trajectories(run.cfg.protocol, 1));
    return 0;
}

int cmd_relaxation(const Options &opt) {
    Run run = prepare(opt, "relaxation");
    warn_validity(run.cfg.protocol);
    auto result = run_relaxation(run.cfg.protocol, {run.threads});
    fs::path p = run.output("relaxation.csv");
    write_ensemble_csv(p, result);
    run.record(p);
    run.finish("relaxation", trajectories(run.cfg.protocol, 1));
    return 0;
}

int cmd_phase_sweep(const Options &opt) {
    Run run = prepare(opt, "phase-sweep");
    warn_validity(run.cfg.protocol);
    auto result = run_phase_sweep(run.cfg.protocol, run.cfg.phi_sweep, {run.threads});
    fs::path p = run.output("phase_map.csv");
    write_phase_map_csv(p, result);
    run.record(p);
    run.finish("phase_sweep", trajectories(run.cfg.protocol, run.cfg.phi_sweep.size()));
    return 0;
}

int cmd_isotropic(const Options &opt) {
    Run run = prepare(opt, "isotropic");
    warn_validity(run.cfg.protocol);
    auto result = run_isotropic_ensemble(run.cfg.protocol, run.cfg.isotropic_rotations, {run.threads});
    fs::path p = run.output("isotropic.csv");
    write_ensemble_csv(p, result);
    run.record(p);
    double n = static_cast<double>(run.cfg.protocol.n_shots) * run.cfg.isotropic_rotations;
    run.finish("isotropic", n);
    return 0;
}

Psd estimate(const PsdSettings &s, std::span<const double> x, double dt) {
    if (s.method == PsdMethod::welch) {
        WelchOptions w;
        w.segment_length = std::min(s.segment_length, x.size());
        w.overlap_fraction = s.overlap;
        w.detrend = s.detrend;
        return welch_psd(x, dt, w);
    }
    return periodogram(x, dt, {s.detrend});
}

int cmd_psd(const Options &opt) {
    Run run = prepare(opt, "psd");
    const PsdSettings &s = run.cfg.psd;
    Psd psd;
    double n_traj = 0.0;
    if (!s.input.empty()) {
        NoiseTrace trace = read_trace_csv(fs::path(s.input));
        std::vector<double> mhz(trace.samples.size());
        for (std::size_t i = 0; i < mhz.size(); ++i) mhz[i] = angular_to_mhz(trace.samples[i]);
        psd = estimate(s, mhz, trace.dt);
    } else {
        warn_validity(run.cfg.protocol);
        auto result = run_ramsey(run.cfg.protocol, {run.threads});
        fs::path rp = run.output("psd_series.csv");
        write_ensemble_csv(rp, result);
        run.record(rp);
        if (result.size() < 2) throw std::invalid_argument("PSD of a purity series needs a uniform tau_n grid");
        double step = result.tau_n[1] - result.tau_n[0];
        for (std::size_t i = 2; i < result.size(); ++i) {
            if (std::abs(result.tau_n[i] - result.tau_n[i - 1] - step) > 1e-9 * step) {
                throw std::invalid_argument("PSD of a purity series needs a uniform tau_n grid");
            }
        }
        const auto &series = s.series == PsdSeries::purity ? result.purity : result.approx_purity;
        psd = estimate(s, series, step);
        n_traj = trajectories(run.cfg.protocol, 1);
        Peak peak = dominant_peak(psd, {0.0, psd.freqs.back()});
        std::cerr << "dominant peak: " << peak.freq << " MHz (f01 = " << run.cfg.protocol.f01_mhz << " MHz)\n";
    }
    fs::path p = run.output("psd.csv");
    write_psd_csv(p, psd);
    run.record(p);
    run.finish("psd", n_traj);
    return 0;
}

int cmd_oracle(const Options &opt) {
    Run run = prepare(opt, "oracle");
    const ProtocolConfig &pc = run.cfg.protocol;
    const OracleSettings &o = run.cfg.oracle;
    const double omega = pc.omega();
    double eta_var = 0.0;
    if (o.eta_rms_mhz) {
        eta_var = std::pow(mhz_to_angular(*o.eta_rms_mhz), 2);
    } else if (pc.noise_y) {
        eta_var = pc.noise_y->variance();
    } else if (pc.noise_x) {
        eta_var = pc.noise_x->variance();
    }
    const double gamma = mhz_to_angular(o.gamma_mhz);
    const double theta = deg_to_rad(o.theta_deg);
    ResolvedGrid grid = resolve_grid(pc);

    std::function<double(double)> curve;
    switch (o.model) {
        case OracleModel::quasistatic_ramsey:
            curve = [&](double t) { return oracles::quasistatic_ramsey_purity(eta_var, omega, pc.phi, t); };
            break;
        case OracleModel::quasistatic_relaxation:
            curve = [&](double t) { return oracles::quasistatic_relaxation_purity(eta_var, omega, t); };
            break;
        case OracleModel::lindblad_ramsey:
            curve = [&](double t) { return oracles::lindblad_ramsey_purity(gamma, omega, theta, t); };
            break;
        case OracleModel::isotropic_lindblad:
            curve = [&](double t) { return oracles::isotropic_lindblad_purity(gamma, t); };
            break;
    }
    bool quasistatic = o.model == OracleModel::quasistatic_ramsey || o.model == OracleModel::quasistatic_relaxation;
    if (quasistatic) {
        if (auto w = oracles::quasistatic_validity(eta_var, omega)) std::cerr << "warning: " << *w << "\n";
    } else if (o.model == OracleModel::lindblad_ramsey) {
        if (auto w = oracles::lindblad_validity(gamma, grid.tau_n.back())) std::cerr << "warning: " << *w << "\n";
    }

    fs::path p = run.output("oracle.csv");
    std::ofstream out(p);
    if (!out) throw std::runtime_error("cannot open " + p.string() + " for writing");
    out << "tau_n_ns,purity\n" << std::setprecision(17);
    for (double t : grid.tau_n) out << t << ',' << curve(t) << '\n';
    out.close();
    run.record(p);
    run.finish("oracle", 0.0);
    return 0;
}

int cmd_noise_gen(const Options &opt) {
    Run run = prepare(opt, "noise-gen");
    const ProtocolConfig &pc = run.cfg.protocol;
    const NoiseGenSettings &g = run.cfg.noise_gen;
    std::size_t written = 0;
    for (auto [axis, spec] : {std::pair{"x", pc.noise_x}, std::pair{"y", pc.noise_y}}) {
        if (!spec) continue;
        std::uint64_t stream = splitmix64(spec->seed) ^ static_cast<std::uint64_t>(axis[0]);
        for (std::size_t k = 0; k < g.traces; ++k) {
            NoiseTrace trace = generate_trace(*spec, g.duration_ns, g.dt_ns, derive_seed(pc.seed, stream, k));
            std::ostringstream name;
            name << "noise_" << axis << "_" << std::setw(4) << std::setfill('0') << k << ".csv";
            fs::path p = run.output(name.str());
            write_trace_csv(p, trace);
            run.record(p);
            ++written;
        }
    }
    if (written == 0) throw std::invalid_argument("noise-gen needs noise.x or noise.y in the config");
    run.finish("noise_gen", static_cast<double>(written));
    return 0;
}

int cmd_validate(const Options &opt) {
    RunConfig cfg = load_config(opt.config);
    if (opt.seed) cfg.protocol.seed = *opt.seed;
    std::cout << validation_report(cfg);
    return 0;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Monte Carlo and master-equation purity simulations of a qubit under anisotropic transverse noise"};
    app.require_subcommand(1);
    Options opt;

    struct Sub {
        const char *name;
        const char *help;
        int (*fn)(const Options &);
    };
    const Sub subs[] = {
        {"ramsey", "Ramsey purity vs noise duration", cmd_ramsey},
        {"relaxation", "purity of |1> under noise", cmd_relaxation},
        {"phase-sweep", "Ramsey purity map over the preparation phase", cmd_phase_sweep},
        {"isotropic", "Ramsey purity averaged over rotated noise axes", cmd_isotropic},
        {"psd", "PSD of a purity series or a noise trace", cmd_psd},
        {"oracle", "closed-form purity curve on the configured grid", cmd_oracle},
        {"noise-gen", "write noise traces", cmd_noise_gen},
        {"validate", "check a config without running it", cmd_validate},
    };
    int (*chosen)(const Options &) = nullptr;
    for (const auto &s : subs) {
        CLI::App *sub = app.add_subcommand(s.name, s.help);
        sub->add_option("-c,--config", opt.config, "JSON config file")->required()->check(CLI::ExistingFile);
        sub->add_option("--seed", opt.seed, "override run.seed");
        if (std::string(s.name) != "validate") {
            sub->add_option("-j,--threads", opt.threads, "worker threads (default $ANISOQUBIT_THREADS or all cores)")
                ->check(CLI::PositiveNumber);
            sub->add_option("-o,--out", opt.out, "output directory (overrides output.directory)");
        }
        sub->callback([&chosen, fn = s.fn] { chosen = fn; });
    }
    CLI11_PARSE(app, argc, argv);

    try {
        return chosen(opt);
    } catch (const ConfigError &e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
