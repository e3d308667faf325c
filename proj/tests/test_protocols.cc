#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "anisoqubit/dynamics.h"
#include "anisoqubit/oracles.h"
#include "anisoqubit/protocols.h"
#include "anisoqubit/random.h"
#include "anisoqubit/spectral.h"
#include "anisoqubit/units.h"
#include "support.h"

using namespace anisoqubit;
using doctest::Approx;

namespace {

constexpr double kPi = std::numbers::pi;
const double kTauL = 1e3 / 243.7;

std::vector<double> linear_grid(double stop, std::size_t n) {
    std::vector<double> g(n);
    for (std::size_t i = 0; i < n; ++i) g[i] = stop * static_cast<double>(i) / static_cast<double>(n - 1);
    return g;
}

ProtocolConfig base_config() {
    ProtocolConfig c;
    c.tau_n_grid = linear_grid(3.0 * kTauL, 61);
    c.n_shots = 200;
    c.seed = 42;
    return c;
}

NoiseSpec rts(double amp, double rate) { return {NoiseKind::rts, amp, rate}; }

NoiseSpec quasistatic(double amp, AmplitudeDistribution d) { return {NoiseKind::quasistatic, amp, 0.0, 0.0, d}; }

bool same_result(const EnsembleResult &a, const EnsembleResult &b) {
    return a.purity == b.purity && a.approx_purity == b.approx_purity && a.stderr_z == b.stderr_z &&
           a.tau_n == b.tau_n && a.bloch_mean == b.bloch_mean;
}

}  // namespace

TEST_CASE("zero noise keeps the state pure") {
    ProtocolConfig c = base_config();
    c.n_shots = 3;
    for (double phi : {0.0, 0.8}) {
        c.phi = phi;
        EnsembleResult r = run_ramsey(c);
        for (std::size_t i = 0; i < r.size(); ++i) {
            REQUIRE(r.purity[i] == Approx(1.0).epsilon(1e-12));
            REQUIRE(r.approx_purity[i] == Approx(1.0).epsilon(1e-12));
            REQUIRE(r.stderr_z[i] < 1e-7);  // moment cancellation floor
        }
    }
    EnsembleResult relax = run_relaxation(c);
    for (double p : relax.purity) CHECK(p == Approx(1.0).epsilon(1e-12));
    for (double p : relax.approx_purity) CHECK(p == Approx(1.0).epsilon(1e-12));
}

TEST_CASE("transfer pulse undoes the preparation without noise") {
    const double omega = mhz_to_angular(243.7);
    for (double phi : {0.0, 0.7, 2.0}) {
        DensityMatrix rho = prepare_equatorial(phi);
        CHECK(rho.bloch().x == Approx(std::cos(phi)));
        CHECK(rho.bloch().y == Approx(std::sin(phi)));
        double t = 37.3;
        DensityMatrix lab = su2_step(rho, omega, 0.0, 0.0, t);
        // the second pi/2 about the same axis completes a pi rotation: |0> -> |1>
        CHECK(transfer_pulse(lab, phi, omega, t).bloch().z == Approx(-1.0).epsilon(1e-12));
    }
}

TEST_CASE("tau_n = 0 gives purity 1 for noisy configurations") {
    ProtocolConfig c = base_config();
    c.noise_y = rts(24.0, 96.0);
    EnsembleResult r = run_ramsey(c);
    CHECK(r.tau_n[0] == 0.0);
    CHECK(r.purity[0] == Approx(1.0).epsilon(1e-12));
    CHECK(r.purity.back() < 0.999);
    c.two_axis.routing = AxisRouting::uncorrelated;
    c.noise_x = rts(24.0, 96.0);
    EnsembleResult u = run_relaxation(c);
    CHECK(u.purity[0] == Approx(1.0).epsilon(1e-12));
}

TEST_CASE("incremental kernel matches gating and propagating each trace") {
    ProtocolConfig c = base_config();
    c.noise_y = rts(24.0, 20.0);
    c.noise_y->seed = 5;
    c.n_shots = 1;
    c.phi = 0.4;
    c.tau_n_grid = {0.0, 0.3, 0.9, 1.0, 2.5, 7.0, 12.25};
    EnsembleResult r = run_ramsey(c);
    ResolvedGrid grid = resolve_grid(c);
    const double omega = c.omega();

    std::uint64_t stream = splitmix64(c.noise_y->seed) ^ 0x79;
    NoiseTrace raw = generate_trace(*c.noise_y, grid.dt * grid.steps.back(), grid.dt, derive_seed(c.seed, stream, 0));
    for (std::size_t i = 0; i < grid.steps.size(); ++i) {
        DensityMatrix rho = su2_step(prepare_equatorial(c.phi), omega, 0.0, 0.0, c.tau_b);
        if (grid.steps[i] > 0) {
            NoiseTrace gy = gate(raw, 0.0, grid.tau_n[i], c.t_ramp);
            NoiseTrace gx = gy;
            std::fill(gx.samples.begin(), gx.samples.end(), 0.0);
            rho = propagate_trajectory(rho, omega, gx, gy, {grid.dt, grid.steps[i], grid.steps[i]}).back();
        }
        rho = su2_step(rho, omega, 0.0, 0.0, c.tau_b);
        BlochVector want = rho.bloch();
        REQUIRE(std::abs(r.bloch_mean[i].x - want.x) < 1e-12);
        REQUIRE(std::abs(r.bloch_mean[i].y - want.y) < 1e-12);
        REQUIRE(std::abs(r.bloch_mean[i].z - want.z) < 1e-12);
        double z = transfer_pulse(rho, c.phi, omega, 2.0 * c.tau_b + grid.tau_n[i]).bloch().z;
        REQUIRE(r.approx_purity[i] == Approx(approx_purity(z)).epsilon(1e-12));
    }
}

TEST_CASE("grid resolution") {
    ProtocolConfig c = base_config();
    c.tau_n_grid = {0.0, 0.5, 1.0, 1.5};
    ResolvedGrid g = resolve_grid(c);
    double tau_l = 1e3 / 243.7;
    CHECK(g.dt <= tau_l / 200.0);
    CHECK(0.5 / g.dt == Approx(std::round(0.5 / g.dt)).epsilon(1e-12));
    CHECK(g.tau_n[3] == Approx(1.5).epsilon(1e-12));

    c.noise_y = rts(24.0, 2000.0);
    CHECK(resolve_grid(c).dt <= 1.0 / (20.0 * 2.0));
    c.dt_max = 0.001;
    CHECK(resolve_grid(c).dt <= 0.001);

    c.tau_n_grid = {0.0, 0.1234, 5.0};
    ResolvedGrid ng = resolve_grid(c);
    CHECK(std::abs(ng.tau_n[1] - 0.1234) <= ng.dt / 2.0);
}

TEST_CASE("phase sweep rows reproduce standalone runs") {
    ProtocolConfig c = base_config();
    c.noise_y = rts(23.0, 4.4);
    PhaseSweepResult sweep = run_phase_sweep(c, {0.0, kPi / 3.0, kPi / 2.0});
    CHECK(same_result(sweep.rows[0], run_ramsey(c)));
    ProtocolConfig c2 = c;
    c2.phi = kPi / 3.0;
    CHECK(same_result(sweep.rows[1], run_ramsey(c2)));
    CHECK_THROWS_AS(run_phase_sweep(c, {}), std::invalid_argument);
}

TEST_CASE("results do not depend on the thread count") {
    ProtocolConfig c = base_config();
    c.n_shots = 300;
    c.noise_x = rts(20.0, 50.0);
    c.noise_y = quasistatic(10.0, AmplitudeDistribution::gaussian);
    c.two_axis.routing = AxisRouting::uncorrelated;
    EnsembleResult a = run_isotropic_ensemble(c, 4, {1});
    EnsembleResult b = run_isotropic_ensemble(c, 4, {4});
    CHECK(same_result(a, b));
}

TEST_CASE("rotated ensembles") {
    ProtocolConfig c = base_config();
    c.noise_y = rts(24.0, 96.0);
    c.n_shots = 400;
    EnsembleResult base = run_ramsey(c);
    CHECK(same_result(run_isotropic_ensemble(c, 1), base));
    CHECK_THROWS_AS(run_isotropic_ensemble(c, 0), std::invalid_argument);

    // Axes 180 degrees apart are equivalent for a symmetric source.
    EnsembleResult two = run_isotropic_ensemble(c, 2);
    CHECK(two.samples == 2 * base.samples);
    for (std::size_t i = 0; i < base.size(); ++i) {
        double tol = 4.0 * std::hypot(base.stderr_purity[i], two.stderr_purity[i]) + 1e-9;
        REQUIRE(std::abs(two.purity[i] - base.purity[i]) <= tol);
    }
}

TEST_CASE("Gaussian quasistatic Ramsey matches exact quadrature") {
    ProtocolConfig c = base_config();
    const double sigma_mhz = 10.0;
    c.noise_y = quasistatic(sigma_mhz, AmplitudeDistribution::gaussian);
    c.tau_b = 0.0;
    c.t_ramp = 0.0;
    c.n_shots = 4000;
    c.tau_n_grid = linear_grid(4.0 * kTauL, 41);
    for (double phi : {0.0, kPi / 4.0, kPi / 2.0}) {
        c.phi = phi;
        EnsembleResult r = run_ramsey(c);
        for (std::size_t i = 0; i < r.size(); ++i) {
            double want =
                testsupport::gaussian_quasistatic_purity(mhz_to_angular(sigma_mhz), c.omega(), phi, r.tau_n[i]);
            REQUIRE(std::abs(r.purity[i] - want) <= 4.0 * r.stderr_purity[i] + 1e-5);
        }
    }
}

TEST_CASE("bimodal quasistatic relaxation matches the exact tilted precession") {
    ProtocolConfig c = base_config();
    const double eta = mhz_to_angular(19.0);
    c.noise_y = quasistatic(19.0, AmplitudeDistribution::bimodal);
    c.t_ramp = 0.0;
    c.n_shots = 64;
    EnsembleResult r = run_relaxation(c);
    const double omega = c.omega();
    const double big = std::sqrt(omega * omega / 4.0 + eta * eta);
    const double s2 = eta * eta / (big * big);
    for (std::size_t i = 0; i < r.size(); ++i) {
        double z = -(1.0 - s2 + s2 * std::cos(2.0 * big * r.tau_n[i]));
        REQUIRE(r.bloch_mean[i].z == Approx(z).epsilon(1e-10));
    }
    // first-order oracle holds at short times
    for (std::size_t i = 0; i < r.size() && r.tau_n[i] < 0.1 * kTauL; ++i) {
        double z = r.bloch_mean[i].z;
        double oracle = oracles::quasistatic_relaxation_purity(eta * eta, omega, r.tau_n[i]);
        CHECK(std::abs(0.5 * (1.0 + z * z) - oracle) <= 10.0 * std::pow(eta * eta / (omega * omega), 2));
    }
}

TEST_CASE("RTS Ramsey purity oscillates at twice the qubit frequency") {
    ProtocolConfig c = base_config();
    c.noise_y = rts(24.0, 96.0);
    c.n_shots = 2000;
    c.tau_n_grid.clear();
    const std::size_t n = 600;
    const double step = 15.0 * kTauL / n;
    for (std::size_t i = 0; i < n; ++i) c.tau_n_grid.push_back(5.0 + step * i);
    EnsembleResult r = run_ramsey(c);
    Psd psd = periodogram(r.purity, step, {Detrend::linear});
    Peak p = dominant_peak(psd, {0.0, psd.freqs.back()});
    CHECK(std::abs(p.freq - 2.0 * 243.7) <= psd.resolution);
}

TEST_CASE("configuration errors") {
    ProtocolConfig c = base_config();
    c.noise_x = rts(10.0, 1.0);
    CHECK_THROWS_AS(run_ramsey(c), std::invalid_argument);  // y-only routing with an x source
    c.two_axis.routing = AxisRouting::x_only;
    CHECK_NOTHROW(c.validate());
    c.two_axis.routing = AxisRouting::uncorrelated;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c.noise_y = rts(10.0, 1.0);
    CHECK_NOTHROW(c.validate());
    c.two_axis.routing = AxisRouting::correlated;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);

    ProtocolConfig d = base_config();
    d.tau_n_grid = {1.0, 0.5};
    CHECK_THROWS_AS(d.validate(), std::invalid_argument);
    d.tau_n_grid = {};
    CHECK_THROWS_AS(d.validate(), std::invalid_argument);
    d.tau_n_grid = {-1.0};
    CHECK_THROWS_AS(d.validate(), std::invalid_argument);
    d = base_config();
    d.n_shots = 0;
    CHECK_THROWS_AS(d.validate(), std::invalid_argument);
    d = base_config();
    d.tau_b = -1.0;
    CHECK_THROWS_AS(d.validate(), std::invalid_argument);
}

TEST_CASE("CSV output") {
    ProtocolConfig c = base_config();
    c.n_shots = 2;
    c.tau_n_grid = {0.0, 1.0};
    std::ostringstream out;
    write_ensemble_csv(out, run_ramsey(c));
    std::string text = out.str();
    CHECK(text.rfind("tau_n_ns,tau_total_ns,purity,approx_purity,bloch_x,bloch_y,bloch_z,stderr_z,stderr_purity\n", 0) ==
          0);
    CHECK(std::count(text.begin(), text.end(), '\n') == 3);

    std::ostringstream map;
    write_phase_map_csv(map, run_phase_sweep(c, {0.0, kPi / 2.0}));
    std::string m = map.str();
    CHECK(m.rfind("phi_deg,tau_n_ns,approx_purity\n", 0) == 0);
    CHECK(std::count(m.begin(), m.end(), '\n') == 5);
    CHECK(m.find("\n90,") != std::string::npos);
}
