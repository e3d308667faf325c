#include "anisoqubit/dynamics.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "anisoqubit/units.h"

namespace anisoqubit {

void TrajectoryGrid::validate(double omega) const {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("grid dt must be positive");
    if (record_stride == 0) throw std::invalid_argument("record_stride must be >= 1");
    if (omega != 0.0) {
        double tau_l = kTwoPi / std::abs(omega);
        if (dt > tau_l / 200.0 * (1.0 + 1e-9)) {
            throw GridResolutionError("dt = " + std::to_string(dt) + " ns exceeds tau_L/200 = " +
                                      std::to_string(tau_l / 200.0) + " ns");
        }
    }
}

double default_time_step(double omega, double fastest_noise_rate) {
    double dt = omega != 0.0 ? kTwoPi / std::abs(omega) / 200.0 : 0.01;
    if (fastest_noise_rate > 0.0) dt = std::min(dt, 1.0 / (20.0 * fastest_noise_rate));
    return dt;
}

Su2 su2_propagator(double omega, double eta_x, double eta_y, double dt) {
    double hz = 0.5 * omega;
    double big_omega = std::sqrt(hz * hz + eta_x * eta_x + eta_y * eta_y);
    double phase = big_omega * dt;
    double c = std::cos(phase);
    // sin(Omega dt)/Omega, finite as Omega -> 0
    double s_over = phase < 1e-8 ? dt : std::sin(phase) / big_omega;
    return {{c, -s_over * hz}, {s_over * eta_y, -s_over * eta_x}};
}

DensityMatrix su2_step(const DensityMatrix &rho, double omega, double eta_x, double eta_y, double dt) {
    return conjugate(su2_propagator(omega, eta_x, eta_y, dt), rho);
}

std::vector<DensityMatrix> propagate_trajectory(const DensityMatrix &rho0, double omega, const NoiseTrace &eta_x,
                                                const NoiseTrace &eta_y, const TrajectoryGrid &grid) {
    grid.validate(omega);
    for (const NoiseTrace *trace : {&eta_x, &eta_y}) {
        trace->validate();
        if (trace->size() < grid.n_steps) {
            throw GridMismatch("noise trace has " + std::to_string(trace->size()) + " samples but the grid needs " +
                               std::to_string(grid.n_steps));
        }
        if (std::abs(trace->dt - grid.dt) > 1e-12 * grid.dt) {
            throw GridMismatch("noise trace dt differs from the integration dt");
        }
    }

    std::vector<DensityMatrix> out;
    out.reserve(grid.n_records());
    DensityMatrix rho = rho0;
    out.push_back(rho);
    double last_x = std::nan("");
    double last_y = std::nan("");
    Su2 u;
    for (std::size_t j = 0; j < grid.n_steps; ++j) {
        double ex = eta_x.samples[j];
        double ey = eta_y.samples[j];
        if (ex != last_x || ey != last_y) {
            u = su2_propagator(omega, ex, ey, grid.dt);
            last_x = ex;
            last_y = ey;
        }
        rho = conjugate(u, rho);
        if ((j + 1) % grid.record_stride == 0) out.push_back(rho);
    }
    return out;
}

void BlochMoments::add(const BlochVector &b) {
    count += 1.0;
    sum[0] += b.x;
    sum[1] += b.y;
    sum[2] += b.z;
    sum_sq[0] += b.x * b.x;
    sum_sq[1] += b.y * b.y;
    sum_sq[2] += b.z * b.z;
    sum_sq[3] += b.x * b.y;
    sum_sq[4] += b.x * b.z;
    sum_sq[5] += b.y * b.z;
}

void BlochMoments::merge(const BlochMoments &other) {
    count += other.count;
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += other.sum[i];
    for (std::size_t i = 0; i < sum_sq.size(); ++i) sum_sq[i] += other.sum_sq[i];
}

BlochVector BlochMoments::mean() const {
    if (count <= 0.0) return {};
    return {sum[0] / count, sum[1] / count, sum[2] / count};
}

double BlochMoments::projected_variance(const BlochVector &r) const {
    if (count < 2.0) return 0.0;
    BlochVector m = mean();
    auto cov = [&](std::size_t k, double mi, double mj) { return (sum_sq[k] - count * mi * mj) / (count - 1.0); };
    double v = r.x * r.x * cov(0, m.x, m.x) + r.y * r.y * cov(1, m.y, m.y) + r.z * r.z * cov(2, m.z, m.z) +
               2.0 * (r.x * r.y * cov(3, m.x, m.y) + r.x * r.z * cov(4, m.x, m.z) + r.y * r.z * cov(5, m.y, m.z));
    return std::max(v, 0.0);
}

double BlochMoments::projected_stderr(const BlochVector &r) const {
    if (count < 2.0) return 0.0;
    return std::sqrt(projected_variance(r) / count);
}

double BlochMoments::purity() const { return 0.5 * mean().norm_squared() + 0.5; }

double BlochMoments::purity_stderr() const { return projected_stderr(mean()); }

BlochMoments reduce_pairwise(std::span<const BlochMoments> parts) {
    if (parts.empty()) return {};
    if (parts.size() == 1) return parts.front();
    std::size_t half = parts.size() / 2;
    BlochMoments left = reduce_pairwise(parts.first(half));
    left.merge(reduce_pairwise(parts.subspan(half)));
    return left;
}

EnsembleSeries ensemble_average(std::span<const std::vector<DensityMatrix>> trajectories) {
    if (trajectories.empty()) throw std::invalid_argument("ensemble is empty");
    std::size_t n_points = trajectories.front().size();
    for (const auto &t : trajectories) {
        if (t.size() != n_points) throw GridMismatch("trajectories in an ensemble must share the time grid");
    }

    EnsembleSeries out;
    out.mean.reserve(n_points);
    out.purity.reserve(n_points);
    out.bloch_mean.reserve(n_points);
    out.stderr_z.reserve(n_points);
    std::vector<BlochMoments> per_shot(trajectories.size());
    for (std::size_t i = 0; i < n_points; ++i) {
        for (std::size_t s = 0; s < trajectories.size(); ++s) {
            per_shot[s] = {};
            per_shot[s].add(trajectories[s][i].bloch());
        }
        BlochMoments m = reduce_pairwise(per_shot);
        BlochVector mean = m.mean();
        out.mean.push_back(DensityMatrix::from_bloch(mean));
        out.purity.push_back(m.purity());
        out.bloch_mean.push_back(mean);
        out.stderr_z.push_back(m.projected_stderr({0.0, 0.0, 1.0}));
    }
    return out;
}

namespace {

using cd = std::complex<double>;

Matrix2 mul(const Matrix2 &a, const Matrix2 &b) {
    return {a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3], a[2] * b[0] + a[3] * b[2],
            a[2] * b[1] + a[3] * b[3]};
}

Matrix2 dagger(const Matrix2 &a) { return {std::conj(a[0]), std::conj(a[2]), std::conj(a[1]), std::conj(a[3])}; }

Matrix2 to_matrix(const DensityMatrix &rho) { return {cd{rho.rho00()}, rho.rho01(), rho.rho10(), cd{rho.rho11()}}; }

DensityMatrix from_state(const std::array<double, 3> &y) { return {y[0], {y[1], y[2]}}; }

}  // namespace

LindbladModel LindbladModel::single_axis(const LindbladParams &params) {
    if (!(params.gamma >= 0.0)) throw std::invalid_argument("Lindblad rate must be >= 0");
    double c = std::cos(params.theta);
    double s = std::sin(params.theta);
    // cos(theta) sx + sin(theta) sy
    Matrix2 op{cd{0.0}, cd{c, -s}, cd{c, s}, cd{0.0}};
    return {params.omega, {{params.gamma, op}}};
}

LindbladModel LindbladModel::isotropic_xy(double omega, double gamma) {
    if (!(gamma >= 0.0)) throw std::invalid_argument("Lindblad rate must be >= 0");
    double k = 1.0 / std::sqrt(2.0);
    Matrix2 sx{cd{0.0}, cd{k}, cd{k}, cd{0.0}};
    Matrix2 sy{cd{0.0}, cd{0.0, -k}, cd{0.0, k}, cd{0.0}};
    return {omega, {{gamma, sx}, {gamma, sy}}};
}

double LindbladModel::total_rate() const {
    double total = 0.0;
    for (const auto &j : jumps) {
        double frob = 0.0;
        for (const auto &e : j.op) frob += std::norm(e);
        total += j.rate * 0.5 * frob;
    }
    return total;
}

std::array<double, 3> LindbladModel::derivative(const DensityMatrix &rho) const {
    Matrix2 r = to_matrix(rho);
    const cd i{0.0, 1.0};
    // -i[H, rho] with H = omega sz/2 only touches the coherences: d rho01 = -i omega rho01.
    cd d00{0.0};
    cd d01 = -i * omega * r[1];
    for (const auto &j : jumps) {
        Matrix2 ldag = dagger(j.op);
        Matrix2 lrl = mul(mul(j.op, r), ldag);
        Matrix2 ldl = mul(ldag, j.op);
        Matrix2 ldl_r = mul(ldl, r);
        Matrix2 r_ldl = mul(r, ldl);
        d00 += j.rate * (lrl[0] - 0.5 * (ldl_r[0] + r_ldl[0]));
        d01 += j.rate * (lrl[1] - 0.5 * (ldl_r[1] + r_ldl[1]));
    }
    return {d00.real(), d01.real(), d01.imag()};
}

std::vector<DensityMatrix> lindblad_evolve(const DensityMatrix &rho0, const LindbladModel &model,
                                           const TrajectoryGrid &grid) {
    grid.validate(model.omega);
    if (model.total_rate() * grid.dt > 0.01 * (1.0 + 1e-12)) {
        throw GridResolutionError("Lindblad step too large: rate*dt = " +
                                  std::to_string(model.total_rate() * grid.dt) + " > 0.01");
    }
    std::vector<DensityMatrix> out;
    out.reserve(grid.n_records());
    std::array<double, 3> y{rho0.rho00(), rho0.rho01().real(), rho0.rho01().imag()};
    out.push_back(rho0);
    const double h = grid.dt;
    auto axpy = [](const std::array<double, 3> &a, double s, const std::array<double, 3> &b) {
        return std::array<double, 3>{a[0] + s * b[0], a[1] + s * b[1], a[2] + s * b[2]};
    };
    for (std::size_t n = 0; n < grid.n_steps; ++n) {
        auto k1 = model.derivative(from_state(y));
        auto k2 = model.derivative(from_state(axpy(y, 0.5 * h, k1)));
        auto k3 = model.derivative(from_state(axpy(y, 0.5 * h, k2)));
        auto k4 = model.derivative(from_state(axpy(y, h, k3)));
        for (std::size_t c = 0; c < 3; ++c) y[c] += h / 6.0 * (k1[c] + 2.0 * k2[c] + 2.0 * k3[c] + k4[c]);
        if ((n + 1) % grid.record_stride == 0) out.push_back(from_state(y));
    }
    return out;
}

std::vector<DensityMatrix> lindblad_evolve(const DensityMatrix &rho0, const LindbladParams &params,
                                           const TrajectoryGrid &grid) {
    return lindblad_evolve(rho0, LindbladModel::single_axis(params), grid);
}

}  // namespace anisoqubit
