#include "anisoqubit/qubit.h"

#include <cmath>
#include <string>

namespace anisoqubit {

double BlochVector::norm() const { return std::sqrt(norm_squared()); }

DensityMatrix DensityMatrix::from_bloch(const BlochVector &b) {
    // rho = (I + b.sigma)/2  =>  rho01 = (x - i y)/2
    return {0.5 * (1.0 + b.z), {0.5 * b.x, -0.5 * b.y}};
}

DensityMatrix DensityMatrix::equatorial(double phase) {
    return from_bloch({std::cos(phase), std::sin(phase), 0.0});
}

BlochVector DensityMatrix::bloch() const {
    return {2.0 * rho01_.real(), -2.0 * rho01_.imag(), 2.0 * rho00_ - 1.0};
}

bool DensityMatrix::is_physical(double tolerance) const {
    return rho00_ * (1.0 - rho00_) >= std::norm(rho01_) - tolerance;
}

double purity(const DensityMatrix &rho) { return 0.5 * rho.bloch().norm_squared() + 0.5; }

double purity_from_entries(const DensityMatrix &rho) {
    double p0 = rho.rho00();
    double p1 = rho.rho11();
    return p0 * p0 + p1 * p1 + 2.0 * std::norm(rho.rho01());
}

double approx_purity(double z_expect) {
    if (!(std::abs(z_expect) <= 1.0 + 1e-9)) {
        throw InvalidExpectation("<sigma_z> = " + std::to_string(z_expect) + " is outside [-1, 1]");
    }
    return 0.5 * z_expect * z_expect + 0.5;
}

double approx_purity_error_bound(double r, double theta_misalign) {
    double s = std::sin(theta_misalign);
    return 0.5 * r * r * s * s;
}

BlochVector rotate_bloch(const BlochVector &b, const BlochVector &axis, double angle) {
    double c = std::cos(angle);
    double s = std::sin(angle);
    BlochVector cross{axis.y * b.z - axis.z * b.y, axis.z * b.x - axis.x * b.z, axis.x * b.y - axis.y * b.x};
    double along = axis.dot(b) * (1.0 - c);
    return {b.x * c + cross.x * s + axis.x * along, b.y * c + cross.y * s + axis.y * along,
            b.z * c + cross.z * s + axis.z * along};
}

Su2 Su2::rotation(const BlochVector &axis, double angle) {
    double c = std::cos(0.5 * angle);
    double s = std::sin(0.5 * angle);
    return {{c, -s * axis.z}, {s * axis.y, -s * axis.x}};
}

DensityMatrix conjugate(const Su2 &u, const DensityMatrix &rho) {
    const std::complex<double> &a = u.a;
    const std::complex<double> &b = u.b;
    double p = rho.rho00();
    double q = rho.rho11();
    std::complex<double> c = rho.rho01();
    double out00 = std::norm(a) * p + std::norm(b) * q - 2.0 * (a * b * c).real();
    std::complex<double> out01 = a * std::conj(b) * (p - q) + a * a * c - std::conj(b) * std::conj(b) * std::conj(c);
    return {out00, out01};
}

DensityMatrix rotate_ideal(const DensityMatrix &rho, const BlochVector &axis, double angle) {
    if (std::abs(axis.norm() - 1.0) > 1e-9) {
        throw std::invalid_argument("rotation axis is not normalized (|axis| = " + std::to_string(axis.norm()) +
                                    ")");
    }
    return conjugate(Su2::rotation(axis, angle), rho);
}

DensityMatrix to_rotating_frame(const DensityMatrix &rho, double omega, double t) {
    // exp(+i w t sz/2) rho exp(-i w t sz/2) multiplies rho01 by exp(+i w t).
    double phase = omega * t;
    return {rho.rho00(), rho.rho01() * std::polar(1.0, phase)};
}

}  // namespace anisoqubit
