#pragma once

#include <complex>
#include <stdexcept>

namespace anisoqubit {

/// Tolerance for positivity and Bloch-length checks on numerically evolved states.
inline constexpr double kStateTolerance = 1e-12;

struct BlochVector {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    double norm_squared() const { return x * x + y * y + z * z; }
    double norm() const;
    double dot(const BlochVector &other) const { return x * other.x + y * other.y + z * other.z; }

    BlochVector operator+(const BlochVector &o) const { return {x + o.x, y + o.y, z + o.z}; }
    BlochVector operator-(const BlochVector &o) const { return {x - o.x, y - o.y, z - o.z}; }
    BlochVector operator*(double s) const { return {x * s, y * s, z * s}; }
    bool operator==(const BlochVector &) const = default;
};

/// Qubit state stored as (rho00, Re rho01, Im rho01).
///
/// rho11 = 1 - rho00 and rho10 = conj(rho01) are implied, so every instance has unit
/// trace and is Hermitian. Positivity is not enforced by the representation; use
/// `is_physical` after numerically integrating non-unitary dynamics.
class DensityMatrix {
   public:
    DensityMatrix() = default;
    DensityMatrix(double rho00, std::complex<double> rho01) : rho00_(rho00), rho01_(rho01) {}

    static DensityMatrix ground() { return {1.0, {0.0, 0.0}}; }   // |0><0|, Bloch +z
    static DensityMatrix excited() { return {0.0, {0.0, 0.0}}; }  // |1><1|, Bloch -z
    static DensityMatrix maximally_mixed() { return {0.5, {0.0, 0.0}}; }
    static DensityMatrix from_bloch(const BlochVector &b);
    /// (|0> + e^{i phase}|1>)/sqrt(2).
    static DensityMatrix equatorial(double phase);

    double rho00() const { return rho00_; }
    double rho11() const { return 1.0 - rho00_; }
    std::complex<double> rho01() const { return rho01_; }
    std::complex<double> rho10() const { return std::conj(rho01_); }

    BlochVector bloch() const;
    bool is_physical(double tolerance = kStateTolerance) const;

   private:
    double rho00_ = 1.0;
    std::complex<double> rho01_{0.0, 0.0};
};

class InvalidExpectation : public std::invalid_argument {
   public:
    using std::invalid_argument::invalid_argument;
};

/// SU(2) element U = [[a, -conj(b)], [b, conj(a)]].
struct Su2 {
    std::complex<double> a{1.0, 0.0};
    std::complex<double> b{0.0, 0.0};

    /// exp(-i angle (axis . sigma)/2) for a unit axis.
    static Su2 rotation(const BlochVector &axis, double angle);
};

/// U rho U^dag.
DensityMatrix conjugate(const Su2 &u, const DensityMatrix &rho);

/// tr(rho^2) evaluated from the Bloch components.
double purity(const DensityMatrix &rho);
/// tr(rho^2) evaluated directly from the matrix entries.
double purity_from_entries(const DensityMatrix &rho);

/// <sigma_z>^2/2 + 1/2. Throws InvalidExpectation for |z| > 1 + 1e-9.
double approx_purity(double z_expect);

/// |purity - approx_purity| for a Bloch vector of length r that is misaligned by
/// `theta_misalign` from the axis the transfer pulse maps onto z.
double approx_purity_error_bound(double r, double theta_misalign);

/// rho -> U rho U^dag with U = exp(-i angle (axis . sigma)/2). The axis must be a unit
/// vector to within 1e-9.
DensityMatrix rotate_ideal(const DensityMatrix &rho, const BlochVector &axis, double angle);

/// Conjugation by exp(+i omega t sigma_z/2): undoes the lab-frame Larmor precession of
/// H = +omega sigma_z/2, so a freely precessing state is stationary in this frame.
DensityMatrix to_rotating_frame(const DensityMatrix &rho, double omega, double t);

/// Rodrigues rotation of a Bloch vector about a unit axis.
BlochVector rotate_bloch(const BlochVector &b, const BlochVector &axis, double angle);

}  // namespace anisoqubit
