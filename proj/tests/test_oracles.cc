#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "anisoqubit/oracles.h"
#include "anisoqubit/units.h"

using namespace anisoqubit;
using namespace anisoqubit::oracles;
using doctest::Approx;

namespace {
constexpr double kPi = std::numbers::pi;
const double kOmega = mhz_to_angular(243.7);
}  // namespace

TEST_CASE("quasistatic Ramsey examples") {
    for (double phi : {0.0, 0.4, 2.0}) CHECK(quasistatic_ramsey_purity(0.01, kOmega, phi, 0.0) == 1.0);
    double var = 0.01 * kOmega * kOmega;
    CHECK(quasistatic_ramsey_purity(var, kOmega, 0.0, kPi / 2.0 / kOmega) == Approx(0.98).epsilon(1e-14));
    CHECK(quasistatic_ramsey_purity_theta(var, kOmega, kPi / 2.0, kPi / kOmega) == Approx(1.0).epsilon(1e-14));
    CHECK(quasistatic_ramsey_purity_theta(var, kOmega, 0.0, kPi / kOmega) == Approx(1.0 - 8.0 * 0.01).epsilon(1e-14));
}

TEST_CASE("theta and phi forms agree under theta = pi/2 - phi") {
    double var = 0.003 * kOmega * kOmega;
    double worst = 0.0;
    for (int i = 0; i <= 72; ++i) {
        double theta = -kPi + 2.0 * kPi * i / 72.0;
        for (int j = 0; j <= 200; ++j) {
            double t = 15.0 * kTwoPi / kOmega * j / 200.0;
            double a = quasistatic_ramsey_purity_theta(var, kOmega, theta, t);
            double b = quasistatic_ramsey_purity(var, kOmega, kPi / 2.0 - theta, t);
            worst = std::max(worst, std::abs(a - b));
        }
    }
    CHECK(worst <= 1e-12);
}

TEST_CASE("phase-averaged quasistatic purity oscillates at omega") {
    double var = 0.004 * kOmega * kOmega;
    for (int j = 0; j <= 50; ++j) {
        double t = 3.0 * kTwoPi / kOmega * j / 50.0;
        double avg = 0.0;
        const int n = 360;
        for (int k = 0; k < n; ++k) avg += quasistatic_ramsey_purity(var, kOmega, kTwoPi * k / n, t);
        avg /= n;
        REQUIRE(avg == Approx(1.0 - 2.0 * var / (kOmega * kOmega) * (1.0 - std::cos(kOmega * t))).epsilon(1e-13));
    }
}

TEST_CASE("Lindblad Ramsey purity") {
    CHECK(lindblad_ramsey_purity(0.01, kOmega, 0.7, 0.0) == 1.0);
    double gamma = 0.01 * kOmega;
    CHECK(lindblad_ramsey_purity(gamma, kOmega, 0.0, kPi / 4.0 / kOmega) ==
          Approx(1.0 - 0.01 * kPi / 4.0 + 0.005).epsilon(1e-14));
    CHECK(lindblad_ramsey_purity(gamma, kOmega, 0.0, kPi / 4.0 / kOmega) == Approx(0.99715).epsilon(1e-5));

    for (double theta : {0.0, kPi / 6.0, kPi / 4.0, kPi / 2.0, 2.5}) {
        double prev = 1.0;
        for (int j = 1; j <= 2000; ++j) {
            double t = 0.05 / gamma * j / 2000.0;
            double rate = lindblad_ramsey_purity_rate(gamma, kOmega, theta, t);
            REQUIRE(rate <= 0.0);
            REQUIRE(rate >= -2.0 * gamma);
            double p = lindblad_ramsey_purity(gamma, kOmega, theta, t);
            REQUIRE(p <= prev + 1e-15);
            prev = p;
            double h = 1e-4;
            double fd = (lindblad_ramsey_purity(gamma, kOmega, theta, t + h) -
                         lindblad_ramsey_purity(gamma, kOmega, theta, t - h)) /
                        (2.0 * h);
            REQUIRE(fd == Approx(rate).scale(gamma).epsilon(1e-6));
        }
    }
}

TEST_CASE("quasistatic relaxation") {
    CHECK(quasistatic_relaxation_purity(0.1, kOmega, 0.0) == 1.0);
    double eta = mhz_to_angular(19.0);
    double p = quasistatic_relaxation_purity(eta * eta, kOmega, kPi / kOmega);
    CHECK(p == Approx(1.0 - 8.0 * std::pow(19.0 / 243.7, 2)).epsilon(1e-14));
    CHECK(p == Approx(0.951).epsilon(1e-3));
}

TEST_CASE("relaxation and Ramsey forms are distinct protocols") {
    double var = 0.005 * kOmega * kOmega;
    for (double theta : {0.0, 0.5, kPi / 2.0, 2.0}) {
        double worst = 0.0;
        for (int j = 0; j <= 400; ++j) {
            double t = 3.0 * kTwoPi / kOmega * j / 400.0;
            worst = std::max(worst, std::abs(quasistatic_relaxation_purity(var, kOmega, t) -
                                             quasistatic_ramsey_purity_theta(var, kOmega, theta, t)));
        }
        CHECK(worst > 1e-3);
    }
    for (int j = 0; j <= 10; ++j) {
        double t = j * 0.7;
        CHECK(quasistatic_relaxation_purity(0.0, kOmega, t) == quasistatic_ramsey_purity_theta(0.0, kOmega, 0.3, t));
    }
}

TEST_CASE("isotropic Lindblad purity") {
    CHECK(isotropic_lindblad_purity(0.01, 0.0) == 1.0);
    CHECK(isotropic_lindblad_purity(0.01, 1e6) == Approx(0.5));
    CHECK(isotropic_lindblad_purity(0.01, 50.0) == Approx(0.5 * (1.0 + std::exp(-1.0))));
}

TEST_CASE("damping time estimate") {
    double tau_l = kTwoPi / kOmega;
    double eta = mhz_to_angular(23.0);
    double dt = damping_time_estimate(kOmega, eta);
    CHECK(dt / tau_l == Approx(28.07).epsilon(1e-3));
    CHECK(dt / tau_l == Approx(29.0).epsilon(0.05));
    CHECK(damping_time_estimate(kOmega, 2.0 * eta) == Approx(dt / 4.0));
    CHECK_THROWS_AS(damping_time_estimate(kOmega, 0.0), DivergentEstimate);
}

TEST_CASE("validity warnings") {
    CHECK_FALSE(quasistatic_validity(0.005 * kOmega * kOmega, kOmega).has_value());
    CHECK(quasistatic_validity(0.02 * kOmega * kOmega, kOmega).has_value());
    CHECK(quasistatic_validity(0.3 * kOmega * kOmega, kOmega)->find("far outside") != std::string::npos);
    CHECK_FALSE(lindblad_validity(0.001, 10.0).has_value());
    CHECK(lindblad_validity(0.01, 10.0).has_value());
    CHECK(lindblad_validity(0.01, 30.0)->find("0.2") != std::string::npos);
}

TEST_CASE("oracles stay within [1/2, 1] in their validity regimes") {
    double var = 0.01 * kOmega * kOmega;
    double gamma = 0.001;
    for (int j = 0; j <= 1000; ++j) {
        double t = 200.0 * j / 1000.0;
        for (double angle : {0.0, 0.3, 1.2, 2.9}) {
            double q = quasistatic_ramsey_purity(var, kOmega, angle, t);
            REQUIRE(q <= 1.0);
            REQUIRE(q >= 0.5);
            double l = lindblad_ramsey_purity(gamma, kOmega, angle, t);
            REQUIRE(l <= 1.0);
            REQUIRE(l >= 0.5);
        }
        double r = quasistatic_relaxation_purity(var, kOmega, t);
        REQUIRE(r <= 1.0);
        REQUIRE(r >= 0.5);
    }
}
