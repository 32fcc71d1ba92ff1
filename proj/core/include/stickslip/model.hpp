#pragma once

#include <array>
#include <complex>

#include <Eigen/Dense>

namespace stickslip {

/// PID feedback gains of the closed loop (unity-mass plant).
///
/// Valid gains satisfy kd >= 0, kp > 0, ki >= 0. kd = 0 and ki = 0 are
/// permitted as analysis modes; the stability check treats them as unstable.
struct Gains {
    double kd{0.0};  ///< derivative gain [1/s]
    double kp{0.0};  ///< proportional gain [1/s^2]
    double ki{0.0};  ///< integral gain [1/s^3]
};

/// Coulomb friction level for the unity-mass plant. fc = 0 turns friction off.
struct FrictionParams {
    double fc{0.0};
};

/// State vector (x1, x2, x3) = (integral error, output error, rate error).
struct State {
    double x1{0.0};
    double x2{0.0};
    double x3{0.0};

    Eigen::Vector3d vec() const { return {x1, x2, x3}; }
    static State from(const Eigen::Vector3d& v) { return {v[0], v[1], v[2]}; }
};

/// Closed-loop system x' = A x + B u, y = C x driven by the relay
/// u = -sign(y).
///
/// A is the companion matrix of s^3 + kd s^2 + kp s + ki with rows
/// (0,1,0), (0,0,1), (-ki,-kp,-kd); B = (0, 0, fc)^T; C = (0, 0, 1).
/// det(A) = -ki, so A is singular exactly when ki = 0.
struct SystemMatrices {
    Eigen::Matrix3d a;
    Eigen::Vector3d b;
    Eigen::RowVector3d c;
    double fc{0.0};

    double ki() const { return -a(2, 0); }
    double kp() const { return -a(2, 1); }
    double kd() const { return -a(2, 2); }
};

/// Assembles the closed-loop matrices.
/// Throws std::invalid_argument when a parameter is non-finite or violates
/// kd >= 0, kp > 0, ki >= 0, fc >= 0.
SystemMatrices build_system(const Gains& gains, const FrictionParams& friction);

/// Routh-Hurwitz verdict for the slip-phase linear dynamics: true iff
/// kd * kp > ki with kd, kp, ki all strictly positive.
bool is_linearly_stable(const Gains& gains);

/// Roots of s^3 + kd s^2 + kp s + ki, sorted by real part, then imaginary
/// part. Computed in closed form (trigonometric/Cardano) and polished with
/// guarded Newton steps; the residual |p(lambda)| stays within
/// 1e-9 * max(1, |lambda|^3).
std::array<std::complex<double>, 3> eigenvalues(const SystemMatrices& system);

}  // namespace stickslip
