#include "stickslip/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace stickslip {
namespace {

void require_finite(double v, const char* name) {
    if (!std::isfinite(v)) {
        throw std::invalid_argument(std::string(name) + " must be finite");
    }
}

void validate(const Gains& g) {
    require_finite(g.kd, "kd");
    require_finite(g.kp, "kp");
    require_finite(g.ki, "ki");
    if (g.kd < 0.0) throw std::invalid_argument("kd must be >= 0");
    if (!(g.kp > 0.0)) throw std::invalid_argument("kp must be > 0");
    if (g.ki < 0.0) throw std::invalid_argument("ki must be >= 0");
}

std::complex<double> eval_poly(double a2, double a1, double a0, std::complex<double> s) {
    return ((s + a2) * s + a1) * s + a0;
}

// Guarded complex Newton: iterate only while the residual improves.
std::complex<double> polish(double a2, double a1, double a0, std::complex<double> s) {
    std::complex<double> best = s;
    double best_res = std::abs(eval_poly(a2, a1, a0, s));
    for (int it = 0; it < 8 && best_res > 0.0; ++it) {
        const std::complex<double> d = (3.0 * s + 2.0 * a2) * s + a1;
        if (d == 0.0) break;
        s -= eval_poly(a2, a1, a0, s) / d;
        const double res = std::abs(eval_poly(a2, a1, a0, s));
        if (!(res < best_res)) break;
        best = s;
        best_res = res;
    }
    return best;
}

double polish_real(double a2, double a1, double a0, double s) {
    return polish(a2, a1, a0, {s, 0.0}).real();
}

}  // namespace

SystemMatrices build_system(const Gains& gains, const FrictionParams& friction) {
    validate(gains);
    require_finite(friction.fc, "fc");
    if (friction.fc < 0.0) throw std::invalid_argument("fc must be >= 0");

    SystemMatrices sys;
    sys.a << 0.0, 1.0, 0.0,
             0.0, 0.0, 1.0,
             -gains.ki, -gains.kp, -gains.kd;
    sys.b << 0.0, 0.0, friction.fc;
    sys.c << 0.0, 0.0, 1.0;
    sys.fc = friction.fc;
    return sys;
}

bool is_linearly_stable(const Gains& gains) {
    validate(gains);
    return gains.kd > 0.0 && gains.kp > 0.0 && gains.ki > 0.0 &&
           gains.kd * gains.kp > gains.ki;
}

std::array<std::complex<double>, 3> eigenvalues(const SystemMatrices& system) {
    const double a2 = system.kd();
    const double a1 = system.kp();
    const double a0 = system.ki();

    // depressed cubic t^3 + p t + q with s = t - a2/3
    const double shift = a2 / 3.0;
    const double p = a1 - a2 * a2 / 3.0;
    const double q = 2.0 * a2 * a2 * a2 / 27.0 - a2 * a1 / 3.0 + a0;
    const double disc = 0.25 * q * q + p * p * p / 27.0;

    std::array<std::complex<double>, 3> roots;
    if (p < 0.0 && disc <= 0.0) {
        // three real roots, trigonometric form
        const double m = 2.0 * std::sqrt(-p / 3.0);
        const double arg = std::clamp(3.0 * q / (p * m), -1.0, 1.0);
        const double phi = std::acos(arg) / 3.0;
        for (int k = 0; k < 3; ++k) {
            const double t = m * std::cos(phi - 2.0 * std::numbers::pi * k / 3.0);
            roots[k] = {polish_real(a2, a1, a0, t - shift), 0.0};
        }
    } else {
        // one real root plus a conjugate pair (Cardano); pick the larger cube
        // root first so the small quantities come out of the final difference
        const double sq = std::sqrt(std::max(disc, 0.0));
        const double big = std::cbrt(-0.5 * q - std::copysign(sq, q));
        const double other = (big != 0.0) ? -p / (3.0 * big) : 0.0;
        const double t_real = big + other;
        roots[0] = {polish_real(a2, a1, a0, t_real - shift), 0.0};
        const std::complex<double> pair{-0.5 * t_real - shift,
                                        0.5 * std::sqrt(3.0) * (big - other)};
        const std::complex<double> refined = polish(a2, a1, a0, pair);
        roots[1] = refined;
        roots[2] = std::conj(refined);
    }

    std::sort(roots.begin(), roots.end(), [](const auto& l, const auto& r) {
        if (l.real() != r.real()) return l.real() < r.real();
        return l.imag() < r.imag();
    });
    return roots;
}

}  // namespace stickslip
