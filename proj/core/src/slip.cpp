#include "stickslip/slip.hpp"

#include <cmath>
#include <stdexcept>

#include "stickslip/stiction.hpp"

namespace stickslip {
namespace {

template <int N>
using Mat = Eigen::Matrix<double, N, N>;

// Pade approximant tables and norm thresholds from Higham, "The scaling and
// squaring method for the matrix exponential revisited", SIAM J. Matrix
// Anal. Appl. 26(4), 2005.

template <int N>
void pade3(const Mat<N>& a, Mat<N>& u, Mat<N>& v) {
    static const double b[] = {120., 60., 12., 1.};
    const Mat<N> a2 = a * a;
    u = a * (b[3] * a2 + b[1] * Mat<N>::Identity());
    v = b[2] * a2 + b[0] * Mat<N>::Identity();
}

template <int N>
void pade5(const Mat<N>& a, Mat<N>& u, Mat<N>& v) {
    static const double b[] = {30240., 15120., 3360., 420., 30., 1.};
    const Mat<N> a2 = a * a;
    const Mat<N> a4 = a2 * a2;
    u = a * (b[5] * a4 + b[3] * a2 + b[1] * Mat<N>::Identity());
    v = b[4] * a4 + b[2] * a2 + b[0] * Mat<N>::Identity();
}

template <int N>
void pade7(const Mat<N>& a, Mat<N>& u, Mat<N>& v) {
    static const double b[] = {17297280., 8648640., 1995840., 277200., 25200., 1512., 56., 1.};
    const Mat<N> a2 = a * a;
    const Mat<N> a4 = a2 * a2;
    const Mat<N> a6 = a4 * a2;
    u = a * (b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * Mat<N>::Identity());
    v = b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * Mat<N>::Identity();
}

template <int N>
void pade9(const Mat<N>& a, Mat<N>& u, Mat<N>& v) {
    static const double b[] = {17643225600., 8821612800., 2075673600., 302702400.,
                               30270240., 2162160., 110880., 3960., 90., 1.};
    const Mat<N> a2 = a * a;
    const Mat<N> a4 = a2 * a2;
    const Mat<N> a6 = a4 * a2;
    const Mat<N> a8 = a6 * a2;
    u = a * (b[9] * a8 + b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * Mat<N>::Identity());
    v = b[8] * a8 + b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * Mat<N>::Identity();
}

template <int N>
void pade13(const Mat<N>& a, Mat<N>& u, Mat<N>& v) {
    static const double b[] = {64764752532480000., 32382376266240000., 7771770303897600.,
                               1187353796428800.,  129060195264000.,   10559470521600.,
                               670442572800.,      33522128640.,       1323241920.,
                               40840800.,          960960.,            16380.,
                               182.,               1.};
    const Mat<N> a2 = a * a;
    const Mat<N> a4 = a2 * a2;
    const Mat<N> a6 = a4 * a2;
    Mat<N> tmp = a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2);
    tmp += b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * Mat<N>::Identity();
    u = a * tmp;
    v = a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2);
    v += b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * Mat<N>::Identity();
}

template <int N>
Mat<N> expm(Mat<N> a) {
    const double norm = a.cwiseAbs().colwise().sum().maxCoeff();
    int squarings = 0;
    Mat<N> u, v;
    if (norm < 1.495585217958292e-2) {
        pade3(a, u, v);
    } else if (norm < 2.539398330063230e-1) {
        pade5(a, u, v);
    } else if (norm < 9.504178996162932e-1) {
        pade7(a, u, v);
    } else if (norm < 2.097847961257068e0) {
        pade9(a, u, v);
    } else {
        const double theta13 = 5.371920351148152e0;
        squarings = std::max(0, static_cast<int>(std::ceil(std::log2(norm / theta13))));
        a *= std::ldexp(1.0, -squarings);
        pade13(a, u, v);
    }
    const Mat<N> num = v + u;
    const Mat<N> den = v - u;
    Mat<N> r = den.partialPivLu().solve(num);
    for (int i = 0; i < squarings; ++i) r = r * r;
    return r;
}

template <int N>
Mat<N> checked_expm(const Mat<N>& m, double t) {
    if (!m.allFinite() || !std::isfinite(t)) {
        throw std::invalid_argument("matrix exponential requires finite input");
    }
    if (t == 0.0) return Mat<N>::Identity();
    return expm<N>(Mat<N>(m * t));
}

int sign_of(double v) { return v > 0.0 ? 1 : (v < 0.0 ? -1 : 0); }

void validate_input(SlipInput input) {
    if (input.u != 1 && input.u != -1) {
        throw std::invalid_argument("relay input must be -1 or +1");
    }
}

bool region_member(const State& landing, const SystemMatrices& system) {
    const double load = stiction_load(landing, system);
    return load <= system.fc + kStictionBoundarySlack * std::max(system.fc, load);
}

}  // namespace

Eigen::Matrix3d matrix_exponential(const Eigen::Matrix3d& m, double t) {
    return checked_expm<3>(m, t);
}

Eigen::Matrix4d matrix_exponential(const Eigen::Matrix4d& m, double t) {
    return checked_expm<4>(m, t);
}

State propagate(const State& state, SlipInput input, double dt,
                const SystemMatrices& system) {
    validate_input(input);
    if (!std::isfinite(dt) || dt < 0.0) {
        throw std::invalid_argument("dt must be finite and >= 0");
    }
    if (!state.vec().allFinite()) throw std::invalid_argument("state must be finite");
    if (dt == 0.0) return state;

    Eigen::Matrix4d m = Eigen::Matrix4d::Zero();
    m.topLeftCorner<3, 3>() = system.a;
    m.topRightCorner<3, 1>() = system.b * static_cast<double>(input.u);
    const Eigen::Matrix4d e = matrix_exponential(m, dt);
    const Eigen::Vector3d x =
        e.topLeftCorner<3, 3>() * state.vec() + e.topRightCorner<3, 1>();
    return State::from(x);
}

std::optional<SlipEvent> next_event(const State& state, SlipInput input,
                                    const SystemMatrices& system, double horizon,
                                    const EventTolerances& tol) {
    validate_input(input);
    if (!std::isfinite(horizon) || horizon <= 0.0) {
        throw std::invalid_argument("horizon must be finite and > 0");
    }

    const double scale = std::max(1.0, state.vec().lpNorm<Eigen::Infinity>());
    const double gtol = tol.x3_rel * scale;

    // A state resting inside the region raises an immediate event, unless it
    // sits on the outgoing edge, where the drift leaves at once (breakaway).
    if (std::abs(state.x3) <= gtol && region_member(state, system)) {
        const State held{state.x1, state.x2, 0.0};
        const auto exit = stick_exit(held, 0.0, system);
        if (!exit.has_value() || exit->exit_time > 0.0) {
            return SlipEvent{0.0, held, SlipEventKind::EnterStiction};
        }
    }

    const int s0 = -input.u;  // sign of x3 over the upcoming piece
    if (std::abs(state.x3) > gtol && sign_of(state.x3) != s0) {
        throw std::invalid_argument("relay input is inconsistent with the motion direction");
    }

    auto flow = [&](double t) { return propagate(state, input, t, system); };
    auto x3dot = [&](const State& x) {
        return system.a.row(2).dot(x.vec()) + system.b[2] * input.u;
    };

    double lambda_max = 0.0;
    for (const auto& lam : eigenvalues(system)) {
        lambda_max = std::max(lambda_max, std::abs(lam));
    }
    const double stride = lambda_max > 0.0 ? std::min(0.1, 1.0 / lambda_max) : 0.1;

    // Bisect [lo, hi] with x3(lo) on the s0 side, then polish with Newton
    // steps confined to the bracket.
    auto refine = [&](double lo, double hi) -> SlipEvent {
        const double wtol = tol.time_rel * std::max(1.0, hi);
        while (hi - lo > wtol) {
            const double mid = 0.5 * (lo + hi);
            if (mid <= lo || mid >= hi) break;
            if (sign_of(flow(mid).x3) == s0) lo = mid;
            else hi = mid;
        }
        double t_star = hi;
        State x_star = flow(t_star);
        for (int it = 0; it < 12 && std::abs(x_star.x3) > gtol; ++it) {
            const double d = x3dot(x_star);
            if (d == 0.0) break;
            const double t_next = t_star - x_star.x3 / d;
            if (!std::isfinite(t_next) || t_next < lo - wtol || t_next > hi + wtol) break;
            t_star = t_next;
            x_star = flow(t_star);
        }
        const State landing{x_star.x1, x_star.x2, 0.0};
        const SlipEventKind kind = region_member(landing, system)
                                       ? SlipEventKind::EnterStiction
                                       : SlipEventKind::RelayFlip;
        return SlipEvent{t_star, landing, kind};
    };

    double t_a = 0.0;
    double d_a = x3dot(state);
    while (t_a < horizon) {
        const double t_b = std::min(t_a + stride, horizon);
        const State x_b = flow(t_b);
        const double d_b = x3dot(x_b);

        if (sign_of(x_b.x3) == -s0 || x_b.x3 == 0.0) {
            return refine(t_a, t_b);
        }

        // x3 has an extremum inside the stride; the trajectory may dip
        // through zero and come back, or touch it tangentially.
        if (sign_of(d_a) != 0 && sign_of(d_b) != 0 && sign_of(d_a) != sign_of(d_b)) {
            double lo = t_a, hi = t_b;
            while (hi - lo > tol.time_rel * std::max(1.0, hi)) {
                const double mid = 0.5 * (lo + hi);
                if (mid <= lo || mid >= hi) break;
                if (sign_of(x3dot(flow(mid))) == sign_of(d_a)) lo = mid;
                else hi = mid;
            }
            const double t_m = 0.5 * (lo + hi);
            const State x_m = flow(t_m);
            if (sign_of(x_m.x3) == -s0) {
                return refine(t_a, t_m);
            }
            if (std::abs(x_m.x3) <= gtol) {
                const State landing{x_m.x1, x_m.x2, 0.0};
                if (region_member(landing, system)) {
                    return SlipEvent{t_m, landing, SlipEventKind::EnterStiction};
                }
                // tangential touch outside the region: continue with the same u
            }
        }

        t_a = t_b;
        d_a = d_b;
    }
    return std::nullopt;
}

}  // namespace stickslip
