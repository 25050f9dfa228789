#pragma once

// Reference computations that share no code with the library: quadrature of
// Fourier integrals, brute-force searches, and random instance generators.

#include "rangeloc/kinematics.hpp"

#include <cmath>
#include <complex>
#include <functional>
#include <random>

namespace oracle {

using Complex = std::complex<double>;
inline constexpr double kPi = 3.14159265358979323846;

/// (1/T) * integral_0^T f(t) exp(-j 2 pi n t / T) dt, composite Simpson on
/// 2^16 intervals. Integrates the function on the closed interval, so the
/// periodic-extension jump costs nothing.
inline Complex fourier_simpson(const std::function<double(double)>& f, double T, int n, int intervals = 1 << 16) {
    const double h = T / intervals;
    Complex acc{0.0, 0.0};
    for (int i = 0; i <= intervals; ++i) {
        const double t = i * h;
        const double w = (i == 0 || i == intervals) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
        acc += w * f(t) * std::polar(1.0, -2.0 * kPi * n * t / T);
    }
    return acc * (h / 3.0) / T;
}

/// Plain O(M) DFT coefficient with directly evaluated twiddles.
inline Complex naive_dft(const std::vector<double>& x, int n) {
    Complex acc{0.0, 0.0};
    const double m = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) acc += x[i] * std::polar(1.0, -2.0 * kPi * n * static_cast<double>(i) / m);
    return acc / m;
}

/// Smallest m <= m_max with |omega2 * 2 pi m / |omega1| / 2pi - round| <= tol, or 0.
inline long window_multiple(double omega1, double omega2_abs, double tol, long m_max) {
    for (long m = 1; m <= m_max; ++m) {
        const double k2 = omega2_abs * m / std::abs(omega1);
        if (std::abs(k2 - std::round(k2)) <= tol) return m;
    }
    return 0;
}

/// Two-agent ground truth placed at a random rigid pose in the world.
struct PairInstance {
    rangeloc::AgentState a;
    rangeloc::AgentState b;
    int k1{0};
    int k2{0};
    double T{2.0 * kPi};
    // Analysis-frame truth.
    double d{0.0};
    double phi1{0.0};
    double phi2{0.0};
    rangeloc::Vec2 v;
};

inline bool admissible(int k1, int k2) {
    const int a = std::abs(k1), b = std::abs(k2), x = std::abs(k1 - k2);
    return a != 0 && b != 0 && a != b && x != a && x != b;
}

/// d in [20, 100], r in [1, 5], |v| <= min(r)/alpha, |k| in [2, 9] admissible,
/// signs of omega random, T = 2 pi.
inline PairInstance random_pair(std::mt19937_64& rng, double alpha = 0.35, double speed_scale = 1.0) {
    std::uniform_real_distribution<double> U(0.0, 1.0);
    std::uniform_int_distribution<int> K(2, 9);
    PairInstance p;
    do {
        p.k1 = K(rng) * (U(rng) < 0.5 ? -1 : 1);
        p.k2 = K(rng) * (U(rng) < 0.5 ? -1 : 1);
    } while (!admissible(p.k1, p.k2));
    const double d = 20.0 + 80.0 * U(rng);
    const double r1 = 1.0 + 4.0 * U(rng);
    const double r2 = 1.0 + 4.0 * U(rng);
    const double speed = speed_scale * std::min(r1, r2) / alpha * U(rng);
    const double heading = 2.0 * kPi * U(rng);
    const double pose = 2.0 * kPi * U(rng);
    const rangeloc::Vec2 origin{200.0 * U(rng) - 100.0, 200.0 * U(rng) - 100.0};

    p.a.center = origin;
    p.a.center_velocity = rangeloc::Vec2{4.0 * U(rng) - 2.0, 4.0 * U(rng) - 2.0};
    p.a.radius = r1;
    p.a.omega = p.k1 * 2.0 * kPi / p.T;
    p.a.phase = 2.0 * kPi * U(rng) - kPi;
    p.b.center = origin + d * rangeloc::Vec2{std::cos(pose), std::sin(pose)};
    p.b.center_velocity = p.a.center_velocity + speed * rangeloc::Vec2{std::cos(heading), std::sin(heading)};
    p.b.radius = r2;
    p.b.omega = p.k2 * 2.0 * kPi / p.T;
    p.b.phase = 2.0 * kPi * U(rng) - kPi;

    p.d = d;
    auto wrap = [](double x) { return std::remainder(x, 2.0 * kPi); };
    p.phi1 = wrap(p.a.phase - pose);
    p.phi2 = wrap(p.b.phase - pose);
    const rangeloc::Vec2 rel = p.b.center_velocity - p.a.center_velocity;
    p.v = {std::cos(pose) * rel.x + std::sin(pose) * rel.y, -std::sin(pose) * rel.x + std::cos(pose) * rel.y};
    return p;
}

/// Forward values of the drift and sideband constants from ground truth.
struct Constants {
    Complex R, I, U, W;
};

inline Constants forward_constants(const PairInstance& p) {
    const Complex j{0.0, 1.0};
    const Complex vbar{p.v.x, -p.v.y};
    const double v2 = p.v.x * p.v.x + p.v.y * p.v.y;
    const double T = p.T;
    Constants c;
    c.R = v2 * T * T / (2.0 * kPi * kPi);
    c.I = (v2 * T * T + 2.0 * p.v.x * p.d * T) / (2.0 * kPi);
    c.U = p.a.radius * T / (4.0 * kPi) * j * vbar * std::polar(1.0, p.phi1 + kPi);
    c.W = p.b.radius * T / (4.0 * kPi) * j * vbar * std::polar(1.0, p.phi2);
    return c;
}

}  // namespace oracle
