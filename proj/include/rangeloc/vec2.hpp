#pragma once

#include <cmath>

namespace rangeloc {

struct Vec2 {
    double x{0.0};
    double y{0.0};

    constexpr Vec2& operator+=(Vec2 o) noexcept { x += o.x; y += o.y; return *this; }
    constexpr Vec2& operator-=(Vec2 o) noexcept { x -= o.x; y -= o.y; return *this; }
    constexpr Vec2& operator*=(double s) noexcept { x *= s; y *= s; return *this; }

    friend constexpr Vec2 operator+(Vec2 a, Vec2 b) noexcept { return {a.x + b.x, a.y + b.y}; }
    friend constexpr Vec2 operator-(Vec2 a, Vec2 b) noexcept { return {a.x - b.x, a.y - b.y}; }
    friend constexpr Vec2 operator-(Vec2 a) noexcept { return {-a.x, -a.y}; }
    friend constexpr Vec2 operator*(Vec2 a, double s) noexcept { return {a.x * s, a.y * s}; }
    friend constexpr Vec2 operator*(double s, Vec2 a) noexcept { return {a.x * s, a.y * s}; }
    friend constexpr bool operator==(Vec2, Vec2) noexcept = default;

    double norm() const noexcept { return std::hypot(x, y); }
    constexpr double squared_norm() const noexcept { return x * x + y * y; }
    bool finite() const noexcept { return std::isfinite(x) && std::isfinite(y); }

    /// Counter-clockwise rotation by `angle` radians.
    Vec2 rotated(double angle) const noexcept {
        const double c = std::cos(angle);
        const double s = std::sin(angle);
        return {c * x - s * y, s * x + c * y};
    }
};

constexpr double dot(Vec2 a, Vec2 b) noexcept { return a.x * b.x + a.y * b.y; }

inline Vec2 unit_at(double angle) noexcept { return {std::cos(angle), std::sin(angle)}; }

/// Wraps an angle into (-pi, pi].
inline double wrap_angle(double a) noexcept {
    constexpr double two_pi = 2.0 * M_PI;
    double r = std::fmod(a, two_pi);
    if (r <= -M_PI) r += two_pi;
    else if (r > M_PI) r -= two_pi;
    return r;
}

}  // namespace rangeloc
