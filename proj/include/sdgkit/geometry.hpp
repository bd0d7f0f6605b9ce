#pragma once

#include <cmath>
#include <numbers>

#include "errors.hpp"

namespace sdgkit {

inline constexpr double pi = std::numbers::pi;

enum class sign_t : int {
    negative = -1,
    zero     = 0,
    positive = +1,
};

inline int sign_value(sign_t s) { return static_cast<int>(s); }

inline sign_t sign_of(double x) {
    if (x > 0.0) return sign_t::positive;
    if (x < 0.0) return sign_t::negative;
    return sign_t::zero;
}

struct vec2 {
    double x = 0.0;
    double y = 0.0;
};

// Points and displacement vectors share one representation.
using point = vec2;

inline vec2 operator+(vec2 a, vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline vec2 operator-(vec2 a, vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline vec2 operator*(double s, vec2 a) { return {s * a.x, s * a.y}; }
inline vec2 operator*(vec2 a, double s) { return {s * a.x, s * a.y}; }
inline bool operator==(vec2 a, vec2 b) { return a.x == b.x && a.y == b.y; }
inline bool operator!=(vec2 a, vec2 b) { return !(a == b); }

inline double dot(vec2 a, vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(vec2 a, vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm2(vec2 a) { return a.x * a.x + a.y * a.y; }
inline double norm(vec2 a) { return std::hypot(a.x, a.y); }
inline vec2 perp_ccw(vec2 a) { return {-a.y, a.x}; }
inline vec2 perp_cw(vec2 a) { return {a.y, -a.x}; }

inline bool is_finite(vec2 a) { return std::isfinite(a.x) && std::isfinite(a.y); }

inline vec2 normalized(vec2 a) {
    double n = norm(a);
    if (n == 0.0) throw invalid_input("cannot normalize a zero vector");
    return {a.x / n, a.y / n};
}

// Wraps into [0, 2*pi).
inline double normalize_angle(double a) {
    a = std::fmod(a, 2.0 * pi);
    if (a < 0.0) a += 2.0 * pi;
    if (a >= 2.0 * pi) a = 0.0; // fmod can land exactly on 2*pi after the add
    return a;
}

// Unsigned angle between two vectors, in [0, pi].
inline double angle_between(vec2 a, vec2 b) {
    return std::atan2(std::fabs(cross(a, b)), dot(a, b));
}

// Signed angle from a to b, counterclockwise positive, in (-pi, pi].
inline double signed_angle(vec2 a, vec2 b) {
    return std::atan2(cross(a, b), dot(a, b));
}

// A unit direction stored as a normalized angle. Rotation helpers are named
// by turn sense because the direction grids in this library are indexed
// clockwise.
class direction {
public:
    direction() : ang_(0.0) {}
    explicit direction(double angle_radians) : ang_(normalize_angle(angle_radians)) {
        if (!std::isfinite(angle_radians)) throw invalid_input("direction angle must be finite");
    }
    static direction of(vec2 v) {
        if (!is_finite(v)) throw invalid_input("direction vector must be finite");
        if (v.x == 0.0 && v.y == 0.0) throw invalid_input("direction of a zero vector is undefined");
        return direction(std::atan2(v.y, v.x));
    }

    double angle() const { return ang_; }

    // Components within a few ulps of an axis snap to the exact axis, so
    // directions meant to be parallel or perpendicular to a coordinate axis
    // behave exactly in dot and cross products.
    vec2 unit() const {
        double c = std::cos(ang_), s = std::sin(ang_);
        if (std::fabs(c) < 4e-16) {
            c = 0.0;
            s = s > 0.0 ? 1.0 : -1.0;
        } else if (std::fabs(s) < 4e-16) {
            s = 0.0;
            c = c > 0.0 ? 1.0 : -1.0;
        }
        return {c, s};
    }
    direction rotated_cw(double delta) const { return direction(ang_ - delta); }
    direction rotated_ccw(double delta) const { return direction(ang_ + delta); }
    direction opposite() const { return direction(ang_ + pi); }

private:
    double ang_;
};

// Unsigned angle between two directions, in [0, pi].
inline double angle_between(direction a, direction b) {
    double d = std::fabs(a.angle() - b.angle());
    if (d > pi) d = 2.0 * pi - d;
    return d;
}

// Interior angle of triangle p-r-q at vertex r, in [0, pi].
inline double angle_at(point r, point p, point q) {
    if (!is_finite(r) || !is_finite(p) || !is_finite(q))
        throw invalid_input("angle_at requires finite points");
    if (p == r || q == r)
        throw invalid_input("angle_at is undefined when the apex coincides with an endpoint");
    return angle_between(p - r, q - r);
}

} // namespace sdgkit
