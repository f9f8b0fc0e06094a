#pragma once

// Frame convention used throughout the engine: X right, Y up, Z forward along
// the user's initial view direction (the left-handed layout common to game
// engines). Quaternion algebra is plain Hamilton algebra on the components, so
// a positive angle about +X carries +Y toward +Z, and a positive angle about +Y
// carries +Z toward +X.

#include <cmath>
#include <numbers>

namespace sightwarp {

constexpr double deg_to_rad(double deg) noexcept { return deg * std::numbers::pi / 180.0; }
constexpr double rad_to_deg(double rad) noexcept { return rad * 180.0 / std::numbers::pi; }

struct Vec3 {
    double x{0.0};
    double y{0.0};
    double z{0.0};

    constexpr Vec3 operator+(const Vec3 &v) const noexcept { return {x + v.x, y + v.y, z + v.z}; }
    constexpr Vec3 operator-(const Vec3 &v) const noexcept { return {x - v.x, y - v.y, z - v.z}; }
    constexpr Vec3 operator-() const noexcept { return {-x, -y, -z}; }
    constexpr Vec3 operator*(double s) const noexcept { return {x * s, y * s, z * s}; }
    constexpr Vec3 operator/(double s) const noexcept { return {x / s, y / s, z / s}; }
    constexpr Vec3 &operator+=(const Vec3 &v) noexcept { x += v.x; y += v.y; z += v.z; return *this; }
    constexpr Vec3 &operator-=(const Vec3 &v) noexcept { x -= v.x; y -= v.y; z -= v.z; return *this; }
    constexpr bool operator==(const Vec3 &) const noexcept = default;

    static constexpr Vec3 unit_x() noexcept { return {1, 0, 0}; }
    static constexpr Vec3 unit_y() noexcept { return {0, 1, 0}; }
    static constexpr Vec3 unit_z() noexcept { return {0, 0, 1}; }
};

constexpr Vec3 operator*(double s, const Vec3 &v) noexcept { return v * s; }

constexpr double dot(const Vec3 &a, const Vec3 &b) noexcept { return a.x * b.x + a.y * b.y + a.z * b.z; }

constexpr Vec3 cross(const Vec3 &a, const Vec3 &b) noexcept {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

inline double length(const Vec3 &v) noexcept { return std::sqrt(dot(v, v)); }
inline double distance(const Vec3 &a, const Vec3 &b) noexcept { return length(a - b); }
inline bool is_finite(const Vec3 &v) noexcept {
    return std::isfinite(v.x) && std::isfinite(v.y) && std::isfinite(v.z);
}

// Throws DegenerateInput on a zero or non-finite vector.
Vec3 normalize(const Vec3 &v);

/// Rotation quaternion kept at unit norm. Construction renormalizes; a zero or
/// non-finite input is rejected. q and -q describe the same rotation.
class UnitQuat {
public:
    constexpr UnitQuat() noexcept = default;

    // Components in w, x, y, z order.
    UnitQuat(double w, double x, double y, double z);

    static UnitQuat identity() noexcept { return {}; }
    static UnitQuat from_axis_angle(const Vec3 &axis, double angle_deg);

    constexpr double w() const noexcept { return w_; }
    constexpr double x() const noexcept { return x_; }
    constexpr double y() const noexcept { return y_; }
    constexpr double z() const noexcept { return z_; }

    UnitQuat conjugate() const noexcept;
    UnitQuat inverse() const noexcept { return conjugate(); }
    UnitQuat negated() const noexcept;

    Vec3 rotate(const Vec3 &v) const noexcept;

    // Hamilton product; (a * b) applies b first, then a.
    UnitQuat operator*(const UnitQuat &rhs) const noexcept;

    constexpr bool operator==(const UnitQuat &) const noexcept = default;

private:
    struct Raw {};
    constexpr UnitQuat(Raw, double w, double x, double y, double z) noexcept
        : w_(w), x_(x), y_(y), z_(z) {}

    double w_{1.0};
    double x_{0.0};
    double y_{0.0};
    double z_{0.0};
};

double quat_dot(const UnitQuat &a, const UnitQuat &b) noexcept;

/// Shortest-arc spherical interpolation, t in [0, 1].
UnitQuat slerp(const UnitQuat &a, const UnitQuat &b, double t);

struct Ray {
    Vec3 origin;
    Vec3 direction{0, 0, 1};

    Ray() = default;
    // Normalizes the direction; rejects a zero direction.
    Ray(const Vec3 &origin, const Vec3 &direction);

    static Ray through(const Vec3 &origin, const Vec3 &point) { return {origin, point - origin}; }

    Vec3 at(double t) const noexcept { return origin + direction * t; }
};

struct Pose {
    Vec3 position;
    UnitQuat orientation;

    bool operator==(const Pose &) const noexcept = default;
};

/// Angular size in degrees of an extent `width` seen from `distance`.
double visual_angle(double width, double distance);

/// Inverse of visual_angle: the width subtending `angle_deg` at `distance`.
double width_from_angle(double angle_deg, double distance);

/// Rotation angle in degrees separating two orientations, in [0, 180].
double quat_angle(const UnitQuat &a, const UnitQuat &b) noexcept;

/// Angle in degrees between the gaze direction and the eye-to-hand vector.
double alignment_angle(const Ray &gaze, const Vec3 &hand_point);

// 1€ filter (Casiez et al.) on a 3D signal.
struct OneEuroParams {
    double min_cutoff{1.0}; // Hz
    double beta{0.007};
    double d_cutoff{1.0}; // Hz
};

struct OneEuroState {
    OneEuroParams params;
    Vec3 prev_value;
    Vec3 prev_derivative;
    double prev_time{0.0}; // seconds
    bool initialized{false};

    OneEuroState() = default;
    explicit OneEuroState(const OneEuroParams &p);
    // Pre-seeded state whose previous output is `value` at `time`.
    OneEuroState(const OneEuroParams &p, const Vec3 &value, double time);
};

struct OneEuroOutput {
    Vec3 value;
    OneEuroState state;
};

/// Smoothing factor of a first-order low-pass at `cutoff_hz` for a step of `dt` seconds.
double one_euro_alpha(double cutoff_hz, double dt) noexcept;

OneEuroOutput one_euro_step(const OneEuroState &state, const Vec3 &sample, double time);

} // namespace sightwarp
