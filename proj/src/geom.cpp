#include "sightwarp/geom.hpp"

#include <algorithm>
#include <string>

#include "sightwarp/error.hpp"

namespace sightwarp {

Vec3 normalize(const Vec3 &v) {
    const double n = length(v);
    if (!(n > 0.0) || !std::isfinite(n)) {
        throw Error(ErrorCode::DegenerateInput, "cannot normalize a zero or non-finite vector");
    }
    return v / n;
}

UnitQuat::UnitQuat(double w, double x, double y, double z) {
    const double n = std::sqrt(w * w + x * x + y * y + z * z);
    if (!(n > 0.0) || !std::isfinite(n)) {
        throw Error(ErrorCode::DegenerateInput, "quaternion has zero or non-finite norm");
    }
    if (std::abs(n - 1.0) <= 1e-12) {
        // Already unit; keep the exact components so serialized values round-trip.
        w_ = w;
        x_ = x;
        y_ = y;
        z_ = z;
        return;
    }
    w_ = w / n;
    x_ = x / n;
    y_ = y / n;
    z_ = z / n;
}

UnitQuat UnitQuat::from_axis_angle(const Vec3 &axis, double angle_deg) {
    const Vec3 a = normalize(axis);
    const double half = 0.5 * deg_to_rad(angle_deg);
    const double s = std::sin(half);
    return {Raw{}, std::cos(half), a.x * s, a.y * s, a.z * s};
}

UnitQuat UnitQuat::conjugate() const noexcept { return {Raw{}, w_, -x_, -y_, -z_}; }

UnitQuat UnitQuat::negated() const noexcept { return {Raw{}, -w_, -x_, -y_, -z_}; }

Vec3 UnitQuat::rotate(const Vec3 &v) const noexcept {
    // v' = v + 2w(u x v) + 2u x (u x v)
    const Vec3 u{x_, y_, z_};
    const Vec3 t = cross(u, v) * 2.0;
    return v + t * w_ + cross(u, t);
}

UnitQuat UnitQuat::operator*(const UnitQuat &r) const noexcept {
    const double w = w_ * r.w_ - x_ * r.x_ - y_ * r.y_ - z_ * r.z_;
    const double x = w_ * r.x_ + x_ * r.w_ + y_ * r.z_ - z_ * r.y_;
    const double y = w_ * r.y_ - x_ * r.z_ + y_ * r.w_ + z_ * r.x_;
    const double z = w_ * r.z_ + x_ * r.y_ - y_ * r.x_ + z_ * r.w_;
    // Renormalize to stop drift across long products.
    const double n = std::sqrt(w * w + x * x + y * y + z * z);
    return {Raw{}, w / n, x / n, y / n, z / n};
}

double quat_dot(const UnitQuat &a, const UnitQuat &b) noexcept {
    return a.w() * b.w() + a.x() * b.x() + a.y() * b.y() + a.z() * b.z();
}

UnitQuat slerp(const UnitQuat &a, const UnitQuat &b, double t) {
    double d = quat_dot(a, b);
    UnitQuat end = b;
    if (d < 0.0) {
        d = -d;
        end = b.negated();
    }
    if (d > 0.9995) {
        return {a.w() + t * (end.w() - a.w()), a.x() + t * (end.x() - a.x()),
                a.y() + t * (end.y() - a.y()), a.z() + t * (end.z() - a.z())};
    }
    const double theta = std::acos(std::clamp(d, -1.0, 1.0));
    const double s = std::sin(theta);
    const double ka = std::sin((1.0 - t) * theta) / s;
    const double kb = std::sin(t * theta) / s;
    return {ka * a.w() + kb * end.w(), ka * a.x() + kb * end.x(), ka * a.y() + kb * end.y(),
            ka * a.z() + kb * end.z()};
}

Ray::Ray(const Vec3 &o, const Vec3 &d) : origin(o), direction(std::abs(length(d) - 1.0) <= 1e-12 ? d : normalize(d)) {}

double visual_angle(double width, double distance) {
    if (!(distance > 0.0)) {
        throw Error(ErrorCode::Domain, "visual_angle: distance must be positive");
    }
    if (!(width >= 0.0)) {
        throw Error(ErrorCode::Domain, "visual_angle: width must be non-negative");
    }
    return rad_to_deg(2.0 * std::atan(width / (2.0 * distance)));
}

double width_from_angle(double angle_deg, double distance) {
    if (!(distance > 0.0)) {
        throw Error(ErrorCode::Domain, "width_from_angle: distance must be positive");
    }
    if (!(angle_deg >= 0.0 && angle_deg < 180.0)) {
        throw Error(ErrorCode::Domain, "width_from_angle: angle must lie in [0, 180)");
    }
    return 2.0 * distance * std::tan(0.5 * deg_to_rad(angle_deg));
}

double quat_angle(const UnitQuat &a, const UnitQuat &b) noexcept {
    // Relative rotation a^-1 * b; atan2 keeps precision near 0 and 180 degrees.
    const UnitQuat rel = a.conjugate() * b;
    const double v = std::sqrt(rel.x() * rel.x() + rel.y() * rel.y() + rel.z() * rel.z());
    return rad_to_deg(2.0 * std::atan2(v, std::abs(rel.w())));
}

double alignment_angle(const Ray &gaze, const Vec3 &hand_point) {
    const Vec3 to_hand = hand_point - gaze.origin;
    if (!(length(to_hand) > 0.0)) {
        throw Error(ErrorCode::DegenerateInput, "alignment_angle: hand coincides with the eye");
    }
    return rad_to_deg(std::atan2(length(cross(gaze.direction, to_hand)), dot(gaze.direction, to_hand)));
}

OneEuroState::OneEuroState(const OneEuroParams &p) : params(p) {
    if (!(p.min_cutoff > 0.0) || !(p.d_cutoff > 0.0) || !(p.beta >= 0.0)) {
        throw Error(ErrorCode::Config, "one-euro: cutoffs must be positive and beta non-negative");
    }
}

OneEuroState::OneEuroState(const OneEuroParams &p, const Vec3 &value, double time) : OneEuroState(p) {
    prev_value = value;
    prev_time = time;
    initialized = true;
}

double one_euro_alpha(double cutoff_hz, double dt) noexcept {
    const double tau = 1.0 / (2.0 * std::numbers::pi * cutoff_hz);
    return 1.0 / (1.0 + tau / dt);
}

OneEuroOutput one_euro_step(const OneEuroState &state, const Vec3 &sample, double time) {
    if (!state.initialized) {
        OneEuroState next = state;
        next.prev_value = sample;
        next.prev_derivative = {};
        next.prev_time = time;
        next.initialized = true;
        return {sample, next};
    }
    if (!(time > state.prev_time)) {
        throw Error(ErrorCode::Sequencing, "one-euro: sample time " + std::to_string(time) +
                                               " does not follow " + std::to_string(state.prev_time));
    }
    const double dt = time - state.prev_time;
    const Vec3 raw_derivative = (sample - state.prev_value) / dt;
    const double ad = one_euro_alpha(state.params.d_cutoff, dt);
    const Vec3 derivative = state.prev_derivative + (raw_derivative - state.prev_derivative) * ad;
    const double cutoff = state.params.min_cutoff + state.params.beta * length(derivative);
    const double a = one_euro_alpha(cutoff, dt);
    const Vec3 value = state.prev_value + (sample - state.prev_value) * a;

    OneEuroState next = state;
    next.prev_value = value;
    next.prev_derivative = derivative;
    next.prev_time = time;
    return {value, next};
}

} // namespace sightwarp
