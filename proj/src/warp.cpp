#include "sightwarp/warp.hpp"

#include <algorithm>

#include "sightwarp/error.hpp"

namespace sightwarp {

double default_context_radius(const SceneObject &target, ContextRadiusRule rule) {
    const Vec3 &h = target.half_extents;
    double r = 0.0;
    if (rule == ContextRadiusRule::BoundingSphere) {
        r = length(h);
    } else {
        r = 2.0 * std::max({h.x, h.y, h.z});
    }
    if (!(r > 0.0)) {
        throw Error(ErrorCode::DegenerateInput, "object '" + target.id + "' has an empty bounding box");
    }
    return r;
}

CapturedContext capture_context(const Scene &scene, const ObjectId &target_id, double radius) {
    if (!(radius > 0.0)) {
        throw Error(ErrorCode::Domain, "capture_context: radius must be positive");
    }
    const SceneObject &target = scene.at(target_id);
    if (target.space != Space::Far) {
        throw Error(ErrorCode::Consistency, "capture_context: '" + target_id + "' is not a far object");
    }

    CapturedContext ctx;
    ctx.target_id = target_id;
    ctx.sphere = {target.pose.position, radius, Space::Far};
    ctx.members.push_back(target_id);
    for (const auto &o : scene.objects) {
        if (o.space != Space::Far || o.id == target_id) continue;
        if (sphere_intersects(o, ctx.sphere.center, radius)) ctx.members.push_back(o.id);
    }
    for (const auto &id : ctx.members) {
        const SceneObject &o = scene.at(id);
        if (distance(o.pose.position, ctx.sphere.center) + o.bounding_radius() > radius) {
            ctx.clipped.push_back(id);
        }
    }
    return ctx;
}

double cd_ratio(const Vec3 &eye, const Vec3 &far_point, const Vec3 &hand_point) {
    const double far_d = distance(far_point, eye);
    const double hand_d = distance(hand_point, eye);
    if (!(far_d > 0.0) || !(hand_d > 0.0)) {
        throw Error(ErrorCode::DegenerateInput, "cd_ratio: object or hand coincides with the eye");
    }
    return far_d / hand_d;
}

Pose ProxyBinding::far_to_near(const Pose &far) const noexcept {
    return {near_sphere.center + reorientation.rotate(far.position - far_sphere.center) * scale,
            reorientation * far.orientation};
}

Pose ProxyBinding::near_to_far(const Pose &near) const noexcept {
    const UnitQuat inv = reorientation.inverse();
    return {far_sphere.center + inv.rotate(near.position - near_sphere.center) / scale, inv * near.orientation};
}

std::optional<ObjectId> ProxyBinding::source_of(const ObjectId &proxy_id) const {
    for (const auto &[far_id, pid] : member_map) {
        if (pid == proxy_id) return far_id;
    }
    return std::nullopt;
}

std::string proxy_id_for(const ObjectId &far_id) { return far_id + "#proxy"; }

SummonResult summon(const Scene &scene, const CapturedContext &context, const SummonRequest &request) {
    if (context.members.empty()) {
        throw Error(ErrorCode::Consistency, "summon: empty context");
    }
    const Vec3 eye = request.gaze.origin;
    Vec3 near_center = request.hand_point;
    if (request.placement == Placement::AlongGaze) {
        near_center = eye + request.gaze.direction * distance(request.hand_point, eye);
    }

    SummonResult out;
    ProxyBinding &b = out.binding;
    b.target_id = context.target_id;
    b.mode = request.mode;
    b.far_sphere = context.sphere;
    b.scale = 1.0 / cd_ratio(eye, context.sphere.center, near_center);
    if (request.mode == SummonMode::GazeToHand) {
        b.reorientation = request.reorientation;
        if (request.scale_override) {
            if (!(*request.scale_override > 0.0)) {
                throw Error(ErrorCode::Config, "summon: scale override must be positive");
            }
            b.scale = *request.scale_override;
        }
    }
    b.near_sphere = {near_center, b.scale * context.sphere.radius, Space::Near};

    for (const auto &far_id : context.members) {
        const SceneObject &src = scene.at(far_id);
        SceneObject proxy = src;
        proxy.id = proxy_id_for(far_id);
        proxy.space = Space::Near;
        proxy.hidden = false;
        proxy.pose = b.far_to_near(src.pose);
        proxy.half_extents = src.half_extents * b.scale;
        proxy.clipped = std::find(context.clipped.begin(), context.clipped.end(), far_id) != context.clipped.end();
        b.member_map.emplace(far_id, proxy.id);
        out.proxies.push_back(std::move(proxy));
    }
    return out;
}

Pose map_near_to_far(const ProxyBinding &binding, const Pose &proxy_pose) noexcept {
    return binding.near_to_far(proxy_pose);
}

Pose apply_indirect_delta(const GrabState &grab, const Pose &hand_now) noexcept {
    const UnitQuat delta = hand_now.orientation * grab.start_hand.orientation.inverse();
    return {grab.start_object.position + (hand_now.position - grab.start_hand.position) * grab.cd_gain,
            delta * grab.start_object.orientation};
}

namespace {

double resize_factor(double separation_start, double separation_now) {
    if (!(separation_start > 0.0) || !(separation_now > 0.0)) {
        throw Error(ErrorCode::DegenerateInput, "resize: hand separations must be positive");
    }
    return separation_now / separation_start;
}

} // namespace

ContextSphere resize_sphere(const ContextSphere &sphere, double separation_start, double separation_now) {
    ContextSphere out = sphere;
    out.radius = sphere.radius * resize_factor(separation_start, separation_now);
    return out;
}

NearResize resize_near_context(const ProxyBinding &binding, std::span<const SceneObject> proxies,
                               double separation_start, double separation_now) {
    const double k = resize_factor(separation_start, separation_now);
    NearResize out{binding, {proxies.begin(), proxies.end()}};
    out.binding.scale = binding.scale * k;
    out.binding.near_sphere.radius = binding.near_sphere.radius * k;
    const Vec3 c = binding.near_sphere.center;
    for (auto &p : out.proxies) {
        p.pose.position = c + (p.pose.position - c) * k;
        p.half_extents = p.half_extents * k;
    }
    return out;
}

CapturedContext resize_far_context(const Scene &scene, const CapturedContext &context, double separation_start,
                                   double separation_now) {
    const ContextSphere s = resize_sphere(context.sphere, separation_start, separation_now);
    return capture_context(scene, context.target_id, s.radius);
}

} // namespace sightwarp
