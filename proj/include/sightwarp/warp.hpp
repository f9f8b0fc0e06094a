#pragma once

#include <map>
#include <optional>
#include <span>
#include <vector>

#include "sightwarp/geom.hpp"
#include "sightwarp/scene.hpp"

namespace sightwarp {

struct ContextSphere {
    Vec3 center;
    double radius{0.0};
    Space space{Space::Far};

    bool operator==(const ContextSphere &) const noexcept = default;
};

enum class SummonMode { GazeToHand, HandToGaze };
enum class Placement { AtHand, AlongGaze };

// How the default far-context radius is derived from the target's box.
//   BoundingSphere: radius = |half_extents|, so the sphere diameter is twice
//                   the box's bounding sphere.
//   BoxEdge:        radius = longest box edge, so the diameter is twice that edge.
enum class ContextRadiusRule { BoundingSphere, BoxEdge };

double default_context_radius(const SceneObject &target, ContextRadiusRule rule = ContextRadiusRule::BoundingSphere);

struct CapturedContext {
    ObjectId target_id;
    ContextSphere sphere;
    std::vector<ObjectId> members; // target first, then scene order
    std::vector<ObjectId> clipped; // members extending past the sphere bounds
};

/// Collects every far object overlapping a sphere of `radius` around the target.
CapturedContext capture_context(const Scene &scene, const ObjectId &target_id, double radius);

/// |far - eye| / |hand - eye|: the gain applied to hand motion for a far object.
double cd_ratio(const Vec3 &eye, const Vec3 &far_point, const Vec3 &hand_point);

/// The far<->near similarity transform created by a summon.
///   near = C_near + scale * R * (far - C_far),   q_near = R * q_far
struct ProxyBinding {
    ObjectId target_id;
    ContextSphere far_sphere;
    ContextSphere near_sphere;
    double scale{1.0};
    UnitQuat reorientation;
    std::map<ObjectId, ObjectId> member_map; // far id -> proxy id
    SummonMode mode{SummonMode::HandToGaze};

    Pose far_to_near(const Pose &far) const noexcept;
    Pose near_to_far(const Pose &near) const noexcept;

    // Far id behind a proxy id, if the proxy belongs to this binding.
    std::optional<ObjectId> source_of(const ObjectId &proxy_id) const;
};

std::string proxy_id_for(const ObjectId &far_id);

struct SummonRequest {
    SummonMode mode{SummonMode::HandToGaze};
    Placement placement{Placement::AtHand};
    Ray gaze;
    Vec3 hand_point;
    UnitQuat reorientation; // ignored (identity) for HandToGaze
    std::optional<double> scale_override; // GazeToHand only
};

struct SummonResult {
    ProxyBinding binding;
    std::vector<SceneObject> proxies;
};

SummonResult summon(const Scene &scene, const CapturedContext &context, const SummonRequest &request);

Pose map_near_to_far(const ProxyBinding &binding, const Pose &proxy_pose) noexcept;

struct GrabState {
    Pose start_hand;
    Pose start_object;
    double cd_gain{1.0};
};

/// Object pose for the current hand pose: translation scaled by the gain,
/// rotation applied 1:1 about the object's own center.
Pose apply_indirect_delta(const GrabState &grab, const Pose &hand_now) noexcept;

/// Scales the sphere radius by separation_now / separation_start.
ContextSphere resize_sphere(const ContextSphere &sphere, double separation_start, double separation_now);

struct NearResize {
    ProxyBinding binding;
    std::vector<SceneObject> proxies;
};

/// Rescales the near sphere, the binding scale, and every proxy about C_near.
/// Far poses recovered through the binding are unchanged.
NearResize resize_near_context(const ProxyBinding &binding, std::span<const SceneObject> proxies,
                               double separation_start, double separation_now);

/// Rescales the far sphere and recomputes membership.
CapturedContext resize_far_context(const Scene &scene, const CapturedContext &context, double separation_start,
                                   double separation_now);

} // namespace sightwarp
