#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sightwarp/geom.hpp"

namespace sightwarp {

using ObjectId = std::string;

enum class Space { Far, Near };

std::string_view to_string(Space space) noexcept;

struct SceneObject {
    ObjectId id;
    Pose pose;
    Vec3 half_extents; // local axis-aligned box, meters
    bool interactable{true};
    Space space{Space::Far};
    bool clipped{false}; // partially outside its context sphere
    bool hidden{false};  // far original removed while its proxy is live

    // Radius of the sphere enclosing the box, independent of orientation.
    double bounding_radius() const noexcept { return length(half_extents); }

    bool operator==(const SceneObject &) const noexcept = default;
};

// Docking-trial annotation carried alongside a scene: which object the user
// manipulates, which one is the goal, and the nominal metric width W.
struct TrialBinding {
    ObjectId object_id;
    ObjectId target_id;
    double width{0.0};
    double threshold_pos_frac{0.2};
    double threshold_rot_deg{15.0};
    double dwell_required_ms{300.0};
};

struct Scene {
    Vec3 eye{0.0, 1.6, 0.0};
    std::vector<SceneObject> objects;
    std::optional<TrialBinding> trial;

    const SceneObject *find(const ObjectId &id) const noexcept;
    SceneObject *find(const ObjectId &id) noexcept;

    // Throws Consistency if absent.
    const SceneObject &at(const ObjectId &id) const;
    SceneObject &at(const ObjectId &id);

    // Throws Consistency on a duplicate id.
    void add(SceneObject object);
    void remove(const ObjectId &id);
};

/// Entry distance along the ray to the object's bounding sphere, if hit.
std::optional<double> ray_hit_distance(const SceneObject &object, const Ray &ray) noexcept;

/// Nearest interactable, visible far object whose bounding sphere the ray
/// crosses, provided the gaze has rested on it for at least `dwell_ms`.
std::optional<ObjectId> gaze_target(const Scene &scene, const Ray &gaze, double fixation_ms,
                                    double dwell_ms = 0.0);

/// Closed overlap test between the object's bounding sphere and a query sphere.
bool sphere_intersects(const SceneObject &object, const Vec3 &center, double radius);

} // namespace sightwarp
