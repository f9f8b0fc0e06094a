#include "sightwarp/scene.hpp"

#include <algorithm>
#include <cmath>

#include "sightwarp/error.hpp"

namespace sightwarp {

std::string_view to_string(Space space) noexcept { return space == Space::Far ? "FAR" : "NEAR"; }

const SceneObject *Scene::find(const ObjectId &id) const noexcept {
    auto it = std::find_if(objects.begin(), objects.end(), [&](const SceneObject &o) { return o.id == id; });
    return it == objects.end() ? nullptr : &*it;
}

SceneObject *Scene::find(const ObjectId &id) noexcept {
    auto it = std::find_if(objects.begin(), objects.end(), [&](const SceneObject &o) { return o.id == id; });
    return it == objects.end() ? nullptr : &*it;
}

const SceneObject &Scene::at(const ObjectId &id) const {
    if (const auto *o = find(id)) return *o;
    throw Error(ErrorCode::Consistency, "unknown object id '" + id + "'");
}

SceneObject &Scene::at(const ObjectId &id) {
    if (auto *o = find(id)) return *o;
    throw Error(ErrorCode::Consistency, "unknown object id '" + id + "'");
}

void Scene::add(SceneObject object) {
    if (find(object.id)) {
        throw Error(ErrorCode::Consistency, "duplicate object id '" + object.id + "'");
    }
    if (object.half_extents.x < 0 || object.half_extents.y < 0 || object.half_extents.z < 0) {
        throw Error(ErrorCode::Consistency, "object '" + object.id + "' has negative half extents");
    }
    objects.push_back(std::move(object));
}

void Scene::remove(const ObjectId &id) {
    std::erase_if(objects, [&](const SceneObject &o) { return o.id == id; });
}

std::optional<double> ray_hit_distance(const SceneObject &object, const Ray &ray) noexcept {
    const double r = object.bounding_radius();
    const Vec3 oc = object.pose.position - ray.origin;
    const double along = dot(oc, ray.direction);
    const double perp2 = dot(oc, oc) - along * along;
    const double r2 = r * r;
    if (perp2 > r2) return std::nullopt;
    const double half_chord = std::sqrt(std::max(0.0, r2 - perp2));
    const double exit = along + half_chord;
    if (exit < 0.0) return std::nullopt; // sphere entirely behind the eye
    return std::max(0.0, along - half_chord);
}

std::optional<ObjectId> gaze_target(const Scene &scene, const Ray &gaze, double fixation_ms, double dwell_ms) {
    if (fixation_ms < dwell_ms) return std::nullopt;
    const SceneObject *best = nullptr;
    double best_t = 0.0;
    for (const auto &o : scene.objects) {
        if (o.space != Space::Far || !o.interactable || o.hidden) continue;
        auto t = ray_hit_distance(o, gaze);
        if (!t) continue;
        if (!best || *t < best_t) {
            best = &o;
            best_t = *t;
        }
    }
    if (!best) return std::nullopt;
    return best->id;
}

bool sphere_intersects(const SceneObject &object, const Vec3 &center, double radius) {
    return distance(object.pose.position, center) <= radius + object.bounding_radius();
}

} // namespace sightwarp
