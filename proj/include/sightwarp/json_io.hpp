#pragma once

// JSON encodings of the engine's value types. Every document that lives in a
// file carries a schema version; decoders reject unknown versions and name the
// offending field in the error.

#include <filesystem>
#include <string>

#include "json.hpp"

#include "sightwarp/docking.hpp"
#include "sightwarp/fsm.hpp"
#include "sightwarp/metrics.hpp"
#include "sightwarp/scene.hpp"

namespace sightwarp {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

Json to_json(const Vec3 &v);
Json to_json(const UnitQuat &q); // [w, x, y, z]
Vec3 vec3_from_json(const Json &j, const std::string &field);
UnitQuat quat_from_json(const Json &j, const std::string &field);

Json to_json(const SceneObject &o);
SceneObject scene_object_from_json(const Json &j, const std::string &context);

Json to_json(const Scene &scene);
Scene scene_from_json(const Json &j);

Json to_json(const EngineConfig &config);
// Missing fields keep their defaults.
EngineConfig engine_config_from_json(const Json &j);

Json to_json(const TrialSpec &spec);
TrialSpec trial_spec_from_json(const Json &j, const std::string &context);

Json to_json(const SessionPlan &plan);
SessionPlan session_plan_from_json(const Json &j);

Json to_json(const SemanticEvent &e);
SemanticEvent semantic_event_from_json(const Json &j, const std::string &context);

Json to_json(const MetricsRecord &m);
MetricsRecord metrics_from_json(const Json &j, const std::string &context);

Json to_json(const ContextSphere &s);
ContextSphere context_sphere_from_json(const Json &j, const std::string &context);

/// Parses a whole JSON document from a file; Parse errors name the file.
Json read_json_file(const std::filesystem::path &path);
void write_json_file(const std::filesystem::path &path, const Json &j);

} // namespace sightwarp
