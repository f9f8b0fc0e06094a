#include "sightwarp/json_io.hpp"

#include <fstream>
#include <sstream>

#include "sightwarp/error.hpp"

namespace sightwarp {

namespace {

[[noreturn]] void schema_error(const std::string &context, const std::string &what) {
    throw Error(ErrorCode::Schema, context + ": " + what);
}

const Json &req(const Json &j, const char *key, const std::string &ctx) {
    if (!j.is_object()) schema_error(ctx, "expected an object");
    auto it = j.find(key);
    if (it == j.end()) schema_error(ctx, std::string("missing field '") + key + "'");
    return *it;
}

double num(const Json &j, const char *key, const std::string &ctx) {
    const Json &v = req(j, key, ctx);
    if (!v.is_number()) schema_error(ctx, std::string("field '") + key + "' must be a number");
    return v.get<double>();
}

std::int64_t integer(const Json &j, const char *key, const std::string &ctx) {
    const Json &v = req(j, key, ctx);
    if (!v.is_number_integer()) schema_error(ctx, std::string("field '") + key + "' must be an integer");
    return v.get<std::int64_t>();
}

std::uint64_t uinteger(const Json &j, const char *key, const std::string &ctx) {
    const Json &v = req(j, key, ctx);
    if (!v.is_number_unsigned()) {
        schema_error(ctx, std::string("field '") + key + "' must be a non-negative integer");
    }
    return v.get<std::uint64_t>();
}

bool boolean(const Json &j, const char *key, const std::string &ctx) {
    const Json &v = req(j, key, ctx);
    if (!v.is_boolean()) schema_error(ctx, std::string("field '") + key + "' must be a boolean");
    return v.get<bool>();
}

std::string str(const Json &j, const char *key, const std::string &ctx) {
    const Json &v = req(j, key, ctx);
    if (!v.is_string()) schema_error(ctx, std::string("field '") + key + "' must be a string");
    return v.get<std::string>();
}

void check_schema(const Json &j, const std::string &ctx) {
    const std::int64_t v = integer(j, "schema", ctx);
    if (v != kSchemaVersion) {
        schema_error(ctx, "unsupported schema version " + std::to_string(v));
    }
}

std::array<double, 3> triple(const Json &j, const std::string &field) {
    if (!j.is_array() || j.size() != 3) schema_error(field, "expected an array of 3 numbers");
    std::array<double, 3> out{};
    for (std::size_t i = 0; i < 3; ++i) {
        if (!j[i].is_number()) schema_error(field, "expected an array of 3 numbers");
        out[i] = j[i].get<double>();
    }
    return out;
}

} // namespace

Json to_json(const Vec3 &v) { return Json::array({v.x, v.y, v.z}); }
Json to_json(const UnitQuat &q) { return Json::array({q.w(), q.x(), q.y(), q.z()}); }

Vec3 vec3_from_json(const Json &j, const std::string &field) {
    auto a = triple(j, field);
    Vec3 v{a[0], a[1], a[2]};
    if (!is_finite(v)) schema_error(field, "components must be finite");
    return v;
}

UnitQuat quat_from_json(const Json &j, const std::string &field) {
    if (!j.is_array() || j.size() != 4) schema_error(field, "expected [w, x, y, z]");
    for (const auto &c : j) {
        if (!c.is_number()) schema_error(field, "expected [w, x, y, z]");
    }
    try {
        return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>()};
    } catch (const Error &e) {
        schema_error(field, e.what());
    }
}

Json to_json(const SceneObject &o) {
    Json j;
    j["id"] = o.id;
    j["position"] = to_json(o.pose.position);
    j["orientation"] = to_json(o.pose.orientation);
    j["half_extents"] = to_json(o.half_extents);
    j["interactable"] = o.interactable;
    if (o.space == Space::Near) j["space"] = "NEAR";
    if (o.hidden) j["hidden"] = true;
    if (o.clipped) j["clipped"] = true;
    return j;
}

SceneObject scene_object_from_json(const Json &j, const std::string &context) {
    SceneObject o;
    o.id = str(j, "id", context);
    const std::string ctx = context + " '" + o.id + "'";
    o.pose.position = vec3_from_json(req(j, "position", ctx), ctx + ".position");
    o.pose.orientation = quat_from_json(req(j, "orientation", ctx), ctx + ".orientation");
    o.half_extents = vec3_from_json(req(j, "half_extents", ctx), ctx + ".half_extents");
    if (o.half_extents.x < 0 || o.half_extents.y < 0 || o.half_extents.z < 0) {
        schema_error(ctx + ".half_extents", "must be non-negative");
    }
    o.interactable = j.contains("interactable") ? boolean(j, "interactable", ctx) : true;
    if (j.contains("space")) {
        const std::string s = str(j, "space", ctx);
        if (s == "FAR") o.space = Space::Far;
        else if (s == "NEAR") o.space = Space::Near;
        else schema_error(ctx + ".space", "expected FAR or NEAR");
    }
    if (j.contains("hidden")) o.hidden = boolean(j, "hidden", ctx);
    if (j.contains("clipped")) o.clipped = boolean(j, "clipped", ctx);
    return o;
}

Json to_json(const Scene &scene) {
    Json j;
    j["schema"] = kSchemaVersion;
    j["eye"] = to_json(scene.eye);
    j["objects"] = Json::array();
    for (const auto &o : scene.objects) j["objects"].push_back(to_json(o));
    if (scene.trial) {
        const TrialBinding &t = *scene.trial;
        j["trial"] = {{"object", t.object_id},
                      {"target", t.target_id},
                      {"width", t.width},
                      {"threshold_pos_frac", t.threshold_pos_frac},
                      {"threshold_rot_deg", t.threshold_rot_deg},
                      {"dwell_required_ms", t.dwell_required_ms}};
    }
    return j;
}

Scene scene_from_json(const Json &j) {
    const std::string ctx = "scene";
    check_schema(j, ctx);
    Scene s;
    s.eye = vec3_from_json(req(j, "eye", ctx), "scene.eye");
    const Json &objs = req(j, "objects", ctx);
    if (!objs.is_array()) schema_error("scene.objects", "expected an array");
    for (std::size_t i = 0; i < objs.size(); ++i) {
        SceneObject o = scene_object_from_json(objs[i], "scene.objects[" + std::to_string(i) + "]");
        if (s.find(o.id)) schema_error("scene.objects", "duplicate id '" + o.id + "'");
        s.objects.push_back(std::move(o));
    }
    if (j.contains("trial")) {
        const Json &t = j["trial"];
        const std::string tctx = "scene.trial";
        TrialBinding b;
        b.object_id = str(t, "object", tctx);
        b.target_id = str(t, "target", tctx);
        b.width = num(t, "width", tctx);
        if (t.contains("threshold_pos_frac")) b.threshold_pos_frac = num(t, "threshold_pos_frac", tctx);
        if (t.contains("threshold_rot_deg")) b.threshold_rot_deg = num(t, "threshold_rot_deg", tctx);
        if (t.contains("dwell_required_ms")) b.dwell_required_ms = num(t, "dwell_required_ms", tctx);
        if (!s.find(b.object_id)) schema_error(tctx + ".object", "unknown object id '" + b.object_id + "'");
        if (!s.find(b.target_id)) schema_error(tctx + ".target", "unknown object id '" + b.target_id + "'");
        if (!(b.width > 0.0)) schema_error(tctx + ".width", "must be positive");
        s.trial = b;
    }
    return s;
}

namespace {

Json band_json(const DepthBand &b) { return Json::array({b.min, b.max}); }

DepthBand band_from_json(const Json &j, const std::string &field) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
        schema_error(field, "expected [min, max]");
    }
    return {j[0].get<double>(), j[1].get<double>()};
}

} // namespace

Json to_json(const EngineConfig &c) {
    Json j;
    j["schema"] = kSchemaVersion;
    j["mode"] = std::string(to_string(c.mode));
    j["summon_on_pinch"] = c.summon_on_pinch;
    j["dwell_ms"] = c.dwell_ms;
    j["placement"] = c.placement == Placement::AtHand ? "AtHand" : "AlongGaze";
    j["reorientation"] = to_json(c.reorientation);
    j["hide_far_on_summon"] = c.hide_far_on_summon;
    j["grab_margin"] = c.grab_margin;
    j["context_rule"] = c.context_rule == ContextRadiusRule::BoundingSphere ? "BoundingSphere" : "BoxEdge";
    j["context_radius"] = c.context_radius ? Json(*c.context_radius) : Json(nullptr);
    j["gaze_to_hand_scale"] = c.gaze_to_hand_scale ? Json(*c.gaze_to_hand_scale) : Json(nullptr);
    j["alignment"] = {{"enter_angle", c.alignment.enter_angle},
                      {"exit_angle", c.alignment.exit_angle},
                      {"enter_depth", band_json(c.alignment.enter_depth)},
                      {"exit_depth", band_json(c.alignment.exit_depth)}};
    return j;
}

EngineConfig engine_config_from_json(const Json &j) {
    const std::string ctx = "config";
    if (!j.is_object()) schema_error(ctx, "expected an object");
    if (j.contains("schema")) check_schema(j, ctx);
    EngineConfig c;
    if (j.contains("mode")) {
        auto m = technique_from_string(str(j, "mode", ctx));
        if (!m) schema_error("config.mode", "expected Baseline, GazeToHand or HandToGaze");
        c.mode = *m;
    }
    if (j.contains("summon_on_pinch")) c.summon_on_pinch = boolean(j, "summon_on_pinch", ctx);
    if (j.contains("dwell_ms")) c.dwell_ms = num(j, "dwell_ms", ctx);
    if (j.contains("placement")) {
        const std::string p = str(j, "placement", ctx);
        if (p == "AtHand") c.placement = Placement::AtHand;
        else if (p == "AlongGaze") c.placement = Placement::AlongGaze;
        else schema_error("config.placement", "expected AtHand or AlongGaze");
    }
    if (j.contains("reorientation")) c.reorientation = quat_from_json(j["reorientation"], "config.reorientation");
    if (j.contains("hide_far_on_summon")) c.hide_far_on_summon = boolean(j, "hide_far_on_summon", ctx);
    if (j.contains("grab_margin")) c.grab_margin = num(j, "grab_margin", ctx);
    if (j.contains("context_rule")) {
        const std::string r = str(j, "context_rule", ctx);
        if (r == "BoundingSphere") c.context_rule = ContextRadiusRule::BoundingSphere;
        else if (r == "BoxEdge") c.context_rule = ContextRadiusRule::BoxEdge;
        else schema_error("config.context_rule", "expected BoundingSphere or BoxEdge");
    }
    if (j.contains("context_radius") && !j["context_radius"].is_null()) {
        c.context_radius = num(j, "context_radius", ctx);
    }
    if (j.contains("gaze_to_hand_scale") && !j["gaze_to_hand_scale"].is_null()) {
        c.gaze_to_hand_scale = num(j, "gaze_to_hand_scale", ctx);
    }
    if (j.contains("alignment")) {
        const Json &a = j["alignment"];
        const std::string actx = "config.alignment";
        if (a.contains("enter_angle")) c.alignment.enter_angle = num(a, "enter_angle", actx);
        if (a.contains("exit_angle")) c.alignment.exit_angle = num(a, "exit_angle", actx);
        if (a.contains("enter_depth")) c.alignment.enter_depth = band_from_json(a["enter_depth"], actx + ".enter_depth");
        if (a.contains("exit_depth")) c.alignment.exit_depth = band_from_json(a["exit_depth"], actx + ".exit_depth");
    }
    try {
        c.validate();
    } catch (const Error &e) {
        throw Error(e.code(), ctx + ": " + e.what());
    }
    return c;
}

Json to_json(const TrialSpec &s) {
    Json j;
    j["object_size_deg"] = s.object_size_deg;
    j["rotation_magnitude_deg"] = s.rotation_magnitude_deg;
    j["displacement"] = std::string(to_string(s.displacement));
    j["axis_pair"] = std::string(to_string(s.axis_pair));
    j["signs"] = Json::array({s.sign_a, s.sign_b});
    j["spawn_distance"] = s.spawn_distance;
    j["seed"] = s.seed;
    return j;
}

TrialSpec trial_spec_from_json(const Json &j, const std::string &context) {
    TrialSpec s;
    s.object_size_deg = num(j, "object_size_deg", context);
    s.rotation_magnitude_deg = num(j, "rotation_magnitude_deg", context);
    auto d = displacement_from_string(str(j, "displacement", context));
    if (!d) schema_error(context + ".displacement", "expected +X, -X, +Z or -Z");
    s.displacement = *d;
    auto p = axis_pair_from_string(str(j, "axis_pair", context));
    if (!p) schema_error(context + ".axis_pair", "expected XY, YZ or XZ");
    s.axis_pair = *p;
    const Json &signs = req(j, "signs", context);
    if (!signs.is_array() || signs.size() != 2 || !signs[0].is_number_integer() || !signs[1].is_number_integer()) {
        schema_error(context + ".signs", "expected [+-1, +-1]");
    }
    s.sign_a = signs[0].get<int>();
    s.sign_b = signs[1].get<int>();
    if (j.contains("spawn_distance")) s.spawn_distance = num(j, "spawn_distance", context);
    if (j.contains("seed")) s.seed = uinteger(j, "seed", context);
    try {
        s.validate();
    } catch (const Error &e) {
        throw Error(e.code(), context + ": " + e.what());
    }
    return s;
}

Json to_json(const SessionPlan &plan) {
    Json j;
    j["schema"] = kSchemaVersion;
    j["participant_seed"] = plan.participant_seed;
    j["trials"] = Json::array();
    for (const auto &e : plan.trials) {
        Json t;
        t["index"] = e.index;
        t["technique"] = std::string(to_string(e.technique));
        t["block"] = e.block;
        t["spec"] = to_json(e.spec);
        j["trials"].push_back(std::move(t));
    }
    return j;
}

SessionPlan session_plan_from_json(const Json &j) {
    const std::string ctx = "session";
    check_schema(j, ctx);
    SessionPlan plan;
    plan.participant_seed = uinteger(j, "participant_seed", ctx);
    const Json &trials = req(j, "trials", ctx);
    if (!trials.is_array()) schema_error("session.trials", "expected an array");
    for (std::size_t i = 0; i < trials.size(); ++i) {
        const std::string tctx = "session.trials[" + std::to_string(i) + "]";
        SessionEntry e;
        e.index = static_cast<int>(integer(trials[i], "index", tctx));
        auto tech = technique_from_string(str(trials[i], "technique", tctx));
        if (!tech) schema_error(tctx + ".technique", "expected Baseline, GazeToHand or HandToGaze");
        e.technique = *tech;
        e.block = static_cast<int>(integer(trials[i], "block", tctx));
        e.spec = trial_spec_from_json(req(trials[i], "spec", tctx), tctx + ".spec");
        plan.trials.push_back(e);
    }
    return plan;
}

Json to_json(const SemanticEvent &e) {
    Json j;
    j["t"] = e.t;
    j["type"] = std::string(to_string(e.type));
    if (!e.id.empty()) j["id"] = e.id;
    if (!e.source.empty()) j["source"] = e.source;
    if (e.space) j["space"] = std::string(to_string(*e.space));
    if (e.retarget) j["retarget"] = true;
    return j;
}

SemanticEvent semantic_event_from_json(const Json &j, const std::string &context) {
    SemanticEvent e;
    e.t = integer(j, "t", context);
    auto type = event_type_from_string(str(j, "type", context));
    if (!type) schema_error(context + ".type", "unknown event type");
    e.type = *type;
    if (j.contains("id")) e.id = str(j, "id", context);
    if (j.contains("source")) e.source = str(j, "source", context);
    if (j.contains("space")) {
        const std::string s = str(j, "space", context);
        if (s == "FAR") e.space = Space::Far;
        else if (s == "NEAR") e.space = Space::Near;
        else schema_error(context + ".space", "expected FAR or NEAR");
    }
    if (j.contains("retarget")) e.retarget = boolean(j, "retarget", context);
    return e;
}

Json to_json(const MetricsRecord &m) {
    Json j;
    j["trial_completion_time_ms"] = m.trial_completion_time;
    j["acquisition_time_ms"] = m.acquisition_time;
    j["first_manipulation_duration_ms"] = m.first_manipulation_duration;
    j["clutch_count"] = m.clutch_count;
    j["failed_gesture_count"] = m.failed_gesture_count;
    j["hand_translation_m"] = m.hand_translation;
    j["hand_rotation_deg"] = m.hand_rotation;
    return j;
}

MetricsRecord metrics_from_json(const Json &j, const std::string &context) {
    MetricsRecord m;
    m.trial_completion_time = num(j, "trial_completion_time_ms", context);
    m.acquisition_time = num(j, "acquisition_time_ms", context);
    m.first_manipulation_duration = num(j, "first_manipulation_duration_ms", context);
    m.clutch_count = static_cast<int>(integer(j, "clutch_count", context));
    m.failed_gesture_count = static_cast<int>(integer(j, "failed_gesture_count", context));
    m.hand_translation = num(j, "hand_translation_m", context);
    m.hand_rotation = num(j, "hand_rotation_deg", context);
    return m;
}

Json to_json(const ContextSphere &s) {
    return {{"center", to_json(s.center)}, {"radius", s.radius}, {"space", std::string(to_string(s.space))}};
}

ContextSphere context_sphere_from_json(const Json &j, const std::string &context) {
    ContextSphere s;
    s.center = vec3_from_json(req(j, "center", context), context + ".center");
    s.radius = num(j, "radius", context);
    const std::string sp = str(j, "space", context);
    if (sp == "FAR") s.space = Space::Far;
    else if (sp == "NEAR") s.space = Space::Near;
    else schema_error(context + ".space", "expected FAR or NEAR");
    return s;
}

Json read_json_file(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::Parse, path.string() + ": cannot open file");
    try {
        return Json::parse(in);
    } catch (const nlohmann::json::parse_error &e) {
        throw Error(ErrorCode::Parse, path.string() + ": " + e.what());
    }
}

void write_json_file(const std::filesystem::path &path, const Json &j) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::Parse, path.string() + ": cannot open for writing");
    out << j.dump(2) << '\n';
}

} // namespace sightwarp
