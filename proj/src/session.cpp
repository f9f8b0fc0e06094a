#include "sightwarp/session.hpp"

#include "sightwarp/error.hpp"
#include "sightwarp/trace.hpp"
#include "sightwarp/warp.hpp"

namespace sightwarp {

namespace {

Json envelope(std::string_view type) {
    Json j = Json::object();
    j["protocol"] = kProtocolVersion;
    j["type"] = type;
    return j;
}

const Json &field(const Json &j, const char *name) {
    if (!j.contains(name)) throw Error(ErrorCode::Schema, std::string("message: missing field '") + name + "'");
    return j.at(name);
}

template <class T> T get(const Json &j, const char *name) {
    try {
        return field(j, name).get<T>();
    } catch (const nlohmann::json::exception &) {
        throw Error(ErrorCode::Schema, std::string("message: field '") + name + "' has the wrong type");
    }
}

Json objects_to_json(const std::vector<SceneObject> &objects) {
    Json a = Json::array();
    for (const auto &o : objects) a.push_back(to_json(o));
    return a;
}

std::vector<SceneObject> objects_from_json(const Json &j, const char *name) {
    const Json &a = field(j, name);
    if (!a.is_array()) throw Error(ErrorCode::Schema, std::string("message: '") + name + "' must be an array");
    std::vector<SceneObject> out;
    for (std::size_t i = 0; i < a.size(); ++i) {
        out.push_back(scene_object_from_json(a[i], std::string(name) + "[" + std::to_string(i) + "]"));
    }
    return out;
}

std::string error_code_name(const Error &e) { return std::string(to_string(e.code())); }

} // namespace

Json encode(const InboundMessage &msg) {
    return std::visit(
        [](const auto &m) -> Json {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, ConfigureMsg>) {
                Json j = envelope("configure");
                j["config"] = to_json(m.config);
                return j;
            } else if constexpr (std::is_same_v<T, LoadSceneMsg>) {
                Json j = envelope("load_scene");
                j["scene"] = to_json(m.scene);
                return j;
            } else if constexpr (std::is_same_v<T, StartTrialMsg>) {
                Json j = envelope("start_trial");
                j["spec"] = to_json(m.spec);
                return j;
            } else {
                Json j = envelope("frame");
                j["frame"] = Json::parse(frame_to_line(m.frame));
                return j;
            }
        },
        msg);
}

Json encode(const OutboundMessage &msg) {
    return std::visit(
        [](const auto &m) -> Json {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, Snapshot>) {
                Json j = envelope("snapshot");
                j["t"] = m.t;
                j["state"] = m.state;
                j["target"] = m.target ? Json(*m.target) : Json(nullptr);
                j["aligned"] = m.aligned;
                j["objects"] = objects_to_json(m.objects);
                j["proxies"] = objects_to_json(m.proxies);
                Json spheres = Json::array();
                for (const auto &s : m.spheres) spheres.push_back(to_json(s));
                j["spheres"] = std::move(spheres);
                Json events = Json::array();
                for (const auto &e : m.events) events.push_back(to_json(e));
                j["events"] = std::move(events);
                j["dropped_frames"] = m.dropped_frames;
                if (m.trial) {
                    Json hud = Json::object();
                    hud["dwell_elapsed_ms"] = m.trial->dwell_elapsed;
                    hud["completed_at"] = m.trial->completed_at ? Json(*m.trial->completed_at) : Json(nullptr);
                    j["trial"] = std::move(hud);
                }
                return j;
            } else if constexpr (std::is_same_v<T, TrialResultMsg>) {
                Json j = envelope("trial_result");
                j["completed_at"] = m.completed_at;
                j["metrics"] = to_json(m.metrics);
                return j;
            } else if constexpr (std::is_same_v<T, ErrorMsg>) {
                Json j = envelope("error");
                j["code"] = m.code;
                j["text"] = m.text;
                return j;
            } else {
                return envelope("heartbeat");
            }
        },
        msg);
}

namespace {

std::string check_envelope(const Json &j) {
    if (!j.is_object()) throw Error(ErrorCode::Schema, "message: expected a JSON object");
    if (get<int>(j, "protocol") != kProtocolVersion) {
        throw Error(ErrorCode::Schema, "message: unsupported protocol version " + field(j, "protocol").dump());
    }
    return get<std::string>(j, "type");
}

} // namespace

InboundMessage decode_inbound(const Json &j) {
    const std::string type = check_envelope(j);
    if (type == "configure") return ConfigureMsg{engine_config_from_json(field(j, "config"))};
    if (type == "load_scene") return LoadSceneMsg{scene_from_json(field(j, "scene"))};
    if (type == "start_trial") return StartTrialMsg{trial_spec_from_json(field(j, "spec"), "spec")};
    if (type == "frame") {
        const Json &f = field(j, "frame");
        if (!f.is_object()) throw Error(ErrorCode::Schema, "message: 'frame' must be an object");
        try {
            return FrameMsg{frame_from_line(f.dump(), "frame")};
        } catch (const Error &e) {
            throw Error(ErrorCode::Schema, e.what());
        }
    }
    throw Error(ErrorCode::Schema, "message: unknown inbound type '" + type + "'");
}

OutboundMessage decode_outbound(const Json &j) {
    const std::string type = check_envelope(j);
    if (type == "snapshot") {
        Snapshot s;
        s.t = get<std::int64_t>(j, "t");
        s.state = get<std::string>(j, "state");
        if (!field(j, "target").is_null()) s.target = get<std::string>(j, "target");
        s.aligned = get<bool>(j, "aligned");
        s.objects = objects_from_json(j, "objects");
        s.proxies = objects_from_json(j, "proxies");
        const Json &spheres = field(j, "spheres");
        for (std::size_t i = 0; i < spheres.size(); ++i) {
            s.spheres.push_back(context_sphere_from_json(spheres[i], "spheres[" + std::to_string(i) + "]"));
        }
        const Json &events = field(j, "events");
        for (std::size_t i = 0; i < events.size(); ++i) {
            s.events.push_back(semantic_event_from_json(events[i], "events[" + std::to_string(i) + "]"));
        }
        s.dropped_frames = get<std::uint64_t>(j, "dropped_frames");
        if (j.contains("trial")) {
            const Json &hud = j.at("trial");
            TrialHud h;
            h.dwell_elapsed = get<double>(hud, "dwell_elapsed_ms");
            if (!field(hud, "completed_at").is_null()) h.completed_at = get<std::int64_t>(hud, "completed_at");
            s.trial = h;
        }
        return s;
    }
    if (type == "trial_result") {
        return TrialResultMsg{get<std::int64_t>(j, "completed_at"), metrics_from_json(field(j, "metrics"), "metrics")};
    }
    if (type == "error") return ErrorMsg{get<std::string>(j, "code"), get<std::string>(j, "text")};
    if (type == "heartbeat") return HeartbeatMsg{};
    throw Error(ErrorCode::Schema, "message: unknown outbound type '" + type + "'");
}

void Session::rebuild() {
    runner_.reset();
    result_sent_ = false;
    if (scene_) runner_.emplace(*scene_, config_);
}

Snapshot Session::snapshot(std::int64_t t, const std::vector<SemanticEvent> &events) {
    const Engine &engine = runner_->engine();
    const EngineState &st = engine.state();
    Snapshot s;
    s.t = t;
    s.state = std::string(to_string(engine.kind()));
    s.aligned = st.detector.aligned;
    for (const auto &o : engine.scene().objects) {
        (o.space == Space::Far ? s.objects : s.proxies).push_back(o);
    }
    // Far poses are reported authoritatively, so a hidden original shows
    // where its proxy currently maps to.
    for (auto &o : s.objects) o.pose = engine.far_pose(o.id);

    std::visit(
        [&](const auto &state) {
            using T = std::decay_t<decltype(state)>;
            if constexpr (std::is_same_v<T, Hovering> || std::is_same_v<T, IndirectManipulation>) {
                s.target = state.target;
                const SceneObject &obj = engine.scene().at(state.target);
                const double r = config_.context_radius ? *config_.context_radius
                                                        : default_context_radius(obj, config_.context_rule);
                s.spheres.push_back({engine.far_pose(state.target).position, r, Space::Far});
            } else if constexpr (std::is_same_v<T, Summoning> || std::is_same_v<T, DirectManipulation>) {
                s.target = state.binding.target_id;
                s.spheres.push_back(state.binding.far_sphere);
                s.spheres.push_back(state.binding.near_sphere);
            }
        },
        st.state);

    s.events = events;
    s.dropped_frames = dropped_;
    dropped_ = 0;
    if (const auto &trial = runner_->trial()) s.trial = TrialHud{trial->dwell_elapsed, trial->completed_at};
    return s;
}

std::vector<OutboundMessage> Session::tick(const InboundMessage &msg) {
    std::vector<OutboundMessage> out;
    try {
        if (const auto *m = std::get_if<ConfigureMsg>(&msg)) {
            m->config.validate();
            config_ = m->config;
            rebuild();
        } else if (const auto *m = std::get_if<LoadSceneMsg>(&msg)) {
            scene_ = m->scene;
            rebuild();
        } else if (const auto *m = std::get_if<StartTrialMsg>(&msg)) {
            m->spec.validate();
            const Vec3 eye = scene_ ? scene_->eye : Scene{}.eye;
            scene_ = trial_scene(make_trial(m->spec, eye), eye);
            rebuild();
        } else {
            const auto &frame = std::get<FrameMsg>(msg).frame;
            if (!runner_) {
                out.push_back(ErrorMsg{"no-scene", "frame received before a scene was loaded"});
                return out;
            }
            const bool was_done = runner_->completed();
            const std::vector<SemanticEvent> events = runner_->step(frame);
            out.push_back(snapshot(frame.t, events));
            if (!was_done && runner_->completed() && !result_sent_) {
                result_sent_ = true;
                out.push_back(TrialResultMsg{*runner_->completed_at(), runner_->metrics()});
            }
        }
    } catch (const Error &e) {
        out.push_back(ErrorMsg{error_code_name(e), e.what()});
    }
    return out;
}

std::vector<OutboundMessage> Session::handle_batch(std::span<const InboundMessage> batch) {
    std::vector<OutboundMessage> out;
    for (std::size_t i = 0; i < batch.size(); ++i) {
        // A frame is dropped only when the next one carries the same pinch
        // and tracking state, so gesture edges always reach the engine.
        const auto *cur = std::get_if<FrameMsg>(&batch[i]);
        const auto *next = i + 1 < batch.size() ? std::get_if<FrameMsg>(&batch[i + 1]) : nullptr;
        if (cur && next && cur->frame.pinch == next->frame.pinch &&
            cur->frame.hand_valid == next->frame.hand_valid && cur->frame.t < next->frame.t) {
            ++dropped_;
            continue;
        }
        auto r = tick(batch[i]);
        out.insert(out.end(), std::make_move_iterator(r.begin()), std::make_move_iterator(r.end()));
    }
    return out;
}

std::vector<std::string> Session::handle_lines(std::span<const std::string> lines) {
    std::vector<std::string> out;
    std::vector<InboundMessage> pending;
    auto flush = [&] {
        for (const auto &m : handle_batch(pending)) out.push_back(encode(m).dump());
        pending.clear();
    };
    for (const auto &line : lines) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            pending.push_back(decode_inbound(Json::parse(line)));
        } catch (const Error &e) {
            // well-formed but rejected values keep their own code
            const bool shape = e.code() == ErrorCode::Schema || e.code() == ErrorCode::Parse;
            flush();
            out.push_back(encode(OutboundMessage{ErrorMsg{shape ? "bad-message" : error_code_name(e), e.what()}}).dump());
        } catch (const std::exception &e) {
            flush();
            out.push_back(encode(OutboundMessage{ErrorMsg{"bad-message", e.what()}}).dump());
        }
    }
    flush();
    return out;
}

} // namespace sightwarp
