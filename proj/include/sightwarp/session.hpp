#pragma once

// Live session endpoint. Messages are JSON objects, one per line, each tagged
// with "protocol": 1 and a "type". See docs/protocol.md.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "sightwarp/docking.hpp"
#include "sightwarp/fsm.hpp"
#include "sightwarp/json_io.hpp"
#include "sightwarp/metrics.hpp"
#include "sightwarp/trial_runner.hpp"

namespace sightwarp {

inline constexpr int kProtocolVersion = 1;

struct ConfigureMsg {
    EngineConfig config;
};
struct LoadSceneMsg {
    Scene scene;
};
struct StartTrialMsg {
    TrialSpec spec;
};
struct FrameMsg {
    InputFrame frame;
};

using InboundMessage = std::variant<ConfigureMsg, LoadSceneMsg, StartTrialMsg, FrameMsg>;

struct TrialHud {
    double dwell_elapsed{0.0};
    std::optional<std::int64_t> completed_at;

    bool operator==(const TrialHud &) const noexcept = default;
};

struct Snapshot {
    std::int64_t t{0};
    std::string state;
    std::optional<ObjectId> target;
    bool aligned{false};
    std::vector<SceneObject> objects; // far space
    std::vector<SceneObject> proxies; // near space
    std::vector<ContextSphere> spheres;
    std::vector<SemanticEvent> events;
    std::uint64_t dropped_frames{0}; // frames coalesced away since the previous snapshot
    std::optional<TrialHud> trial;

    bool operator==(const Snapshot &) const noexcept = default;
};

struct TrialResultMsg {
    std::int64_t completed_at{0};
    MetricsRecord metrics;

    bool operator==(const TrialResultMsg &) const noexcept = default;
};

struct ErrorMsg {
    std::string code; // "no-scene", "bad-message", or an ErrorCode name
    std::string text;

    bool operator==(const ErrorMsg &) const noexcept = default;
};

struct HeartbeatMsg {
    bool operator==(const HeartbeatMsg &) const noexcept = default;
};

using OutboundMessage = std::variant<Snapshot, TrialResultMsg, ErrorMsg, HeartbeatMsg>;

Json encode(const InboundMessage &msg);
Json encode(const OutboundMessage &msg);

// Both throw Error(Schema) on a malformed message.
InboundMessage decode_inbound(const Json &j);
OutboundMessage decode_outbound(const Json &j);

/// One serialized tick loop. Not thread-safe; the transport serializes calls.
class Session {
public:
    Session() = default;

    std::vector<OutboundMessage> tick(const InboundMessage &msg);

    /// Handles messages that arrived together. A frame immediately followed by
    /// another with the same pinch and tracking state is skipped; the number
    /// skipped is reported in the next snapshot.
    std::vector<OutboundMessage> handle_batch(std::span<const InboundMessage> batch);

    /// Wire-level entry: decodes each line (a malformed one yields a
    /// "bad-message" error in its place), then behaves like handle_batch.
    std::vector<std::string> handle_lines(std::span<const std::string> lines);

    const std::optional<TrialRunner> &runner() const noexcept { return runner_; }
    const EngineConfig &config() const noexcept { return config_; }

private:
    void rebuild();
    Snapshot snapshot(std::int64_t t, const std::vector<SemanticEvent> &events);

    EngineConfig config_;
    std::optional<Scene> scene_;
    std::optional<TrialRunner> runner_;
    std::uint64_t dropped_{0};
    bool result_sent_{false};
};

} // namespace sightwarp
