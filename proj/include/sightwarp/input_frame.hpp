#pragma once

#include <cstdint>
#include <string>

#include "sightwarp/geom.hpp"

namespace sightwarp {

/// One timestamped input sample. Hand position is the pinch point; hand
/// orientation is the wrist.
struct InputFrame {
    std::int64_t t{0}; // ms
    Ray gaze;
    Pose head;
    Pose hand;
    bool pinch{false};
    bool hand_valid{true};
    // Unrecognized top-level fields of the source line, kept verbatim as a
    // serialized JSON object so they survive a read/write cycle.
    std::string extras;

    bool operator==(const InputFrame &o) const noexcept {
        return t == o.t && gaze.origin == o.gaze.origin && gaze.direction == o.gaze.direction && head == o.head &&
               hand == o.hand && pinch == o.pinch && hand_valid == o.hand_valid && extras == o.extras;
    }
};

} // namespace sightwarp
