#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sightwarp/geom.hpp"
#include "sightwarp/input_frame.hpp"

namespace sightwarp {

// Trace files are JSON lines, one frame per line:
//   {"t":0,"gaze":{"o":[x,y,z],"d":[x,y,z]},"head":{"p":[..],"q":[w,x,y,z]},
//    "hand":{"p":[..],"q":[..]},"pinch":false,"valid":true}
// Blank lines are skipped. Unknown top-level fields are carried in
// InputFrame::extras and written back after the known ones.

std::string frame_to_line(const InputFrame &frame);

/// `where` prefixes parse diagnostics, e.g. "trace.jsonl:12".
InputFrame frame_from_line(std::string_view line, const std::string &where);

/// Parse errors name the line; a timestamp that does not increase is a
/// Sequencing error naming the line.
std::vector<InputFrame> read_trace(std::istream &in, const std::string &name = "<trace>");
std::vector<InputFrame> read_trace_file(const std::filesystem::path &path);

void write_trace(std::ostream &out, std::span<const InputFrame> frames);
void write_trace_file(const std::filesystem::path &path, std::span<const InputFrame> frames);

/// 1€-smoothed copy of the hand positions. Invalid-hand frames pass through
/// untouched and do not advance the filter.
std::vector<InputFrame> smooth_hand(std::span<const InputFrame> frames, const OneEuroParams &params = {});

} // namespace sightwarp
