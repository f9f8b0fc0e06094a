#include "sightwarp/trace.hpp"

#include <fstream>
#include <istream>
#include <ostream>

#include "sightwarp/error.hpp"
#include "sightwarp/json_io.hpp"

namespace sightwarp {

namespace {

constexpr std::string_view kKnownFields[] = {"t", "gaze", "head", "hand", "pinch", "valid"};

bool is_known(const std::string &key) {
    for (auto k : kKnownFields) {
        if (k == key) return true;
    }
    return false;
}

Json pose_json(const Pose &p) { return {{"p", to_json(p.position)}, {"q", to_json(p.orientation)}}; }

Pose pose_from(const Json &j, const std::string &where, const char *field) {
    const std::string f = where + ": " + field;
    if (!j.is_object() || !j.contains("p") || !j.contains("q")) {
        throw Error(ErrorCode::Parse, f + " must be an object with 'p' and 'q'");
    }
    return {vec3_from_json(j["p"], f + ".p"), quat_from_json(j["q"], f + ".q")};
}

} // namespace

std::string frame_to_line(const InputFrame &f) {
    Json j;
    j["t"] = f.t;
    j["gaze"] = {{"o", to_json(f.gaze.origin)}, {"d", to_json(f.gaze.direction)}};
    j["head"] = pose_json(f.head);
    j["hand"] = pose_json(f.hand);
    j["pinch"] = f.pinch;
    j["valid"] = f.hand_valid;
    if (!f.extras.empty()) {
        const Json extras = Json::parse(f.extras);
        for (const auto &[k, v] : extras.items()) j[k] = v;
    }
    return j.dump();
}

InputFrame frame_from_line(std::string_view line, const std::string &where) {
    Json j;
    try {
        j = Json::parse(line);
    } catch (const nlohmann::json::parse_error &e) {
        throw Error(ErrorCode::Parse, where + ": malformed JSON (" + e.what() + ")");
    }
    if (!j.is_object()) throw Error(ErrorCode::Parse, where + ": frame must be a JSON object");
    try {
        InputFrame f;
        if (!j.contains("t") || !j["t"].is_number_integer()) {
            throw Error(ErrorCode::Parse, where + ": field 't' must be an integer (ms)");
        }
        f.t = j["t"].get<std::int64_t>();
        const Json &g = j.contains("gaze") ? j["gaze"] : Json();
        if (!g.is_object() || !g.contains("o") || !g.contains("d")) {
            throw Error(ErrorCode::Parse, where + ": gaze must be an object with 'o' and 'd'");
        }
        f.gaze = Ray(vec3_from_json(g["o"], where + ": gaze.o"), vec3_from_json(g["d"], where + ": gaze.d"));
        f.head = pose_from(j.contains("head") ? j["head"] : Json(), where, "head");
        f.hand = pose_from(j.contains("hand") ? j["hand"] : Json(), where, "hand");
        if (!j.contains("pinch") || !j["pinch"].is_boolean()) {
            throw Error(ErrorCode::Parse, where + ": field 'pinch' must be a boolean");
        }
        f.pinch = j["pinch"].get<bool>();
        if (!j.contains("valid") || !j["valid"].is_boolean()) {
            throw Error(ErrorCode::Parse, where + ": field 'valid' must be a boolean");
        }
        f.hand_valid = j["valid"].get<bool>();
        Json extras = Json::object();
        for (auto &[k, v] : j.items()) {
            if (!is_known(k)) extras[k] = v;
        }
        if (!extras.empty()) f.extras = extras.dump();
        return f;
    } catch (const Error &e) {
        if (e.code() == ErrorCode::Parse) throw;
        throw Error(ErrorCode::Parse, where + ": " + e.what());
    }
}

std::vector<InputFrame> read_trace(std::istream &in, const std::string &name) {
    std::vector<InputFrame> frames;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const std::string where = name + ":" + std::to_string(line_no);
        InputFrame f = frame_from_line(line, where);
        if (!frames.empty() && f.t <= frames.back().t) {
            throw Error(ErrorCode::Sequencing, where + ": timestamp " + std::to_string(f.t) +
                                                   " ms does not follow " + std::to_string(frames.back().t) + " ms");
        }
        frames.push_back(std::move(f));
    }
    return frames;
}

std::vector<InputFrame> read_trace_file(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::Parse, path.string() + ": cannot open file");
    return read_trace(in, path.string());
}

void write_trace(std::ostream &out, std::span<const InputFrame> frames) {
    for (const auto &f : frames) out << frame_to_line(f) << '\n';
}

void write_trace_file(const std::filesystem::path &path, std::span<const InputFrame> frames) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::Parse, path.string() + ": cannot open for writing");
    write_trace(out, frames);
}

std::vector<InputFrame> smooth_hand(std::span<const InputFrame> frames, const OneEuroParams &params) {
    std::vector<InputFrame> out(frames.begin(), frames.end());
    OneEuroState state(params);
    for (auto &f : out) {
        if (!f.hand_valid) continue;
        auto r = one_euro_step(state, f.hand.position, static_cast<double>(f.t) / 1000.0);
        f.hand.position = r.value;
        state = r.state;
    }
    return out;
}

} // namespace sightwarp
