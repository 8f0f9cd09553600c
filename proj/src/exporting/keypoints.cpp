#include "signcrowd/exporting/keypoints.hpp"

#include <cstdlib>

#include "signcrowd/core/json_codec.hpp"

namespace signcrowd {

namespace {

[[noreturn]] void syntax(std::size_t line, const std::string& what) {
    throw Error(ErrorCode::SidecarSyntax, "line " + std::to_string(line) + ": " + what);
}

}  // namespace

std::vector<KeypointFrame> parse_keypoint_sidecar(std::string_view jsonl) {
    std::vector<KeypointFrame> frames;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < jsonl.size()) {
        auto nl = jsonl.find('\n', pos);
        if (nl == std::string_view::npos) nl = jsonl.size();
        auto line = jsonl.substr(pos, nl - pos);
        pos = nl + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty()) {
            if (pos < jsonl.size()) syntax(line_no, "blank line");
            continue;
        }

        const auto j = Json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object()) syntax(line_no, "not a JSON object");
        if (!j.contains("frame_index") || !j.at("frame_index").is_number_integer()) {
            syntax(line_no, "frame_index must be an integer");
        }
        KeypointFrame frame;
        frame.frame_index = j.at("frame_index").get<std::int64_t>();
        if (frames.empty() ? frame.frame_index != 0 : frame.frame_index <= frames.back().frame_index) {
            syntax(line_no, frames.empty() ? "first frame_index must be 0" : "frame_index must strictly increase");
        }

        for (auto group : all_values<KeypointGroup>()) {
            const auto name = std::string(to_string(group));
            if (!j.contains(name) || !j.at(name).is_array()) syntax(line_no, "missing group '" + name + "'");
            auto& points = frame.groups[static_cast<std::size_t>(group)];
            for (const auto& p : j.at(name)) {
                if (!p.is_array() || p.size() != 3 || !p[0].is_number() || !p[1].is_number() || !p[2].is_number()) {
                    syntax(line_no, "'" + name + "' points must be [x, y, confidence]");
                }
                Keypoint k{p[0].get<double>(), p[1].get<double>(), p[2].get<double>()};
                if (k.confidence < 0.0 || k.confidence > 1.0) syntax(line_no, "confidence outside [0, 1]");
                points.push_back(k);
            }
            if (!frames.empty() && points.size() != frames.front().groups[static_cast<std::size_t>(group)].size()) {
                syntax(line_no, "'" + name + "' arity changed between frames");
            }
        }
        frames.push_back(std::move(frame));
    }
    return frames;
}

std::string serialize_keypoint_sidecar(const std::vector<KeypointFrame>& frames) {
    std::string out;
    for (const auto& f : frames) {
        Json j{{"frame_index", f.frame_index}};
        for (auto group : all_values<KeypointGroup>()) {
            Json points = Json::array();
            for (const auto& k : f.groups[static_cast<std::size_t>(group)]) {
                points.push_back({k.x, k.y, k.confidence});
            }
            j[std::string(to_string(group))] = std::move(points);
        }
        out += j.dump();
        out += '\n';
    }
    return out;
}

std::int64_t expected_frame_count(Millis trimmed_ms, const FrameRate& fps) {
    // Exact: floor(ms * num / (1000 * den)); inputs are non-negative.
    const __int128 numerator = static_cast<__int128>(trimmed_ms) * fps.num;
    const __int128 denominator = static_cast<__int128>(1000) * fps.den;
    return static_cast<std::int64_t>(numerator / denominator);
}

void check_frame_alignment(std::int64_t frames, Millis trimmed_ms, const FrameRate& fps, std::int64_t tolerance) {
    const auto expected = expected_frame_count(trimmed_ms, fps);
    if (frames <= 0 || std::llabs(frames - expected) > tolerance) {
        throw Error(ErrorCode::FrameMismatch,
                    "expected " + std::to_string(expected) + " frames (±" + std::to_string(tolerance) +
                        "), got " + std::to_string(frames));
    }
}

}  // namespace signcrowd
