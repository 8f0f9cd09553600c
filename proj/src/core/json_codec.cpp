#include "signcrowd/core/json_codec.hpp"

namespace signcrowd {

namespace {

const Json& require(const Json& j, const char* field) {
    if (!j.is_object() || !j.contains(field) || j.at(field).is_null()) {
        throw Error(ErrorCode::BadRequest, std::string("missing field '") + field + "'");
    }
    return j.at(field);
}

bool present(const Json& j, const char* field) {
    return j.is_object() && j.contains(field) && !j.at(field).is_null();
}

}  // namespace

std::string get_string(const Json& j, const char* field) {
    const auto& v = require(j, field);
    if (!v.is_string()) throw Error(ErrorCode::BadRequest, std::string(field) + " must be a string");
    return v.get<std::string>();
}

std::optional<std::string> get_opt_string(const Json& j, const char* field) {
    if (!present(j, field)) return std::nullopt;
    return get_string(j, field);
}

std::int64_t get_int(const Json& j, const char* field) {
    const auto& v = require(j, field);
    if (!v.is_number_integer()) throw Error(ErrorCode::BadRequest, std::string(field) + " must be an integer");
    return v.get<std::int64_t>();
}

std::optional<std::int64_t> get_opt_int(const Json& j, const char* field) {
    if (!present(j, field)) return std::nullopt;
    return get_int(j, field);
}

Json parse_json_object(std::string_view body) {
    auto j = Json::parse(body, nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw Error(ErrorCode::BadRequest, "body must be a JSON object");
    return j;
}

Json to_json(const Segment& s) { return {{"start_ms", s.start_ms}, {"end_ms", s.end_ms}, {"text", s.text}}; }

Json to_json(const AnnotationTrack& t) {
    Json segs = Json::array();
    for (const auto& s : t.segments) segs.push_back(to_json(s));
    return {{"kind", to_string(t.kind)}, {"segments", std::move(segs)}};
}

Json to_json(const FrameRate& f) { return {{"num", f.num}, {"den", f.den}}; }

Json to_json(const VideoMeta& m) {
    return {{"lighting", to_string(m.lighting)},
            {"camera_view", to_string(m.camera_view)},
            {"resolution", {{"width", m.resolution.width}, {"height", m.resolution.height}}},
            {"duration_ms", m.duration_ms},
            {"fps", to_json(m.fps)},
            {"container", m.container}};
}

Json to_json(const TrimWindow& t) { return {{"start_ms", t.start_ms}, {"end_ms", t.end_ms}}; }

Json to_json(const Prompt& p) {
    return {{"id", p.id}, {"content", p.content}, {"content_type", to_string(p.content_type)}, {"language", p.language}};
}

Json to_json(const UserProfile& u) {
    Json roles = Json::array();
    for (auto r : all_values<Role>())
        if (u.roles.has(r)) roles.push_back(to_string(r));
    Json j{{"id", u.id},
           {"username", u.username},
           {"selected_language", u.selected_language},
           {"gender", nullptr},
           {"age", nullptr},
           {"locality", nullptr},
           {"roles", std::move(roles)}};
    if (u.gender) j["gender"] = to_string(*u.gender);
    if (u.age) j["age"] = *u.age;
    if (u.locality) j["locality"] = *u.locality;
    return j;
}

Json to_json(const Recording& r) {
    Json j{{"id", r.id},
           {"prompt_id", r.prompt_id},
           {"video_key", r.video_key},
           {"meta", to_json(r.meta)},
           {"trim", to_json(r.trim)},
           {"state", to_string(r.state)},
           {"script", nullptr},
           {"keypoints_key", nullptr},
           {"created_at_ms", r.created_at_ms}};
    if (r.script) j["script"] = *r.script;
    if (r.keypoints_key) j["keypoints_key"] = *r.keypoints_key;
    return j;
}

std::vector<Segment> segments_from_json(const Json& j) {
    if (!j.is_array()) throw Error(ErrorCode::BadRequest, "segments must be an array");
    std::vector<Segment> out;
    out.reserve(j.size());
    for (const auto& s : j) {
        out.push_back({get_int(s, "start_ms"), get_int(s, "end_ms"), get_string(s, "text")});
    }
    return out;
}

AnnotationTrack track_from_json(const Json& j) {
    AnnotationTrack t;
    t.kind = enum_from_json<TrackKind>(require(j, "kind"), "kind");
    t.segments = segments_from_json(require(j, "segments"));
    return t;
}

std::vector<AnnotationTrack> tracks_from_json(const Json& j) {
    if (!j.is_array()) throw Error(ErrorCode::BadRequest, "tracks must be an array");
    std::vector<AnnotationTrack> out;
    for (const auto& t : j) out.push_back(track_from_json(t));
    return out;
}

TrimWindow trim_from_json(const Json& j) { return {get_int(j, "start_ms"), get_int(j, "end_ms")}; }

FrameRate frame_rate_from_json(const Json& j) {
    if (j.is_number_integer()) return {j.get<std::int64_t>(), 1};
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        const auto slash = s.find('/');
        try {
            if (slash == std::string::npos) return {std::stoll(s), 1};
            return {std::stoll(s.substr(0, slash)), std::stoll(s.substr(slash + 1))};
        } catch (const std::exception&) {
            throw Error(ErrorCode::BadMeta, "fps '" + s + "' is not a rational");
        }
    }
    if (j.is_object()) return {get_int(j, "num"), get_int(j, "den")};
    throw Error(ErrorCode::BadMeta, "fps must be an integer, 'num/den' string or {num, den}");
}

VideoMeta video_meta_from_json(const Json& j) {
    for (const char* field : {"lighting", "camera_view", "resolution", "duration_ms", "fps"}) {
        if (!present(j, field)) throw Error(ErrorCode::MissingMeta, std::string("missing ") + field);
    }
    VideoMeta m;
    auto lighting = j.at("lighting").is_string()
                        ? enum_from_string<Lighting>(j.at("lighting").get<std::string>())
                        : std::nullopt;
    if (!lighting) throw Error(ErrorCode::BadMeta, "invalid lighting");
    auto view = j.at("camera_view").is_string()
                    ? enum_from_string<CameraView>(j.at("camera_view").get<std::string>())
                    : std::nullopt;
    if (!view) throw Error(ErrorCode::BadMeta, "invalid camera_view");
    m.lighting = *lighting;
    m.camera_view = *view;
    const auto& res = j.at("resolution");
    if (!res.is_object() || !res.contains("width") || !res.contains("height") ||
        !res.at("width").is_number_integer() || !res.at("height").is_number_integer()) {
        throw Error(ErrorCode::BadMeta, "resolution must be {width, height}");
    }
    m.resolution = {res.at("width").get<int>(), res.at("height").get<int>()};
    if (!j.at("duration_ms").is_number_integer()) throw Error(ErrorCode::BadMeta, "duration_ms must be an integer");
    m.duration_ms = j.at("duration_ms").get<std::int64_t>();
    m.fps = frame_rate_from_json(j.at("fps"));
    if (auto c = get_opt_string(j, "container")) m.container = *c;
    check_video_meta(m);
    return m;
}

}  // namespace signcrowd
