#pragma once

#include <json.hpp>

#include "signcrowd/annotation/track.hpp"
#include "signcrowd/core/recording.hpp"
#include "signcrowd/core/types.hpp"

namespace signcrowd {

using Json = nlohmann::json;

Json to_json(const Segment& s);
Json to_json(const AnnotationTrack& t);
Json to_json(const VideoMeta& m);
Json to_json(const TrimWindow& t);
Json to_json(const Prompt& p);
Json to_json(const FrameRate& f);
/// Own-profile view; never used for other users.
Json to_json(const UserProfile& u);
/// Public view: no signer or annotator ids.
Json to_json(const Recording& r);

// Request decoding. Malformed shapes throw E_BAD_REQUEST.
std::vector<Segment> segments_from_json(const Json& j);
AnnotationTrack track_from_json(const Json& j);
std::vector<AnnotationTrack> tracks_from_json(const Json& j);
TrimWindow trim_from_json(const Json& j);
FrameRate frame_rate_from_json(const Json& j);
/// Throws E_MISSING_META when a mandatory form field (lighting, camera_view,
/// resolution, duration_ms, fps) is absent and E_BAD_META when one is invalid.
VideoMeta video_meta_from_json(const Json& j);

template <typename E>
E enum_from_json(const Json& j, const char* field) {
    if (!j.is_string()) {
        throw Error(ErrorCode::BadRequest, std::string(field) + " must be a string");
    }
    auto v = enum_from_string<E>(j.get<std::string>());
    if (!v) throw Error(ErrorCode::BadRequest, std::string("invalid ") + field + " '" + j.get<std::string>() + "'");
    return *v;
}

/// Enum-valued member `field` of object `j`; throws E_BAD_REQUEST when absent.
template <typename E>
E enum_field(const Json& j, const char* field) {
    if (!j.is_object() || !j.contains(field)) throw Error(ErrorCode::BadRequest, std::string("missing field ") + field);
    return enum_from_json<E>(j[field], field);
}

/// Field accessors that turn type errors into E_BAD_REQUEST.
std::string get_string(const Json& j, const char* field);
std::optional<std::string> get_opt_string(const Json& j, const char* field);
std::int64_t get_int(const Json& j, const char* field);
std::optional<std::int64_t> get_opt_int(const Json& j, const char* field);

/// Parses a request body, throwing E_BAD_REQUEST on syntax errors or non-objects.
Json parse_json_object(std::string_view body);

}  // namespace signcrowd
