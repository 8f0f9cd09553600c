#include "signcrowd/exporting/manifest.hpp"

#include "signcrowd/core/json_codec.hpp"
#include "signcrowd/storage/digest.hpp"

namespace signcrowd {

namespace {

Json optional_json(const std::optional<std::string>& v) { return v ? Json(*v) : Json(nullptr); }

Json entry_to_json(const ManifestEntry& e) {
    Json subtitles = Json::object();
    for (const auto& [kind, path] : e.subtitles) subtitles[std::string(to_string(kind))] = path;
    return {
        {"recording_id", e.recording_id},
        {"signer", e.signer},
        {"language", e.language},
        {"prompt", {{"content", e.prompt_content}, {"content_type", to_string(e.content_type)}}},
        {"script", optional_json(e.script)},
        {"demographics",
         {{"gender", e.demographics.gender ? Json(to_string(*e.demographics.gender)) : Json(nullptr)},
          {"age_band", optional_json(e.demographics.age_band)},
          {"locality", optional_json(e.demographics.locality)}}},
        {"meta", to_json(e.meta)},
        {"trim", to_json(e.trim)},
        {"video", {{"key", e.video_key}, {"path", e.video_path}}},
        {"subtitles", std::move(subtitles)},
        {"keypoints", {{"key", optional_json(e.keypoints_key)}, {"path", optional_json(e.keypoints_path)}}},
        {"license", e.license},
    };
}

ManifestEntry entry_from_json(const Json& j) {
    ManifestEntry e;
    e.recording_id = get_string(j, "recording_id");
    e.signer = get_string(j, "signer");
    e.language = get_string(j, "language");
    const auto& prompt = j.at("prompt");
    e.prompt_content = get_string(prompt, "content");
    e.content_type = enum_from_json<ContentType>(prompt.at("content_type"), "content_type");
    e.script = get_opt_string(j, "script");
    const auto& demo = j.at("demographics");
    if (auto g = get_opt_string(demo, "gender")) e.demographics.gender = enum_from_json<Gender>(Json(*g), "gender");
    e.demographics.age_band = get_opt_string(demo, "age_band");
    e.demographics.locality = get_opt_string(demo, "locality");
    e.meta = video_meta_from_json(j.at("meta"));
    e.trim = trim_from_json(j.at("trim"));
    e.video_key = get_string(j.at("video"), "key");
    e.video_path = get_string(j.at("video"), "path");
    for (const auto& [kind, path] : j.at("subtitles").items()) {
        e.subtitles[enum_from_json<TrackKind>(Json(kind), "subtitle kind")] = path.get<std::string>();
    }
    e.keypoints_key = get_opt_string(j.at("keypoints"), "key");
    e.keypoints_path = get_opt_string(j.at("keypoints"), "path");
    e.license = get_string(j, "license");
    return e;
}

}  // namespace

std::string age_band(int age) {
    const int lo = age / 5 * 5;
    return std::to_string(lo) + "-" + std::to_string(lo + 4);
}

std::string pseudonymize(std::string_view secret, std::string_view user_id) {
    return "s-" + to_hex(hmac_sha256(secret, user_id)).substr(0, 32);
}

const std::string& transcript_of(const ManifestEntry& entry) {
    if (entry.content_type == ContentType::Topic && entry.script) return *entry.script;
    return entry.prompt_content;
}

std::string write_manifest(std::span<const ManifestEntry> entries) {
    std::string out;
    for (const auto& e : entries) {
        out += entry_to_json(e).dump(-1, ' ', false, Json::error_handler_t::strict);
        out += '\n';
    }
    return out;
}

std::vector<ManifestEntry> read_manifest(std::string_view jsonl) {
    std::vector<ManifestEntry> entries;
    std::size_t pos = 0;
    std::size_t line_no = 0;
    while (pos < jsonl.size()) {
        auto nl = jsonl.find('\n', pos);
        if (nl == std::string_view::npos) nl = jsonl.size();
        const auto line = jsonl.substr(pos, nl - pos);
        pos = nl + 1;
        ++line_no;
        if (line.empty()) continue;
        const auto j = Json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object()) {
            throw Error(ErrorCode::BadRequest, "manifest line " + std::to_string(line_no) + " is not a JSON object");
        }
        try {
            entries.push_back(entry_from_json(j));
        } catch (const Json::exception& ex) {
            throw Error(ErrorCode::BadRequest, "manifest line " + std::to_string(line_no) + ": " + ex.what());
        } catch (const Error& ex) {
            throw Error(ErrorCode::BadRequest, "manifest line " + std::to_string(line_no) + ": " + ex.what());
        }
    }
    return entries;
}

}  // namespace signcrowd
