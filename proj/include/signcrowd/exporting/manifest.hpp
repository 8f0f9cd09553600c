#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "signcrowd/annotation/track.hpp"
#include "signcrowd/core/types.hpp"

namespace signcrowd {

inline constexpr std::string_view kDatasetLicense = "CC-BY-SA-4.0";

struct Demographics {
    std::optional<Gender> gender;
    std::optional<std::string> age_band;  // "25-29"
    std::optional<std::string> locality;

    bool operator==(const Demographics&) const = default;
};

/// One validated recording in an exported snapshot. Paths are relative to the
/// snapshot directory.
struct ManifestEntry {
    std::string recording_id;
    std::string signer;  // keyed pseudonym, never the raw user id
    std::string language;
    std::string prompt_content;
    ContentType content_type = ContentType::Text;
    std::optional<std::string> script;
    Demographics demographics;
    VideoMeta meta;
    TrimWindow trim;
    std::string video_key;
    std::string video_path;
    std::map<TrackKind, std::string> subtitles;
    std::optional<std::string> keypoints_key;
    std::optional<std::string> keypoints_path;
    std::string license{kDatasetLicense};

    bool operator==(const ManifestEntry&) const = default;
};

/// Five-year band containing `age`, e.g. 27 -> "25-29".
std::string age_band(int age);

/// Stable keyed pseudonym for a user id.
std::string pseudonymize(std::string_view secret, std::string_view user_id);

/// Prompt text for Text prompts, the typed script for Topic prompts.
const std::string& transcript_of(const ManifestEntry& entry);

/// One compact JSON object per line, LF terminated, keys in sorted order.
std::string write_manifest(std::span<const ManifestEntry> entries);

/// Throws E_BAD_REQUEST naming the line on malformed input.
std::vector<ManifestEntry> read_manifest(std::string_view jsonl);

}  // namespace signcrowd
