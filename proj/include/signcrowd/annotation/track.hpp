#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "signcrowd/core/text.hpp"
#include "signcrowd/core/types.hpp"
#include "signcrowd/error.hpp"

namespace signcrowd {

enum class TrackKind { Sentence, Gloss };

template <>
struct EnumNames<TrackKind> {
    static constexpr std::array names{
        std::pair{TrackKind::Sentence, std::string_view{"sentence"}},
        std::pair{TrackKind::Gloss, std::string_view{"gloss"}},
    };
};

/// A timestamped span over the untrimmed video.
struct Segment {
    Millis start_ms = 0;
    Millis end_ms = 0;
    std::string text;

    bool operator==(const Segment&) const = default;
};

struct AnnotationTrack {
    TrackKind kind = TrackKind::Sentence;
    std::vector<Segment> segments;
    std::string recording_id;
    std::string annotator_id;

    bool operator==(const AnnotationTrack&) const = default;
};

struct TrackRules {
    /// Gloss labels need not equal the transcript tokens (true glossing).
    bool free_gloss_labels = false;
    const SentenceSplitters* splitters = nullptr;
    std::string language;
};

/// Ordering, overlap, trim-containment and per-segment shape checks only.
std::vector<Issue> check_track_structure(const std::vector<Segment>& segments, const TrimWindow& trim);

/// Full check against the trim window and the transcript the track annotates
/// (prompt content for Text prompts, the typed script for Topic prompts).
/// Returns every issue found; empty means the track is valid.
std::vector<Issue> validate_track(const AnnotationTrack& track, const TrimWindow& trim,
                                  std::string_view reference_text, const TrackRules& rules = {});

/// Throws the first issue from `validate_track` as an Error carrying all of them.
void ensure_valid_track(const AnnotationTrack& track, const TrimWindow& trim,
                        std::string_view reference_text, const TrackRules& rules = {});

}  // namespace signcrowd
