#include "signcrowd/annotation/track.hpp"

#include <algorithm>

namespace signcrowd {

namespace {

bool blank(std::string_view line) {
    return std::all_of(line.begin(), line.end(),
                       [](unsigned char c) { return c == ' ' || c == '\t' || c == '\f' || c == '\v'; });
}

// Segment text must survive a SubRip block: no CR, no blank lines.
bool well_formed_text(std::string_view text) {
    if (text.find('\r') != std::string_view::npos) return false;
    if (normalize_text(text).empty()) return false;
    std::size_t pos = 0;
    while (true) {
        const auto nl = text.find('\n', pos);
        if (blank(text.substr(pos, nl == std::string_view::npos ? nl : nl - pos))) return false;
        if (nl == std::string_view::npos) return true;
        pos = nl + 1;
    }
}

std::string describe(const Segment& s) {
    return "[" + std::to_string(s.start_ms) + ", " + std::to_string(s.end_ms) + "]";
}

template <typename Seq>
std::optional<std::size_t> first_divergence(const Seq& actual, const Seq& expected) {
    const auto n = std::min(actual.size(), expected.size());
    for (std::size_t i = 0; i < n; ++i) {
        if (actual[i] != expected[i]) return i;
    }
    if (actual.size() != expected.size()) return n;
    return std::nullopt;
}

}  // namespace

std::vector<Issue> check_track_structure(const std::vector<Segment>& segments, const TrimWindow& trim) {
    std::vector<Issue> issues;
    for (std::size_t i = 0; i < segments.size(); ++i) {
        const auto& s = segments[i];
        if (s.start_ms >= s.end_ms) {
            issues.push_back({ErrorCode::BadSegment, i, "start >= end in " + describe(s)});
        }
        if (!well_formed_text(s.text)) {
            issues.push_back({ErrorCode::BadSegment, i, "segment text is empty or has blank lines"});
        }
        if (i > 0) {
            const auto& prev = segments[i - 1];
            if (s.start_ms < prev.start_ms) {
                issues.push_back({ErrorCode::Unsorted, i, describe(s) + " starts before " + describe(prev)});
            } else if (s.start_ms < prev.end_ms) {
                issues.push_back({ErrorCode::Overlap, i, describe(s) + " overlaps " + describe(prev)});
            }
        }
        if (s.start_ms < trim.start_ms || s.end_ms > trim.end_ms) {
            issues.push_back({ErrorCode::OutOfTrim, i, describe(s) + " outside trim window"});
        }
    }
    return issues;
}

std::vector<Issue> validate_track(const AnnotationTrack& track, const TrimWindow& trim,
                                  std::string_view reference_text, const TrackRules& rules) {
    auto issues = check_track_structure(track.segments, trim);
    if (track.segments.empty()) {
        issues.push_back({ErrorCode::TextMismatch, 0, "track has no segments"});
        return issues;
    }

    if (track.kind == TrackKind::Sentence) {
        auto expected = rules.splitters ? rules.splitters->split(reference_text, rules.language)
                                        : split_sentences(reference_text);
        for (auto& s : expected) s = normalize_text(s);
        std::vector<std::string> actual;
        actual.reserve(track.segments.size());
        for (const auto& s : track.segments) actual.push_back(normalize_text(s.text));
        if (auto at = first_divergence(actual, expected)) {
            issues.push_back({ErrorCode::TextMismatch, *at,
                              "expected " + std::to_string(expected.size()) + " sentences, got " +
                                  std::to_string(actual.size())});
        }
        return issues;
    }

    std::vector<std::string> glosses;
    bool single_tokens = true;
    for (std::size_t i = 0; i < track.segments.size(); ++i) {
        const auto tokens = tokenize_words(track.segments[i].text);
        if (tokens.size() != 1) {
            issues.push_back({ErrorCode::MultiwordGloss, i,
                              "gloss holds " + std::to_string(tokens.size()) + " tokens"});
            single_tokens = false;
            continue;
        }
        glosses.push_back(nfc(tokens.front()));
    }
    if (single_tokens && !rules.free_gloss_labels) {
        auto expected = tokenize_words(reference_text);
        for (auto& t : expected) t = nfc(t);
        if (auto at = first_divergence(glosses, expected)) {
            issues.push_back({ErrorCode::TextMismatch, *at,
                              "expected " + std::to_string(expected.size()) + " glosses, got " +
                                  std::to_string(glosses.size())});
        }
    }
    return issues;
}

void ensure_valid_track(const AnnotationTrack& track, const TrimWindow& trim,
                        std::string_view reference_text, const TrackRules& rules) {
    auto issues = validate_track(track, trim, reference_text, rules);
    if (issues.empty()) return;
    const auto first = issues.front();
    throw Error(first.code,
                std::string(to_string(track.kind)) + " track, segment " + std::to_string(first.index) +
                    ": " + first.detail,
                std::move(issues));
}

}  // namespace signcrowd
