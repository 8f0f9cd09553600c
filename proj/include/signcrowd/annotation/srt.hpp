#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "signcrowd/annotation/track.hpp"

namespace signcrowd {

/// `HH:MM:SS,mmm`; hours widen past two digits when needed.
std::string format_srt_timestamp(Millis ms);

/// SubRip rendering with times shifted to the trimmed clip (relative to trim.start_ms).
/// LF line endings, 1-based indices, blank line after every block.
/// Throws E_INVALID_TRACK when the track is empty or structurally invalid.
std::string render_srt(const AnnotationTrack& track, const TrimWindow& trim);

/// Inverse of render_srt. `offset_ms` is added to every timestamp so passing the
/// trim start recovers untrimmed times. Indices are not required to be contiguous.
/// Accepts LF or CRLF and a leading BOM; throws E_SRT_SYNTAX naming the line.
std::vector<Segment> parse_srt(std::string_view text, Millis offset_ms = 0);

}  // namespace signcrowd
