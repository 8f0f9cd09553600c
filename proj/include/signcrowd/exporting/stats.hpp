#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>

#include "signcrowd/core/json_codec.hpp"
#include "signcrowd/exporting/manifest.hpp"

namespace signcrowd {

struct CorpusStats {
    std::int64_t recording_count = 0;
    std::int64_t scripted_count = 0;     // Text prompts
    std::int64_t spontaneous_count = 0;  // Topic prompts
    double total_duration_hours = 0;
    std::int64_t total_words = 0;
    std::int64_t unique_words = 0;
    std::optional<double> avg_words_per_recording;
    std::optional<double> avg_duration_s;
};

/// Word counts come from transcripts (tokenize_words); unique words are
/// NFC-normalized and case-folded. Durations are trimmed durations.
CorpusStats compute_stats(std::span<const ManifestEntry> entries);

/// `key: value` lines in a fixed order; reals with three decimals, `null` when absent.
std::string format_stats(const CorpusStats& stats);

Json to_json(const CorpusStats& stats);

}  // namespace signcrowd
