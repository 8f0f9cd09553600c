#include "signcrowd/exporting/stats.hpp"

#include <cstdio>
#include <unordered_set>

#include "signcrowd/core/text.hpp"

namespace signcrowd {

namespace {

std::string fixed3(std::optional<double> v) {
    if (!v) return "null";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3f", *v);
    return buf;
}

}  // namespace

CorpusStats compute_stats(std::span<const ManifestEntry> entries) {
    CorpusStats s;
    std::unordered_set<std::string> vocabulary;
    Millis total_ms = 0;
    for (const auto& e : entries) {
        ++s.recording_count;
        if (e.content_type == ContentType::Text) {
            ++s.scripted_count;
        } else {
            ++s.spontaneous_count;
        }
        total_ms += e.trim.length();
        for (const auto& token : tokenize_words(transcript_of(e))) {
            ++s.total_words;
            vocabulary.insert(case_fold(token));
        }
    }
    s.unique_words = static_cast<std::int64_t>(vocabulary.size());
    s.total_duration_hours = static_cast<double>(total_ms) / 3'600'000.0;
    if (s.recording_count > 0) {
        const auto n = static_cast<double>(s.recording_count);
        s.avg_words_per_recording = static_cast<double>(s.total_words) / n;
        s.avg_duration_s = static_cast<double>(total_ms) / 1000.0 / n;
    }
    return s;
}

std::string format_stats(const CorpusStats& s) {
    std::string out;
    auto line = [&](const char* key, const std::string& value) {
        out += key;
        out += ": ";
        out += value;
        out += '\n';
    };
    line("recording_count", std::to_string(s.recording_count));
    line("scripted_count", std::to_string(s.scripted_count));
    line("spontaneous_count", std::to_string(s.spontaneous_count));
    line("total_duration_hours", fixed3(s.total_duration_hours));
    line("total_words", std::to_string(s.total_words));
    line("unique_words", std::to_string(s.unique_words));
    line("avg_words_per_recording", fixed3(s.avg_words_per_recording));
    line("avg_duration_s", fixed3(s.avg_duration_s));
    return out;
}

Json to_json(const CorpusStats& s) {
    auto opt = [](std::optional<double> v) { return v ? Json(*v) : Json(nullptr); };
    return {{"recording_count", s.recording_count},
            {"scripted_count", s.scripted_count},
            {"spontaneous_count", s.spontaneous_count},
            {"total_duration_hours", s.total_duration_hours},
            {"total_words", s.total_words},
            {"unique_words", s.unique_words},
            {"avg_words_per_recording", opt(s.avg_words_per_recording)},
            {"avg_duration_s", opt(s.avg_duration_s)}};
}

}  // namespace signcrowd
