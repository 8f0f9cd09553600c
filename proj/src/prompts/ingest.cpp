#include "signcrowd/prompts/ingest.hpp"

#include <algorithm>

#include "signcrowd/core/text.hpp"

namespace signcrowd {

std::string prompt_dedupe_key(std::string_view content, ContentType type, std::string_view language) {
    std::string key = normalize_text(content);
    key += '\x1f';
    key += to_string(type);
    key += '\x1f';
    key += language;
    return key;
}

IngestReport ingest_prompts(Database& db, std::span<const PromptDraft> drafts,
                            std::span<const LanguagePair> languages, const Clock& clock) {
    auto configured = [&](const std::string& code) {
        return std::any_of(languages.begin(), languages.end(), [&](const LanguagePair& l) { return l.code == code; });
    };
    IngestReport report;
    try {
        db.write([&](Connection& c) {
            const Millis now = clock();
            for (const auto& d : drafts) {
                if (!configured(d.language)) {
                    report.errors.push_back({d.row_number, ErrorCode::UnknownLanguage,
                                             "language '" + d.language + "' is not configured"});
                    continue;
                }
                const auto key = prompt_dedupe_key(d.content, d.content_type, d.language);
                if (repo::prompt_key_exists(c, key)) {
                    ++report.duplicates_skipped;
                    continue;
                }
                repo::insert_prompt(c, Prompt{new_id(), normalize_text(d.content), d.content_type, d.language}, key,
                                    now);
                ++report.accepted;
            }
        });
    } catch (const Error& e) {
        if (e.code() == ErrorCode::Store) throw;
        throw Error(ErrorCode::Store, e.detail());
    }
    return report;
}

IngestReport ingest_prompt_csv(Database& db, std::string_view bytes, std::span<const LanguagePair> languages,
                               std::size_t max_bytes, const Clock& clock) {
    auto parsed = parse_prompt_csv(bytes, max_bytes);
    auto report = ingest_prompts(db, parsed.drafts, languages, clock);
    report.errors.insert(report.errors.end(), parsed.errors.begin(), parsed.errors.end());
    std::stable_sort(report.errors.begin(), report.errors.end(),
                     [](const RowError& a, const RowError& b) { return a.row_number < b.row_number; });
    return report;
}

std::string format_report(const IngestReport& report) {
    std::string out;
    out += "accepted: " + std::to_string(report.accepted) + "\n";
    out += "duplicates_skipped: " + std::to_string(report.duplicates_skipped) + "\n";
    out += "errors: " + std::to_string(report.errors.size()) + "\n";
    for (const auto& e : report.errors) {
        out += "row " + std::to_string(e.row_number) + ": " + std::string(error_name(e.code)) + " " + e.detail + "\n";
    }
    return out;
}

}  // namespace signcrowd
