#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "signcrowd/core/types.hpp"
#include "signcrowd/prompts/prompt_csv.hpp"
#include "signcrowd/storage/database.hpp"
#include "signcrowd/storage/repository.hpp"

namespace signcrowd {

struct IngestReport {
    std::size_t accepted = 0;
    std::size_t duplicates_skipped = 0;
    std::vector<RowError> errors;  // ordered by row number

    bool operator==(const IngestReport&) const = default;
};

/// Key under which two prompts count as the same: normalized content, type, language.
std::string prompt_dedupe_key(std::string_view content, ContentType type, std::string_view language);

/// Persists the drafts in one transaction. Drafts naming an unconfigured
/// language become E_UNKNOWN_LANGUAGE row errors. Throws E_STORE (nothing
/// persisted) when the database fails.
IngestReport ingest_prompts(Database& db, std::span<const PromptDraft> drafts,
                            std::span<const LanguagePair> languages, const Clock& clock = system_now_ms);

/// parse_prompt_csv followed by ingest_prompts; parse errors are merged into the report.
IngestReport ingest_prompt_csv(Database& db, std::string_view bytes, std::span<const LanguagePair> languages,
                               std::size_t max_bytes = kDefaultCsvMaxBytes, const Clock& clock = system_now_ms);

/// `accepted: N`, `duplicates_skipped: N`, `errors: N`, then one `row R: CODE detail` line per error.
std::string format_report(const IngestReport& report);

}  // namespace signcrowd
