#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "signcrowd/annotation/track.hpp"
#include "signcrowd/exporting/manifest.hpp"
#include "signcrowd/exporting/stats.hpp"
#include "signcrowd/storage/database.hpp"
#include "signcrowd/storage/object_store.hpp"

namespace signcrowd {

struct ExportFilter {
    std::optional<std::string> language;
    /// Half-open creation-time window [from_ms, to_ms).
    std::optional<Millis> from_ms;
    std::optional<Millis> to_ms;
};

struct ExportOptions {
    std::string pseudonym_secret;
    /// Snapshot directory name, YYYY-MM-DD; today (UTC) when empty.
    std::string date;
};

struct ExportReport {
    std::filesystem::path snapshot_dir;
    std::size_t exported = 0;
    /// Recordings passing the filter, per lifecycle state.
    std::map<LifecycleState, std::size_t> state_counts;
    std::size_t rejected_excluded = 0;
    /// Nothing matched (E_EMPTY); the snapshot still holds an empty manifest.
    bool empty = false;
};

/// Manifest entries for the AnnotationValidated recordings passing `filter`,
/// ordered by recording id. Snapshot-relative paths are filled in.
std::vector<ManifestEntry> collect_manifest(Connection& c, const ExportFilter& filter,
                                            const std::string& pseudonym_secret);

/// Writes `<out_dir>/snapshot/<date>/{manifest.jsonl, subtitles/, keypoints/, videos/}`
/// from one consistent read. Throws E_IO on filesystem failures and E_CONFIG
/// without a pseudonym secret.
ExportReport export_snapshot(Database& db, ObjectStore& store, const ExportFilter& filter,
                             const std::filesystem::path& out_dir, const ExportOptions& options);

/// Statistics over exactly the entries an export with this filter would contain.
CorpusStats corpus_stats(Database& db, const ExportFilter& filter = {});

/// Problems found in a written snapshot: missing files, subtitle files that do
/// not parse or do not form a valid track for their entry. Empty means sound.
std::vector<std::string> verify_snapshot(const std::filesystem::path& snapshot_dir, const TrackRules& rules = {});

/// Today's UTC date as YYYY-MM-DD.
std::string utc_date_today();

/// `key: value` summary lines for a report.
std::string format_export_report(const ExportReport& report);

}  // namespace signcrowd
