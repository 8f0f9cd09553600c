#include "signcrowd/exporting/export.hpp"

#include <ctime>

#include "signcrowd/annotation/srt.hpp"
#include "signcrowd/core/file_io.hpp"
#include "signcrowd/storage/repository.hpp"

namespace fs = std::filesystem;

namespace signcrowd {

namespace {

bool passes(const Recording& r, const ExportFilter& f) {
    if (f.from_ms && r.created_at_ms < *f.from_ms) return false;
    if (f.to_ms && r.created_at_ms >= *f.to_ms) return false;
    return true;
}

std::string subtitle_path(const std::string& recording_id, TrackKind kind) {
    return "subtitles/" + recording_id + "." + std::string(to_string(kind)) + ".srt";
}

struct Snapshot {
    std::vector<ManifestEntry> entries;
    std::map<std::string, std::vector<AnnotationTrack>> tracks;
    std::map<LifecycleState, std::size_t> state_counts;
};

Snapshot read_snapshot(Connection& c, const ExportFilter& filter, const std::string& secret, bool with_tracks) {
    Snapshot snap;
    for (const auto& r : repo::recordings(c, filter.language.value_or(""))) {
        if (!passes(r, filter)) continue;
        ++snap.state_counts[r.state];
        if (r.state != LifecycleState::AnnotationValidated) continue;

        const auto prompt = repo::find_prompt(c, r.prompt_id).value();
        const auto signer = repo::find_user(c, r.signer_id);
        ManifestEntry e;
        e.recording_id = r.id;
        e.signer = pseudonymize(secret, r.signer_id);
        e.language = prompt.language;
        e.prompt_content = prompt.content;
        e.content_type = prompt.content_type;
        e.script = r.script;
        if (signer) {
            e.demographics.gender = signer->gender;
            if (signer->age) e.demographics.age_band = age_band(*signer->age);
            e.demographics.locality = signer->locality;
        }
        e.meta = r.meta;
        e.trim = r.trim;
        e.video_key = r.video_key;
        e.video_path = "videos/" + std::string(ObjectKey::parse(r.video_key).file_name());
        const auto tracks = repo::current_tracks(c, r.id);
        for (const auto& t : tracks) e.subtitles[t.kind] = subtitle_path(r.id, t.kind);
        if (r.keypoints_key) {
            e.keypoints_key = r.keypoints_key;
            e.keypoints_path = "keypoints/" + std::string(ObjectKey::parse(*r.keypoints_key).file_name());
        }
        if (with_tracks) snap.tracks[r.id] = tracks;
        snap.entries.push_back(std::move(e));
    }
    return snap;
}

}  // namespace

std::string utc_date_today() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[16];
    std::strftime(buf, sizeof buf, "%Y-%m-%d", &tm);
    return buf;
}

std::vector<ManifestEntry> collect_manifest(Connection& c, const ExportFilter& filter,
                                            const std::string& pseudonym_secret) {
    return read_snapshot(c, filter, pseudonym_secret, false).entries;
}

ExportReport export_snapshot(Database& db, ObjectStore& store, const ExportFilter& filter, const fs::path& out_dir,
                             const ExportOptions& options) {
    if (options.pseudonym_secret.empty()) throw Error(ErrorCode::Config, "pseudonym_secret is required for export");
    const auto date = options.date.empty() ? utc_date_today() : options.date;
    const auto snap =
        db.read([&](Connection& c) { return read_snapshot(c, filter, options.pseudonym_secret, true); });

    ExportReport report;
    report.snapshot_dir = out_dir / "snapshot" / date;
    report.state_counts = snap.state_counts;
    if (auto it = snap.state_counts.find(LifecycleState::VideoRejected); it != snap.state_counts.end()) {
        report.rejected_excluded = it->second;
    }
    report.exported = snap.entries.size();
    report.empty = snap.entries.empty();

    const auto staging = out_dir / "snapshot" / ("." + date + ".partial");
    try {
        std::error_code ec;
        fs::remove_all(staging, ec);
        for (const char* sub : {"subtitles", "keypoints", "videos"}) fs::create_directories(staging / sub);
        for (const auto& e : snap.entries) {
            store.copy_to_file(ObjectKey::parse(e.video_key), staging / e.video_path);
            if (e.keypoints_key) store.copy_to_file(ObjectKey::parse(*e.keypoints_key), staging / *e.keypoints_path);
            for (const auto& t : snap.tracks.at(e.recording_id)) {
                write_file_bytes(staging / e.subtitles.at(t.kind), render_srt(t, e.trim));
            }
        }
        write_file_bytes(staging / "manifest.jsonl", write_manifest(snap.entries));
        fs::remove_all(report.snapshot_dir);
        fs::rename(staging, report.snapshot_dir);
    } catch (const fs::filesystem_error& ex) {
        throw Error(ErrorCode::Io, ex.what());
    }
    return report;
}

CorpusStats corpus_stats(Database& db, const ExportFilter& filter) {
    // Pseudonyms do not influence any statistic.
    const auto entries = db.read([&](Connection& c) { return collect_manifest(c, filter, "stats"); });
    return compute_stats(entries);
}

std::vector<std::string> verify_snapshot(const fs::path& snapshot_dir, const TrackRules& rules) {
    std::vector<std::string> problems;
    std::vector<ManifestEntry> entries;
    try {
        entries = read_manifest(read_file_bytes(snapshot_dir / "manifest.jsonl"));
    } catch (const Error& e) {
        problems.push_back("manifest.jsonl: " + e.detail());
        return problems;
    }
    for (const auto& e : entries) {
        if (!fs::exists(snapshot_dir / e.video_path)) problems.push_back(e.recording_id + ": missing " + e.video_path);
        if (e.keypoints_path && !fs::exists(snapshot_dir / *e.keypoints_path)) {
            problems.push_back(e.recording_id + ": missing " + *e.keypoints_path);
        }
        if (e.subtitles.empty()) problems.push_back(e.recording_id + ": no subtitle tracks");
        for (const auto& [kind, path] : e.subtitles) {
            try {
                AnnotationTrack t{kind, parse_srt(read_file_bytes(snapshot_dir / path), e.trim.start_ms),
                                  e.recording_id, {}};
                auto r = rules;
                if (r.language.empty()) r.language = e.language;
                const auto issues = validate_track(t, e.trim, transcript_of(e), r);
                if (!issues.empty()) {
                    problems.push_back(e.recording_id + ": " + path + ": " + std::string(error_name(issues[0].code)) +
                                       " " + issues[0].detail);
                }
            } catch (const Error& ex) {
                problems.push_back(e.recording_id + ": " + path + ": " + ex.detail());
            }
        }
    }
    return problems;
}

std::string format_export_report(const ExportReport& report) {
    std::string out;
    out += "snapshot: " + report.snapshot_dir.string() + "\n";
    out += "exported: " + std::to_string(report.exported) + "\n";
    for (const auto state : all_values<LifecycleState>()) {
        const auto it = report.state_counts.find(state);
        out += "state." + std::string(to_string(state)) + ": " +
               std::to_string(it == report.state_counts.end() ? 0 : it->second) + "\n";
    }
    out += "rejected_excluded: " + std::to_string(report.rejected_excluded) + "\n";
    if (report.empty) out += "warning: E_EMPTY no recordings matched\n";
    return out;
}

}  // namespace signcrowd
