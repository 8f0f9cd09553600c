#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "signcrowd/annotation/track.hpp"
#include "signcrowd/core/json_codec.hpp"
#include "signcrowd/core/recording.hpp"
#include "signcrowd/core/text.hpp"
#include "signcrowd/core/types.hpp"
#include "signcrowd/storage/database.hpp"
#include "signcrowd/storage/object_store.hpp"
#include "signcrowd/storage/repository.hpp"

namespace signcrowd {

struct WorkflowOptions {
    int topic_sentence_count = 5;
    /// Video verdicts needed before the stage decides; majority wins, ties reject.
    int quorum = 1;
    bool free_gloss_labels = false;
    const SentenceSplitters* splitters = nullptr;
};

/// Optional annotation made by the signer right after recording.
struct SelfAnnotation {
    std::optional<std::string> script;
    std::vector<AnnotationTrack> tracks;
};

struct RecordingSubmission {
    std::string prompt_id;
    std::string video_key;
    VideoMeta meta;
    TrimWindow trim;
    std::optional<SelfAnnotation> annotation;
};

struct VideoCorrections {
    std::optional<Millis> start_ms;
    std::optional<Millis> end_ms;
    std::optional<CameraView> camera_view;
    std::optional<Lighting> lighting;

    bool operator==(const VideoCorrections&) const = default;
};

struct VideoValidation {
    std::string recording_id;
    VideoVerdict verdict = VideoVerdict::Correct;
    std::optional<VideoCorrections> corrections;
};

struct AnnotationSubmission {
    std::string recording_id;
    std::vector<AnnotationTrack> tracks;
    std::optional<std::string> script;
};

struct AnnotationValidation {
    std::string recording_id;
    AnnotationVerdict verdict = AnnotationVerdict::Accepted;
    std::vector<AnnotationTrack> corrected_tracks;  // non-empty iff Corrected
};

Json to_json(const VideoCorrections& c);
/// Accepts any subset of start_ms, end_ms, camera_view, lighting.
VideoCorrections corrections_from_json(const Json& j);

/// Recording with the given corrections laid over its trim, view and lighting.
Recording apply_corrections(Recording r, const VideoCorrections& c);

/// Executes submissions against the lifecycle. Every call runs in one write
/// transaction; state changes are compare-and-set so exactly one verdict per
/// stage takes effect. Calls carrying an idempotency key that already
/// succeeded for the same actor and operation return the original result.
class WorkflowEngine {
public:
    WorkflowEngine(Database& db, ObjectStore& store, WorkflowOptions options = {}, Clock clock = system_now_ms);

    Recording submit_recording(const UserProfile& signer, const RecordingSubmission& s,
                               const std::optional<std::string>& idem = std::nullopt);

    LifecycleState submit_video_validation(const UserProfile& validator, const VideoValidation& v,
                                           const std::optional<std::string>& idem = std::nullopt);

    LifecycleState submit_annotation(const UserProfile& annotator, const AnnotationSubmission& a,
                                     const std::optional<std::string>& idem = std::nullopt);

    LifecycleState submit_annotation_validation(const UserProfile& validator, const AnnotationValidation& av,
                                                const std::optional<std::string>& idem = std::nullopt);

    /// Admin only: VideoRejected back to PendingVideoValidation with a fresh verdict round.
    LifecycleState requeue(const UserProfile& admin, const std::string& recording_id,
                           const std::optional<std::string>& idem = std::nullopt);

    /// Validates frame alignment against the trimmed duration, stores the
    /// sidecar and links it on the recording.
    Recording attach_keypoints(const std::string& recording_id, std::string_view sidecar);

    /// Throws E_NOT_FOUND.
    Recording recording(const std::string& id);
    std::vector<AnnotationTrack> tracks(const std::string& recording_id);
    /// SubRip rendering of the current track of `kind`. Throws E_NOT_FOUND.
    std::string subtitles(const std::string& recording_id, TrackKind kind);

    /// Transcript a track of this recording must match: prompt text or script.
    static std::string reference_text(const Prompt& p, const Recording& r);

    const WorkflowOptions& options() const { return options_; }

private:
    TrackRules rules_for(const Prompt& p) const;
    void check_script(const Prompt& p, const std::optional<std::string>& script) const;
    void check_tracks(const std::vector<AnnotationTrack>& tracks, const Prompt& p, const TrimWindow& trim,
                      const std::optional<std::string>& script) const;
    void move(Connection& c, const std::string& recording_id, LifecycleState from, LifecycleEvent event,
              const std::string& actor_id, Millis now) const;
    LifecycleState attach_self_annotation(Connection& c, const Recording& r, const Prompt& p, Millis now) const;

    Database& db_;
    ObjectStore& store_;
    WorkflowOptions options_;
    Clock clock_;
};

}  // namespace signcrowd
