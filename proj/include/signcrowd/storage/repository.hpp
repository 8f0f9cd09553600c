#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "signcrowd/annotation/track.hpp"
#include "signcrowd/core/recording.hpp"
#include "signcrowd/core/types.hpp"
#include "signcrowd/storage/database.hpp"

namespace signcrowd {

using Clock = std::function<Millis()>;

/// Wall-clock UTC milliseconds.
Millis system_now_ms();

/// Fresh 128-bit random identifier (32 hex chars).
std::string new_id();

void apply_schema(Database& db);

enum class VideoVerdict { Correct, Incorrect };

template <>
struct EnumNames<VideoVerdict> {
    static constexpr std::array names{
        std::pair{VideoVerdict::Correct, std::string_view{"correct"}},
        std::pair{VideoVerdict::Incorrect, std::string_view{"incorrect"}},
    };
};

enum class AnnotationVerdict { Accepted, Corrected };

template <>
struct EnumNames<AnnotationVerdict> {
    static constexpr std::array names{
        std::pair{AnnotationVerdict::Accepted, std::string_view{"accepted"}},
        std::pair{AnnotationVerdict::Corrected, std::string_view{"corrected"}},
    };
};

struct StoredVideoVerdict {
    std::string validator_id;
    VideoVerdict verdict;
    std::string corrections_json;  // "null" when none
    int round = 0;
};

struct AuditEvent {
    LifecycleEvent event;
    std::optional<LifecycleState> from;
    LifecycleState to;
    std::string actor_id;
    Millis at_ms = 0;
};

struct Session {
    std::string token_hash;
    std::string user_id;
    Millis expires_at_ms = 0;
};

/// Row-level persistence. Every function runs inside the caller's transaction.
namespace repo {

// users and sessions
void insert_user(Connection& c, const UserProfile& user, const std::string& password_hash, Millis now);
std::optional<UserProfile> find_user(Connection& c, const std::string& id);
/// Returns the profile and its stored password hash.
std::optional<std::pair<UserProfile, std::string>> find_login(Connection& c, const std::string& username);
void update_user(Connection& c, const UserProfile& user);
void insert_session(Connection& c, const Session& s);
std::optional<Session> find_session(Connection& c, const std::string& token_hash);

// prompts
std::optional<Prompt> find_prompt(Connection& c, const std::string& id);
bool prompt_key_exists(Connection& c, const std::string& dedupe_key);
void insert_prompt(Connection& c, const Prompt& p, const std::string& dedupe_key, Millis now);
std::vector<Prompt> prompts_in_language(Connection& c, const std::string& language);
std::int64_t count_prompts(Connection& c);

// recordings
void insert_recording(Connection& c, const Recording& r, const std::optional<std::string>& pending_annotation);
std::optional<Recording> find_recording(Connection& c, const std::string& id);
/// Compare-and-set on the lifecycle state. False when the stored state differs.
bool cas_state(Connection& c, const std::string& id, LifecycleState expected, LifecycleState next);
void update_recording(Connection& c, const Recording& r);
std::optional<std::string> pending_annotation(Connection& c, const std::string& id);
void clear_pending_annotation(Connection& c, const std::string& id);
/// Recordings whose prompt is in `language` (all languages when empty), ordered by id.
std::vector<Recording> recordings(Connection& c, const std::string& language = {});
std::int64_t count_recordings(Connection& c);

// tracks
void insert_track(Connection& c, const AnnotationTrack& t, Millis now);
/// Tracks currently in force (not superseded by a correction), sentence first.
std::vector<AnnotationTrack> current_tracks(Connection& c, const std::string& recording_id);
std::vector<AnnotationTrack> superseded_tracks(Connection& c, const std::string& recording_id);
void supersede_tracks(Connection& c, const std::string& recording_id);
std::int64_t count_tracks(Connection& c);

// verdicts
void insert_video_verdict(Connection& c, const std::string& recording_id, const StoredVideoVerdict& v, Millis now);
std::vector<StoredVideoVerdict> video_verdicts(Connection& c, const std::string& recording_id, int round);
/// Recording ids the user already voted on in their current round.
std::vector<std::string> voted_recordings(Connection& c, const std::string& user_id);
void insert_annotation_verdict(Connection& c, const std::string& recording_id, const std::string& validator_id,
                               AnnotationVerdict verdict, Millis now);
std::int64_t count_verdicts(Connection& c);

// audit
void append_event(Connection& c, const std::string& recording_id, const AuditEvent& e);
std::vector<AuditEvent> events(Connection& c, const std::string& recording_id);

// idempotency
std::optional<std::string> find_idempotent(Connection& c, const std::string& scope, const std::string& key);
void save_idempotent(Connection& c, const std::string& scope, const std::string& key, const std::string& result,
                     Millis now);

struct ReplayedResponse {
    int status = 200;
    std::string content_type;
    std::string body;
};
std::optional<ReplayedResponse> find_replay(Connection& c, const std::string& scope, const std::string& key);
void save_replay(Connection& c, const std::string& scope, const std::string& key, const ReplayedResponse& r,
                 Millis now);

}  // namespace repo

}  // namespace signcrowd
