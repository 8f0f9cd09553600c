#include "signcrowd/storage/repository.hpp"

#include <chrono>

#include "signcrowd/core/json_codec.hpp"
#include "signcrowd/storage/digest.hpp"

namespace signcrowd {

namespace {

constexpr std::string_view kSchema = R"sql(
CREATE TABLE IF NOT EXISTS users (
  id TEXT PRIMARY KEY,
  username TEXT NOT NULL UNIQUE,
  password_hash TEXT NOT NULL,
  selected_language TEXT NOT NULL,
  gender TEXT,
  age INTEGER,
  locality TEXT,
  roles INTEGER NOT NULL,
  created_at INTEGER NOT NULL
);
CREATE TABLE IF NOT EXISTS sessions (
  token_hash TEXT PRIMARY KEY,
  user_id TEXT NOT NULL REFERENCES users(id),
  expires_at INTEGER NOT NULL
);
CREATE TABLE IF NOT EXISTS prompts (
  id TEXT PRIMARY KEY,
  content TEXT NOT NULL,
  content_type TEXT NOT NULL,
  language TEXT NOT NULL,
  dedupe_key TEXT NOT NULL UNIQUE,
  created_at INTEGER NOT NULL
);
CREATE INDEX IF NOT EXISTS prompts_language ON prompts(language);
CREATE TABLE IF NOT EXISTS recordings (
  id TEXT PRIMARY KEY,
  prompt_id TEXT NOT NULL REFERENCES prompts(id),
  signer_id TEXT NOT NULL REFERENCES users(id),
  video_key TEXT NOT NULL,
  lighting TEXT NOT NULL,
  camera_view TEXT NOT NULL,
  width INTEGER NOT NULL,
  height INTEGER NOT NULL,
  duration_ms INTEGER NOT NULL,
  fps_num INTEGER NOT NULL,
  fps_den INTEGER NOT NULL,
  container TEXT NOT NULL,
  trim_start INTEGER NOT NULL,
  trim_end INTEGER NOT NULL,
  state TEXT NOT NULL,
  script TEXT,
  annotator_id TEXT,
  keypoints_key TEXT,
  video_round INTEGER NOT NULL DEFAULT 0,
  pending_annotation TEXT,
  created_at INTEGER NOT NULL
);
CREATE INDEX IF NOT EXISTS recordings_state ON recordings(state);
CREATE TABLE IF NOT EXISTS tracks (
  id INTEGER PRIMARY KEY AUTOINCREMENT,
  recording_id TEXT NOT NULL REFERENCES recordings(id),
  kind TEXT NOT NULL,
  annotator_id TEXT NOT NULL,
  segments TEXT NOT NULL,
  superseded INTEGER NOT NULL DEFAULT 0,
  created_at INTEGER NOT NULL
);
CREATE INDEX IF NOT EXISTS tracks_recording ON tracks(recording_id);
CREATE TABLE IF NOT EXISTS video_verdicts (
  id INTEGER PRIMARY KEY AUTOINCREMENT,
  recording_id TEXT NOT NULL REFERENCES recordings(id),
  round INTEGER NOT NULL,
  validator_id TEXT NOT NULL,
  verdict TEXT NOT NULL,
  corrections TEXT NOT NULL,
  submitted_at INTEGER NOT NULL,
  UNIQUE(recording_id, round, validator_id)
);
CREATE TABLE IF NOT EXISTS annotation_verdicts (
  id INTEGER PRIMARY KEY AUTOINCREMENT,
  recording_id TEXT NOT NULL REFERENCES recordings(id),
  validator_id TEXT NOT NULL,
  verdict TEXT NOT NULL,
  submitted_at INTEGER NOT NULL
);
CREATE TABLE IF NOT EXISTS events (
  id INTEGER PRIMARY KEY AUTOINCREMENT,
  recording_id TEXT NOT NULL,
  event TEXT NOT NULL,
  from_state TEXT,
  to_state TEXT NOT NULL,
  actor_id TEXT NOT NULL,
  at INTEGER NOT NULL
);
CREATE INDEX IF NOT EXISTS events_recording ON events(recording_id);
CREATE TABLE IF NOT EXISTS idempotency (
  scope TEXT NOT NULL,
  key TEXT NOT NULL,
  result TEXT NOT NULL,
  created_at INTEGER NOT NULL,
  PRIMARY KEY(scope, key)
);
CREATE TABLE IF NOT EXISTS http_replay (
  scope TEXT NOT NULL,
  key TEXT NOT NULL,
  status INTEGER NOT NULL,
  content_type TEXT NOT NULL,
  body TEXT NOT NULL,
  created_at INTEGER NOT NULL,
  PRIMARY KEY(scope, key)
);
)sql";

constexpr std::string_view kRecordingColumns =
    "r.id, r.prompt_id, r.signer_id, r.video_key, r.lighting, r.camera_view, r.width, r.height, "
    "r.duration_ms, r.fps_num, r.fps_den, r.container, r.trim_start, r.trim_end, r.state, r.script, "
    "r.annotator_id, r.keypoints_key, r.video_round, r.created_at";

template <typename E>
E stored_enum(const std::string& text) {
    auto v = enum_from_string<E>(text);
    if (!v) throw Error(ErrorCode::Store, "corrupt enum value '" + text + "'");
    return *v;
}

Recording recording_from_row(const Statement& st) {
    Recording r;
    r.id = st.column_text(0);
    r.prompt_id = st.column_text(1);
    r.signer_id = st.column_text(2);
    r.video_key = st.column_text(3);
    r.meta.lighting = stored_enum<Lighting>(st.column_text(4));
    r.meta.camera_view = stored_enum<CameraView>(st.column_text(5));
    r.meta.resolution = {static_cast<int>(st.column_int(6)), static_cast<int>(st.column_int(7))};
    r.meta.duration_ms = st.column_int(8);
    r.meta.fps = {st.column_int(9), st.column_int(10)};
    r.meta.container = st.column_text(11);
    r.trim = {st.column_int(12), st.column_int(13)};
    r.state = stored_enum<LifecycleState>(st.column_text(14));
    r.script = st.column_opt_text(15);
    r.annotator_id = st.column_opt_text(16);
    r.keypoints_key = st.column_opt_text(17);
    r.video_round = static_cast<int>(st.column_int(18));
    r.created_at_ms = st.column_int(19);
    return r;
}

UserProfile user_from_row(const Statement& st) {
    UserProfile u;
    u.id = st.column_text(0);
    u.username = st.column_text(1);
    u.selected_language = st.column_text(2);
    if (auto g = st.column_opt_text(3)) u.gender = stored_enum<Gender>(*g);
    if (auto a = st.column_opt_int(4)) u.age = static_cast<int>(*a);
    u.locality = st.column_opt_text(5);
    u.roles = RoleSet(static_cast<unsigned>(st.column_int(6)));
    return u;
}

constexpr std::string_view kUserColumns = "id, username, selected_language, gender, age, locality, roles";

std::optional<std::string> opt_name(const std::optional<Gender>& g) {
    if (!g) return std::nullopt;
    return std::string(to_string(*g));
}

std::optional<std::int64_t> opt_age(const std::optional<int>& a) {
    if (!a) return std::nullopt;
    return *a;
}

std::vector<AnnotationTrack> load_tracks(Connection& c, const std::string& recording_id, int superseded) {
    auto st = c.query(
        "SELECT kind, annotator_id, segments FROM tracks WHERE recording_id = ? AND superseded = ? "
        "ORDER BY kind DESC, id",
        recording_id, superseded);
    std::vector<AnnotationTrack> out;
    while (st.step()) {
        AnnotationTrack t;
        t.kind = stored_enum<TrackKind>(st.column_text(0));
        t.annotator_id = st.column_text(1);
        t.recording_id = recording_id;
        t.segments = segments_from_json(Json::parse(st.column_text(2)));
        out.push_back(std::move(t));
    }
    return out;
}

}  // namespace

Millis system_now_ms() {
    return std::chrono::duration_cast<std::chrono::milliseconds>(
               std::chrono::system_clock::now().time_since_epoch())
        .count();
}

std::string new_id() { return random_hex(16); }

void apply_schema(Database& db) {
    db.write([](Connection& c) { c.exec(kSchema); });
}

namespace repo {

void insert_user(Connection& c, const UserProfile& u, const std::string& password_hash, Millis now) {
    if (c.scalar_int("SELECT COUNT(*) FROM users WHERE username = ?", u.username) > 0) {
        throw Error(ErrorCode::Conflict, "username '" + u.username + "' is taken");
    }
    c.run("INSERT INTO users (id, username, password_hash, selected_language, gender, age, locality, roles, "
          "created_at) VALUES (?, ?, ?, ?, ?, ?, ?, ?, ?)",
          u.id, u.username, password_hash, u.selected_language, opt_name(u.gender), opt_age(u.age), u.locality,
          static_cast<std::int64_t>(u.roles.bits()), now);
}

std::optional<UserProfile> find_user(Connection& c, const std::string& id) {
    auto st = c.query("SELECT " + std::string(kUserColumns) + " FROM users WHERE id = ?", id);
    if (!st.step()) return std::nullopt;
    return user_from_row(st);
}

std::optional<std::pair<UserProfile, std::string>> find_login(Connection& c, const std::string& username) {
    auto st = c.query("SELECT " + std::string(kUserColumns) + ", password_hash FROM users WHERE username = ?",
                      username);
    if (!st.step()) return std::nullopt;
    return std::pair{user_from_row(st), st.column_text(7)};
}

void update_user(Connection& c, const UserProfile& u) {
    c.run("UPDATE users SET selected_language = ?, gender = ?, age = ?, locality = ?, roles = ? WHERE id = ?",
          u.selected_language, opt_name(u.gender), opt_age(u.age), u.locality,
          static_cast<std::int64_t>(u.roles.bits()), u.id);
}

void insert_session(Connection& c, const Session& s) {
    c.run("INSERT INTO sessions (token_hash, user_id, expires_at) VALUES (?, ?, ?)", s.token_hash, s.user_id,
          s.expires_at_ms);
}

std::optional<Session> find_session(Connection& c, const std::string& token_hash) {
    auto st = c.query("SELECT token_hash, user_id, expires_at FROM sessions WHERE token_hash = ?", token_hash);
    if (!st.step()) return std::nullopt;
    return Session{st.column_text(0), st.column_text(1), st.column_int(2)};
}

std::optional<Prompt> find_prompt(Connection& c, const std::string& id) {
    auto st = c.query("SELECT id, content, content_type, language FROM prompts WHERE id = ?", id);
    if (!st.step()) return std::nullopt;
    return Prompt{st.column_text(0), st.column_text(1), stored_enum<ContentType>(st.column_text(2)),
                  st.column_text(3)};
}

bool prompt_key_exists(Connection& c, const std::string& dedupe_key) {
    return c.scalar_int("SELECT COUNT(*) FROM prompts WHERE dedupe_key = ?", dedupe_key) > 0;
}

void insert_prompt(Connection& c, const Prompt& p, const std::string& dedupe_key, Millis now) {
    c.run("INSERT INTO prompts (id, content, content_type, language, dedupe_key, created_at) VALUES (?, ?, ?, ?, ?, ?)",
          p.id, p.content, to_string(p.content_type), p.language, dedupe_key, now);
}

std::vector<Prompt> prompts_in_language(Connection& c, const std::string& language) {
    auto st = c.query("SELECT id, content, content_type, language FROM prompts WHERE language = ? ORDER BY id",
                      language);
    std::vector<Prompt> out;
    while (st.step()) {
        out.push_back({st.column_text(0), st.column_text(1), stored_enum<ContentType>(st.column_text(2)),
                       st.column_text(3)});
    }
    return out;
}

std::int64_t count_prompts(Connection& c) { return c.scalar_int("SELECT COUNT(*) FROM prompts"); }

void insert_recording(Connection& c, const Recording& r, const std::optional<std::string>& pending) {
    c.run("INSERT INTO recordings (id, prompt_id, signer_id, video_key, lighting, camera_view, width, height, "
          "duration_ms, fps_num, fps_den, container, trim_start, trim_end, state, script, annotator_id, "
          "keypoints_key, video_round, pending_annotation, created_at) "
          "VALUES (?, ?, ?, ?, ?, ?, ?, ?, ?, ?, ?, ?, ?, ?, ?, ?, ?, ?, ?, ?, ?)",
          r.id, r.prompt_id, r.signer_id, r.video_key, to_string(r.meta.lighting), to_string(r.meta.camera_view),
          r.meta.resolution.width, r.meta.resolution.height, r.meta.duration_ms, r.meta.fps.num, r.meta.fps.den,
          r.meta.container, r.trim.start_ms, r.trim.end_ms, to_string(r.state), r.script, r.annotator_id,
          r.keypoints_key, r.video_round, pending, r.created_at_ms);
}

std::optional<Recording> find_recording(Connection& c, const std::string& id) {
    auto st = c.query("SELECT " + std::string(kRecordingColumns) + " FROM recordings r WHERE r.id = ?", id);
    if (!st.step()) return std::nullopt;
    return recording_from_row(st);
}

bool cas_state(Connection& c, const std::string& id, LifecycleState expected, LifecycleState next) {
    return c.run("UPDATE recordings SET state = ? WHERE id = ? AND state = ?", to_string(next), id,
                 to_string(expected)) == 1;
}

void update_recording(Connection& c, const Recording& r) {
    c.run("UPDATE recordings SET lighting = ?, camera_view = ?, trim_start = ?, trim_end = ?, script = ?, "
          "annotator_id = ?, keypoints_key = ?, video_round = ? WHERE id = ?",
          to_string(r.meta.lighting), to_string(r.meta.camera_view), r.trim.start_ms, r.trim.end_ms, r.script,
          r.annotator_id, r.keypoints_key, r.video_round, r.id);
}

std::optional<std::string> pending_annotation(Connection& c, const std::string& id) {
    auto st = c.query("SELECT pending_annotation FROM recordings WHERE id = ?", id);
    if (!st.step()) return std::nullopt;
    return st.column_opt_text(0);
}

void clear_pending_annotation(Connection& c, const std::string& id) {
    c.run("UPDATE recordings SET pending_annotation = NULL WHERE id = ?", id);
}

std::vector<Recording> recordings(Connection& c, const std::string& language) {
    const std::string sql = "SELECT " + std::string(kRecordingColumns) +
                            " FROM recordings r JOIN prompts p ON p.id = r.prompt_id" +
                            (language.empty() ? std::string(" WHERE ? = ''") : " WHERE p.language = ?") +
                            " ORDER BY r.id";
    auto st = c.query(sql, language);
    std::vector<Recording> out;
    while (st.step()) out.push_back(recording_from_row(st));
    return out;
}

std::int64_t count_recordings(Connection& c) { return c.scalar_int("SELECT COUNT(*) FROM recordings"); }

void insert_track(Connection& c, const AnnotationTrack& t, Millis now) {
    c.run("INSERT INTO tracks (recording_id, kind, annotator_id, segments, created_at) VALUES (?, ?, ?, ?, ?)",
          t.recording_id, to_string(t.kind), t.annotator_id, to_json(t)["segments"].dump(), now);
}

std::vector<AnnotationTrack> current_tracks(Connection& c, const std::string& recording_id) {
    return load_tracks(c, recording_id, 0);
}

std::vector<AnnotationTrack> superseded_tracks(Connection& c, const std::string& recording_id) {
    return load_tracks(c, recording_id, 1);
}

void supersede_tracks(Connection& c, const std::string& recording_id) {
    c.run("UPDATE tracks SET superseded = 1 WHERE recording_id = ? AND superseded = 0", recording_id);
}

std::int64_t count_tracks(Connection& c) { return c.scalar_int("SELECT COUNT(*) FROM tracks"); }

void insert_video_verdict(Connection& c, const std::string& recording_id, const StoredVideoVerdict& v, Millis now) {
    c.run("INSERT INTO video_verdicts (recording_id, round, validator_id, verdict, corrections, submitted_at) "
          "VALUES (?, ?, ?, ?, ?, ?)",
          recording_id, v.round, v.validator_id, to_string(v.verdict), v.corrections_json, now);
}

std::vector<StoredVideoVerdict> video_verdicts(Connection& c, const std::string& recording_id, int round) {
    auto st = c.query(
        "SELECT validator_id, verdict, corrections, round FROM video_verdicts WHERE recording_id = ? AND round = ? "
        "ORDER BY id",
        recording_id, round);
    std::vector<StoredVideoVerdict> out;
    while (st.step()) {
        out.push_back({st.column_text(0), stored_enum<VideoVerdict>(st.column_text(1)), st.column_text(2),
                       static_cast<int>(st.column_int(3))});
    }
    return out;
}

std::vector<std::string> voted_recordings(Connection& c, const std::string& user_id) {
    auto st = c.query(
        "SELECT v.recording_id FROM video_verdicts v JOIN recordings r ON r.id = v.recording_id "
        "WHERE v.validator_id = ? AND v.round = r.video_round",
        user_id);
    std::vector<std::string> out;
    while (st.step()) out.push_back(st.column_text(0));
    return out;
}

void insert_annotation_verdict(Connection& c, const std::string& recording_id, const std::string& validator_id,
                               AnnotationVerdict verdict, Millis now) {
    c.run("INSERT INTO annotation_verdicts (recording_id, validator_id, verdict, submitted_at) VALUES (?, ?, ?, ?)",
          recording_id, validator_id, to_string(verdict), now);
}

std::int64_t count_verdicts(Connection& c) {
    return c.scalar_int("SELECT (SELECT COUNT(*) FROM video_verdicts) + (SELECT COUNT(*) FROM annotation_verdicts)");
}

void append_event(Connection& c, const std::string& recording_id, const AuditEvent& e) {
    std::optional<std::string> from;
    if (e.from) from = std::string(to_string(*e.from));
    c.run("INSERT INTO events (recording_id, event, from_state, to_state, actor_id, at) VALUES (?, ?, ?, ?, ?, ?)",
          recording_id, to_string(e.event), from, to_string(e.to), e.actor_id, e.at_ms);
}

std::vector<AuditEvent> events(Connection& c, const std::string& recording_id) {
    auto st = c.query(
        "SELECT event, from_state, to_state, actor_id, at FROM events WHERE recording_id = ? ORDER BY id",
        recording_id);
    std::vector<AuditEvent> out;
    while (st.step()) {
        AuditEvent e{stored_enum<LifecycleEvent>(st.column_text(0)), std::nullopt,
                     stored_enum<LifecycleState>(st.column_text(2)), st.column_text(3), st.column_int(4)};
        if (auto f = st.column_opt_text(1)) e.from = stored_enum<LifecycleState>(*f);
        out.push_back(std::move(e));
    }
    return out;
}

std::optional<std::string> find_idempotent(Connection& c, const std::string& scope, const std::string& key) {
    auto st = c.query("SELECT result FROM idempotency WHERE scope = ? AND key = ?", scope, key);
    if (!st.step()) return std::nullopt;
    return st.column_text(0);
}

void save_idempotent(Connection& c, const std::string& scope, const std::string& key, const std::string& result,
                     Millis now) {
    c.run("INSERT INTO idempotency (scope, key, result, created_at) VALUES (?, ?, ?, ?)", scope, key, result, now);
}

std::optional<ReplayedResponse> find_replay(Connection& c, const std::string& scope, const std::string& key) {
    auto st = c.query("SELECT status, content_type, body FROM http_replay WHERE scope = ? AND key = ?", scope, key);
    if (!st.step()) return std::nullopt;
    return ReplayedResponse{static_cast<int>(st.column_int(0)), st.column_text(1), st.column_text(2)};
}

void save_replay(Connection& c, const std::string& scope, const std::string& key, const ReplayedResponse& r,
                 Millis now) {
    c.run("INSERT OR IGNORE INTO http_replay (scope, key, status, content_type, body, created_at) "
          "VALUES (?, ?, ?, ?, ?, ?)",
          scope, key, r.status, r.content_type, r.body, now);
}

}  // namespace repo

}  // namespace signcrowd
