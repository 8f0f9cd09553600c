#include "signcrowd/workflow/engine.hpp"

#include <algorithm>

#include "signcrowd/annotation/srt.hpp"
#include "signcrowd/exporting/keypoints.hpp"

namespace signcrowd {

namespace {

void require_role(const UserProfile& user, Role role) {
    if (!user.roles.has(role)) {
        throw Error(ErrorCode::Role, "user lacks the " + std::string(to_string(role)) + " role");
    }
}

std::string scope_of(const UserProfile& user, std::string_view op) { return user.id + ":" + std::string(op); }

Recording load_recording(Connection& c, const std::string& id) {
    auto r = repo::find_recording(c, id);
    if (!r) throw Error(ErrorCode::NotFound, "recording " + id + " not found");
    return *r;
}

Prompt load_prompt(Connection& c, const std::string& id) {
    auto p = repo::find_prompt(c, id);
    if (!p) throw Error(ErrorCode::NoPrompt, "prompt " + id + " not found");
    return *p;
}

[[noreturn]] void state_error(LifecycleState actual, LifecycleState expected, LifecycleState decided_by_stage) {
    const auto detail = "recording is " + std::string(to_string(actual)) + ", expected " +
                        std::string(to_string(expected));
    if (actual == decided_by_stage) throw Error(ErrorCode::Stale, detail);
    throw Error(ErrorCode::WrongState, detail);
}

Json self_annotation_json(const SelfAnnotation& a) {
    Json tracks = Json::array();
    for (const auto& t : a.tracks) tracks.push_back(to_json(t));
    return {{"script", a.script ? Json(*a.script) : Json(nullptr)}, {"tracks", tracks}};
}

SelfAnnotation self_annotation_from_json(const Json& j) {
    SelfAnnotation a;
    a.script = get_opt_string(j, "script");
    a.tracks = tracks_from_json(j.at("tracks"));
    return a;
}

}  // namespace

Json to_json(const VideoCorrections& c) {
    Json j = Json::object();
    if (c.start_ms) j["start_ms"] = *c.start_ms;
    if (c.end_ms) j["end_ms"] = *c.end_ms;
    if (c.camera_view) j["camera_view"] = to_string(*c.camera_view);
    if (c.lighting) j["lighting"] = to_string(*c.lighting);
    return j;
}

VideoCorrections corrections_from_json(const Json& j) {
    if (!j.is_object()) throw Error(ErrorCode::BadRequest, "corrections must be an object");
    VideoCorrections c;
    c.start_ms = get_opt_int(j, "start_ms");
    c.end_ms = get_opt_int(j, "end_ms");
    if (j.contains("camera_view") && !j["camera_view"].is_null()) {
        c.camera_view = enum_field<CameraView>(j, "camera_view");
    }
    if (j.contains("lighting") && !j["lighting"].is_null()) c.lighting = enum_field<Lighting>(j, "lighting");
    return c;
}

Recording apply_corrections(Recording r, const VideoCorrections& c) {
    if (c.start_ms) r.trim.start_ms = *c.start_ms;
    if (c.end_ms) r.trim.end_ms = *c.end_ms;
    if (c.camera_view) r.meta.camera_view = *c.camera_view;
    if (c.lighting) r.meta.lighting = *c.lighting;
    return r;
}

WorkflowEngine::WorkflowEngine(Database& db, ObjectStore& store, WorkflowOptions options, Clock clock)
    : db_(db), store_(store), options_(options), clock_(std::move(clock)) {
    if (options_.quorum < 1) throw Error(ErrorCode::Config, "quorum must be at least 1");
    if (options_.topic_sentence_count < 1) throw Error(ErrorCode::Config, "topic_sentence_count must be at least 1");
}

std::string WorkflowEngine::reference_text(const Prompt& p, const Recording& r) {
    if (p.content_type == ContentType::Topic) return r.script.value_or("");
    return p.content;
}

TrackRules WorkflowEngine::rules_for(const Prompt& p) const {
    return TrackRules{options_.free_gloss_labels, options_.splitters, p.language};
}

void WorkflowEngine::check_script(const Prompt& p, const std::optional<std::string>& script) const {
    const bool has_script = script && !normalize_text(*script).empty();
    if (p.content_type == ContentType::Text) {
        if (has_script) throw Error(ErrorCode::UnexpectedScript, "text prompts take no script");
        return;
    }
    if (!has_script) throw Error(ErrorCode::MissingScript, "topic recordings need a script before annotation");
    const auto sentences = options_.splitters ? options_.splitters->split(*script, p.language)
                                              : split_sentences(*script);
    if (static_cast<int>(sentences.size()) < options_.topic_sentence_count) {
        throw Error(ErrorCode::ScriptTooShort, "script has " + std::to_string(sentences.size()) +
                                                   " sentences, need " +
                                                   std::to_string(options_.topic_sentence_count));
    }
}

void WorkflowEngine::check_tracks(const std::vector<AnnotationTrack>& tracks, const Prompt& p,
                                  const TrimWindow& trim, const std::optional<std::string>& script) const {
    if (tracks.empty()) throw Error(ErrorCode::MissingTracks, "at least one track is required");
    if (tracks.size() > 2 || (tracks.size() == 2 && tracks[0].kind == tracks[1].kind)) {
        throw Error(ErrorCode::BadRequest, "at most one sentence and one gloss track");
    }
    const std::string reference = p.content_type == ContentType::Topic ? script.value_or("") : p.content;
    const auto rules = rules_for(p);
    for (const auto& t : tracks) ensure_valid_track(t, trim, reference, rules);
}

void WorkflowEngine::move(Connection& c, const std::string& recording_id, LifecycleState from, LifecycleEvent event,
                          const std::string& actor_id, Millis now) const {
    const auto to = transition(from, event);
    if (!repo::cas_state(c, recording_id, from, to)) {
        throw Error(ErrorCode::Stale, "recording changed state concurrently");
    }
    repo::append_event(c, recording_id, AuditEvent{event, from, to, actor_id, now});
}

LifecycleState WorkflowEngine::attach_self_annotation(Connection& c, const Recording& r, const Prompt& p,
                                                      Millis now) const {
    const auto pending = repo::pending_annotation(c, r.id);
    if (!pending) return r.state;
    repo::clear_pending_annotation(c, r.id);
    SelfAnnotation a;
    try {
        a = self_annotation_from_json(Json::parse(*pending));
        check_script(p, a.script);
        check_tracks(a.tracks, p, r.trim, a.script);
    } catch (const std::exception&) {
        // The validator's trim correction may have invalidated it; annotation goes to the public queue.
        return r.state;
    }
    Recording updated = r;
    updated.annotator_id = r.signer_id;
    if (p.content_type == ContentType::Topic) updated.script = a.script;
    repo::update_recording(c, updated);
    for (auto t : a.tracks) {
        t.recording_id = r.id;
        t.annotator_id = r.signer_id;
        repo::insert_track(c, t, now);
    }
    move(c, r.id, r.state, LifecycleEvent::AnnotationSubmitted, r.signer_id, now);
    return transition(r.state, LifecycleEvent::AnnotationSubmitted);
}

Recording WorkflowEngine::submit_recording(const UserProfile& signer, const RecordingSubmission& s,
                                           const std::optional<std::string>& idem) {
    require_role(signer, Role::Contributor);
    check_video_meta(s.meta);
    validate_trim(s.trim, s.meta.duration_ms);
    const auto key = ObjectKey::parse(s.video_key);
    if (key.kind() != ObjectKind::Video) throw Error(ErrorCode::BadKey, "not a video key: " + s.video_key);
    const bool blob_present = store_.exists(key);

    const auto scope = scope_of(signer, "submit_recording");
    return db_.write([&](Connection& c) {
        if (idem) {
            if (auto prior = repo::find_idempotent(c, scope, *idem)) return load_recording(c, *prior);
        }
        const auto prompt = load_prompt(c, s.prompt_id);
        if (prompt.language != signer.selected_language) {
            throw Error(ErrorCode::LangMismatch, "prompt language " + prompt.language + " differs from user language " +
                                                     signer.selected_language);
        }
        if (!blob_present) throw Error(ErrorCode::NoBlob, "no stored object under " + s.video_key);

        std::optional<std::string> pending;
        if (s.annotation) {
            check_script(prompt, s.annotation->script);
            check_tracks(s.annotation->tracks, prompt, s.trim, s.annotation->script);
            pending = self_annotation_json(*s.annotation).dump();
        }

        const Millis now = clock_();
        Recording r;
        r.id = new_id();
        r.prompt_id = prompt.id;
        r.signer_id = signer.id;
        r.video_key = key.str();
        r.meta = s.meta;
        r.trim = s.trim;
        r.state = initial_state(LifecycleEvent::VideoSubmitted);
        r.created_at_ms = now;
        repo::insert_recording(c, r, pending);
        repo::append_event(c, r.id, AuditEvent{LifecycleEvent::VideoSubmitted, std::nullopt, r.state, signer.id, now});
        if (idem) repo::save_idempotent(c, scope, *idem, r.id, now);
        return r;
    });
}

LifecycleState WorkflowEngine::submit_video_validation(const UserProfile& validator, const VideoValidation& v,
                                                       const std::optional<std::string>& idem) {
    require_role(validator, Role::Validator);
    const auto scope = scope_of(validator, "submit_video_validation");
    return db_.write([&](Connection& c) {
        if (idem) {
            if (auto prior = repo::find_idempotent(c, scope, *idem)) return enum_from_string<LifecycleState>(*prior).value();
        }
        auto r = load_recording(c, v.recording_id);
        if (r.signer_id == validator.id) throw Error(ErrorCode::SelfValidation, "cannot validate own recording");
        if (r.state != LifecycleState::PendingVideoValidation) {
            if (r.state == LifecycleState::PendingAnnotation || r.state == LifecycleState::VideoRejected) {
                throw Error(ErrorCode::Stale, "video already validated");
            }
            state_error(r.state, LifecycleState::PendingVideoValidation, LifecycleState::PendingVideoValidation);
        }
        if (v.corrections) validate_trim(apply_corrections(r, *v.corrections).trim, r.meta.duration_ms);

        const Millis now = clock_();
        const auto votes_before = repo::video_verdicts(c, r.id, r.video_round);
        if (std::any_of(votes_before.begin(), votes_before.end(),
                        [&](const StoredVideoVerdict& s) { return s.validator_id == validator.id; })) {
            throw Error(ErrorCode::AlreadyVoted, "already voted on this recording");
        }
        repo::insert_video_verdict(
            c, r.id,
            StoredVideoVerdict{validator.id, v.verdict,
                               v.corrections ? to_json(*v.corrections).dump() : std::string("null"), r.video_round},
            now);

        auto state = r.state;
        const auto votes = repo::video_verdicts(c, r.id, r.video_round);
        if (static_cast<int>(votes.size()) >= options_.quorum) {
            const auto correct = std::count_if(votes.begin(), votes.end(), [](const StoredVideoVerdict& s) {
                return s.verdict == VideoVerdict::Correct;
            });
            const auto incorrect = static_cast<std::ptrdiff_t>(votes.size()) - correct;
            const auto outcome = correct > incorrect ? VideoVerdict::Correct : VideoVerdict::Incorrect;
            auto decided = r;
            for (const auto& s : votes) {
                if (s.verdict != outcome || s.corrections_json == "null") continue;
                decided = apply_corrections(decided, corrections_from_json(Json::parse(s.corrections_json)));
            }
            validate_trim(decided.trim, decided.meta.duration_ms);
            repo::update_recording(c, decided);
            const auto event = outcome == VideoVerdict::Correct ? LifecycleEvent::VideoVerdictCorrect
                                                                : LifecycleEvent::VideoVerdictIncorrect;
            move(c, r.id, r.state, event, validator.id, now);
            decided.state = transition(r.state, event);
            state = decided.state;
            if (state == LifecycleState::PendingAnnotation) {
                state = attach_self_annotation(c, decided, load_prompt(c, r.prompt_id), now);
            }
        }
        if (idem) repo::save_idempotent(c, scope, *idem, std::string(to_string(state)), now);
        return state;
    });
}

LifecycleState WorkflowEngine::submit_annotation(const UserProfile& annotator, const AnnotationSubmission& a,
                                                 const std::optional<std::string>& idem) {
    require_role(annotator, Role::Annotator);
    const auto scope = scope_of(annotator, "submit_annotation");
    return db_.write([&](Connection& c) {
        if (idem) {
            if (auto prior = repo::find_idempotent(c, scope, *idem)) return enum_from_string<LifecycleState>(*prior).value();
        }
        auto r = load_recording(c, a.recording_id);
        if (r.state != LifecycleState::PendingAnnotation) {
            state_error(r.state, LifecycleState::PendingAnnotation, LifecycleState::PendingAnnotationValidation);
        }
        const auto prompt = load_prompt(c, r.prompt_id);
        check_script(prompt, a.script);
        check_tracks(a.tracks, prompt, r.trim, a.script);

        const Millis now = clock_();
        r.annotator_id = annotator.id;
        if (prompt.content_type == ContentType::Topic) r.script = a.script;
        repo::update_recording(c, r);
        repo::clear_pending_annotation(c, r.id);
        for (auto t : a.tracks) {
            t.recording_id = r.id;
            t.annotator_id = annotator.id;
            repo::insert_track(c, t, now);
        }
        move(c, r.id, r.state, LifecycleEvent::AnnotationSubmitted, annotator.id, now);
        const auto state = transition(r.state, LifecycleEvent::AnnotationSubmitted);
        if (idem) repo::save_idempotent(c, scope, *idem, std::string(to_string(state)), now);
        return state;
    });
}

LifecycleState WorkflowEngine::submit_annotation_validation(const UserProfile& validator,
                                                            const AnnotationValidation& av,
                                                            const std::optional<std::string>& idem) {
    require_role(validator, Role::Validator);
    const auto scope = scope_of(validator, "submit_annotation_validation");
    return db_.write([&](Connection& c) {
        if (idem) {
            if (auto prior = repo::find_idempotent(c, scope, *idem)) return enum_from_string<LifecycleState>(*prior).value();
        }
        const auto r = load_recording(c, av.recording_id);
        if (r.signer_id == validator.id || r.annotator_id == validator.id) {
            throw Error(ErrorCode::SelfValidation, "cannot validate own recording or annotation");
        }
        if (r.state != LifecycleState::PendingAnnotationValidation) {
            state_error(r.state, LifecycleState::PendingAnnotationValidation, LifecycleState::AnnotationValidated);
        }
        const Millis now = clock_();
        auto event = LifecycleEvent::AnnotationVerdictAccepted;
        if (av.verdict == AnnotationVerdict::Corrected) {
            const auto prompt = load_prompt(c, r.prompt_id);
            check_tracks(av.corrected_tracks, prompt, r.trim, r.script);
            repo::supersede_tracks(c, r.id);
            for (auto t : av.corrected_tracks) {
                t.recording_id = r.id;
                t.annotator_id = validator.id;
                repo::insert_track(c, t, now);
            }
            event = LifecycleEvent::AnnotationVerdictCorrected;
        } else if (!av.corrected_tracks.empty()) {
            throw Error(ErrorCode::BadRequest, "tracks are only accepted with a corrected verdict");
        }
        repo::insert_annotation_verdict(c, r.id, validator.id, av.verdict, now);
        move(c, r.id, r.state, event, validator.id, now);
        const auto state = transition(r.state, event);
        if (idem) repo::save_idempotent(c, scope, *idem, std::string(to_string(state)), now);
        return state;
    });
}

LifecycleState WorkflowEngine::requeue(const UserProfile& admin, const std::string& recording_id,
                                       const std::optional<std::string>& idem) {
    require_role(admin, Role::Admin);
    const auto scope = scope_of(admin, "requeue");
    return db_.write([&](Connection& c) {
        if (idem) {
            if (auto prior = repo::find_idempotent(c, scope, *idem)) return enum_from_string<LifecycleState>(*prior).value();
        }
        auto r = load_recording(c, recording_id);
        if (r.state != LifecycleState::VideoRejected) {
            state_error(r.state, LifecycleState::VideoRejected, LifecycleState::PendingVideoValidation);
        }
        const Millis now = clock_();
        ++r.video_round;
        repo::update_recording(c, r);
        move(c, r.id, r.state, LifecycleEvent::Requeue, admin.id, now);
        const auto state = transition(r.state, LifecycleEvent::Requeue);
        if (idem) repo::save_idempotent(c, scope, *idem, std::string(to_string(state)), now);
        return state;
    });
}

Recording WorkflowEngine::attach_keypoints(const std::string& recording_id, std::string_view sidecar) {
    const auto before = recording(recording_id);
    const auto frames = parse_keypoint_sidecar(sidecar);
    check_frame_alignment(static_cast<std::int64_t>(frames.size()), before.trim.length(), before.meta.fps);
    const auto key = store_.put_object(sidecar, ".jsonl");
    return db_.write([&](Connection& c) {
        auto r = load_recording(c, recording_id);
        if (r.trim != before.trim || r.meta.fps != before.meta.fps) {
            throw Error(ErrorCode::Stale, "recording trim changed during keypoint upload");
        }
        r.keypoints_key = key.str();
        repo::update_recording(c, r);
        return r;
    });
}

Recording WorkflowEngine::recording(const std::string& id) {
    return db_.read([&](Connection& c) { return load_recording(c, id); });
}

std::vector<AnnotationTrack> WorkflowEngine::tracks(const std::string& recording_id) {
    return db_.read([&](Connection& c) {
        load_recording(c, recording_id);
        return repo::current_tracks(c, recording_id);
    });
}

std::string WorkflowEngine::subtitles(const std::string& recording_id, TrackKind kind) {
    return db_.read([&](Connection& c) {
        const auto r = load_recording(c, recording_id);
        for (const auto& t : repo::current_tracks(c, recording_id)) {
            if (t.kind == kind) return render_srt(t, r.trim);
        }
        throw Error(ErrorCode::NotFound, "no " + std::string(to_string(kind)) + " track for " + recording_id);
    });
}

}  // namespace signcrowd
