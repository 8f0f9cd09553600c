#include "fixtures.hpp"

#include <stdexcept>

#include "oracles.hpp"
#include "signcrowd/core/text.hpp"

namespace signcrowd::testing {

DeploymentConfig test_config(const std::filesystem::path& root) {
    DeploymentConfig c;
    c.listen_port = 0;
    c.database = root / "signcrowd.db";
    c.storage_root = root / "objects";
    c.languages = {{kBangla, "Bangla / Bangladeshi Sign Language"}, {kEnglish, "English / ASL"}};
    c.pseudonym_secret = kSecret;
    c.max_object_bytes = 4u << 20;
    return c;
}

Deployment::Deployment(const std::function<void(DeploymentConfig&)>& tweak, std::unique_ptr<ObjectStore> store) {
    auto config = test_config(dir.path());
    if (tweak) tweak(config);
    app = std::make_unique<Application>(std::move(config), std::move(store), clock);
}

UserProfile Deployment::user(const std::string& name, const std::string& language, RoleSet roles) {
    NewUser u;
    u.username = name;
    u.password = "password-" + name;
    u.selected_language = language;
    u.roles = roles;
    u.age = 27;
    u.gender = Gender::Female;
    u.locality = "Dhaka";
    return app->auth().register_user(u);
}

Prompt Deployment::prompt(const std::string& content, ContentType type, const std::string& language) {
    const PromptDraft draft{2, content, type, language};
    const auto report = ingest_prompts(db(), std::span(&draft, 1), app->config().languages, clock);
    if (!report.errors.empty()) throw std::runtime_error("fixture prompt rejected: " + report.errors[0].detail);
    const auto wanted = normalize_text(content);
    return db().read([&](Connection& c) {
        for (auto& p : repo::prompts_in_language(c, language)) {
            if (p.content == wanted && p.content_type == type) return p;
        }
        throw std::runtime_error("fixture prompt not found");
    });
}

std::string Deployment::blob(const std::string& bytes, const std::string& ext) {
    return app->store().put_object(bytes, ext).str();
}

Recording Deployment::record(const UserProfile& signer, const Prompt& p, TrimWindow trim, Millis duration_ms) {
    static int counter = 0;
    RecordingSubmission s;
    s.prompt_id = p.id;
    s.video_key = blob("video bytes #" + std::to_string(++counter) + " by " + signer.id);
    s.meta = test_meta(duration_ms);
    s.trim = trim;
    return engine().submit_recording(signer, s);
}

Recording Deployment::validated(const UserProfile& signer, const UserProfile& validator,
                                const UserProfile& annotator, const Prompt& p, TrimWindow trim, Millis duration_ms,
                                const std::optional<std::string>& script) {
    const auto r = record(signer, p, trim, duration_ms);
    engine().submit_video_validation(validator, {r.id, VideoVerdict::Correct, std::nullopt});
    const auto& reference = script ? *script : p.content;
    engine().submit_annotation(annotator, {r.id, {track_for(reference, TrackKind::Sentence, trim)}, script});
    engine().submit_annotation_validation(validator, {r.id, AnnotationVerdict::Accepted, {}});
    return engine().recording(r.id);
}

std::string sidecar(std::int64_t frames, std::size_t body, std::size_t face, std::size_t hand) {
    std::string out;
    for (std::int64_t i = 0; i < frames; ++i) {
        out += "{\"frame_index\":" + std::to_string(i);
        const std::pair<const char*, std::size_t> groups[] = {
            {"body", body}, {"face", face}, {"left_hand", hand}, {"right_hand", hand}};
        for (const auto& [name, n] : groups) {
            out += ",\"" + std::string(name) + "\":[";
            for (std::size_t k = 0; k < n; ++k) {
                if (k) out += ',';
                out += "[" + std::to_string(100 + k) + ".5," + std::to_string(200 + i) + ",0.75]";
            }
            out += ']';
        }
        out += "}\n";
    }
    return out;
}

std::string random_transcript(std::mt19937_64& rng, int words) {
    static const char* endings[] = {"", ".", "?", "!", "।", ",", ";", ":"};
    const auto& vocab = oracle::vocabulary();
    std::string out;
    for (int i = 0; i < words; ++i) {
        if (i) out += ' ';
        out += vocab[rng() % vocab.size()];
        if (rng() % 4 == 0) out += endings[rng() % 8];
    }
    return out;
}

ManifestEntry random_manifest_entry(std::mt19937_64& rng, int i) {
    ManifestEntry e;
    e.recording_id = "r" + std::to_string(i);
    e.signer = "s-x";
    e.language = kBangla;
    e.content_type = rng() % 5 ? ContentType::Text : ContentType::Topic;
    e.prompt_content = random_transcript(rng, 1 + static_cast<int>(rng() % 12));
    if (e.content_type == ContentType::Topic) e.script = random_transcript(rng, 5 + static_cast<int>(rng() % 40));
    const Millis start = static_cast<Millis>(rng() % 5000);
    e.trim = {start, start + 1 + static_cast<Millis>(rng() % 60000)};
    e.meta = test_meta(e.trim.end_ms + 10);
    return e;
}

VideoMeta test_meta(Millis duration_ms) {
    VideoMeta m;
    m.lighting = Lighting::Indoor;
    m.camera_view = CameraView::Front;
    m.resolution = {1280, 720};
    m.duration_ms = duration_ms;
    m.fps = {30, 1};
    m.container = "webm";
    return m;
}

AnnotationTrack track_for(const std::string& reference, TrackKind kind, TrimWindow trim,
                          const std::string& recording_id, const std::string& annotator_id) {
    const auto units = kind == TrackKind::Sentence ? split_sentences(reference) : tokenize_words(reference);
    AnnotationTrack t;
    t.kind = kind;
    t.recording_id = recording_id;
    t.annotator_id = annotator_id;
    const auto step = trim.length() / static_cast<Millis>(units.size());
    for (std::size_t i = 0; i < units.size(); ++i) {
        const auto start = trim.start_ms + step * static_cast<Millis>(i);
        t.segments.push_back({start, start + step, units[i]});
    }
    return t;
}

std::string script_with(int n) {
    static const char* sentences[] = {"আমি বই পড়ি।", "সব কিছু ঠিক আছে তো?", "আমি আগামীকাল বেড়াতে যাবো।",
                                      "ভালো থাকো!", "আজ বৃষ্টি হবে।", "আমরা খেলবো।"};
    std::string out;
    for (int i = 0; i < n; ++i) {
        if (i > 0) out += ' ';
        out += sentences[i % 6];
    }
    return out;
}

}  // namespace signcrowd::testing
