#pragma once

#include <memory>
#include <random>
#include <string>

#include "signcrowd/api/app.hpp"
#include "signcrowd/exporting/manifest.hpp"
#include "temp_dir.hpp"

namespace signcrowd::testing {

inline constexpr const char* kBangla = "bn-BdSL";
inline constexpr const char* kEnglish = "en-ASL";
inline constexpr const char* kSecret = "test-pseudonym-secret";

DeploymentConfig test_config(const std::filesystem::path& root);

/// Controllable clock shared by copies.
class ManualClock {
public:
    explicit ManualClock(Millis start = 1'700'000'000'000) : now_(std::make_shared<Millis>(start)) {}
    Millis operator()() const { return *now_; }
    void advance(Millis ms) { *now_ += ms; }
    void set(Millis ms) { *now_ = ms; }

private:
    std::shared_ptr<Millis> now_;
};

/// A fresh deployment in a temp directory with a local object store.
struct Deployment {
    TempDir dir;
    ManualClock clock;
    std::unique_ptr<Application> app;

    explicit Deployment(const std::function<void(DeploymentConfig&)>& tweak = {},
                        std::unique_ptr<ObjectStore> store = nullptr);

    UserProfile user(const std::string& name, const std::string& language = kBangla,
                     RoleSet roles = RoleSet::crowd());
    Prompt prompt(const std::string& content, ContentType type = ContentType::Text,
                  const std::string& language = kBangla);
    /// Puts `bytes` in the store and returns the key text.
    std::string blob(const std::string& bytes, const std::string& ext = ".webm");

    /// Submits a recording of `p` by `signer` with a fresh blob.
    Recording record(const UserProfile& signer, const Prompt& p, TrimWindow trim = {0, 4000},
                     Millis duration_ms = 5000);
    /// Drives a fresh recording all the way to AnnotationValidated with a
    /// sentence track; `script` is required for Topic prompts.
    Recording validated(const UserProfile& signer, const UserProfile& validator, const UserProfile& annotator,
                        const Prompt& p, TrimWindow trim = {0, 4000}, Millis duration_ms = 5000,
                        const std::optional<std::string>& script = std::nullopt);
    WorkflowEngine& engine() { return app->engine(); }
    Database& db() { return app->db(); }
};

VideoMeta test_meta(Millis duration_ms = 5000);

/// A track of `kind` evenly spread over `trim` that annotates `reference`.
AnnotationTrack track_for(const std::string& reference, TrackKind kind, TrimWindow trim,
                          const std::string& recording_id = {}, const std::string& annotator_id = {});

/// A JSON-lines keypoint sidecar with `frames` frames of the given group sizes.
std::string sidecar(std::int64_t frames, std::size_t body = 25, std::size_t face = 70, std::size_t hand = 21);

/// `words` vocabulary words, some followed by punctuation.
std::string random_transcript(std::mt19937_64& rng, int words);
/// A random manifest entry (Text or Topic, random trim) with id "r<i>".
ManifestEntry random_manifest_entry(std::mt19937_64& rng, int i);

/// A topic script with `n` sentences.
std::string script_with(int n);

}  // namespace signcrowd::testing
