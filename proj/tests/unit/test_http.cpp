#include <doctest.h>

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include "expect.hpp"
#include "fixtures.hpp"
#include "live_server.hpp"
#include "oracles.hpp"

using namespace signcrowd;
using namespace signcrowd::testing;

namespace {

const std::string kApi = "/api/v1";

Json body_of(const httplib::Result& r) {
    REQUIRE(r);
    return r->body.empty() ? Json() : Json::parse(r->body);
}

std::string login(httplib::Client& c, const std::string& name) {
    const auto r = c.Post(kApi + "/sessions", Json{{"username", name}, {"password", "password-" + name}}.dump(),
                          "application/json");
    REQUIRE(r);
    REQUIRE(r->status == 201);
    return Json::parse(r->body)["token"].get<std::string>();
}

Json meta_json(Millis duration = 5000) { return to_json(test_meta(duration)); }

struct Site {
    Deployment d;
    LiveServer server;
    httplib::Client http;
    UserProfile admin_user, signer_user, validator_user;
    std::string admin, signer, validator;

    explicit Site(const std::function<void(DeploymentConfig&)>& tweak = {})
        : d(tweak), server(*d.app), http(server.client()) {
        admin_user = d.user("admin", kBangla, RoleSet{Role::Admin});
        signer_user = d.user("signer");
        validator_user = d.user("validator");
        admin = login(http, "admin");
        signer = login(http, "signer");
        validator = login(http, "validator");
    }

    httplib::Result post(const std::string& path, const Json& body, const std::string& token,
                         httplib::Headers extra = {}) {
        auto h = bearer(token);
        h.insert(extra.begin(), extra.end());
        return http.Post(kApi + path, h, body.dump(), "application/json");
    }

    std::string upload(const std::string& bytes, const std::string& token) {
        const auto r = http.Post(kApi + "/videos", bearer(token), bytes, "video/webm");
        REQUIRE(r);
        REQUIRE(r->status == 201);
        return Json::parse(r->body)["key"].get<std::string>();
    }

    std::size_t objects() { return d.app->store().list().size(); }
};

/// Sends a raw request that declares `declared` body bytes but delivers only `sent`, then hangs up.
void aborted_upload(int port, const std::string& token, std::size_t declared, std::size_t sent) {
    const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
    REQUIRE(fd >= 0);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(static_cast<std::uint16_t>(port));
    ::inet_pton(AF_INET, "127.0.0.1", &addr.sin_addr);
    REQUIRE(::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) == 0);
    std::string req = "POST " + kApi + "/videos HTTP/1.1\r\nHost: 127.0.0.1\r\nAuthorization: Bearer " + token +
                      "\r\nContent-Type: video/webm\r\nContent-Length: " + std::to_string(declared) + "\r\n\r\n";
    req += std::string(sent, 'v');
    std::size_t off = 0;
    while (off < req.size()) {
        const auto n = ::send(fd, req.data() + off, req.size() - off, MSG_NOSIGNAL);
        if (n <= 0) break;
        off += static_cast<std::size_t>(n);
    }
    ::shutdown(fd, SHUT_RDWR);
    ::close(fd);
}

}  // namespace

TEST_SUITE("http") {

TEST_CASE("status mapping") {
    const std::pair<ErrorCode, int> table[] = {
        {ErrorCode::Unauthenticated, 401}, {ErrorCode::Role, 403},       {ErrorCode::NoPrompt, 404},
        {ErrorCode::NotFound, 404},        {ErrorCode::WrongState, 409}, {ErrorCode::Stale, 409},
        {ErrorCode::TooLarge, 413},        {ErrorCode::BadMediaType, 415}, {ErrorCode::Backend, 503},
        {ErrorCode::Overlap, 422},         {ErrorCode::TextMismatch, 422}, {ErrorCode::TrimOrder, 422},
        {ErrorCode::TrimBounds, 422},      {ErrorCode::MissingMeta, 422}, {ErrorCode::BadMeta, 422},
        {ErrorCode::LangMismatch, 422},    {ErrorCode::NoBlob, 422},     {ErrorCode::FrameMismatch, 422},
        {ErrorCode::SidecarSyntax, 422},   {ErrorCode::MissingScript, 422}, {ErrorCode::MultiwordGloss, 422},
    };
    for (const auto& [code, status] : table) {
        CAPTURE(error_name(code));
        CHECK(http_status(code) == status);
    }
    const auto body = Json::parse(error_body(Error(ErrorCode::Overlap, "segments 0 and 1", {{ErrorCode::Overlap, 1, "x"}})));
    CHECK(body["error"] == "E_OVERLAP");
    CHECK(body["detail"] == "segments 0 and 1");
    CHECK(body["issues"][0]["index"] == 1);
}

TEST_CASE("accounts and sessions") {
    Site s;
    CHECK(s.http.Get(kApi + "/health")->status == 200);

    auto r = s.http.Post(kApi + "/users",
                         Json{{"username", "newbie"}, {"password", "long-password"}, {"selected_language", kBangla},
                              {"gender", "other"}, {"age", 33}, {"locality", "Khulna"}}
                             .dump(),
                         "application/json");
    REQUIRE(r);
    CHECK(r->status == 201);
    CHECK(Json::parse(r->body)["roles"] == Json::array({"contributor", "validator", "annotator"}));
    r = s.http.Post(kApi + "/users",
                    Json{{"username", "newbie"}, {"password", "long-password"}, {"selected_language", kBangla}}.dump(),
                    "application/json");
    CHECK(r->status == 409);
    r = s.http.Post(kApi + "/users",
                    Json{{"username", "x2"}, {"password", "long-password"}, {"selected_language", "xx-YY"}}.dump(),
                    "application/json");
    CHECK(r->status == 422);
    CHECK(body_of(r)["error"] == "E_UNKNOWN_LANGUAGE");
    CHECK(s.http.Post(kApi + "/users", "{not json", "application/json")->status == 400);

    CHECK(s.http.Post(kApi + "/sessions", Json{{"username", "newbie"}, {"password", "wrong-password"}}.dump(),
                      "application/json")
              ->status == 401);
    const auto token = login(s.http, "signer");
    r = s.http.Get(kApi + "/users/me", bearer(token));
    CHECK(r->status == 200);
    CHECK(body_of(r)["username"] == "signer");
    CHECK(s.http.Get(kApi + "/users/me")->status == 401);
    CHECK(s.http.Get(kApi + "/users/me", bearer(std::string(64, 'a')))->status == 401);
    CHECK(s.http.Get(kApi + "/users/me", {{"Authorization", "Basic abc"}})->status == 401);

    r = s.http.Patch(kApi + "/users/me", bearer(token), Json{{"age", 41}, {"locality", "Rajshahi"}}.dump(),
                     "application/json");
    CHECK(r->status == 200);
    CHECK(body_of(r)["age"] == 41);
    CHECK(s.http.Patch(kApi + "/users/me", bearer(token), Json{{"age", 200}}.dump(), "application/json")->status ==
          400);
    CHECK(s.http.Patch(kApi + "/users/me", bearer(token), Json{{"selected_language", "zz-QQ"}}.dump(),
                       "application/json")
              ->status == 422);
    s.d.clock.advance(86'400'000);
    CHECK(s.http.Get(kApi + "/users/me", bearer(token))->status == 401);
}

TEST_CASE("every state-changing endpoint requires authentication") {
    Site s;
    for (const std::string path : {"/prompts", "/videos", "/recordings", "/recordings/abc/validation",
                                   "/recordings/abc/annotation", "/recordings/abc/annotation-validation",
                                   "/recordings/abc/requeue", "/recordings/abc/keypoints"}) {
        CAPTURE(path);
        const auto r = s.http.Post(kApi + path, "{}", "application/json");
        REQUIRE(r);
        CHECK(r->status == 401);
        CHECK(body_of(r)["error"] == "E_UNAUTHENTICATED");
    }
    for (const std::string path : {"/tasks/record", "/recordings/abc", "/recordings/abc/subtitles.srt", "/stats"}) {
        CAPTURE(path);
        CHECK(s.http.Get(kApi + path)->status == 401);
    }
}

TEST_CASE("prompt upload is admin only") {
    Site s;
    const std::string csv = "content,content_type,language\nআমি যাবো,text,bn-BdSL\nতোমার দিন,topic,bn-BdSL\n"
                            ",text,bn-BdSL\n";
    auto r = s.http.Post(kApi + "/prompts", bearer(s.signer), csv, "text/csv");
    CHECK(r->status == 403);
    r = s.http.Post(kApi + "/prompts", bearer(s.admin), csv, "text/csv");
    REQUIRE(r->status == 200);
    const auto report = body_of(r);
    CHECK(report["accepted"] == 2);
    CHECK(report["errors"][0]["code"] == "E_EMPTY_CONTENT");
    CHECK(report["errors"][0]["row"] == 4);
    CHECK(body_of(s.http.Post(kApi + "/prompts", bearer(s.admin), csv, "text/csv"))["duplicates_skipped"] == 2);
}

TEST_CASE("video upload") {
    Site s([](DeploymentConfig& c) { c.max_object_bytes = 64 * 1024; });

    SUBCASE("content addressing and deduplication") {
        std::string blob(40000, '\0');
        for (std::size_t i = 0; i < blob.size(); ++i) blob[i] = static_cast<char>(i * 31 + 7);
        const auto key = s.upload(blob, s.signer);
        CHECK(key == "videos/" + oracle::sha256_hex(blob) + ".webm");
        CHECK(s.upload(blob, s.signer) == key);
        CHECK(s.objects() == 1);
        const auto r = s.http.Post(kApi + "/videos", bearer(s.signer), blob, "video/mp4");
        CHECK(body_of(r)["key"] == "videos/" + oracle::sha256_hex(blob) + ".mp4");
        CHECK(s.objects() == 2);
    }

    SUBCASE("multipart") {
        httplib::MultipartFormDataItems items{{"note", "hello", "", "text/plain"},
                                              {"video", "multipart bytes", "clip.webm", "video/webm"}};
        const auto r = s.http.Post(kApi + "/videos", bearer(s.signer), items);
        REQUIRE(r);
        CHECK(r->status == 201);
        CHECK(body_of(r)["key"] == "videos/" + oracle::sha256_hex("multipart bytes") + ".webm");
        CHECK(body_of(r)["size"] == 15);
        httplib::MultipartFormDataItems none{{"note", "hello", "", "text/plain"}};
        CHECK(s.http.Post(kApi + "/videos", bearer(s.signer), none)->status == 400);
        httplib::MultipartFormDataItems mov{{"video", "x", "clip.mov", "video/quicktime"}};
        CHECK(s.http.Post(kApi + "/videos", bearer(s.signer), mov)->status == 415);
    }

    SUBCASE("media type and size limits") {
        CHECK(s.http.Post(kApi + "/videos", bearer(s.signer), "x", "video/quicktime")->status == 415);
        CHECK(s.http.Post(kApi + "/videos", bearer(s.signer), "x", "application/octet-stream")->status == 415);
        CHECK(s.http.Post(kApi + "/videos", bearer(s.signer), "x", "Video/WebM; codecs=vp9")->status == 201);
        const auto big = s.http.Post(kApi + "/videos", bearer(s.signer), std::string(64 * 1024 + 1, 'b'), "video/webm");
        REQUIRE(big);
        CHECK(big->status == 413);
        CHECK(s.http.Post(kApi + "/videos", bearer(s.signer), std::string(64 * 1024, 'b'), "video/webm")->status ==
              201);
        // Chunked bodies carry no length up front; the cap applies while streaming.
        const std::string chunked(80 * 1024, 'c');
        const auto r = s.http.Post(
            kApi + "/videos", bearer(s.signer),
            [&](std::size_t offset, httplib::DataSink& sink) {
                const auto n = std::min<std::size_t>(8192, chunked.size() - offset);
                sink.write(chunked.data() + offset, n);
                if (offset + n == chunked.size()) sink.done();
                return true;
            },
            "video/webm");
        if (r) CHECK(r->status == 413);
        CHECK(s.objects() == 2);
        CHECK(s.http.Post(kApi + "/videos", bearer(s.admin), "x", "video/webm")->status == 403);
    }

    SUBCASE("aborted uploads leave nothing behind") {
        aborted_upload(s.server.port(), s.signer, 60000, 30000);
        aborted_upload(s.server.port(), s.signer, 10, 0);
        std::this_thread::sleep_for(std::chrono::milliseconds(300));
        CHECK(s.objects() == 0);
        CHECK_FALSE(s.d.app->store().exists(key_for(std::string(30000, 'v'), ".webm")));
        std::size_t files = 0;
        for (const auto& e : std::filesystem::recursive_directory_iterator(s.d.dir / "objects"))
            if (e.is_regular_file()) ++files;
        CHECK(files == 0);
        // The server is still healthy afterwards.
        CHECK(s.upload("after", s.signer).size() > 0);
    }
}

TEST_CASE("the workflow over HTTP") {
    Site s;
    const auto annot_user = s.d.user("annotator");
    const auto annotator = login(s.http, "annotator");
    const auto p = s.d.prompt("আমি আগামীকাল বেড়াতে যাবো।");

    auto r = s.http.Get(kApi + "/tasks/record?seed=4", bearer(s.signer));
    REQUIRE(r->status == 200);
    auto task = body_of(r);
    CHECK(task["kind"] == "record");
    CHECK(task["prompt"]["id"] == p.id);
    CHECK(s.http.Get(kApi + "/tasks/bogus", bearer(s.signer))->status == 404);
    CHECK(s.http.Get(kApi + "/tasks/record?seed=x", bearer(s.signer))->status == 400);
    CHECK(s.http.Get(kApi + "/tasks/validate-video", bearer(s.validator))->status == 204);
    CHECK(s.http.Get(kApi + "/tasks/validate-video", bearer(s.admin))->status == 403);

    const auto key = s.upload("recording bytes", s.signer);
    const Json submission{{"prompt_id", p.id}, {"key", key}, {"meta", meta_json()}, {"trim", {{"start_ms", 0}, {"end_ms", 4000}}}};
    CHECK(body_of(s.post("/recordings", Json{{"prompt_id", p.id}, {"key", key}, {"trim", submission["trim"]}}, s.signer))["error"] ==
          "E_MISSING_META");
    auto bad_trim = submission;
    bad_trim["trim"]["end_ms"] = 9000;
    r = s.post("/recordings", bad_trim, s.signer);
    CHECK(r->status == 422);
    CHECK(body_of(r)["error"] == "E_TRIM_BOUNDS");
    auto no_prompt = submission;
    no_prompt["prompt_id"] = "nope";
    CHECK(s.post("/recordings", no_prompt, s.signer)->status == 404);

    r = s.post("/recordings", submission, s.signer, {{"Idempotency-Key", "rec-1"}});
    REQUIRE(r->status == 201);
    const auto rec = body_of(r);
    const auto rid = rec["id"].get<std::string>();
    CHECK(rec["state"] == "PendingVideoValidation");
    CHECK_FALSE(rec.contains("signer_id"));
    const auto again = s.post("/recordings", submission, s.signer, {{"Idempotency-Key", "rec-1"}});
    CHECK(again->status == 201);
    CHECK(again->body == r->body);
    CHECK(again->get_header_value("Idempotent-Replayed") == "true");
    CHECK(s.d.db().read([](Connection& c) { return repo::count_recordings(c); }) == 1);

    r = s.post("/recordings/" + rid + "/validation", {{"verdict", "correct"}}, s.signer);
    CHECK(r->status == 403);
    CHECK(body_of(r)["error"] == "E_SELF_VALIDATION");
    CHECK(s.post("/recordings/" + rid + "/validation", {{"verdict", "maybe"}}, s.validator)->status == 400);
    CHECK(s.post("/recordings/" + rid + "/validation", Json::object(), s.validator)->status == 400);
    CHECK(s.post("/recordings/ffff/validation", {{"verdict", "correct"}}, s.validator)->status == 404);

    task = body_of(s.http.Get(kApi + "/tasks/validate-video", bearer(s.validator)));
    CHECK(task["recording"]["id"] == rid);
    r = s.post("/recordings/" + rid + "/validation",
               {{"verdict", "correct"}, {"corrections", {{"start_ms", 200}, {"lighting", "studio"}}}}, s.validator,
               {{"Idempotency-Key", "v-1"}});
    REQUIRE(r->status == 200);
    CHECK(body_of(r)["state"] == "PendingAnnotation");
    CHECK(s.post("/recordings/" + rid + "/validation", {{"verdict", "correct"}}, s.validator,
                 {{"Idempotency-Key", "v-1"}})
              ->body == r->body);
    r = s.post("/recordings/" + rid + "/validation", {{"verdict", "correct"}}, annotator);
    CHECK(r->status == 409);
    CHECK(body_of(r)["error"] == "E_STALE");

    const TrimWindow trim{200, 4000};
    const auto sentence = track_for(p.content, TrackKind::Sentence, trim);
    auto overlapping = track_for(p.content, TrackKind::Gloss, trim);
    overlapping.segments[2].start_ms = overlapping.segments[1].start_ms + 10;
    r = s.post("/recordings/" + rid + "/annotation", {{"tracks", {to_json(sentence), to_json(overlapping)}}}, annotator);
    CHECK(r->status == 422);
    const auto err = body_of(r);
    CHECK(err["error"] == "E_OVERLAP");
    CHECK(err["issues"][0]["index"] == 2);

    r = s.post("/recordings/" + rid + "/annotation", {{"tracks", {to_json(sentence)}}}, annotator);
    REQUIRE(r->status == 200);
    CHECK(body_of(r)["state"] == "PendingAnnotationValidation");
    task = body_of(s.http.Get(kApi + "/tasks/validate-annotation", bearer(s.validator)));
    CHECK(task["tracks"][0]["kind"] == "sentence");
    CHECK(s.http.Get(kApi + "/tasks/validate-annotation", bearer(annotator))->status == 204);

    r = s.post("/recordings/" + rid + "/annotation-validation", {{"verdict", "accepted"}}, s.validator);
    REQUIRE(r->status == 200);
    CHECK(body_of(r)["state"] == "AnnotationValidated");

    r = s.http.Get(kApi + "/recordings/" + rid + "/subtitles.srt", bearer(s.validator));
    REQUIRE(r->status == 200);
    CHECK(r->body == oracle::srt_text(sentence.segments, 200));
    CHECK(r->get_header_value("Content-Type").find("application/x-subrip") == 0);
    CHECK(s.http.Get(kApi + "/recordings/" + rid + "/subtitles.srt?kind=gloss", bearer(s.validator))->status == 404);
    CHECK(s.http.Get(kApi + "/recordings/" + rid + "/subtitles.srt?kind=x", bearer(s.validator))->status == 400);

    r = s.http.Get(kApi + "/recordings/" + rid, bearer(annotator));
    CHECK(body_of(r)["trim"]["start_ms"] == 200);
    CHECK(body_of(r)["meta"]["lighting"] == "studio");

    const auto stats = body_of(s.http.Get(kApi + "/stats", bearer(s.signer)));
    CHECK(stats["recording_count"] == 1);
    CHECK(stats["total_words"] == 4);
    CHECK(stats["avg_duration_s"] == doctest::Approx(3.8));
    CHECK(body_of(s.http.Get(kApi + "/stats?language=en-ASL", bearer(s.signer)))["recording_count"] == 0);

    const auto frames = sidecar(114, 0, 0, 0);
    CHECK(s.http.Post(kApi + "/recordings/" + rid + "/keypoints", bearer(s.signer), frames, "application/x-ndjson")
              ->status == 403);
    r = s.http.Post(kApi + "/recordings/" + rid + "/keypoints", bearer(s.admin), frames, "application/x-ndjson");
    CHECK(r->status == 200);
    CHECK(body_of(r)["keypoints_key"] == "keypoints/" + oracle::sha256_hex(frames) + ".jsonl");
    r = s.http.Post(kApi + "/recordings/" + rid + "/keypoints", bearer(s.admin), frames.substr(0, frames.find("\"frame_index\":57,") - 1),
                    "application/x-ndjson");
    CHECK(r->status == 422);
    CHECK(body_of(r)["error"] == "E_FRAME_MISMATCH");
}

TEST_CASE("requeue over HTTP") {
    Site s;
    const auto p = s.d.prompt("আমি যাবো");
    const auto rec = s.d.record(s.signer_user, p);
    s.post("/recordings/" + rec.id + "/validation", {{"verdict", "incorrect"}}, s.validator);
    CHECK(s.post("/recordings/" + rec.id + "/requeue", Json::object(), s.validator)->status == 403);
    const auto r = s.post("/recordings/" + rec.id + "/requeue", Json::object(), s.admin);
    CHECK(r->status == 200);
    CHECK(body_of(r)["state"] == "PendingVideoValidation");
    CHECK(s.post("/recordings/" + rec.id + "/requeue", Json::object(), s.admin)->status == 409);
}

}
