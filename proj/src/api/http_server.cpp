#include "signcrowd/api/http_server.hpp"

#include <httplib.h>

#include <atomic>
#include <charconv>

#include "signcrowd/core/json_codec.hpp"

namespace signcrowd {

namespace {

using httplib::ContentReader;
using httplib::Request;
using httplib::Response;

constexpr const char* kJson = "application/json";

void send_json(Response& res, int status, const Json& body) {
    res.status = status;
    res.set_content(body.dump(), kJson);
}

void send_error(Response& res, const Error& e) {
    res.status = http_status(e.code());
    res.set_content(error_body(e), kJson);
}

void send_current_exception(Response& res) {
    try {
        throw;
    } catch (const Error& e) {
        send_error(res, e);
    } catch (const Json::exception& e) {
        send_error(res, Error(ErrorCode::BadRequest, e.what()));
    } catch (const std::exception& e) {
        send_error(res, Error(ErrorCode::Store, e.what()));
    } catch (...) {
        send_error(res, Error(ErrorCode::Store, "unexpected failure"));
    }
}

std::string bearer_of(const Request& req) {
    const auto h = req.get_header_value("Authorization");
    constexpr std::string_view prefix = "Bearer ";
    if (h.size() <= prefix.size() || std::string_view(h).substr(0, prefix.size()) != prefix) {
        throw Error(ErrorCode::Unauthenticated, "missing bearer token");
    }
    return h.substr(prefix.size());
}

std::optional<std::string> idempotency_key(const Request& req) {
    if (!req.has_header("Idempotency-Key")) return std::nullopt;
    auto key = req.get_header_value("Idempotency-Key");
    if (key.empty() || key.size() > 200) throw Error(ErrorCode::BadRequest, "Idempotency-Key must be 1-200 bytes");
    return key;
}

std::size_t declared_length(const Request& req) {
    if (!req.has_header("Content-Length")) return 0;
    const auto v = req.get_header_value("Content-Length");
    std::size_t n = 0;
    std::from_chars(v.data(), v.data() + v.size(), n);
    return n;
}

/// Reads a non-multipart body, refusing more than `limit` bytes.
std::string read_body(const Request& req, const ContentReader& reader, std::size_t limit) {
    if (declared_length(req) > limit) throw Error(ErrorCode::TooLarge, "request body exceeds " + std::to_string(limit));
    std::string body;
    bool too_large = false;
    const bool ok = reader([&](const char* data, std::size_t n) {
        if (body.size() + n > limit) {
            too_large = true;
            return false;
        }
        body.append(data, n);
        return true;
    });
    if (too_large) throw Error(ErrorCode::TooLarge, "request body exceeds " + std::to_string(limit));
    if (!ok) throw Error(ErrorCode::BadRequest, "incomplete request body");
    return body;
}

std::string media_type(std::string_view content_type) {
    auto v = content_type.substr(0, content_type.find(';'));
    while (!v.empty() && v.back() == ' ') v.remove_suffix(1);
    std::string out(v);
    for (auto& ch : out) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    return out;
}

std::string video_ext_for(std::string_view content_type) {
    const auto t = media_type(content_type);
    if (t == "video/webm") return ".webm";
    if (t == "video/mp4") return ".mp4";
    throw Error(ErrorCode::BadMediaType, "media type must be video/webm or video/mp4, got '" + t + "'");
}

template <typename T>
std::optional<T> optional_enum(const Json& j, const char* field) {
    if (!j.contains(field) || j[field].is_null()) return std::nullopt;
    return enum_field<T>(j, field);
}

Json state_json(LifecycleState s) { return {{"state", to_string(s)}}; }

Json report_json(const IngestReport& r) {
    Json errors = Json::array();
    for (const auto& e : r.errors) {
        errors.push_back({{"row", e.row_number}, {"code", error_name(e.code)}, {"detail", e.detail}});
    }
    return {{"accepted", r.accepted}, {"duplicates_skipped", r.duplicates_skipped}, {"errors", errors}};
}

Json tracks_json(const std::vector<AnnotationTrack>& tracks) {
    Json out = Json::array();
    for (const auto& t : tracks) {
        Json j = to_json(t);
        j.erase("annotator_id");
        out.push_back(std::move(j));
    }
    return out;
}

RecordingSubmission recording_from_json(const Json& j) {
    RecordingSubmission s;
    s.prompt_id = get_string(j, "prompt_id");
    s.video_key = j.contains("video_key") ? get_string(j, "video_key") : get_string(j, "key");
    if (!j.contains("meta") || j["meta"].is_null()) throw Error(ErrorCode::MissingMeta, "meta is required");
    s.meta = video_meta_from_json(j["meta"]);
    if (!j.contains("trim")) throw Error(ErrorCode::BadRequest, "trim is required");
    s.trim = trim_from_json(j["trim"]);
    if (j.contains("annotation") && !j["annotation"].is_null()) {
        const auto& a = j["annotation"];
        s.annotation = SelfAnnotation{get_opt_string(a, "script"), tracks_from_json(a.at("tracks"))};
    }
    return s;
}

}  // namespace

std::string error_body(const Error& e) {
    Json issues = Json::array();
    for (const auto& i : e.issues()) {
        issues.push_back({{"code", error_name(i.code)}, {"index", i.index}, {"detail", i.detail}});
    }
    return Json{{"error", error_name(e.code())}, {"detail", e.detail()}, {"issues", issues}}.dump();
}

struct HttpServer::Impl {
    explicit Impl(Application& a) : app(a) { routes(); }

    Application& app;
    httplib::Server server;
    std::atomic<bool> bound{false};

    UserProfile user_of(const Request& req) { return app.auth().current_user(bearer_of(req)); }

    static void require(const UserProfile& u, Role r) {
        if (!u.roles.has(r)) throw Error(ErrorCode::Role, "requires the " + std::string(to_string(r)) + " role");
    }

    /// Replays a stored response for a repeated Idempotency-Key, otherwise
    /// runs `handle` and stores a successful response under the key.
    template <typename F>
    void replayable(const Request& req, Response& res, const UserProfile& user, F&& handle) {
        const auto key = idempotency_key(req);
        const auto scope = user.id + " " + req.method + " " + req.path;
        if (key) {
            const auto prior = app.db().read([&](Connection& c) { return repo::find_replay(c, scope, *key); });
            if (prior) {
                res.status = prior->status;
                res.set_content(prior->body, prior->content_type);
                res.set_header("Idempotent-Replayed", "true");
                return;
            }
        }
        handle(key);
        if (key && res.status >= 200 && res.status < 300) {
            repo::ReplayedResponse stored{res.status, res.get_header_value("Content-Type"), res.body};
            app.db().write([&](Connection& c) {
                if (!repo::find_replay(c, scope, *key)) repo::save_replay(c, scope, *key, stored, app.clock()());
            });
        }
    }

    template <typename F>
    static httplib::Server::Handler plain(F f) {
        return [f](const Request& req, Response& res) {
            try {
                f(req, res);
            } catch (...) {
                send_current_exception(res);
            }
        };
    }

    template <typename F>
    static httplib::Server::HandlerWithContentReader reading(F f) {
        return [f](const Request& req, Response& res, const ContentReader& reader) {
            try {
                f(req, res, reader);
            } catch (...) {
                send_current_exception(res);
            }
        };
    }

    void routes() {
        const std::string p = kApiPrefix;
        const std::string id = "([0-9a-f]{1,64})";

        server.Get(p + "/health", plain([](const Request&, Response& res) { send_json(res, 200, {{"ok", true}}); }));

        server.Post(p + "/users", reading([this](const Request& req, Response& res, const ContentReader& r) {
            const auto j = parse_json_object(read_body(req, r, kMaxJsonBody));
            NewUser u;
            u.username = get_string(j, "username");
            u.password = get_string(j, "password");
            u.selected_language = get_string(j, "selected_language");
            u.gender = optional_enum<Gender>(j, "gender");
            if (auto age = get_opt_int(j, "age")) u.age = static_cast<int>(*age);
            u.locality = get_opt_string(j, "locality");
            send_json(res, 201, to_json(app.auth().register_user(u)));
        }));

        server.Post(p + "/sessions", reading([this](const Request& req, Response& res, const ContentReader& r) {
            const auto j = parse_json_object(read_body(req, r, kMaxJsonBody));
            const auto s = app.auth().login(get_string(j, "username"), get_string(j, "password"));
            send_json(res, 201, {{"token", s.token}, {"expires_at_ms", s.expires_at_ms}, {"user", to_json(s.user)}});
        }));

        server.Get(p + "/users/me", plain([this](const Request& req, Response& res) {
            send_json(res, 200, to_json(user_of(req)));
        }));

        server.Patch(p + "/users/me", reading([this](const Request& req, Response& res, const ContentReader& r) {
            auto user = user_of(req);
            const auto body = read_body(req, r, kMaxJsonBody);
            replayable(req, res, user, [&](const auto&) {
                const auto j = parse_json_object(body);
                if (j.contains("selected_language")) {
                    user.selected_language = get_string(j, "selected_language");
                    app.auth().check_language(user.selected_language);
                }
                if (j.contains("gender")) user.gender = optional_enum<Gender>(j, "gender");
                if (j.contains("age")) {
                    const auto age = get_opt_int(j, "age");
                    user.age = age ? std::optional<int>(static_cast<int>(*age)) : std::nullopt;
                    check_age(user.age);
                }
                if (j.contains("locality")) user.locality = get_opt_string(j, "locality");
                app.db().write([&](Connection& c) { repo::update_user(c, user); });
                send_json(res, 200, to_json(user));
            });
        }));

        server.Post(p + "/prompts", reading([this](const Request& req, Response& res, const ContentReader& r) {
            const auto user = user_of(req);
            require(user, Role::Admin);
            const auto body = read_body(req, r, app.config().csv_max_bytes);
            replayable(req, res, user, [&](const auto&) { send_json(res, 200, report_json(app.ingest_csv(body))); });
        }));

        server.Get(p + "/tasks/([a-z-]+)", plain([this](const Request& req, Response& res) {
            const auto user = user_of(req);
            const auto kind = enum_from_string<TaskKind>(req.matches[1].str());
            if (!kind) throw Error(ErrorCode::NotFound, "unknown task kind " + req.matches[1].str());
            std::optional<std::uint64_t> seed;
            if (req.has_param("seed")) {
                const auto v = req.get_param_value("seed");
                std::uint64_t s = 0;
                const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), s);
                if (ec != std::errc{} || ptr != v.data() + v.size()) throw Error(ErrorCode::BadRequest, "bad seed");
                seed = s;
            }
            const auto task = app.assigner().next_task(user, *kind, seed);
            if (!task) {
                res.status = 204;
                return;
            }
            Json j{{"kind", to_string(task->kind)},
                   {"prompt", to_json(task->prompt)},
                   {"issued_at_ms", task->issued_at_ms},
                   {"lease_ttl_s", task->lease_ttl_s}};
            if (task->recording) {
                j["recording"] = to_json(*task->recording);
                if (task->kind == TaskKind::ValidateAnnotation) {
                    j["tracks"] = tracks_json(app.engine().tracks(task->recording->id));
                }
            }
            send_json(res, 200, j);
        }));

        server.Post(p + "/videos", reading([this](const Request& req, Response& res, const ContentReader& r) {
            const auto user = user_of(req);
            require(user, Role::Contributor);
            replayable(req, res, user, [&](const auto&) { upload(req, res, r); });
        }));

        server.Post(p + "/recordings", reading([this](const Request& req, Response& res, const ContentReader& r) {
            const auto user = user_of(req);
            const auto body = read_body(req, r, kMaxJsonBody);
            replayable(req, res, user, [&](const std::optional<std::string>& key) {
                const auto rec = app.engine().submit_recording(user, recording_from_json(parse_json_object(body)), key);
                send_json(res, 201, to_json(rec));
            });
        }));

        server.Get(p + "/recordings/" + id, plain([this](const Request& req, Response& res) {
            user_of(req);
            const auto rec = app.engine().recording(req.matches[1].str());
            auto j = to_json(rec);
            j["tracks"] = tracks_json(app.engine().tracks(rec.id));
            send_json(res, 200, j);
        }));

        server.Post(p + "/recordings/" + id + "/validation",
                    reading([this](const Request& req, Response& res, const ContentReader& r) {
                        const auto user = user_of(req);
                        const auto body = read_body(req, r, kMaxJsonBody);
                        replayable(req, res, user, [&](const std::optional<std::string>& key) {
                            const auto j = parse_json_object(body);
                            VideoValidation v;
                            v.recording_id = req.matches[1].str();
                            v.verdict = enum_field<VideoVerdict>(j, "verdict");
                            if (j.contains("corrections") && !j["corrections"].is_null()) {
                                v.corrections = corrections_from_json(j["corrections"]);
                            }
                            send_json(res, 200, state_json(app.engine().submit_video_validation(user, v, key)));
                        });
                    }));

        server.Post(p + "/recordings/" + id + "/annotation",
                    reading([this](const Request& req, Response& res, const ContentReader& r) {
                        const auto user = user_of(req);
                        const auto body = read_body(req, r, kMaxJsonBody);
                        replayable(req, res, user, [&](const std::optional<std::string>& key) {
                            const auto j = parse_json_object(body);
                            AnnotationSubmission a;
                            a.recording_id = req.matches[1].str();
                            a.script = get_opt_string(j, "script");
                            if (j.contains("tracks")) a.tracks = tracks_from_json(j["tracks"]);
                            send_json(res, 200, state_json(app.engine().submit_annotation(user, a, key)));
                        });
                    }));

        server.Post(p + "/recordings/" + id + "/annotation-validation",
                    reading([this](const Request& req, Response& res, const ContentReader& r) {
                        const auto user = user_of(req);
                        const auto body = read_body(req, r, kMaxJsonBody);
                        replayable(req, res, user, [&](const std::optional<std::string>& key) {
                            const auto j = parse_json_object(body);
                            AnnotationValidation av;
                            av.recording_id = req.matches[1].str();
                            av.verdict = enum_field<AnnotationVerdict>(j, "verdict");
                            if (j.contains("tracks") && !j["tracks"].is_null()) {
                                av.corrected_tracks = tracks_from_json(j["tracks"]);
                            }
                            send_json(res, 200,
                                      state_json(app.engine().submit_annotation_validation(user, av, key)));
                        });
                    }));

        server.Post(p + "/recordings/" + id + "/requeue",
                    reading([this](const Request& req, Response& res, const ContentReader& r) {
                        const auto user = user_of(req);
                        read_body(req, r, kMaxJsonBody);
                        replayable(req, res, user, [&](const std::optional<std::string>& key) {
                            send_json(res, 200, state_json(app.engine().requeue(user, req.matches[1].str(), key)));
                        });
                    }));

        server.Post(p + "/recordings/" + id + "/keypoints",
                    reading([this](const Request& req, Response& res, const ContentReader& r) {
                        const auto user = user_of(req);
                        require(user, Role::Admin);
                        const auto body = read_body(req, r, app.store().max_object_bytes());
                        replayable(req, res, user, [&](const auto&) {
                            send_json(res, 200, to_json(app.engine().attach_keypoints(req.matches[1].str(), body)));
                        });
                    }));

        server.Get(p + "/recordings/" + id + "/subtitles.srt", plain([this](const Request& req, Response& res) {
            user_of(req);
            const auto rid = req.matches[1].str();
            std::string srt;
            if (req.has_param("kind")) {
                const auto kind = enum_from_string<TrackKind>(req.get_param_value("kind"));
                if (!kind) throw Error(ErrorCode::BadRequest, "kind must be sentence or gloss");
                srt = app.engine().subtitles(rid, *kind);
            } else {
                const auto tracks = app.engine().tracks(rid);
                if (tracks.empty()) throw Error(ErrorCode::NotFound, "recording has no tracks");
                srt = app.engine().subtitles(rid, tracks.front().kind);
            }
            res.status = 200;
            res.set_content(srt, "application/x-subrip; charset=utf-8");
        }));

        server.Get(p + "/stats", plain([this](const Request& req, Response& res) {
            user_of(req);
            ExportFilter f;
            if (req.has_param("language")) f.language = req.get_param_value("language");
            send_json(res, 200, to_json(app.stats(f)));
        }));
    }

    void upload(const Request& req, Response& res, const ContentReader& reader) {
        const auto cap = app.store().max_object_bytes();
        std::unique_ptr<ObjectWriter> writer;
        std::optional<Error> failure;
        bool into_video = true;
        auto sink = [&](const char* data, std::size_t n) {
            if (!writer || !into_video) return true;
            try {
                writer->write(std::string_view(data, n));
                return true;
            } catch (const Error& e) {
                failure = e;
                writer.reset();
                return false;
            }
        };

        bool ok = false;
        if (req.is_multipart_form_data()) {
            if (declared_length(req) > cap + (std::size_t{1} << 16)) {
                throw Error(ErrorCode::TooLarge, "video exceeds " + std::to_string(cap) + " bytes");
            }
            bool seen = false;
            ok = reader(
                [&](const httplib::MultipartFormData& part) {
                    into_video = !seen && (part.name == "video" || part.name == "file");
                    if (!into_video) return true;
                    seen = true;
                    try {
                        writer = app.store().open_writer(video_ext_for(part.content_type));
                        return true;
                    } catch (const Error& e) {
                        failure = e;
                        return false;
                    }
                },
                sink);
            if (!failure && ok && !seen) throw Error(ErrorCode::BadRequest, "multipart body has no 'video' part");
        } else {
            const auto ext = video_ext_for(req.get_header_value("Content-Type"));
            if (declared_length(req) > cap) {
                throw Error(ErrorCode::TooLarge, "video exceeds " + std::to_string(cap) + " bytes");
            }
            writer = app.store().open_writer(ext);
            ok = reader(sink);
        }
        if (failure) throw *failure;
        if (!ok || !writer) throw Error(ErrorCode::BadRequest, "upload interrupted");
        const auto size = writer->size();
        const auto key = writer->commit();
        send_json(res, 201, {{"key", key.str()}, {"size", size}});
    }
};

HttpServer::HttpServer(Application& app) : impl_(std::make_unique<Impl>(app)) {
    impl_->server.set_payload_max_length(app.store().max_object_bytes() + (std::size_t{1} << 20));
    impl_->server.set_read_timeout(60, 0);
    impl_->server.set_write_timeout(60, 0);
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
    int bound = port;
    if (port == 0) {
        bound = impl_->server.bind_to_any_port(host);
    } else if (!impl_->server.bind_to_port(host, port)) {
        bound = -1;
    }
    if (bound <= 0) throw Error(ErrorCode::Config, "cannot listen on " + host + ":" + std::to_string(port));
    impl_->bound = true;
    return bound;
}

bool HttpServer::serve() { return impl_->server.listen_after_bind(); }

void HttpServer::stop() {
    if (impl_ && impl_->bound) impl_->server.stop();
}

bool HttpServer::running() const { return impl_->server.is_running(); }

}  // namespace signcrowd
