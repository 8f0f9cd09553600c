#include "signcrowd/cli/config.hpp"

#include <charconv>
#include <cstdlib>
#include <set>

#include "signcrowd/core/file_io.hpp"
#include "signcrowd/core/text.hpp"

namespace fs = std::filesystem;

namespace signcrowd {

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

[[noreturn]] void bad(const std::string& key, const std::string& why) {
    throw Error(ErrorCode::Config, key + ": " + why);
}

std::int64_t to_int(const std::string& key, const std::string& v, std::int64_t lo, std::int64_t hi) {
    std::int64_t out = 0;
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || p != v.data() + v.size()) bad(key, "expected an integer, got '" + v + "'");
    if (out < lo || out > hi) bad(key, "value " + v + " out of range");
    return out;
}

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "yes" || v == "1") return true;
    if (v == "false" || v == "no" || v == "0") return false;
    bad(key, "expected true or false, got '" + v + "'");
}

fs::path resolve(const fs::path& base, const std::string& v) {
    fs::path p(v);
    return p.is_absolute() ? p : base / p;
}

}  // namespace

std::optional<std::string> process_env(const char* name) {
    const char* v = std::getenv(name);
    if (v == nullptr) return std::nullopt;
    return std::string(v);
}

DeploymentConfig parse_config(std::string_view text, const fs::path& base_dir, const EnvLookup& env) {
    DeploymentConfig cfg;
    cfg.database = base_dir / cfg.database;
    cfg.storage_root = base_dir / cfg.storage_root;
    std::set<std::string> codes;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        const auto raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        auto line = trim(raw.substr(0, raw.find('#')));
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw Error(ErrorCode::Config, "line " + std::to_string(line_no) + ": expected key = value");
        }
        const auto key = trim(std::string_view(line).substr(0, eq));
        const auto value = trim(std::string_view(line).substr(eq + 1));

        if (key == "listen") {
            const auto colon = value.rfind(':');
            if (colon == std::string::npos) bad(key, "expected host:port");
            cfg.listen_host = value.substr(0, colon);
            cfg.listen_port = static_cast<int>(to_int(key, value.substr(colon + 1), 0, 65535));
        } else if (key == "database") {
            cfg.database = resolve(base_dir, value);
        } else if (key == "storage.backend") {
            const auto b = enum_from_string<StorageBackend>(value);
            if (!b) bad(key, "expected local or s3, got '" + value + "'");
            cfg.storage_backend = *b;
        } else if (key == "storage.root") {
            cfg.storage_root = resolve(base_dir, value);
        } else if (key == "storage.endpoint") {
            cfg.s3.endpoint = value;
        } else if (key == "storage.bucket") {
            cfg.s3.bucket = value;
        } else if (key == "storage.region") {
            cfg.s3.region = value;
        } else if (key == "storage.key_id") {
            cfg.s3.credentials.key_id = value;
        } else if (key == "storage.secret") {
            cfg.s3.credentials.secret = value;
        } else if (key == "storage.max_object_bytes") {
            cfg.max_object_bytes = static_cast<std::size_t>(to_int(key, value, 1, INT64_MAX));
        } else if (key == "language") {
            const auto bar = value.find('|');
            LanguagePair lp{trim(std::string_view(value).substr(0, bar)),
                            bar == std::string::npos ? std::string{} : trim(std::string_view(value).substr(bar + 1))};
            if (!is_valid_language_code(lp.code)) bad(key, "malformed language code '" + lp.code + "'");
            if (!codes.insert(lp.code).second) bad(key, "duplicate language code '" + lp.code + "'");
            if (lp.display_name.empty()) lp.display_name = lp.code;
            cfg.languages.push_back(std::move(lp));
        } else if (key == "topic_sentence_count") {
            cfg.workflow.topic_sentence_count = static_cast<int>(to_int(key, value, 1, 1000));
        } else if (key == "quorum") {
            cfg.workflow.quorum = static_cast<int>(to_int(key, value, 1, 100));
        } else if (key == "free_gloss_labels") {
            cfg.workflow.free_gloss_labels = to_bool(key, value);
        } else if (key == "allow_repeat_recordings") {
            cfg.assignment.allow_repeat_recordings = to_bool(key, value);
        } else if (key == "assignment_policy") {
            const auto p = enum_from_string<AssignmentPolicy>(value);
            if (!p) bad(key, "expected uniform or coverage_weighted, got '" + value + "'");
            cfg.assignment.policy = *p;
        } else if (key == "lease_ttl_s") {
            cfg.assignment.lease_ttl_s = static_cast<int>(to_int(key, value, 1, 86400 * 30));
        } else if (key == "session_ttl_s") {
            cfg.session_ttl_s = static_cast<int>(to_int(key, value, 1, 86400 * 365));
        } else if (key == "csv_max_bytes") {
            cfg.csv_max_bytes = static_cast<std::size_t>(to_int(key, value, 1, INT64_MAX));
        } else if (key == "pseudonym_secret") {
            cfg.pseudonym_secret = value;
        } else {
            throw Error(ErrorCode::Config, "unknown key '" + key + "' on line " + std::to_string(line_no));
        }
    }

    if (auto v = env("STORE_ENDPOINT")) cfg.s3.endpoint = *v;
    if (auto v = env("STORE_BUCKET")) cfg.s3.bucket = *v;
    if (auto v = env("STORE_KEY_ID")) cfg.s3.credentials.key_id = *v;
    if (auto v = env("STORE_SECRET")) cfg.s3.credentials.secret = *v;
    if (auto v = env("STORE_REGION")) cfg.s3.region = *v;
    cfg.s3.max_bytes = cfg.max_object_bytes;

    if (cfg.storage_backend == StorageBackend::S3) {
        if (cfg.s3.endpoint.empty()) bad("storage.endpoint", "required for the s3 backend");
        if (cfg.s3.bucket.empty()) bad("storage.bucket", "required for the s3 backend");
    }
    if (cfg.languages.empty()) bad("language", "at least one language pair must be configured");
    return cfg;
}

DeploymentConfig load_config(const fs::path& path, const EnvLookup& env) {
    std::string text;
    try {
        text = read_file_bytes(path);
    } catch (const Error& e) {
        throw Error(ErrorCode::Config, e.detail());
    }
    return parse_config(text, path.parent_path().empty() ? fs::path(".") : path.parent_path(), env);
}

std::unique_ptr<ObjectStore> open_object_store(const DeploymentConfig& config) {
    if (config.storage_backend == StorageBackend::S3) {
        auto store = std::make_unique<S3ObjectStore>(config.s3);
        store->ensure_bucket();
        return store;
    }
    return std::make_unique<LocalObjectStore>(config.storage_root, config.max_object_bytes);
}

}  // namespace signcrowd
