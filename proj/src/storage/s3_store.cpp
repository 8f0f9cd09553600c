#include "signcrowd/storage/s3_store.hpp"

#include <httplib.h>

#include <chrono>
#include <ctime>
#include <thread>

#include "signcrowd/error.hpp"

namespace fs = std::filesystem;

namespace signcrowd {

namespace {

const std::string kEmptySha256 = "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855";

std::string hex_of(const Sha256Digest& d) { return to_hex(d); }

std::string hmac_raw(std::string_view key, std::string_view msg) {
    const auto d = hmac_sha256(key, msg);
    return std::string(reinterpret_cast<const char*>(d.data()), d.size());
}

std::string amz_now() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y%m%dT%H%M%SZ", &tm);
    return buf;
}

std::string canonical_query(const std::map<std::string, std::string>& query) {
    std::map<std::string, std::string> encoded;
    for (const auto& [k, v] : query) encoded[s3_uri_encode(k, false)] = s3_uri_encode(v, false);
    std::string out;
    for (const auto& [k, v] : encoded) {
        if (!out.empty()) out += '&';
        out += k + "=" + v;
    }
    return out;
}

// Pulls every <tag>value</tag> out of a flat XML document.
std::vector<std::string> xml_values(const std::string& xml, const std::string& tag) {
    std::vector<std::string> out;
    const auto open = "<" + tag + ">";
    const auto close = "</" + tag + ">";
    std::size_t pos = 0;
    while ((pos = xml.find(open, pos)) != std::string::npos) {
        pos += open.size();
        const auto end = xml.find(close, pos);
        if (end == std::string::npos) break;
        out.push_back(xml.substr(pos, end - pos));
        pos = end + close.size();
    }
    return out;
}

class S3Writer final : public ObjectWriter {
public:
    S3Writer(S3ObjectStore& store, const fs::path& spool, std::string ext, std::size_t max_bytes)
        : ObjectWriter(spool, std::move(ext), max_bytes), store_(store) {}
    ~S3Writer() override = default;

protected:
    void publish(const fs::path& spooled, const ObjectKey& key) override {
        if (store_.exists(key)) return;
        store_.upload_file(spooled, key, std::string(key.digest()));
    }

private:
    S3ObjectStore& store_;
};

}  // namespace

std::string s3_uri_encode(std::string_view text, bool keep_slash) {
    static constexpr char kHex[] = "0123456789ABCDEF";
    std::string out;
    for (unsigned char c : text) {
        const bool unreserved = (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') ||
                                c == '-' || c == '_' || c == '.' || c == '~';
        if (unreserved || (keep_slash && c == '/')) {
            out += static_cast<char>(c);
        } else {
            out += '%';
            out += kHex[c >> 4];
            out += kHex[c & 0xF];
        }
    }
    return out;
}

std::string sigv4_authorization(const SigV4Request& request, const S3Credentials& credentials,
                                const std::string& region, const std::string& service,
                                const std::string& amz_date) {
    std::string signed_headers;
    std::string canonical_headers;
    for (const auto& [name, value] : request.headers) {
        if (!signed_headers.empty()) signed_headers += ';';
        signed_headers += name;
        canonical_headers += name + ":" + value + "\n";
    }
    const std::string canonical_request = request.method + "\n" + request.canonical_uri + "\n" +
                                          canonical_query(request.query) + "\n" + canonical_headers +
                                          "\n" + signed_headers + "\n" + request.payload_sha256_hex;

    const auto date = amz_date.substr(0, 8);
    const auto scope = date + "/" + region + "/" + service + "/aws4_request";
    const auto string_to_sign =
        "AWS4-HMAC-SHA256\n" + amz_date + "\n" + scope + "\n" + hex_of(sha256(canonical_request));

    auto key = hmac_raw("AWS4" + credentials.secret, date);
    key = hmac_raw(key, region);
    key = hmac_raw(key, service);
    key = hmac_raw(key, "aws4_request");
    const auto signature = hex_of(hmac_sha256(key, string_to_sign));

    return "AWS4-HMAC-SHA256 Credential=" + credentials.key_id + "/" + scope +
           ",SignedHeaders=" + signed_headers + ",Signature=" + signature;
}

struct S3ObjectStore::Response {
    int status = 0;
    std::string body;
};

S3ObjectStore::S3ObjectStore(S3Config config) : config_(std::move(config)) {
    if (config_.bucket.empty()) throw Error(ErrorCode::Config, "storage.bucket is required");
    if (config_.endpoint.empty()) throw Error(ErrorCode::Config, "storage.endpoint is required");
    if (config_.spool_dir.empty()) config_.spool_dir = fs::temp_directory_path() / "signcrowd-spool";

    std::string rest = config_.endpoint;
    std::string scheme = "http";
    if (auto p = rest.find("://"); p != std::string::npos) {
        scheme = rest.substr(0, p);
        rest = rest.substr(p + 3);
    }
    while (!rest.empty() && rest.back() == '/') rest.pop_back();
    scheme_host_port_ = scheme + "://" + rest;
    auto colon = rest.rfind(':');
    const bool default_port =
        colon == std::string::npos || (scheme == "http" && rest.substr(colon + 1) == "80") ||
        (scheme == "https" && rest.substr(colon + 1) == "443");
    host_header_ = default_port && colon != std::string::npos ? rest.substr(0, colon) : rest;
}

S3ObjectStore::Response S3ObjectStore::send(const std::string& method, const std::string& path,
                                            const std::map<std::string, std::string>& query,
                                            const fs::path* body_file, const std::string& payload_hash,
                                            const fs::path* download_to) {
    const auto canonical_uri = s3_uri_encode(path, true);
    const auto qs = canonical_query(query);
    const auto target = canonical_uri + (qs.empty() ? "" : "?" + qs);

    std::string last_error;
    for (int attempt = 0; attempt < config_.max_attempts; ++attempt) {
        if (attempt > 0) std::this_thread::sleep_for(std::chrono::milliseconds(50 << attempt));

        SigV4Request sig{method, canonical_uri, query, {}, payload_hash};
        const auto amz_date = amz_now();
        sig.headers = {{"host", host_header_}, {"x-amz-content-sha256", payload_hash}, {"x-amz-date", amz_date}};
        httplib::Headers headers{
            {"Host", host_header_},
            {"x-amz-content-sha256", payload_hash},
            {"x-amz-date", amz_date},
            {"Authorization", sigv4_authorization(sig, config_.credentials, config_.region, "s3", amz_date)},
        };

        httplib::Client client(scheme_host_port_);
        client.set_connection_timeout(5);
        client.set_read_timeout(60);
        client.set_write_timeout(60);

        httplib::Result result;
        std::string body;
        if (method == "PUT" && body_file != nullptr) {
            std::error_code ec;
            const auto size = fs::file_size(*body_file, ec);
            if (ec) throw Error(ErrorCode::Backend, "spool file vanished");
            auto in = std::make_shared<std::ifstream>(*body_file, std::ios::binary);
            result = client.Put(
                target, headers, static_cast<std::size_t>(size),
                [in](std::size_t offset, std::size_t length, httplib::DataSink& sink) {
                    std::string buf(std::min<std::size_t>(length, 1 << 16), '\0');
                    in->seekg(static_cast<std::streamoff>(offset));
                    in->read(buf.data(), static_cast<std::streamsize>(buf.size()));
                    const auto got = static_cast<std::size_t>(in->gcount());
                    if (got == 0) return false;
                    return sink.write(buf.data(), got);
                },
                "application/octet-stream");
        } else if (method == "PUT") {
            result = client.Put(target, headers, "", "application/octet-stream");
        } else if (method == "HEAD") {
            result = client.Head(target, headers);
        } else if (download_to != nullptr) {
            std::ofstream out;
            int status = 0;
            result = client.Get(
                target, headers,
                [&](const httplib::Response& res) {
                    status = res.status;
                    if (status == 200) out.open(*download_to, std::ios::binary | std::ios::trunc);
                    return true;
                },
                [&](const char* data, std::size_t len) {
                    if (status == 200) {
                        out.write(data, static_cast<std::streamsize>(len));
                        return static_cast<bool>(out);
                    }
                    body.append(data, len);
                    return true;
                });
        } else {
            result = client.Get(target, headers);
        }

        if (!result) {
            last_error = httplib::to_string(result.error());
            continue;
        }
        if (result->status >= 500) {
            last_error = "HTTP " + std::to_string(result->status);
            continue;
        }
        return {result->status, download_to != nullptr ? std::move(body) : result->body};
    }
    throw Error(ErrorCode::Backend, method + " " + path + " failed: " + last_error);
}

void S3ObjectStore::ensure_bucket() {
    const auto r = send("PUT", "/" + config_.bucket, {}, nullptr, kEmptySha256);
    if (r.status != 200 && r.status != 409) {
        throw Error(ErrorCode::Backend, "cannot create bucket: HTTP " + std::to_string(r.status));
    }
}

void S3ObjectStore::upload_file(const fs::path& file, const ObjectKey& key, const std::string& sha256_hex) {
    const auto r = send("PUT", "/" + config_.bucket + "/" + key.str(), {}, &file, sha256_hex);
    if (r.status != 200) {
        throw Error(ErrorCode::Backend, "PUT " + key.str() + " returned HTTP " + std::to_string(r.status));
    }
}

std::unique_ptr<ObjectWriter> S3ObjectStore::open_writer(std::string_view ext) {
    return std::make_unique<S3Writer>(*this, config_.spool_dir, std::string(ext), config_.max_bytes);
}

std::string S3ObjectStore::get_object(const ObjectKey& key) {
    const auto r = send("GET", "/" + config_.bucket + "/" + key.str(), {}, nullptr, kEmptySha256);
    if (r.status == 404) throw Error(ErrorCode::NotFound, key.str());
    if (r.status != 200) throw Error(ErrorCode::Backend, "GET returned HTTP " + std::to_string(r.status));
    return r.body;
}

bool S3ObjectStore::exists(const ObjectKey& key) {
    const auto r = send("HEAD", "/" + config_.bucket + "/" + key.str(), {}, nullptr, kEmptySha256);
    if (r.status == 200) return true;
    if (r.status == 404) return false;
    throw Error(ErrorCode::Backend, "HEAD returned HTTP " + std::to_string(r.status));
}

std::vector<ObjectKey> S3ObjectStore::list() {
    std::vector<ObjectKey> keys;
    std::string token;
    while (true) {
        std::map<std::string, std::string> query{{"list-type", "2"}};
        if (!token.empty()) query["continuation-token"] = token;
        const auto r = send("GET", "/" + config_.bucket, query, nullptr, kEmptySha256);
        if (r.status != 200) throw Error(ErrorCode::Backend, "LIST returned HTTP " + std::to_string(r.status));
        for (const auto& k : xml_values(r.body, "Key")) {
            try {
                keys.push_back(ObjectKey::parse(k));
            } catch (const Error&) {
                // not one of ours
            }
        }
        const auto truncated = xml_values(r.body, "IsTruncated");
        const auto next = xml_values(r.body, "NextContinuationToken");
        if (truncated.empty() || truncated.front() != "true" || next.empty()) break;
        token = next.front();
    }
    std::sort(keys.begin(), keys.end());
    return keys;
}

void S3ObjectStore::copy_to_file(const ObjectKey& key, const fs::path& dest) {
    const auto partial = fs::path(dest.string() + ".part");
    std::error_code ec;
    if (dest.has_parent_path()) fs::create_directories(dest.parent_path(), ec);
    const auto r = send("GET", "/" + config_.bucket + "/" + key.str(), {}, nullptr, kEmptySha256, &partial);
    if (r.status != 200) {
        fs::remove(partial, ec);
        if (r.status == 404) throw Error(ErrorCode::NotFound, key.str());
        throw Error(ErrorCode::Backend, "GET returned HTTP " + std::to_string(r.status));
    }
    ec.clear();
    fs::rename(partial, dest, ec);
    if (ec) throw Error(ErrorCode::Io, "cannot write " + dest.string());
}

}  // namespace signcrowd
