#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "signcrowd/storage/object_store.hpp"

namespace signcrowd {

struct S3Credentials {
    std::string key_id;
    std::string secret;
};

/// Inputs to an AWS Signature Version 4 calculation.
struct SigV4Request {
    std::string method;
    std::string canonical_uri;                  // already URI-encoded path
    std::map<std::string, std::string> query;   // raw (unencoded) names and values
    std::map<std::string, std::string> headers; // lowercase names, trimmed values; all are signed
    std::string payload_sha256_hex;
};

/// Value for the Authorization header. `amz_date` is `YYYYMMDD'T'HHMMSS'Z'`.
std::string sigv4_authorization(const SigV4Request& request, const S3Credentials& credentials,
                                const std::string& region, const std::string& service,
                                const std::string& amz_date);

/// RFC 3986 encoding as S3 canonicalizes it; '/' kept when `keep_slash`.
std::string s3_uri_encode(std::string_view text, bool keep_slash);

struct S3Config {
    std::string endpoint;  // http://host:port
    std::string bucket;
    std::string region = "us-east-1";
    S3Credentials credentials;
    std::filesystem::path spool_dir;  // empty: system temp directory
    std::size_t max_bytes = kDefaultMaxObjectBytes;
    int max_attempts = 3;
};

/// S3-compatible backend using path-style addressing. Uploads are spooled to
/// local disk while hashing, then sent in a single signed PUT.
class S3ObjectStore final : public ObjectStore {
public:
    explicit S3ObjectStore(S3Config config);

    std::unique_ptr<ObjectWriter> open_writer(std::string_view ext) override;
    std::string get_object(const ObjectKey& key) override;
    bool exists(const ObjectKey& key) override;
    std::vector<ObjectKey> list() override;
    void copy_to_file(const ObjectKey& key, const std::filesystem::path& dest) override;
    std::size_t max_object_bytes() const override { return config_.max_bytes; }

    /// Creates the bucket; an already-existing bucket is not an error.
    void ensure_bucket();
    void upload_file(const std::filesystem::path& file, const ObjectKey& key, const std::string& sha256_hex);

private:
    struct Response;
    Response send(const std::string& method, const std::string& path,
                  const std::map<std::string, std::string>& query,
                  const std::filesystem::path* body_file, const std::string& payload_hash,
                  const std::filesystem::path* download_to = nullptr);

    S3Config config_;
    std::string scheme_host_port_;
    std::string host_header_;
};

}  // namespace signcrowd
