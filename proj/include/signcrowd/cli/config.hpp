#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "signcrowd/assignment/assignment.hpp"
#include "signcrowd/core/types.hpp"
#include "signcrowd/prompts/prompt_csv.hpp"
#include "signcrowd/storage/object_store.hpp"
#include "signcrowd/storage/s3_store.hpp"
#include "signcrowd/workflow/engine.hpp"

namespace signcrowd {

enum class StorageBackend { Local, S3 };

template <>
struct EnumNames<StorageBackend> {
    static constexpr std::array names{
        std::pair{StorageBackend::Local, std::string_view{"local"}},
        std::pair{StorageBackend::S3, std::string_view{"s3"}},
    };
};

struct DeploymentConfig {
    std::string listen_host = "127.0.0.1";
    int listen_port = 8080;
    std::filesystem::path database = "signcrowd.db";
    StorageBackend storage_backend = StorageBackend::Local;
    std::filesystem::path storage_root = "objects";
    S3Config s3;
    std::size_t max_object_bytes = kDefaultMaxObjectBytes;
    std::vector<LanguagePair> languages;
    WorkflowOptions workflow;
    AssignmentOptions assignment;
    int session_ttl_s = 86400;
    std::size_t csv_max_bytes = kDefaultCsvMaxBytes;
    std::string pseudonym_secret;
};

using EnvLookup = std::function<std::optional<std::string>(const char*)>;

/// Process environment.
std::optional<std::string> process_env(const char* name);

/// `key = value` lines, `#` comments. `language = code | Display name` may repeat.
/// STORE_ENDPOINT, STORE_BUCKET, STORE_KEY_ID, STORE_SECRET and STORE_REGION
/// override the storage.* keys. Relative paths resolve against `base_dir`.
/// Throws E_CONFIG with a message naming the offending key.
DeploymentConfig parse_config(std::string_view text, const std::filesystem::path& base_dir,
                              const EnvLookup& env = process_env);

DeploymentConfig load_config(const std::filesystem::path& path, const EnvLookup& env = process_env);

std::unique_ptr<ObjectStore> open_object_store(const DeploymentConfig& config);

}  // namespace signcrowd
