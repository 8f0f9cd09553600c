#pragma once

#include <memory>

#include "signcrowd/api/auth.hpp"
#include "signcrowd/assignment/assignment.hpp"
#include "signcrowd/cli/config.hpp"
#include "signcrowd/core/text.hpp"
#include "signcrowd/exporting/export.hpp"
#include "signcrowd/prompts/ingest.hpp"
#include "signcrowd/storage/database.hpp"
#include "signcrowd/storage/object_store.hpp"
#include "signcrowd/workflow/engine.hpp"

namespace signcrowd {

/// One deployment: database, object store and the services over them. Shared
/// by the HTTP server and the admin commands.
class Application {
public:
    /// Opens (and migrates) the database. `store` overrides the configured backend.
    explicit Application(DeploymentConfig config, std::unique_ptr<ObjectStore> store = nullptr,
                         Clock clock = system_now_ms);

    IngestReport ingest_csv(std::string_view bytes);
    ExportReport export_snapshot(const std::filesystem::path& out_dir, const ExportFilter& filter = {},
                                 std::string date = {});
    CorpusStats stats(const ExportFilter& filter = {});
    TrackRules track_rules() const;

    const DeploymentConfig& config() const { return config_; }
    Database& db() { return db_; }
    ObjectStore& store() { return *store_; }
    WorkflowEngine& engine() { return engine_; }
    Assigner& assigner() { return assigner_; }
    Auth& auth() { return auth_; }
    const Clock& clock() const { return clock_; }

private:
    static Database& migrated(Database& db);

    DeploymentConfig config_;
    Clock clock_;
    SentenceSplitters splitters_;
    Database db_;
    std::unique_ptr<ObjectStore> store_;
    WorkflowEngine engine_;
    Assigner assigner_;
    Auth auth_;
};

}  // namespace signcrowd
