#include "signcrowd/api/app.hpp"

namespace signcrowd {

namespace {

DeploymentConfig prepared(DeploymentConfig config) {
    std::error_code ec;
    if (config.database.has_parent_path()) std::filesystem::create_directories(config.database.parent_path(), ec);
    return config;
}

WorkflowOptions with_splitters(WorkflowOptions options, const SentenceSplitters& splitters) {
    options.splitters = &splitters;
    return options;
}

}  // namespace

Database& Application::migrated(Database& db) {
    apply_schema(db);
    return db;
}

Application::Application(DeploymentConfig config, std::unique_ptr<ObjectStore> store, Clock clock)
    : config_(prepared(std::move(config))),
      clock_(std::move(clock)),
      db_(config_.database),
      store_(store ? std::move(store) : open_object_store(config_)),
      engine_(migrated(db_), *store_, with_splitters(config_.workflow, splitters_), clock_),
      assigner_(db_, config_.assignment, clock_),
      auth_(db_, config_.languages, config_.session_ttl_s, clock_) {}

IngestReport Application::ingest_csv(std::string_view bytes) {
    return ingest_prompt_csv(db_, bytes, config_.languages, config_.csv_max_bytes, clock_);
}

ExportReport Application::export_snapshot(const std::filesystem::path& out_dir, const ExportFilter& filter,
                                          std::string date) {
    return signcrowd::export_snapshot(db_, *store_, filter, out_dir,
                                      ExportOptions{config_.pseudonym_secret, std::move(date)});
}

CorpusStats Application::stats(const ExportFilter& filter) { return corpus_stats(db_, filter); }

TrackRules Application::track_rules() const {
    return TrackRules{config_.workflow.free_gloss_labels, &splitters_, {}};
}

}  // namespace signcrowd
