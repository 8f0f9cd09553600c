#include <doctest.h>

#include <map>

#include "expect.hpp"
#include "signcrowd/cli/config.hpp"
#include "signcrowd/core/file_io.hpp"
#include "temp_dir.hpp"

using namespace signcrowd;
using namespace signcrowd::testing;

namespace {

EnvLookup env_of(std::map<std::string, std::string> vars) {
    return [vars = std::move(vars)](const char* name) -> std::optional<std::string> {
        const auto it = vars.find(name);
        if (it == vars.end()) return std::nullopt;
        return it->second;
    };
}

const EnvLookup kNoEnv = env_of({});

const char* kFull = R"(# deployment
listen = 0.0.0.0:9090
database = data/app.db
storage.backend = local
storage.root = /srv/objects
storage.max_object_bytes = 1048576
language = bn-BdSL | Bangla / Bangladeshi Sign Language
language = en-ASL
topic_sentence_count = 7
quorum = 3   # odd
free_gloss_labels = yes
allow_repeat_recordings = true
assignment_policy = coverage_weighted
lease_ttl_s = 60
session_ttl_s = 3600
csv_max_bytes = 2048
pseudonym_secret = s3cret
)";

std::string config_error(std::string_view text, const EnvLookup& env = kNoEnv) {
    try {
        parse_config(text, "/base", env);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::Config);
        return e.detail();
    }
    return "ok";
}

}  // namespace

TEST_SUITE("config") {

TEST_CASE("every key is parsed") {
    const auto c = parse_config(kFull, "/base", kNoEnv);
    CHECK(c.listen_host == "0.0.0.0");
    CHECK(c.listen_port == 9090);
    CHECK(c.database == std::filesystem::path("/base/data/app.db"));
    CHECK(c.storage_backend == StorageBackend::Local);
    CHECK(c.storage_root == std::filesystem::path("/srv/objects"));
    CHECK(c.max_object_bytes == 1048576);
    CHECK(c.s3.max_bytes == 1048576);
    REQUIRE(c.languages.size() == 2);
    CHECK(c.languages[0] == LanguagePair{"bn-BdSL", "Bangla / Bangladeshi Sign Language"});
    CHECK(c.languages[1] == LanguagePair{"en-ASL", "en-ASL"});
    CHECK(c.workflow.topic_sentence_count == 7);
    CHECK(c.workflow.quorum == 3);
    CHECK(c.workflow.free_gloss_labels);
    CHECK(c.assignment.allow_repeat_recordings);
    CHECK(c.assignment.policy == AssignmentPolicy::CoverageWeighted);
    CHECK(c.assignment.lease_ttl_s == 60);
    CHECK(c.session_ttl_s == 3600);
    CHECK(c.csv_max_bytes == 2048);
    CHECK(c.pseudonym_secret == "s3cret");
}

TEST_CASE("defaults") {
    const auto c = parse_config("language = bn-BdSL\n", "/base", kNoEnv);
    CHECK(c.listen_port == 8080);
    CHECK(c.database == std::filesystem::path("/base/signcrowd.db"));
    CHECK(c.storage_root == std::filesystem::path("/base/objects"));
    CHECK(c.workflow.quorum == 1);
    CHECK(c.workflow.topic_sentence_count == 5);
    CHECK(c.assignment.policy == AssignmentPolicy::Uniform);
    CHECK_FALSE(c.assignment.allow_repeat_recordings);
}

TEST_CASE("errors name the offending key") {
    CHECK(config_error("") .find("language") != std::string::npos);
    CHECK(config_error("language = bn-BdSL\ncolour = blue\n").find("colour") != std::string::npos);
    CHECK(config_error("language = bn-BdSL\njust text\n").find("line 2") != std::string::npos);
    CHECK(config_error("language = bn-BdSL\nquorum = 0\n").find("quorum") != std::string::npos);
    CHECK(config_error("language = bn-BdSL\nquorum = two\n").find("quorum") != std::string::npos);
    CHECK(config_error("language = bn-BdSL\nlisten = 8080\n").find("listen") != std::string::npos);
    CHECK(config_error("language = bn-BdSL\nlisten = h:99999\n").find("listen") != std::string::npos);
    CHECK(config_error("language = bn-BdSL\nfree_gloss_labels = maybe\n").find("free_gloss_labels") !=
          std::string::npos);
    CHECK(config_error("language = bn-BdSL\nstorage.backend = ftp\n").find("storage.backend") != std::string::npos);
    CHECK(config_error("language = bn-BdSL\nassignment_policy = random\n").find("assignment_policy") !=
          std::string::npos);
    CHECK(config_error("language = Bangla\n").find("language") != std::string::npos);
    CHECK(config_error("language = bn-BdSL\nlanguage = bn-BdSL | again\n").find("duplicate") != std::string::npos);
}

TEST_CASE("s3 settings and environment overrides") {
    const std::string s3 = "language = bn-BdSL\nstorage.backend = s3\nstorage.endpoint = http://minio:9000\n";
    CHECK(config_error(s3).find("storage.bucket") != std::string::npos);
    CHECK(config_error("language = bn-BdSL\nstorage.backend = s3\nstorage.bucket = b\n").find("storage.endpoint") !=
          std::string::npos);
    CHECK(config_error(s3, env_of({{"STORE_BUCKET", "videos"}})) == "ok");

    const auto c = parse_config(s3 + "storage.bucket = file-bucket\nstorage.key_id = file-key\nstorage.region = eu-west-1\n",
                                "/base",
                                env_of({{"STORE_ENDPOINT", "http://other:9000"},
                                        {"STORE_BUCKET", "env-bucket"},
                                        {"STORE_KEY_ID", "AKIAENV"},
                                        {"STORE_SECRET", "env-secret"},
                                        {"STORE_REGION", "ap-south-1"}}));
    CHECK(c.storage_backend == StorageBackend::S3);
    CHECK(c.s3.endpoint == "http://other:9000");
    CHECK(c.s3.bucket == "env-bucket");
    CHECK(c.s3.credentials.key_id == "AKIAENV");
    CHECK(c.s3.credentials.secret == "env-secret");
    CHECK(c.s3.region == "ap-south-1");

    const auto file_only = parse_config(s3 + "storage.bucket = file-bucket\nstorage.region = eu-west-1\n", "/base", kNoEnv);
    CHECK(file_only.s3.bucket == "file-bucket");
    CHECK(file_only.s3.region == "eu-west-1");
}

TEST_CASE("loading from disk") {
    TempDir dir;
    write_file_bytes(dir / "site.conf", "language = bn-BdSL\ndatabase = db/x.db\n");
    const auto c = load_config(dir / "site.conf", kNoEnv);
    CHECK(c.database == dir / "db/x.db");
    CHECK(name_of(error_of([&] { load_config(dir / "missing.conf", kNoEnv); })) == "E_CONFIG");
    const auto store = open_object_store(c);
    CHECK(store->list().empty());
}

}
