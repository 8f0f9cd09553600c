#include "signcrowd/cli/cli.hpp"

#include <pthread.h>
#include <signal.h>

#include <CLI11.hpp>
#include <thread>

#include "signcrowd/api/app.hpp"
#include "signcrowd/api/http_server.hpp"
#include "signcrowd/core/file_io.hpp"

namespace signcrowd {

namespace {

UserProfile operator_profile() {
    UserProfile u;
    u.id = "operator";
    u.username = "operator";
    u.roles = RoleSet{Role::Admin};
    return u;
}

int serve(Application& app, std::ostream& out) {
    sigset_t signals;
    sigemptyset(&signals);
    sigaddset(&signals, SIGINT);
    sigaddset(&signals, SIGTERM);
    sigaddset(&signals, SIGUSR1);
    pthread_sigmask(SIG_BLOCK, &signals, nullptr);

    HttpServer server(app);
    const auto& cfg = app.config();
    const int port = server.bind(cfg.listen_host, cfg.listen_port);
    out << "listening: " << cfg.listen_host << ":" << port << std::endl;

    std::thread watcher([&] {
        int sig = 0;
        sigwait(&signals, &sig);
        server.stop();
    });
    const bool clean = server.serve();
    pthread_kill(watcher.native_handle(), SIGUSR1);
    watcher.join();
    return clean ? kExitOk : kExitWithErrors;
}

std::optional<Millis> parse_date_ms(const std::string& date, const char* what) {
    if (date.empty()) return std::nullopt;
    std::tm tm{};
    const char* end = strptime(date.c_str(), "%Y-%m-%d", &tm);
    if (end == nullptr || *end != '\0') throw Error(ErrorCode::BadRequest, std::string(what) + " must be YYYY-MM-DD");
    return static_cast<Millis>(timegm(&tm)) * 1000;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App cli{"Sign-language video corpus platform: server and operator commands", "signcrowd"};
    cli.require_subcommand(1);
    std::string config_path;
    cli.add_option("-c,--config", config_path, "Deployment config file")->envname("SIGNCROWD_CONFIG");

    auto* serve_cmd = cli.add_subcommand("serve", "Run the HTTP API");

    auto* ingest_cmd = cli.add_subcommand("ingest", "Register prompts from a CSV file");
    std::string csv_path;
    ingest_cmd->add_option("csv", csv_path, "content,content_type,language file")->required();

    auto* export_cmd = cli.add_subcommand("export", "Write a dataset snapshot");
    std::string out_dir, language, date, from, to;
    export_cmd->add_option("--out", out_dir, "Output directory")->required();
    export_cmd->add_option("--language", language, "Only this language pair");
    export_cmd->add_option("--date", date, "Snapshot name (YYYY-MM-DD), default today");
    export_cmd->add_option("--from", from, "Recordings created on or after this date");
    export_cmd->add_option("--to", to, "Recordings created before this date");

    auto* stats_cmd = cli.add_subcommand("stats", "Print corpus statistics");
    stats_cmd->add_option("--language", language, "Only this language pair");

    auto* user_cmd = cli.add_subcommand("user-add", "Create an account");
    NewUser new_user;
    std::vector<std::string> roles;
    user_cmd->add_option("--username", new_user.username)->required();
    user_cmd->add_option("--password", new_user.password)->required();
    user_cmd->add_option("--language", new_user.selected_language)->required();
    user_cmd->add_option("--role", roles, "contributor, validator, annotator, admin (repeatable)");

    auto* requeue_cmd = cli.add_subcommand("requeue", "Return a rejected recording to validation");
    std::string recording_id;
    requeue_cmd->add_option("recording", recording_id)->required();

    auto* keypoints_cmd = cli.add_subcommand("attach-keypoints", "Attach a keypoint sidecar to a recording");
    std::string sidecar_path;
    keypoints_cmd->add_option("recording", recording_id)->required();
    keypoints_cmd->add_option("sidecar", sidecar_path)->required();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        cli.parse(reversed);
    } catch (const CLI::Success& e) {
        return cli.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        cli.exit(e, out, err);
        return kExitUsage;
    }
    if (config_path.empty()) {
        err << "error: --config (or SIGNCROWD_CONFIG) is required\n";
        return kExitUsage;
    }

    std::unique_ptr<Application> app;
    try {
        app = std::make_unique<Application>(load_config(config_path));
    } catch (const Error& e) {
        err << "config error: " << e.detail() << "\n";
        return kExitUsage;
    }

    try {
        if (*serve_cmd) return serve(*app, out);

        if (*ingest_cmd) {
            std::string bytes;
            try {
                bytes = read_file_bytes(csv_path);
            } catch (const Error& e) {
                err << "error: " << e.detail() << "\n";
                return kExitUsage;
            }
            IngestReport report;
            try {
                report = app->ingest_csv(bytes);
            } catch (const Error& e) {
                if (e.code() != ErrorCode::BadHeader && e.code() != ErrorCode::TooLarge) throw;
                err << "error: " << error_name(e.code()) << " " << e.detail() << "\n";
                return kExitUsage;
            }
            out << format_report(report);
            return report.errors.empty() ? kExitOk : kExitWithErrors;
        }

        if (*export_cmd) {
            if (app->config().pseudonym_secret.empty()) {
                err << "config error: pseudonym_secret: required for export\n";
                return kExitUsage;
            }
            ExportFilter filter;
            if (!language.empty()) filter.language = language;
            filter.from_ms = parse_date_ms(from, "--from");
            filter.to_ms = parse_date_ms(to, "--to");
            const auto report = app->export_snapshot(out_dir, filter, date);
            out << format_export_report(report);
            if (report.empty) err << "warning: E_EMPTY no validated recordings matched\n";
            return kExitOk;
        }

        if (*stats_cmd) {
            ExportFilter filter;
            if (!language.empty()) filter.language = language;
            out << format_stats(app->stats(filter));
            return kExitOk;
        }

        if (*user_cmd) {
            if (!roles.empty()) {
                new_user.roles = RoleSet{};
                for (const auto& r : roles) {
                    const auto role = enum_from_string<Role>(r);
                    if (!role) {
                        err << "error: unknown role '" << r << "'\n";
                        return kExitUsage;
                    }
                    new_user.roles.add(*role);
                }
            }
            const auto user = app->auth().register_user(new_user);
            out << "id: " << user.id << "\n";
            return kExitOk;
        }

        if (*requeue_cmd) {
            const auto state = app->engine().requeue(operator_profile(), recording_id);
            out << "state: " << to_string(state) << "\n";
            return kExitOk;
        }

        if (*keypoints_cmd) {
            const auto r = app->engine().attach_keypoints(recording_id, read_file_bytes(sidecar_path));
            out << "keypoints_key: " << r.keypoints_key.value_or("") << "\n";
            return kExitOk;
        }
    } catch (const Error& e) {
        err << "error: " << error_name(e.code()) << " " << e.detail() << "\n";
        return e.code() == ErrorCode::Config ? kExitUsage : kExitWithErrors;
    }
    return kExitUsage;
}

}  // namespace signcrowd
