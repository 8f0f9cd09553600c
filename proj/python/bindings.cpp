#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "signcrowd/annotation/srt.hpp"
#include "signcrowd/api/app.hpp"
#include "signcrowd/cli/cli.hpp"
#include "signcrowd/core/json_codec.hpp"
#include "signcrowd/core/lifecycle.hpp"
#include "signcrowd/exporting/keypoints.hpp"
#include "signcrowd/exporting/manifest.hpp"
#include "signcrowd/exporting/stats.hpp"
#include "signcrowd/storage/object_store.hpp"

namespace py = pybind11;
using namespace signcrowd;

namespace {

template <typename E>
E parse_enum(const std::string& text, const char* what) {
    const auto v = enum_from_string<E>(text);
    if (!v) throw Error(ErrorCode::BadRequest, std::string("unknown ") + what + " '" + text + "'");
    return *v;
}

std::string segments_json(const std::vector<Segment>& segments) {
    Json out = Json::array();
    for (const auto& s : segments) out.push_back(to_json(s));
    return out.dump();
}

Json ingest_json(const IngestReport& r) {
    Json errors = Json::array();
    for (const auto& e : r.errors) {
        errors.push_back({{"row", e.row_number}, {"code", error_name(e.code)}, {"detail", e.detail}});
    }
    return {{"accepted", r.accepted}, {"duplicates_skipped", r.duplicates_skipped}, {"errors", errors}};
}

Json export_json(const ExportReport& r) {
    Json states = Json::object();
    for (const auto& [state, n] : r.state_counts) states[std::string(to_string(state))] = n;
    return {{"snapshot_dir", r.snapshot_dir.string()},
            {"exported", r.exported},
            {"state_counts", states},
            {"rejected_excluded", r.rejected_excluded},
            {"empty", r.empty}};
}

ExportFilter filter_of(const std::optional<std::string>& language) {
    ExportFilter f;
    f.language = language;
    return f;
}

/// A deployment opened from its config file, for scripting and notebooks.
class Platform {
public:
    explicit Platform(const std::string& config_path) : app_(load_config(config_path)) {}

    std::string ingest_csv(const std::string& bytes) { return ingest_json(app_.ingest_csv(bytes)).dump(); }

    std::string stats(const std::optional<std::string>& language) {
        return to_json(app_.stats(filter_of(language))).dump();
    }

    std::string export_snapshot(const std::string& out_dir, const std::string& date,
                                const std::optional<std::string>& language) {
        return export_json(app_.export_snapshot(out_dir, filter_of(language), date)).dump();
    }

    std::string register_user(const std::string& username, const std::string& password, const std::string& language,
                              const std::vector<std::string>& roles) {
        NewUser u;
        u.username = username;
        u.password = password;
        u.selected_language = language;
        if (!roles.empty()) {
            u.roles = RoleSet{};
            for (const auto& r : roles) u.roles.add(parse_enum<Role>(r, "role"));
        }
        return to_json(app_.auth().register_user(u)).dump();
    }

    std::string recording(const std::string& id) { return to_json(app_.engine().recording(id)).dump(); }

    std::string requeue(const std::string& id) {
        UserProfile op;
        op.id = op.username = "operator";
        op.roles = RoleSet{Role::Admin};
        return std::string(to_string(app_.engine().requeue(op, id)));
    }

private:
    Application app_;
};

}  // namespace

PYBIND11_MODULE(_signcrowd, m) {
    m.doc() = "Sign-language video corpus platform core";

    static py::exception<Error> error_type(m, "SigncrowdError", PyExc_RuntimeError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            py::list issues;
            for (const auto& i : e.issues()) issues.append(py::make_tuple(error_name(i.code), i.index, i.detail));
            const auto args = py::make_tuple(std::string(error_name(e.code())), e.detail(), issues);
            PyErr_SetObject(error_type.ptr(), args.ptr());
        }
    });

    m.def("states", [] {
        std::vector<std::string> out;
        for (auto s : all_values<LifecycleState>()) out.emplace_back(to_string(s));
        return out;
    });
    m.def("events", [] {
        std::vector<std::string> out;
        for (auto e : all_values<LifecycleEvent>()) out.emplace_back(to_string(e));
        return out;
    });
    m.def("transition", [](const std::string& state, const std::string& event) {
        return std::string(to_string(transition(parse_enum<LifecycleState>(state, "state"),
                                                parse_enum<LifecycleEvent>(event, "event"))));
    });
    m.def("replay", [](const std::vector<std::string>& log) {
        std::vector<LifecycleEvent> events;
        for (const auto& e : log) events.push_back(parse_enum<LifecycleEvent>(e, "event"));
        return std::string(to_string(replay(events)));
    });

    m.def(
        "validate_track",
        [](const std::string& track, Millis start_ms, Millis end_ms, const std::string& reference,
           bool free_gloss_labels) {
            TrackRules rules;
            rules.free_gloss_labels = free_gloss_labels;
            std::vector<py::tuple> out;
            for (const auto& i : validate_track(track_from_json(Json::parse(track)), {start_ms, end_ms}, reference, rules)) {
                out.push_back(py::make_tuple(error_name(i.code), i.index, i.detail));
            }
            return out;
        },
        py::arg("track"), py::arg("start_ms"), py::arg("end_ms"), py::arg("reference"),
        py::arg("free_gloss_labels") = false);
    m.def("render_srt", [](const std::string& track, Millis start_ms, Millis end_ms) {
        return render_srt(track_from_json(Json::parse(track)), {start_ms, end_ms});
    });
    m.def(
        "parse_srt", [](const std::string& text, Millis offset_ms) { return segments_json(parse_srt(text, offset_ms)); },
        py::arg("text"), py::arg("offset_ms") = 0);

    m.def("compute_stats", [](const std::string& manifest) {
        return to_json(compute_stats(read_manifest(manifest))).dump();
    });
    m.def("format_stats", [](const std::string& manifest) { return format_stats(compute_stats(read_manifest(manifest))); });

    m.def("expected_frame_count", [](Millis trimmed_ms, std::int64_t num, std::int64_t den) {
        return expected_frame_count(trimmed_ms, FrameRate{num, den});
    });
    m.def("check_frame_alignment", [](std::int64_t frames, Millis trimmed_ms, std::int64_t num, std::int64_t den) {
        check_frame_alignment(frames, trimmed_ms, FrameRate{num, den});
    });

    m.def("content_key", [](const py::bytes& data, const std::string& ext) {
        return key_for(std::string(data), ext).str();
    });

    m.def("run_cli", [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        int code = 0;
        {
            py::gil_scoped_release release;
            code = run_cli(args, out, err);
        }
        return py::make_tuple(code, out.str(), err.str());
    });

    py::class_<Platform>(m, "Platform")
        .def(py::init<const std::string&>(), py::arg("config_path"))
        .def("ingest_csv", &Platform::ingest_csv)
        .def("stats", &Platform::stats, py::arg("language") = py::none())
        .def("export_snapshot", &Platform::export_snapshot, py::arg("out_dir"), py::arg("date") = "",
             py::arg("language") = py::none())
        .def("register_user", &Platform::register_user, py::arg("username"), py::arg("password"), py::arg("language"),
             py::arg("roles") = std::vector<std::string>{})
        .def("recording", &Platform::recording)
        .def("requeue", &Platform::requeue);
}
