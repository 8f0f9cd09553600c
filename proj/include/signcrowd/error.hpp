#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace signcrowd {

enum class ErrorCode {
    IllegalTransition,
    TrimOrder,
    TrimBounds,
    BadHeader,
    BadType,
    BadLanguage,
    EmptyContent,
    BadColumnCount,
    UnknownLanguage,
    Store,
    Role,
    NoPrompt,
    LangMismatch,
    MissingMeta,
    BadMeta,
    NoBlob,
    SelfValidation,
    WrongState,
    Stale,
    AlreadyVoted,
    MissingScript,
    ScriptTooShort,
    UnexpectedScript,
    MissingTracks,
    Overlap,
    OutOfTrim,
    Unsorted,
    BadSegment,
    TextMismatch,
    MultiwordGloss,
    InvalidTrack,
    SrtSyntax,
    BadExt,
    BadKey,
    TooLarge,
    NotFound,
    Backend,
    Io,
    Empty,
    FrameMismatch,
    SidecarSyntax,
    Unauthenticated,
    BadMediaType,
    BadRequest,
    Conflict,
    Config,
};

/// Wire name of an error code, e.g. "E_TRIM_ORDER".
std::string_view error_name(ErrorCode code);

/// HTTP status an error maps to at the API boundary.
int http_status(ErrorCode code);

/// One finding from a validator that can report several problems at once.
struct Issue {
    ErrorCode code;
    std::size_t index = 0;  // segment / row the issue refers to
    std::string detail;

    bool operator==(const Issue&) const = default;
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, std::string detail, std::vector<Issue> issues = {});

    ErrorCode code() const noexcept { return code_; }
    const std::string& detail() const noexcept { return detail_; }
    const std::vector<Issue>& issues() const noexcept { return issues_; }

private:
    ErrorCode code_;
    std::string detail_;
    std::vector<Issue> issues_;
};

}  // namespace signcrowd
