#include "signcrowd/error.hpp"

namespace signcrowd {

std::string_view error_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::IllegalTransition: return "E_ILLEGAL_TRANSITION";
        case ErrorCode::TrimOrder: return "E_TRIM_ORDER";
        case ErrorCode::TrimBounds: return "E_TRIM_BOUNDS";
        case ErrorCode::BadHeader: return "E_BAD_HEADER";
        case ErrorCode::BadType: return "E_BAD_TYPE";
        case ErrorCode::BadLanguage: return "E_BAD_LANGUAGE";
        case ErrorCode::EmptyContent: return "E_EMPTY_CONTENT";
        case ErrorCode::BadColumnCount: return "E_BAD_COLUMN_COUNT";
        case ErrorCode::UnknownLanguage: return "E_UNKNOWN_LANGUAGE";
        case ErrorCode::Store: return "E_STORE";
        case ErrorCode::Role: return "E_ROLE";
        case ErrorCode::NoPrompt: return "E_NO_PROMPT";
        case ErrorCode::LangMismatch: return "E_LANG_MISMATCH";
        case ErrorCode::MissingMeta: return "E_MISSING_META";
        case ErrorCode::BadMeta: return "E_BAD_META";
        case ErrorCode::NoBlob: return "E_NO_BLOB";
        case ErrorCode::SelfValidation: return "E_SELF_VALIDATION";
        case ErrorCode::WrongState: return "E_WRONG_STATE";
        case ErrorCode::Stale: return "E_STALE";
        case ErrorCode::AlreadyVoted: return "E_ALREADY_VOTED";
        case ErrorCode::MissingScript: return "E_MISSING_SCRIPT";
        case ErrorCode::ScriptTooShort: return "E_SCRIPT_TOO_SHORT";
        case ErrorCode::UnexpectedScript: return "E_UNEXPECTED_SCRIPT";
        case ErrorCode::MissingTracks: return "E_MISSING_TRACKS";
        case ErrorCode::Overlap: return "E_OVERLAP";
        case ErrorCode::OutOfTrim: return "E_OUT_OF_TRIM";
        case ErrorCode::Unsorted: return "E_UNSORTED";
        case ErrorCode::BadSegment: return "E_BAD_SEGMENT";
        case ErrorCode::TextMismatch: return "E_TEXT_MISMATCH";
        case ErrorCode::MultiwordGloss: return "E_MULTIWORD_GLOSS";
        case ErrorCode::InvalidTrack: return "E_INVALID_TRACK";
        case ErrorCode::SrtSyntax: return "E_SRT_SYNTAX";
        case ErrorCode::BadExt: return "E_BAD_EXT";
        case ErrorCode::BadKey: return "E_BAD_KEY";
        case ErrorCode::TooLarge: return "E_TOO_LARGE";
        case ErrorCode::NotFound: return "E_NOT_FOUND";
        case ErrorCode::Backend: return "E_BACKEND";
        case ErrorCode::Io: return "E_IO";
        case ErrorCode::Empty: return "E_EMPTY";
        case ErrorCode::FrameMismatch: return "E_FRAME_MISMATCH";
        case ErrorCode::SidecarSyntax: return "E_SIDECAR_SYNTAX";
        case ErrorCode::Unauthenticated: return "E_UNAUTHENTICATED";
        case ErrorCode::BadMediaType: return "E_BAD_MEDIA_TYPE";
        case ErrorCode::BadRequest: return "E_BAD_REQUEST";
        case ErrorCode::Conflict: return "E_CONFLICT";
        case ErrorCode::Config: return "E_CONFIG";
    }
    return "E_UNKNOWN";
}

int http_status(ErrorCode code) {
    switch (code) {
        case ErrorCode::Unauthenticated: return 401;
        case ErrorCode::Role:
        case ErrorCode::SelfValidation: return 403;
        case ErrorCode::NoPrompt:
        case ErrorCode::NotFound: return 404;
        case ErrorCode::WrongState:
        case ErrorCode::Stale:
        case ErrorCode::AlreadyVoted:
        case ErrorCode::Conflict: return 409;
        case ErrorCode::TooLarge: return 413;
        case ErrorCode::BadMediaType: return 415;
        case ErrorCode::BadRequest: return 400;
        case ErrorCode::Backend: return 503;
        case ErrorCode::Store:
        case ErrorCode::Io:
        case ErrorCode::Config: return 500;
        default: return 422;
    }
}

Error::Error(ErrorCode code, std::string detail, std::vector<Issue> issues)
    : std::runtime_error(std::string(error_name(code)) + (detail.empty() ? "" : ": " + detail)),
      code_(code),
      detail_(std::move(detail)),
      issues_(std::move(issues)) {}

}  // namespace signcrowd
