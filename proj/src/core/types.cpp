#include "signcrowd/core/types.hpp"

#include <string>

#include "signcrowd/core/lifecycle.hpp"
#include "signcrowd/error.hpp"

namespace signcrowd {

namespace {

bool is_lower(char c) { return c >= 'a' && c <= 'z'; }
bool is_alpha(char c) { return is_lower(c) || (c >= 'A' && c <= 'Z'); }

}  // namespace

bool is_valid_language_code(std::string_view code) {
    const auto dash = code.find('-');
    if (dash == std::string_view::npos) return false;
    const auto spoken = code.substr(0, dash);
    const auto sign = code.substr(dash + 1);
    if (spoken.size() < 2 || spoken.size() > 3) return false;
    if (sign.size() < 2 || sign.size() > 8) return false;
    for (char c : spoken)
        if (!is_lower(c)) return false;
    for (char c : sign)
        if (!is_alpha(c)) return false;
    return true;
}

void check_age(std::optional<int> age) {
    if (age && (*age < kMinAge || *age > kMaxAge)) {
        throw Error(ErrorCode::BadRequest, "age must be within [5, 120]");
    }
}

void check_video_meta(const VideoMeta& meta) {
    if (meta.resolution.width <= 0 || meta.resolution.height <= 0) {
        throw Error(ErrorCode::BadMeta, "resolution must be positive");
    }
    if (meta.duration_ms <= 0) throw Error(ErrorCode::BadMeta, "duration_ms must be positive");
    if (meta.fps.num <= 0 || meta.fps.den <= 0) {
        throw Error(ErrorCode::BadMeta, "fps must be a positive rational");
    }
}

TrimWindow validate_trim(const TrimWindow& trim, Millis duration_ms) {
    if (trim.start_ms >= trim.end_ms) {
        throw Error(ErrorCode::TrimOrder, "start " + std::to_string(trim.start_ms) +
                                              " >= end " + std::to_string(trim.end_ms));
    }
    if (trim.start_ms < 0 || trim.end_ms > duration_ms) {
        throw Error(ErrorCode::TrimBounds, "window [" + std::to_string(trim.start_ms) + ", " +
                                               std::to_string(trim.end_ms) + "] outside [0, " +
                                               std::to_string(duration_ms) + "]");
    }
    return trim;
}

LifecycleState transition(LifecycleState state, LifecycleEvent event) {
    using S = LifecycleState;
    using E = LifecycleEvent;
    switch (state) {
        case S::PendingVideoValidation:
            if (event == E::VideoVerdictCorrect) return S::PendingAnnotation;
            if (event == E::VideoVerdictIncorrect) return S::VideoRejected;
            break;
        case S::PendingAnnotation:
            if (event == E::AnnotationSubmitted) return S::PendingAnnotationValidation;
            break;
        case S::PendingAnnotationValidation:
            if (event == E::AnnotationVerdictAccepted || event == E::AnnotationVerdictCorrected) {
                return S::AnnotationValidated;
            }
            break;
        case S::VideoRejected:
            if (event == E::Requeue) return S::PendingVideoValidation;
            break;
        case S::AnnotationValidated:
            break;
    }
    throw Error(ErrorCode::IllegalTransition,
                std::string(to_string(state)) + " + " + std::string(to_string(event)));
}

LifecycleState initial_state(LifecycleEvent event) {
    if (event != LifecycleEvent::VideoSubmitted) {
        throw Error(ErrorCode::IllegalTransition,
                    "creation event must be VideoSubmitted, got " + std::string(to_string(event)));
    }
    return LifecycleState::PendingVideoValidation;
}

LifecycleState replay(std::span<const LifecycleEvent> events) {
    if (events.empty()) throw Error(ErrorCode::IllegalTransition, "empty event log");
    LifecycleState state = initial_state(events.front());
    for (auto event : events.subspan(1)) state = transition(state, event);
    return state;
}

}  // namespace signcrowd
