#pragma once

#include <span>

#include "signcrowd/core/enum_names.hpp"

namespace signcrowd {

enum class LifecycleState {
    PendingVideoValidation,
    VideoRejected,
    PendingAnnotation,
    PendingAnnotationValidation,
    AnnotationValidated,
};

template <>
struct EnumNames<LifecycleState> {
    static constexpr std::array names{
        std::pair{LifecycleState::PendingVideoValidation, std::string_view{"PendingVideoValidation"}},
        std::pair{LifecycleState::VideoRejected, std::string_view{"VideoRejected"}},
        std::pair{LifecycleState::PendingAnnotation, std::string_view{"PendingAnnotation"}},
        std::pair{LifecycleState::PendingAnnotationValidation,
                  std::string_view{"PendingAnnotationValidation"}},
        std::pair{LifecycleState::AnnotationValidated, std::string_view{"AnnotationValidated"}},
    };
};

enum class LifecycleEvent {
    VideoSubmitted,
    VideoVerdictCorrect,
    VideoVerdictIncorrect,
    AnnotationSubmitted,
    AnnotationVerdictAccepted,
    AnnotationVerdictCorrected,
    Requeue,
};

template <>
struct EnumNames<LifecycleEvent> {
    static constexpr std::array names{
        std::pair{LifecycleEvent::VideoSubmitted, std::string_view{"VideoSubmitted"}},
        std::pair{LifecycleEvent::VideoVerdictCorrect, std::string_view{"VideoVerdictCorrect"}},
        std::pair{LifecycleEvent::VideoVerdictIncorrect, std::string_view{"VideoVerdictIncorrect"}},
        std::pair{LifecycleEvent::AnnotationSubmitted, std::string_view{"AnnotationSubmitted"}},
        std::pair{LifecycleEvent::AnnotationVerdictAccepted,
                  std::string_view{"AnnotationVerdictAccepted"}},
        std::pair{LifecycleEvent::AnnotationVerdictCorrected,
                  std::string_view{"AnnotationVerdictCorrected"}},
        std::pair{LifecycleEvent::Requeue, std::string_view{"Requeue"}},
    };
};

/// Successor state for a legal (state, event) pair; throws E_ILLEGAL_TRANSITION otherwise.
///
/// VideoSubmitted is the creation event and has no predecessor state, so it is
/// illegal from every state here; use `initial_state` for it.
LifecycleState transition(LifecycleState state, LifecycleEvent event);

/// State a recording enters on creation. Only VideoSubmitted is a creation event.
LifecycleState initial_state(LifecycleEvent event);

/// Replays an event log (creation event first). Throws E_ILLEGAL_TRANSITION on
/// the first event that does not follow the table.
LifecycleState replay(std::span<const LifecycleEvent> events);

}  // namespace signcrowd
