#pragma once

#include <optional>
#include <string>

#include "signcrowd/core/lifecycle.hpp"
#include "signcrowd/core/types.hpp"

namespace signcrowd {

struct Recording {
    std::string id;
    std::string prompt_id;
    std::string signer_id;
    std::string video_key;
    VideoMeta meta;
    TrimWindow trim;
    LifecycleState state = LifecycleState::PendingVideoValidation;
    std::optional<std::string> script;  // Topic prompts, once annotation has begun
    std::optional<std::string> annotator_id;
    std::optional<std::string> keypoints_key;
    int video_round = 0;  // bumped on every Requeue
    Millis created_at_ms = 0;

    bool operator==(const Recording&) const = default;
};

}  // namespace signcrowd
