#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "signcrowd/core/types.hpp"

namespace signcrowd {

struct Keypoint {
    double x = 0;
    double y = 0;
    double confidence = 0;

    bool operator==(const Keypoint&) const = default;
};

enum class KeypointGroup { Body, Face, LeftHand, RightHand };

template <>
struct EnumNames<KeypointGroup> {
    static constexpr std::array names{
        std::pair{KeypointGroup::Body, std::string_view{"body"}},
        std::pair{KeypointGroup::Face, std::string_view{"face"}},
        std::pair{KeypointGroup::LeftHand, std::string_view{"left_hand"}},
        std::pair{KeypointGroup::RightHand, std::string_view{"right_hand"}},
    };
};

struct KeypointFrame {
    std::int64_t frame_index = 0;
    std::array<std::vector<Keypoint>, 4> groups;  // indexed by KeypointGroup

    bool operator==(const KeypointFrame&) const = default;
};

/// One JSON object per line:
/// {"frame_index":0,"body":[[x,y,c],...],"face":[...],"left_hand":[...],"right_hand":[...]}
/// Frame indices start at 0 and strictly increase; each group keeps the same
/// arity in every frame; confidences lie in [0, 1].
/// Throws E_SIDECAR_SYNTAX naming the offending line.
std::vector<KeypointFrame> parse_keypoint_sidecar(std::string_view jsonl);

std::string serialize_keypoint_sidecar(const std::vector<KeypointFrame>& frames);

/// floor(trimmed_ms * fps / 1000) with exact rational arithmetic.
std::int64_t expected_frame_count(Millis trimmed_ms, const FrameRate& fps);

inline constexpr std::int64_t kFrameTolerance = 1;

/// Throws E_FRAME_MISMATCH (reporting expected and actual) unless
/// |frames - expected_frame_count| <= tolerance and frames > 0.
void check_frame_alignment(std::int64_t frames, Millis trimmed_ms, const FrameRate& fps,
                           std::int64_t tolerance = kFrameTolerance);

}  // namespace signcrowd
