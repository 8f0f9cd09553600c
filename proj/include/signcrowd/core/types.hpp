#pragma once

#include <cstdint>
#include <initializer_list>
#include <optional>
#include <string>
#include <string_view>

#include "signcrowd/core/enum_names.hpp"

namespace signcrowd {

using Millis = std::int64_t;

/// Spoken-language / sign-dialect pairing such as `bn-BdSL`.
struct LanguagePair {
    std::string code;
    std::string display_name;

    bool operator==(const LanguagePair&) const = default;
};

/// True when `code` has the `<spoken>-<sign>` shape: [a-z]{2,3}-[A-Za-z]{2,8}.
bool is_valid_language_code(std::string_view code);

enum class ContentType { Text, Topic };

template <>
struct EnumNames<ContentType> {
    static constexpr std::array names{
        std::pair{ContentType::Text, std::string_view{"text"}},
        std::pair{ContentType::Topic, std::string_view{"topic"}},
    };
};

struct Prompt {
    std::string id;
    std::string content;
    ContentType content_type = ContentType::Text;
    std::string language;

    bool operator==(const Prompt&) const = default;
};

enum class Gender { Female, Male, Other, Undisclosed };

template <>
struct EnumNames<Gender> {
    static constexpr std::array names{
        std::pair{Gender::Female, std::string_view{"female"}},
        std::pair{Gender::Male, std::string_view{"male"}},
        std::pair{Gender::Other, std::string_view{"other"}},
        std::pair{Gender::Undisclosed, std::string_view{"undisclosed"}},
    };
};

enum class Role : unsigned { Contributor = 1, Validator = 2, Annotator = 4, Admin = 8 };

template <>
struct EnumNames<Role> {
    static constexpr std::array names{
        std::pair{Role::Contributor, std::string_view{"contributor"}},
        std::pair{Role::Validator, std::string_view{"validator"}},
        std::pair{Role::Annotator, std::string_view{"annotator"}},
        std::pair{Role::Admin, std::string_view{"admin"}},
    };
};

class RoleSet {
public:
    constexpr RoleSet() = default;
    constexpr explicit RoleSet(unsigned bits) : bits_(bits & 0xFu) {}
    constexpr RoleSet(std::initializer_list<Role> roles) {
        for (Role r : roles) bits_ |= static_cast<unsigned>(r);
    }

    constexpr bool has(Role r) const { return (bits_ & static_cast<unsigned>(r)) != 0; }
    constexpr void add(Role r) { bits_ |= static_cast<unsigned>(r); }
    constexpr unsigned bits() const { return bits_; }

    static constexpr RoleSet crowd() { return {Role::Contributor, Role::Validator, Role::Annotator}; }

    bool operator==(const RoleSet&) const = default;

private:
    unsigned bits_ = 0;
};

inline constexpr int kMinAge = 5;
inline constexpr int kMaxAge = 120;

struct UserProfile {
    std::string id;
    std::string username;
    std::string selected_language;
    std::optional<Gender> gender;
    std::optional<int> age;
    std::optional<std::string> locality;
    RoleSet roles;
};

/// Throws E_BAD_REQUEST when the age is outside [5, 120].
void check_age(std::optional<int> age);

enum class Lighting { Indoor, Outdoor, LowLight, Studio, Other };

template <>
struct EnumNames<Lighting> {
    static constexpr std::array names{
        std::pair{Lighting::Indoor, std::string_view{"indoor"}},
        std::pair{Lighting::Outdoor, std::string_view{"outdoor"}},
        std::pair{Lighting::LowLight, std::string_view{"low_light"}},
        std::pair{Lighting::Studio, std::string_view{"studio"}},
        std::pair{Lighting::Other, std::string_view{"other"}},
    };
};

enum class CameraView { Front, Left, Right, Top, Other };

template <>
struct EnumNames<CameraView> {
    static constexpr std::array names{
        std::pair{CameraView::Front, std::string_view{"front"}},
        std::pair{CameraView::Left, std::string_view{"left"}},
        std::pair{CameraView::Right, std::string_view{"right"}},
        std::pair{CameraView::Top, std::string_view{"top"}},
        std::pair{CameraView::Other, std::string_view{"other"}},
    };
};

struct FrameRate {
    std::int64_t num = 30;
    std::int64_t den = 1;

    bool operator==(const FrameRate&) const = default;
};

struct Resolution {
    int width = 0;
    int height = 0;

    bool operator==(const Resolution&) const = default;
};

struct VideoMeta {
    Lighting lighting = Lighting::Indoor;
    CameraView camera_view = CameraView::Front;
    Resolution resolution;
    Millis duration_ms = 0;
    FrameRate fps;
    std::string container;

    bool operator==(const VideoMeta&) const = default;
};

/// Throws E_BAD_META for non-positive dimensions, duration or frame rate.
void check_video_meta(const VideoMeta& meta);

struct TrimWindow {
    Millis start_ms = 0;
    Millis end_ms = 0;

    Millis length() const { return end_ms - start_ms; }
    bool operator==(const TrimWindow&) const = default;
};

/// Returns `trim` unchanged when 0 <= start < end <= duration_ms.
/// Throws E_TRIM_ORDER for start >= end, E_TRIM_BOUNDS otherwise.
TrimWindow validate_trim(const TrimWindow& trim, Millis duration_ms);

}  // namespace signcrowd
