#pragma once

#include <array>
#include <optional>
#include <string_view>
#include <utility>

namespace signcrowd {

// Specialize with `static constexpr std::array<std::pair<E, std::string_view>, N> names`.
template <typename E>
struct EnumNames;

template <typename E>
constexpr std::string_view to_string(E value) {
    for (const auto& [v, name] : EnumNames<E>::names) {
        if (v == value) return name;
    }
    return "?";
}

template <typename E>
constexpr std::optional<E> enum_from_string(std::string_view text) {
    for (const auto& [v, name] : EnumNames<E>::names) {
        if (name == text) return v;
    }
    return std::nullopt;
}

template <typename E>
constexpr auto all_values() {
    std::array<E, EnumNames<E>::names.size()> out{};
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = EnumNames<E>::names[i].first;
    return out;
}

}  // namespace signcrowd
