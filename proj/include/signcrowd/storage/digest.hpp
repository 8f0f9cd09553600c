#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>

namespace signcrowd {

using Sha256Digest = std::array<std::uint8_t, 32>;

std::string to_hex(const std::uint8_t* data, std::size_t size);
inline std::string to_hex(const Sha256Digest& d) { return to_hex(d.data(), d.size()); }

/// Incremental SHA-256.
class Sha256 {
public:
    Sha256();
    ~Sha256();
    Sha256(Sha256&&) noexcept;
    Sha256& operator=(Sha256&&) noexcept;

    void update(std::string_view bytes);
    Sha256Digest finish();

private:
    struct State;
    std::unique_ptr<State> state_;
};

Sha256Digest sha256(std::string_view bytes);
std::string sha256_hex(std::string_view bytes);

Sha256Digest hmac_sha256(std::string_view key, std::string_view message);

/// Cryptographically secure random bytes, hex-encoded (2 chars per byte).
std::string random_hex(std::size_t bytes);

bool constant_time_equal(std::string_view a, std::string_view b);

}  // namespace signcrowd
