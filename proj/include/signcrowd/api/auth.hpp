#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "signcrowd/core/types.hpp"
#include "signcrowd/storage/database.hpp"
#include "signcrowd/storage/repository.hpp"

namespace signcrowd {

inline constexpr int kPasswordIterations = 20000;

/// PBKDF2-HMAC-SHA256, stored as `pbkdf2-sha256$<iterations>$<salt hex>$<hash hex>`.
std::string hash_password(std::string_view password, int iterations = kPasswordIterations);
bool verify_password(std::string_view password, std::string_view stored);

struct NewUser {
    std::string username;
    std::string password;
    std::string selected_language;
    std::optional<Gender> gender;
    std::optional<int> age;
    std::optional<std::string> locality;
    RoleSet roles = RoleSet::crowd();
};

struct IssuedSession {
    std::string token;
    Millis expires_at_ms = 0;
    UserProfile user;
};

/// Accounts and bearer sessions. Tokens carry 256 random bits; only their
/// SHA-256 is stored.
class Auth {
public:
    Auth(Database& db, std::span<const LanguagePair> languages, int session_ttl_s, Clock clock = system_now_ms);

    /// Throws E_BAD_REQUEST on a blank username, short password or bad age,
    /// E_UNKNOWN_LANGUAGE for an unconfigured language, E_CONFLICT for a taken username.
    UserProfile register_user(const NewUser& u);

    /// Throws E_UNAUTHENTICATED on unknown user or wrong password.
    IssuedSession login(std::string_view username, std::string_view password);

    /// Resolves a bearer token to its user id. Throws E_UNAUTHENTICATED.
    std::string authenticate(std::string_view bearer);

    /// authenticate followed by a profile lookup.
    UserProfile current_user(std::string_view bearer);

    void check_language(const std::string& code) const;

private:
    Database& db_;
    std::vector<LanguagePair> languages_;
    int session_ttl_s_;
    Clock clock_;
};

}  // namespace signcrowd
