#include "signcrowd/api/auth.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <charconv>

#include "signcrowd/storage/digest.hpp"

namespace signcrowd {

namespace {

std::optional<std::string> from_hex(std::string_view hex) {
    if (hex.size() % 2 != 0) return std::nullopt;
    std::string out(hex.size() / 2, '\0');
    for (std::size_t i = 0; i < out.size(); ++i) {
        unsigned v = 0;
        const auto [p, ec] = std::from_chars(hex.data() + 2 * i, hex.data() + 2 * i + 2, v, 16);
        if (ec != std::errc{} || p != hex.data() + 2 * i + 2) return std::nullopt;
        out[i] = static_cast<char>(v);
    }
    return out;
}

std::string pbkdf2_hex(std::string_view password, std::string_view salt, int iterations) {
    unsigned char out[32];
    if (PKCS5_PBKDF2_HMAC(password.data(), static_cast<int>(password.size()),
                          reinterpret_cast<const unsigned char*>(salt.data()), static_cast<int>(salt.size()),
                          iterations, EVP_sha256(), sizeof out, out) != 1) {
        throw Error(ErrorCode::Store, "PBKDF2 failed");
    }
    return to_hex(out, sizeof out);
}

[[noreturn]] void unauthenticated() { throw Error(ErrorCode::Unauthenticated, "invalid or expired credentials"); }

}  // namespace

std::string hash_password(std::string_view password, int iterations) {
    const auto salt = random_hex(16);
    return "pbkdf2-sha256$" + std::to_string(iterations) + "$" + salt + "$" +
           pbkdf2_hex(password, *from_hex(salt), iterations);
}

bool verify_password(std::string_view password, std::string_view stored) {
    std::vector<std::string_view> parts;
    std::size_t pos = 0;
    while (true) {
        const auto next = stored.find('$', pos);
        parts.push_back(stored.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos));
        if (next == std::string_view::npos) break;
        pos = next + 1;
    }
    if (parts.size() != 4 || parts[0] != "pbkdf2-sha256") return false;
    int iterations = 0;
    const auto [p, ec] = std::from_chars(parts[1].data(), parts[1].data() + parts[1].size(), iterations);
    if (ec != std::errc{} || iterations <= 0) return false;
    const auto salt = from_hex(parts[2]);
    if (!salt) return false;
    return constant_time_equal(pbkdf2_hex(password, *salt, iterations), parts[3]);
}

Auth::Auth(Database& db, std::span<const LanguagePair> languages, int session_ttl_s, Clock clock)
    : db_(db), languages_(languages.begin(), languages.end()), session_ttl_s_(session_ttl_s), clock_(std::move(clock)) {}

void Auth::check_language(const std::string& code) const {
    if (std::none_of(languages_.begin(), languages_.end(), [&](const LanguagePair& l) { return l.code == code; })) {
        throw Error(ErrorCode::UnknownLanguage, "language '" + code + "' is not configured");
    }
}

UserProfile Auth::register_user(const NewUser& u) {
    if (u.username.empty() || u.username.size() > 64 ||
        u.username.find_first_of(" \t\r\n") != std::string::npos) {
        throw Error(ErrorCode::BadRequest, "username must be 1-64 characters without whitespace");
    }
    if (u.password.size() < 8) throw Error(ErrorCode::BadRequest, "password must have at least 8 characters");
    check_language(u.selected_language);
    check_age(u.age);

    UserProfile profile{new_id(), u.username, u.selected_language, u.gender, u.age, u.locality, u.roles};
    const auto hash = hash_password(u.password);
    db_.write([&](Connection& c) { repo::insert_user(c, profile, hash, clock_()); });
    return profile;
}

IssuedSession Auth::login(std::string_view username, std::string_view password) {
    const auto found = db_.read([&](Connection& c) { return repo::find_login(c, std::string(username)); });
    if (!found) {
        // Same work as a real check so timing does not reveal unknown usernames.
        verify_password(password, "pbkdf2-sha256$" + std::to_string(kPasswordIterations) + "$00$00");
        unauthenticated();
    }
    if (!verify_password(password, found->second)) unauthenticated();

    IssuedSession s;
    s.token = random_hex(32);
    s.expires_at_ms = clock_() + static_cast<Millis>(session_ttl_s_) * 1000;
    s.user = found->first;
    db_.write([&](Connection& c) { repo::insert_session(c, Session{sha256_hex(s.token), s.user.id, s.expires_at_ms}); });
    return s;
}

std::string Auth::authenticate(std::string_view bearer) {
    if (bearer.size() != 64) unauthenticated();
    const auto hash = sha256_hex(bearer);
    const auto session = db_.read([&](Connection& c) { return repo::find_session(c, hash); });
    if (!session || !constant_time_equal(session->token_hash, hash)) unauthenticated();
    if (session->expires_at_ms <= clock_()) unauthenticated();
    return session->user_id;
}

UserProfile Auth::current_user(std::string_view bearer) {
    const auto id = authenticate(bearer);
    auto user = db_.read([&](Connection& c) { return repo::find_user(c, id); });
    if (!user) unauthenticated();
    return *user;
}

}  // namespace signcrowd
