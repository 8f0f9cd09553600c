#pragma once

#include <memory>
#include <string>

#include "signcrowd/api/app.hpp"

namespace signcrowd {

inline constexpr const char* kApiPrefix = "/api/v1";

/// Largest JSON request body accepted by non-upload endpoints.
inline constexpr std::size_t kMaxJsonBody = std::size_t{16} << 20;

/// JSON error body: {"error": "E_...", "detail": ..., "issues": [...]}.
std::string error_body(const Error& e);

/// The REST front door over an Application.
class HttpServer {
public:
    explicit HttpServer(Application& app);
    ~HttpServer();
    HttpServer(const HttpServer&) = delete;
    HttpServer& operator=(const HttpServer&) = delete;

    /// Binds the listening socket; port 0 picks a free port. Returns the bound port.
    int bind(const std::string& host, int port);
    /// Serves until stop(). Returns false when the socket could not be served.
    bool serve();
    void stop();
    bool running() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace signcrowd
