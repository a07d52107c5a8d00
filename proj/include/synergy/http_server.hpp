#pragma once

#include <memory>
#include <string>

#include "synergy/service.hpp"

namespace synergy {

/// Binds a SearchService to an HTTP/1.1 listener.
///
/// Routes: GET /api/search, GET /api/molecules/{name}, POST /api/admin/precompute, GET /api/health.
/// Bodies never contain absolute URLs, so the server can sit behind a reverse proxy.
class HttpServer {
public:
    explicit HttpServer(SearchService& service);
    ~HttpServer();
    HttpServer(const HttpServer&) = delete;
    HttpServer& operator=(const HttpServer&) = delete;

    /// Returns the bound port (useful with port 0), or -1 on failure.
    int bind(const std::string& host, int port);
    /// Serves until stop(); returns false if the listener fails.
    bool listen();
    void stop();
    /// Blocks until the listener accepts connections.
    void wait_until_ready() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace synergy
