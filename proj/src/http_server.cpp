#include "synergy/http_server.hpp"

#include <httplib.h>
#include <json.hpp>

namespace synergy {

struct HttpServer::Impl {
    SearchService& service;
    httplib::Server server;

    explicit Impl(SearchService& s) : service(s) {}

    void reply(const httplib::Request& req, httplib::Response& res, const HttpResponse& out) {
        res.status = out.status;
        for (const auto& [k, v] : out.headers) res.set_header(k, v);
        if (const auto origin = service.cors_origin(req.get_header_value("Origin"))) {
            res.set_header("Access-Control-Allow-Origin", *origin);
            res.set_header("Vary", "Origin");
        }
        res.set_content(out.body, out.content_type);
    }
};

HttpServer::HttpServer(SearchService& service) : impl_(std::make_unique<Impl>(service)) {
    auto& srv = impl_->server;
    Impl* impl = impl_.get();

    srv.Get("/api/search", [impl](const httplib::Request& req, httplib::Response& res) {
        std::multimap<std::string, std::string> params(req.params.begin(), req.params.end());
        impl->reply(req, res, impl->service.handle_search(params));
    });
    srv.Get(R"(/api/molecules/([^/]+))", [impl](const httplib::Request& req, httplib::Response& res) {
        impl->reply(req, res, impl->service.handle_molecule(req.matches[1].str()));
    });
    srv.Post("/api/admin/precompute", [impl](const httplib::Request& req, httplib::Response& res) {
        impl->reply(req, res, impl->service.handle_precompute(req.body));
    });
    srv.Get("/api/health", [impl](const httplib::Request& req, httplib::Response& res) {
        impl->reply(req, res, impl->service.handle_health());
    });
    srv.Options(R"(/api/.*)", [impl](const httplib::Request& req, httplib::Response& res) {
        if (const auto origin = impl->service.cors_origin(req.get_header_value("Origin"))) {
            res.set_header("Access-Control-Allow-Origin", *origin);
            res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
            res.set_header("Access-Control-Allow-Headers", "Content-Type");
            res.set_header("Vary", "Origin");
        }
        res.status = 204;
    });
    srv.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
        std::string message = "internal error";
        try {
            std::rethrow_exception(ep);
        } catch (const std::exception& e) {
            message = e.what();
        } catch (...) {
        }
        res.status = 500;
        res.set_content(nlohmann::json{{"error", {{"code", "internal"}, {"message", message}}}}.dump(),
                        "application/json");
    });
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
    if (port == 0) return impl_->server.bind_to_any_port(host);
    return impl_->server.bind_to_port(host, port) ? port : -1;
}

bool HttpServer::listen() { return impl_->server.listen_after_bind(); }

void HttpServer::stop() {
    if (impl_ && impl_->server.is_running()) impl_->server.stop();
}

void HttpServer::wait_until_ready() const { impl_->server.wait_until_ready(); }

}  // namespace synergy
