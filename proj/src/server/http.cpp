#include "terra/server/api.hpp"

// After Eigen: resolver headers pulled in by httplib define macros that break it.
#include "httplib.h"

namespace terra::server {

struct HttpServer::Impl {
  httplib::Server server;
};

HttpServer::HttpServer(Api& api) : impl_(std::make_unique<Impl>()) {
  auto forward = [&api](const httplib::Request& req, httplib::Response& res) {
    const Response r = api.handle({req.method, req.path, req.body});
    res.status = r.status;
    res.set_content(r.body, "application/json");
  };
  auto& s = impl_->server;
  s.Get(".*", forward);
  s.Post(".*", forward);
  s.Put(".*", forward);
  s.Delete(".*", forward);
  s.Options(".*", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
  s.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                         {"Access-Control-Allow-Headers", "Content-Type"},
                         {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"}});
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
  if (port == 0) return impl_->server.bind_to_any_port(host);
  return impl_->server.bind_to_port(host, port) ? port : -1;
}

void HttpServer::listen() { impl_->server.listen_after_bind(); }

void HttpServer::stop() {
  if (impl_->server.is_running()) impl_->server.stop();
}

}  // namespace terra::server
