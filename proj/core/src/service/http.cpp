#include "prefel/service/http.hpp"

#include <httplib.h>

namespace prefel::service {

struct HttpServer::Impl {
  httplib::Server server;
};

HttpServer::HttpServer(Service& service, int threads) : impl_(std::make_unique<Impl>()) {
  const size_t n = static_cast<size_t>(std::max(threads, 1));
  impl_->server.new_task_queue = [n] { return new httplib::ThreadPool(n); };
  auto dispatch = [&service](const httplib::Request& req, httplib::Response& res) {
    const Response r = service.handle(req.method, req.path, req.body);
    res.status = r.status;
    res.set_content(r.body.dump(), "application/json; charset=utf-8");
  };
  impl_->server.Get(".*", dispatch);
  impl_->server.Post(".*", dispatch);
  impl_->server.Put(".*", dispatch);
  impl_->server.Delete(".*", dispatch);
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

}  // namespace prefel::service
