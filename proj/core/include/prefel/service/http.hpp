#pragma once

#include <memory>
#include <string>

#include "prefel/service/api.hpp"

namespace prefel::service {

// HTTP/JSON front end over a Service.
class HttpServer {
 public:
  explicit HttpServer(Service& service, int threads = 8);
  ~HttpServer();

  // Port 0 picks a free port. Returns the bound port or -1.
  int bind(const std::string& host, int port);
  // Blocks until stop().
  bool listen();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace prefel::service
