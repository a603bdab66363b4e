#pragma once

#include <condition_variable>
#include <deque>
#include <filesystem>
#include <functional>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "prefel/service/store.hpp"

namespace prefel::service {

// Codes: not_found (404), conflict (409), converged (409), invalid (400).
struct ApiError : std::runtime_error {
  ApiError(std::string code, int status, const std::string& message)
      : std::runtime_error(message), code(std::move(code)), status(status) {}
  std::string code;
  int status;

  static ApiError not_found(const std::string& m) { return {"not_found", 404, m}; }
  static ApiError conflict(const std::string& m) { return {"conflict", 409, m}; }
  static ApiError converged(const std::string& m) { return {"converged", 409, m}; }
  static ApiError invalid(const std::string& m) { return {"invalid", 400, m}; }
};

// Fixed worker threads with a bounded queue; submit() refuses work once
// `capacity` jobs are waiting.
class SolvePool {
 public:
  SolvePool(int workers, int capacity);
  ~SolvePool();
  SolvePool(const SolvePool&) = delete;
  SolvePool& operator=(const SolvePool&) = delete;

  std::future<json> submit(std::function<json()> job);
  int workers() const { return static_cast<int>(threads_.size()); }

 private:
  void loop();
  std::mutex mu_;
  std::condition_variable cv_;
  std::deque<std::packaged_task<json()>> queue_;
  std::vector<std::thread> threads_;
  size_t capacity_;
  bool stop_ = false;
};

struct ServiceOptions {
  std::filesystem::path store_dir = "sessions";
  // scenarios_csv_ref paths resolve inside this directory only.
  std::filesystem::path data_root = ".";
  int solve_workers = 2;
  int solve_queue = 8;
  // Empty means wall-clock UTC; tests pin it for reproducible logs.
  std::function<std::string()> clock;
};

struct Response {
  int status = 200;
  json body;
};

class Service {
 public:
  explicit Service(ServiceOptions opts);

  // Routes one request; never throws.
  Response handle(const std::string& method, const std::string& path, const std::string& body);

  json create(const json& req);
  json get(const std::string& id);
  json query(const std::string& id);
  json answer(const std::string& id, const json& req);
  json band(const std::string& id);
  json pro_solve(const json& req);

  SessionStore& store() { return store_; }

 private:
  struct Entry {
    std::mutex mu;
    std::optional<Session> session;
  };
  std::shared_ptr<Entry> entry(const std::string& id);
  std::string now() const;
  std::string new_id();

  ServiceOptions opts_;
  SessionStore store_;
  std::mutex map_mu_;
  std::map<std::string, std::shared_ptr<Entry>> entries_;
  SolvePool pool_;
};

json error_body(const std::string& code, const std::string& message);

}  // namespace prefel::service
