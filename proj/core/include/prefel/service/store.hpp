#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "prefel/service/session_io.hpp"

namespace prefel::service {

struct SessionNotFound : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// One append-only JSON Lines event log per session under a directory.
// Callers serialize access to a given id.
class SessionStore {
 public:
  explicit SessionStore(std::filesystem::path dir);

  const std::filesystem::path& dir() const { return dir_; }
  static bool valid_id(const std::string& id);
  bool exists(const std::string& id) const;
  std::vector<std::string> list() const;

  // Writes the full event list of a new session. Fails if the id is taken.
  void create(const Session& s);
  // Appends one event and syncs it to disk before returning.
  void append(const std::string& id, const json& event);
  Session load(const std::string& id) const;
  json events(const std::string& id) const;

 private:
  std::filesystem::path path_of(const std::string& id) const;
  std::filesystem::path dir_;
};

}  // namespace prefel::service
