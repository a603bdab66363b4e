#include "prefel/service/store.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <cstring>
#include <fstream>

namespace prefel::service {

namespace {

void write_all(int fd, const std::string& data, const std::filesystem::path& p) {
  size_t off = 0;
  while (off < data.size()) {
    const ssize_t w = ::write(fd, data.data() + off, data.size() - off);
    if (w < 0) {
      if (errno == EINTR) continue;
      throw std::runtime_error("write " + p.string() + ": " + std::strerror(errno));
    }
    off += static_cast<size_t>(w);
  }
  if (::fsync(fd) != 0) throw std::runtime_error("fsync " + p.string() + ": " + std::strerror(errno));
}

}  // namespace

SessionStore::SessionStore(std::filesystem::path dir) : dir_(std::move(dir)) { std::filesystem::create_directories(dir_); }

bool SessionStore::valid_id(const std::string& id) {
  if (id.empty() || id.size() > 64) return false;
  return std::all_of(id.begin(), id.end(), [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_'; });
}

std::filesystem::path SessionStore::path_of(const std::string& id) const {
  if (!valid_id(id)) throw SessionNotFound("unknown session '" + id + "'");
  return dir_ / (id + ".jsonl");
}

bool SessionStore::exists(const std::string& id) const { return valid_id(id) && std::filesystem::exists(path_of(id)); }

std::vector<std::string> SessionStore::list() const {
  std::vector<std::string> out;
  for (const auto& e : std::filesystem::directory_iterator(dir_))
    if (e.path().extension() == ".jsonl") out.push_back(e.path().stem().string());
  std::sort(out.begin(), out.end());
  return out;
}

void SessionStore::create(const Session& s) {
  const auto p = path_of(s.id());
  std::string data;
  for (const json& e : events_of(s)) data += e.dump() + "\n";
  const int fd = ::open(p.c_str(), O_WRONLY | O_CREAT | O_EXCL, 0644);
  if (fd < 0) throw std::runtime_error("create " + p.string() + ": " + std::strerror(errno));
  try {
    write_all(fd, data, p);
  } catch (...) {
    ::close(fd);
    throw;
  }
  ::close(fd);
}

void SessionStore::append(const std::string& id, const json& event) {
  const auto p = path_of(id);
  const int fd = ::open(p.c_str(), O_WRONLY | O_APPEND);
  if (fd < 0) throw SessionNotFound("unknown session '" + id + "'");
  try {
    write_all(fd, event.dump() + "\n", p);
  } catch (...) {
    ::close(fd);
    throw;
  }
  ::close(fd);
}

json SessionStore::events(const std::string& id) const {
  const auto p = path_of(id);
  std::ifstream in(p);
  if (!in) throw SessionNotFound("unknown session '" + id + "'");
  json ev = json::array();
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      ev.push_back(json::parse(line));
    } catch (const json::exception&) {
      // A torn final line from a crash mid-append is dropped; anything
      // earlier is corruption.
      if (in.peek() == std::char_traits<char>::eof()) break;
      throw std::runtime_error("corrupt event log " + p.string());
    }
  }
  return ev;
}

Session SessionStore::load(const std::string& id) const { return fold_events(events(id)); }

}  // namespace prefel::service
