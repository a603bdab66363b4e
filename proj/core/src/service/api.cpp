#include "prefel/service/api.hpp"

#include <random>
#include <sstream>

#include "prefel/service/pro_job.hpp"

namespace prefel::service {

SolvePool::SolvePool(int workers, int capacity) : capacity_(static_cast<size_t>(std::max(capacity, 1))) {
  for (int i = 0; i < std::max(workers, 1); ++i) threads_.emplace_back([this] { loop(); });
}

SolvePool::~SolvePool() {
  {
    std::lock_guard lk(mu_);
    stop_ = true;
  }
  cv_.notify_all();
  for (auto& t : threads_) t.join();
}

std::future<json> SolvePool::submit(std::function<json()> job) {
  std::packaged_task<json()> task(std::move(job));
  auto fut = task.get_future();
  {
    std::lock_guard lk(mu_);
    if (queue_.size() >= capacity_) throw ApiError::conflict("solver queue is full, retry later");
    queue_.push_back(std::move(task));
  }
  cv_.notify_one();
  return fut;
}

void SolvePool::loop() {
  for (;;) {
    std::packaged_task<json()> task;
    {
      std::unique_lock lk(mu_);
      cv_.wait(lk, [this] { return stop_ || !queue_.empty(); });
      if (stop_ && queue_.empty()) return;
      task = std::move(queue_.front());
      queue_.pop_front();
    }
    task();
  }
}

json error_body(const std::string& code, const std::string& message) {
  return {{"error", {{"code", code}, {"message", message}}}};
}

Service::Service(ServiceOptions opts)
    : opts_(std::move(opts)), store_(opts_.store_dir), pool_(opts_.solve_workers, opts_.solve_queue) {}

std::string Service::now() const { return opts_.clock ? opts_.clock() : utc_timestamp(); }

std::string Service::new_id() {
  static thread_local std::mt19937_64 rng{std::random_device{}()};
  for (;;) {
    std::ostringstream os;
    os << std::hex << rng();
    std::string id = os.str();
    id.insert(0, 16 - std::min<size_t>(id.size(), 16), '0');
    if (!store_.exists(id)) return id;
  }
}

std::shared_ptr<Service::Entry> Service::entry(const std::string& id) {
  std::lock_guard lk(map_mu_);
  auto it = entries_.find(id);
  if (it != entries_.end()) return it->second;
  if (!store_.exists(id)) throw ApiError::not_found("unknown session '" + id + "'");
  auto e = std::make_shared<Entry>();
  e->session = store_.load(id);
  entries_.emplace(id, e);
  return e;
}

json Service::create(const json& req) {
  if (!req.is_object()) throw ApiError::invalid("request body must be a JSON object");
  const auto range = req.at("range").get<std::vector<double>>();
  if (range.size() != 2) throw ApiError::invalid("range needs two values");
  std::vector<double> grid;
  if (req.contains("grid") && !req.at("grid").is_null()) grid = req.at("grid").get<std::vector<double>>();
  const std::string mode = req.value("mode", "interactive");
  std::string utility;
  if (mode == "simulated") {
    utility = req.value("utility", "");
    if (utility.empty()) throw ApiError::invalid("simulated mode needs a utility");
  } else if (mode != "interactive") {
    throw ApiError::invalid("mode must be interactive or simulated");
  }
  const SessionConfig cfg = config_from_json(req.value("config", json(nullptr)));
  std::string id = req.value("id", "");
  if (id.empty()) id = new_id();
  if (!SessionStore::valid_id(id)) throw ApiError::invalid("session ids use letters, digits, '-' and '_' only");

  std::lock_guard lk(map_mu_);
  if (store_.exists(id)) throw ApiError::conflict("session '" + id + "' already exists");
  Session s = Session::start(id, range[0], range[1], grid, utility, cfg);
  store_.create(s);
  auto e = std::make_shared<Entry>();
  json out = {{"id", id}, {"grid", s.grid().points()}};
  e->session = std::move(s);
  entries_.emplace(id, e);
  return out;
}

json Service::get(const std::string& id) {
  auto e = entry(id);
  std::lock_guard lk(e->mu);
  return summary_json(*e->session);
}

json Service::band(const std::string& id) {
  auto e = entry(id);
  std::lock_guard lk(e->mu);
  return band_json(*e->session);
}

json Service::query(const std::string& id) {
  auto e = entry(id);
  std::lock_guard lk(e->mu);
  Session& s = *e->session;
  if (!s.pending()) {
    Session next = s;
    try {
      next.next_query(now());
    } catch (const AllDegenerate& ex) {
      throw ApiError::converged(ex.what());
    }
    store_.append(id, query_event(*next.pending()));
    s = std::move(next);
  }
  json out = query_json(*s.pending());
  out["id"] = id;
  out["index"] = s.answered().size() + 1;
  return out;
}

json Service::answer(const std::string& id, const json& req) {
  if (!req.is_object() || !req.contains("choice") || !req.at("choice").is_string())
    throw ApiError::invalid("body must be {\"choice\": \"A\"|\"B\"}");
  const int h = choice_to_h(req.at("choice").get<std::string>());
  auto e = entry(id);
  std::lock_guard lk(e->mu);
  Session& s = *e->session;
  if (!s.pending()) throw ApiError::conflict("session '" + id + "' has no pending query");
  Session next = s;
  next.submit_answer(h, now());
  store_.append(id, answer_event(next.answered().back(), next.history().back()));
  s = std::move(next);
  return summary_json(s);
}

namespace {

std::filesystem::path resolve_inside(const std::filesystem::path& root, const std::string& ref) {
  namespace fs = std::filesystem;
  const fs::path base = fs::weakly_canonical(root);
  const fs::path full = fs::weakly_canonical(base / ref);
  const fs::path rel = full.lexically_relative(base);
  if (rel.empty() || *rel.begin() == "..") throw ApiError::invalid("scenarios_csv_ref must stay inside the data directory");
  return full;
}

}  // namespace

json Service::pro_solve(const json& req) {
  if (!req.is_object()) throw ApiError::invalid("request body must be a JSON object");
  const std::string id = req.at("session_id").get<std::string>();
  ScenarioTable table;
  if (req.contains("scenarios_csv")) {
    table = parse_scenarios(req.at("scenarios_csv").get<std::string>());
  } else if (req.contains("scenarios_csv_ref")) {
    const auto path = resolve_inside(opts_.data_root, req.at("scenarios_csv_ref").get<std::string>());
    if (!std::filesystem::exists(path)) throw ApiError::not_found("no scenario file '" + req.at("scenarios_csv_ref").get<std::string>() + "'");
    table = load_scenarios(path);
  } else {
    throw ApiError::invalid("need scenarios_csv or scenarios_csv_ref");
  }
  ProRequest pr;
  pr.scheme = req.value("scheme", "none");
  pr.param = req.value("parameter", 0.0);
  if (req.contains("mask") && !req.at("mask").is_null()) pr.mask = req.at("mask").get<int>();

  std::optional<Session> snapshot;
  {
    auto e = entry(id);
    std::lock_guard lk(e->mu);
    snapshot = *e->session;
  }
  auto fut = pool_.submit([snap = std::move(*snapshot), table = std::move(table), pr] {
    json out = outcome_json(solve_for_session(snap, table, pr));
    out["session_id"] = snap.id();
    return out;
  });
  json out = fut.get();
  if (out.at("status") != "optimal") throw ApiError::conflict("solver stopped with status " + out.at("status").get<std::string>());
  return out;
}

namespace {

std::vector<std::string> split_path(const std::string& path) {
  std::vector<std::string> parts;
  std::string cur;
  const std::string p = path.substr(0, path.find('?'));
  for (char c : p) {
    if (c == '/') {
      if (!cur.empty()) parts.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) parts.push_back(std::move(cur));
  return parts;
}

json parse_body(const std::string& body) {
  if (body.empty()) return json::object();
  try {
    return json::parse(body);
  } catch (const json::parse_error& e) {
    throw ApiError::invalid(std::string("malformed JSON: ") + e.what());
  }
}

}  // namespace

Response Service::handle(const std::string& method, const std::string& path, const std::string& body) {
  try {
    const auto parts = split_path(path);
    auto need = [&](const char* m) {
      if (method != m) throw ApiError("invalid", 405, "method " + method + " not allowed on " + path);
    };
    if (parts.size() == 1 && parts[0] == "health") {
      need("GET");
      return {200, {{"status", "ok"}}};
    }
    if (!parts.empty() && parts[0] == "sessions") {
      if (parts.size() == 1) {
        if (method == "GET") return {200, {{"sessions", store_.list()}}};
        need("POST");
        return {201, create(parse_body(body))};
      }
      const std::string& id = parts[1];
      if (parts.size() == 2) {
        need("GET");
        return {200, get(id)};
      }
      if (parts.size() == 3 && parts[2] == "query") {
        need("POST");
        return {200, query(id)};
      }
      if (parts.size() == 3 && parts[2] == "answer") {
        need("POST");
        return {200, answer(id, parse_body(body))};
      }
      if (parts.size() == 3 && parts[2] == "band") {
        need("GET");
        return {200, band(id)};
      }
    }
    if (parts.size() == 2 && parts[0] == "pro" && parts[1] == "solve") {
      need("POST");
      return {200, pro_solve(parse_body(body))};
    }
    throw ApiError::not_found("no route for " + method + " " + path);
  } catch (const ApiError& e) {
    return {e.status, error_body(e.code, e.what())};
  } catch (const SessionNotFound& e) {
    return {404, error_body("not_found", e.what())};
  } catch (const SessionConflict& e) {
    return {409, error_body("conflict", e.what())};
  } catch (const AllDegenerate& e) {
    return {409, error_body("converged", e.what())};
  } catch (const json::exception& e) {
    return {400, error_body("invalid", e.what())};
  } catch (const std::invalid_argument& e) {
    return {400, error_body("invalid", e.what())};
  } catch (const std::exception& e) {
    return {500, error_body("internal", e.what())};
  }
}

}  // namespace prefel::service
