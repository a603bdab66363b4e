#include "prefel/service/session_io.hpp"

#include <ctime>
#include <sstream>
#include <stdexcept>

namespace prefel::service {

namespace {

constexpr const char* kFormat = "prefel-session";
constexpr int kVersion = 1;

json params_json(const QueryParams& q) { return {{"r1", q.r1}, {"r2", q.r2}, {"r3", q.r3}, {"p", q.p}, {"d", q.d}}; }

QueryParams params_from(const json& j) {
  QueryParams q;
  q.r1 = j.at("r1").get<double>();
  q.r2 = j.at("r2").get<double>();
  q.r3 = j.at("r3").get<double>();
  q.p = j.at("p").get<double>();
  q.d = j.value("d", 0.0);
  return q;
}

std::string fmt(double x) {
  std::ostringstream os;
  os << x;
  return os.str();
}

template <class F>
auto wrap(const char* what, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string(what) + ": " + e.what());
  }
}

}  // namespace

int choice_to_h(const std::string& choice) {
  if (choice == "B") return 1;
  if (choice == "A") return -1;
  throw std::invalid_argument("choice must be \"A\" or \"B\"");
}

std::string h_to_choice(int h) { return h > 0 ? "B" : "A"; }

json config_to_json(const SessionConfig& c) {
  return {{"rounding_decimals", c.rounding_decimals},
          {"flexible_grid", c.flexible_grid},
          {"reference_points", c.reference_points},
          {"p_bounds", {c.query.p_bounds.lo, c.query.p_bounds.hi}},
          {"d_grid", c.query.d_grid},
          {"cosine_tie", c.query.cosine_tie}};
}

SessionConfig config_from_json(const json& j) {
  return wrap("config", [&] {
    SessionConfig c;
    if (j.is_null()) return c;
    if (!j.is_object()) throw std::invalid_argument("config must be an object");
    c.rounding_decimals = j.value("rounding_decimals", c.rounding_decimals);
    c.flexible_grid = j.value("flexible_grid", c.flexible_grid);
    c.reference_points = j.value("reference_points", c.reference_points);
    if (j.contains("p_bounds")) {
      const auto pb = j.at("p_bounds").get<std::vector<double>>();
      if (pb.size() != 2) throw std::invalid_argument("p_bounds needs two values");
      c.query.p_bounds = {pb[0], pb[1]};
    }
    if (j.contains("d_grid")) c.query.d_grid = j.at("d_grid").get<std::vector<double>>();
    if (j.contains("budget_steps")) c.query.d_grid = QueryConfig::default_d_grid(j.at("budget_steps").get<int>());
    c.query.cosine_tie = j.value("cosine_tie", c.query.cosine_tie);
    c.validate();
    return c;
  });
}

json metrics_json(const MetricsSnapshot& m) {
  json j = {{"m", m.m}, {"n", m.n}, {"d_r1", m.d_r1}, {"d_r2", m.d_r2}, {"d_r2_ref", m.d_r2_ref}};
  j["d_ac"] = m.d_ac ? json(*m.d_ac) : json(nullptr);
  return j;
}

MetricsSnapshot metrics_from_json(const json& j) {
  MetricsSnapshot m;
  m.m = j.at("m").get<int>();
  m.n = j.at("n").get<int>();
  if (!j.at("d_ac").is_null()) m.d_ac = j.at("d_ac").get<double>();
  m.d_r1 = j.at("d_r1").get<double>();
  m.d_r2 = j.at("d_r2").get<double>();
  m.d_r2_ref = j.at("d_r2_ref").get<double>();
  return m;
}

json created_event(const Session& s) {
  return {{"event", "session_created"},
          {"id", s.id()},
          {"range", {s.lo(), s.hi()}},
          {"initial_grid", s.initial_grid()},
          {"mode", s.simulated() ? "simulated" : "interactive"},
          {"utility", s.utility()},
          {"config", config_to_json(s.config())}};
}

json query_event(const QueryRecord& r) {
  return {{"event", "query_issued"}, {"at", r.issued_at}, {"query", params_json(r.q)}, {"s", r.s}, {"cosine", r.cosine}};
}

json answer_event(const QueryRecord& r, const MetricsSnapshot& m) {
  return {{"event", "answer_recorded"},
          {"at", r.answered_at},
          {"choice", h_to_choice(r.answer.value_or(1))},
          {"metrics", metrics_json(m)}};
}

json events_of(const Session& s) {
  json ev = json::array();
  ev.push_back(created_event(s));
  for (size_t i = 0; i < s.answered().size(); ++i) {
    ev.push_back(query_event(s.answered()[i]));
    ev.push_back(answer_event(s.answered()[i], s.history().at(i)));
  }
  if (s.pending()) ev.push_back(query_event(*s.pending()));
  return ev;
}

Session fold_events(const json& events) {
  return wrap("session events", [&] {
    if (!events.is_array() || events.empty()) throw std::invalid_argument("session has no events");
    const json& h = events.front();
    if (h.at("event") != "session_created") throw std::invalid_argument("first event must be session_created");
    const auto range = h.at("range").get<std::vector<double>>();
    if (range.size() != 2) throw std::invalid_argument("range needs two values");
    std::vector<QueryRecord> answered;
    std::vector<MetricsSnapshot> history;
    std::optional<QueryRecord> pending;
    for (size_t i = 1; i < events.size(); ++i) {
      const json& e = events[i];
      const std::string kind = e.at("event").get<std::string>();
      if (kind == "query_issued") {
        if (pending) throw std::invalid_argument("event " + std::to_string(i) + ": query issued while one is pending");
        QueryRecord r;
        r.q = params_from(e.at("query"));
        r.s = e.value("s", 0);
        r.cosine = e.value("cosine", 0.0);
        r.issued_at = e.value("at", "");
        pending = r;
      } else if (kind == "answer_recorded") {
        if (!pending) throw std::invalid_argument("event " + std::to_string(i) + ": answer without a pending query");
        pending->answer = choice_to_h(e.at("choice").get<std::string>());
        pending->answered_at = e.value("at", "");
        answered.push_back(*pending);
        pending.reset();
        history.push_back(metrics_from_json(e.at("metrics")));
      } else {
        throw std::invalid_argument("event " + std::to_string(i) + ": unknown kind '" + kind + "'");
      }
    }
    return Session::restore(h.at("id").get<std::string>(), range[0], range[1],
                            h.at("initial_grid").get<std::vector<double>>(), h.value("utility", ""),
                            config_from_json(h.at("config")), std::move(answered), std::move(pending),
                            std::move(history));
  });
}

json session_document(const Session& s, std::optional<std::uint64_t> seed) {
  json doc = {{"format", kFormat}, {"version", kVersion}};
  if (seed) doc["seed"] = *seed;
  doc["events"] = events_of(s);
  return doc;
}

Session session_from_document(const json& doc) {
  if (!doc.is_object() || doc.value("format", "") != kFormat) throw std::invalid_argument("not a session document");
  if (doc.value("version", 0) != kVersion) throw std::invalid_argument("unsupported session version");
  return fold_events(doc.at("events"));
}

std::optional<std::uint64_t> seed_of(const json& doc) {
  if (doc.contains("seed")) return doc.at("seed").get<std::uint64_t>();
  return std::nullopt;
}

json query_json(const QueryRecord& r) {
  const QueryParams& q = r.q;
  json j = params_json(q);
  j["s"] = r.s;
  j["cosine"] = r.cosine;
  j["lottery_a"] = {{"outcomes", {{{"value", q.r1}, {"probability", 1.0 - q.p}}, {{"value", q.r3}, {"probability", q.p}}}},
                    {"text", "A pays " + fmt(q.r1) + " with probability " + fmt(1.0 - q.p) + ", " + fmt(q.r3) +
                                 " with probability " + fmt(q.p)}};
  j["lottery_b"] = {{"outcomes", {{{"value", q.r2}, {"probability", 1.0}}}}, {"text", "B pays " + fmt(q.r2) + " for sure"}};
  if (r.answer) j["choice"] = h_to_choice(*r.answer);
  return j;
}

json band_json(const Session& s) {
  const auto band = utility_band(s.polyhedron(), s.grid());
  const Vec c = s.center().lifted;
  json pts = json::array();
  double acc = 0.0;
  for (int i = 0; i < s.grid().size(); ++i) {
    if (i > 0) acc += c[i - 1];
    pts.push_back({{"x", s.grid()[i]}, {"lo", band[i].lo}, {"hi", band[i].hi}, {"center", acc}});
  }
  return {{"id", s.id()}, {"breakpoints", pts}};
}

json summary_json(const Session& s) {
  json j = {{"id", s.id()},
            {"mode", s.simulated() ? "simulated" : "interactive"},
            {"utility", s.utility()},
            {"range", {s.lo(), s.hi()}},
            {"grid", s.grid().points()},
            {"num_queries", s.answered().size()},
            {"config", config_to_json(s.config())}};
  j["pending"] = s.pending() ? query_json(*s.pending()) : json(nullptr);
  j["metrics"] = metrics_json(s.history().empty() ? s.metrics() : s.history().back());
  j["band"] = band_json(s)["breakpoints"];
  json hist = json::array();
  for (const QueryRecord& r : s.answered()) hist.push_back(query_json(r));
  j["queries"] = hist;
  return j;
}

std::string utc_timestamp() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace prefel::service
