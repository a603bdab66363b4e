#include "cli_commands.hpp"

#include <CLI11.hpp>

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>
#include <thread>

#include "prefel/service/api.hpp"
#include "prefel/service/http.hpp"
#include "prefel/service/pro_job.hpp"

namespace prefel::cli {

namespace {

using service::json;

struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw UsageError(path + ": " + e.what());
  }
}

void write_text_atomic(const std::string& path, const std::string& text) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw UsageError("cannot write " + path);
    out << text;
    if (!out.flush()) throw std::runtime_error("write failed for " + path);
  }
  std::filesystem::rename(tmp, path);
}

std::vector<double> parse_pair(const std::string& text, const char* what) {
  const auto v = parse_list(text);
  if (v.size() != 2) throw UsageError(std::string(what) + " needs two comma-separated values");
  return v;
}

std::string opt(const std::optional<double>& x, int prec = 4) {
  if (!x) return "-";
  std::ostringstream os;
  os << std::fixed << std::setprecision(prec) << *x;
  return os.str();
}

void print_metrics_header(std::ostream& out) {
  out << std::setw(5) << "m" << std::setw(6) << "N" << std::setw(10) << "d_AC" << std::setw(10) << "d_R1"
      << std::setw(10) << "d_R2" << std::setw(10) << "d_R2ref" << "\n";
}

void print_metrics_row(std::ostream& out, const MetricsSnapshot& m) {
  out << std::setw(5) << m.m << std::setw(6) << m.n << std::setw(10) << opt(m.d_ac) << std::setw(10) << opt(m.d_r1)
      << std::setw(10) << opt(m.d_r2) << std::setw(10) << opt(m.d_r2_ref) << "\n";
}

struct ElicitOpts {
  std::string utility = "exp10";
  int m = 30;
  std::optional<std::uint64_t> seed;
  std::string range = "-0.5,0.5";
  std::string grid;
  int decimals = 2;
  bool fixed_grid = false;
  int budget_steps = 10;
  std::string p_bounds = "0.05,0.95";
  std::string in, out;
  int every = 10;
  bool interactive = false;
  bool quiet = false;
};

SessionConfig config_from(const ElicitOpts& o) {
  SessionConfig cfg;
  cfg.rounding_decimals = o.decimals;
  cfg.flexible_grid = !o.fixed_grid;
  if (o.budget_steps < 1) throw UsageError("--budget-steps must be positive");
  cfg.query.d_grid = QueryConfig::default_d_grid(o.budget_steps);
  const auto pb = parse_pair(o.p_bounds, "--p-bounds");
  cfg.query.p_bounds = {pb[0], pb[1]};
  cfg.validate();
  return cfg;
}

Session new_session(const ElicitOpts& o, const std::string& utility) {
  const auto r = parse_pair(o.range, "--range");
  const std::vector<double> grid = o.grid.empty() ? std::vector<double>{} : parse_list(o.grid);
  return Session::start("cli", r[0], r[1], grid, utility, config_from(o));
}

int ask(std::istream& in, std::ostream& out, const QueryRecord& q) {
  const json j = service::query_json(q);
  out << "Query " << "\n  " << j["lottery_a"]["text"].get<std::string>() << "\n  "
      << j["lottery_b"]["text"].get<std::string>() << "\nPrefer A or B? " << std::flush;
  std::string line;
  while (std::getline(in, line)) {
    if (line == "A" || line == "a") return -1;
    if (line == "B" || line == "b") return 1;
    out << "Please answer A or B: " << std::flush;
  }
  throw UsageError("input ended before the query was answered");
}

int cmd_elicit(const ElicitOpts& o, std::istream& in, std::ostream& out, std::ostream& err) {
  if (o.m < 0) throw UsageError("--M must be nonnegative");
  if (o.every < 1) throw UsageError("--every must be positive");
  std::optional<Session> s;
  std::optional<std::uint64_t> seed = o.seed;
  if (!o.in.empty()) {
    const json doc = read_json_file(o.in);
    s = service::session_from_document(doc);
    if (!seed) seed = service::seed_of(doc);
  } else {
    s = new_session(o, o.interactive ? "" : o.utility);
  }
  if (!o.interactive && !s->simulated()) throw UsageError("session is interactive; pass --interactive to answer queries");

  if (!o.quiet) {
    print_metrics_header(out);
    print_metrics_row(out, s->history().empty() ? s->metrics() : s->history().back());
  }
  int done = 0;
  for (; done < o.m; ++done) {
    if (!s->pending()) {
      try {
        s->next_query();
      } catch (const AllDegenerate&) {
        err << "no informative query left after " << s->answered().size() << " answers\n";
        break;
      }
    }
    const int h = o.interactive ? ask(in, out, *s->pending()) : s->simulated_answer();
    s->submit_answer(h);
    const MetricsSnapshot& m = s->history().back();
    if (!o.quiet && ((done + 1) % o.every == 0 || done + 1 == o.m)) print_metrics_row(out, m);
  }
  // With nothing answered an existing session file is left untouched.
  if (!o.out.empty() && !(done == 0 && std::filesystem::exists(o.out)))
    write_text_atomic(o.out, service::session_document(*s, seed).dump(2) + "\n");
  return 0;
}

int cmd_metrics(const std::string& path, bool as_json, std::ostream& out) {
  const Session s = service::session_from_document(read_json_file(path));
  if (as_json) {
    json hist = json::array();
    for (const auto& m : s.history()) hist.push_back(service::metrics_json(m));
    out << json{{"history", hist}, {"current", service::metrics_json(s.metrics())}, {"band", service::band_json(s)["breakpoints"]}}
               .dump(2)
        << "\n";
    return 0;
  }
  print_metrics_header(out);
  if (s.history().empty()) print_metrics_row(out, s.metrics());
  for (const auto& m : s.history()) print_metrics_row(out, m);
  out << "\n" << std::setw(10) << "x" << std::setw(10) << "u_lo" << std::setw(10) << "u_hi" << std::setw(10) << "center"
      << "\n";
  const json band = service::band_json(s);
  for (const json& b : band["breakpoints"])
    out << std::setw(10) << opt(b["x"].get<double>()) << std::setw(10) << opt(b["lo"].get<double>()) << std::setw(10)
        << opt(b["hi"].get<double>()) << std::setw(10) << opt(b["center"].get<double>()) << "\n";
  return 0;
}

struct ProOpts {
  std::string session, returns, scheme = "none";
  double param = 0.0;
  std::optional<int> mask;
  bool as_json = false;
};

service::ProRequest request_from(const std::string& scheme, double param, std::optional<int> mask) {
  if (scheme != "classic") scheme_from_string(scheme);
  return {scheme, param, mask};
}

int cmd_pro(const ProOpts& o, std::ostream& out) {
  const Session s = service::session_from_document(read_json_file(o.session));
  const auto table = service::load_scenarios(o.returns);
  const auto res = service::solve_for_session(s, table, request_from(o.scheme, o.param, o.mask));
  if (o.as_json) {
    out << service::outcome_json(res).dump(2) << "\n";
  } else if (res.result.status != SolveStatus::optimal) {
    out << "status " << to_string(res.result.status) << "\n";
  } else {
    out << "value " << std::setprecision(10) << res.result.value << "\n";
    for (size_t i = 0; i < res.tickers.size(); ++i) out << res.tickers[i] << " " << res.result.z[static_cast<Eigen::Index>(i)] << "\n";
  }
  return res.result.status == SolveStatus::optimal ? 0 : 1;
}

struct SweepOpts {
  std::string session, returns, utility = "exp10", out;
  std::string grid_m = "10,20,30,40";
  std::string grid_gamma, grid_budget;
  std::optional<int> mask;
  bool classic = false;
  ElicitOpts elicit;
  int assets = 2, scenarios = 6;
  std::uint64_t seed = 7;
  int jobs = 0;
};

service::ScenarioTable synthetic_returns(int assets, int periods, std::uint64_t seed, double lo, double hi) {
  if (assets < 1 || periods < 1) throw UsageError("--assets and --scenarios must be positive");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(0.8 * lo, 0.8 * hi);
  service::ScenarioTable t;
  for (int j = 0; j < assets; ++j) t.tickers.push_back("A" + std::to_string(j + 1));
  t.returns.resize(periods, assets);
  for (int k = 0; k < periods; ++k)
    for (int j = 0; j < assets; ++j) t.returns(k, j) = std::round(dist(rng) * 1e4) / 1e4;
  return t;
}

int cmd_sweep(const SweepOpts& o, std::ostream& out, std::ostream& err) {
  std::vector<int> ms;
  for (double m : parse_list(o.grid_m)) {
    if (m < 0 || m != std::floor(m)) throw UsageError("--grid-M values must be nonnegative integers");
    ms.push_back(static_cast<int>(m));
  }
  std::sort(ms.begin(), ms.end());
  std::vector<service::ProRequest> reqs;
  if (o.classic) reqs.push_back({"classic", 0.0, std::nullopt});
  for (double g : o.grid_budget.empty() ? std::vector<double>{} : parse_list(o.grid_budget))
    reqs.push_back({"budget", g, std::nullopt});
  std::string gammas = o.grid_gamma;
  if (gammas.empty() && o.grid_budget.empty() && !o.classic) gammas = "0.001,0.25,0.5,0.75,1";
  for (double g : gammas.empty() ? std::vector<double>{} : parse_list(gammas)) reqs.push_back({"gamma", g, o.mask});

  // Snapshots of one trajectory at every requested M.
  std::optional<Session> s;
  if (!o.session.empty()) {
    s = service::session_from_document(read_json_file(o.session));
  } else {
    s = new_session(o.elicit, o.utility);
    if (!s->simulated()) throw UsageError("sweep needs a simulated utility or --session");
  }
  const auto table = o.returns.empty() ? synthetic_returns(o.assets, o.scenarios, o.seed, s->lo(), s->hi())
                                       : service::load_scenarios(o.returns);
  struct Snap {
    int m;
    Polyhedron poly;
    BreakpointGrid grid;
  };
  std::vector<Snap> snaps;
  const std::vector<QueryRecord> recorded = s->answered();
  for (int m : ms) {
    if (!o.session.empty()) {
      if (m > static_cast<int>(recorded.size()))
        throw UsageError("session has only " + std::to_string(recorded.size()) + " answers, --grid-M asks for " +
                         std::to_string(m));
      std::vector<QueryRecord> prefix(recorded.begin(), recorded.begin() + m);
      const Session part = Session::restore(s->id(), s->lo(), s->hi(), s->initial_grid(), s->utility(), s->config(),
                                            prefix, std::nullopt, {});
      snaps.push_back({m, part.polyhedron(), part.grid()});
      continue;
    }
    const int have = static_cast<int>(s->answered().size());
    if (m > have && s->run(m - have) < m - have) err << "elicitation stopped early at " << s->answered().size() << " answers\n";
    snaps.push_back({m, s->polyhedron(), s->grid()});
  }

  struct Task {
    size_t snap, req;
  };
  std::vector<Task> tasks;
  for (size_t i = 0; i < snaps.size(); ++i)
    for (size_t j = 0; j < reqs.size(); ++j) tasks.push_back({i, j});
  std::vector<std::optional<service::ProOutcome>> results(tasks.size());
  std::vector<std::string> errors(tasks.size());
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (size_t t; (t = next.fetch_add(1)) < tasks.size();) {
      try {
        results[t] = service::solve_for_polyhedron(snaps[tasks[t].snap].poly, snaps[tasks[t].snap].grid, table,
                                                   reqs[tasks[t].req]);
      } catch (const std::exception& e) {
        errors[t] = e.what();
      }
    }
  };
  const int jobs = o.jobs > 0 ? o.jobs : std::max(1u, std::thread::hardware_concurrency());
  std::vector<std::thread> pool;
  for (int i = 0; i < std::min<int>(jobs, static_cast<int>(tasks.size())); ++i) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  for (const std::string& e : errors)
    if (!e.empty()) throw std::invalid_argument(e);

  std::ostringstream csv;
  csv << std::setprecision(12) << "M,scheme,param,value";
  for (const auto& t : table.tickers) csv << ",z_" << t;
  csv << "\n";
  for (size_t t = 0; t < tasks.size(); ++t) {
    const auto& r = *results[t];
    csv << snaps[tasks[t].snap].m << "," << r.request.scheme << "," << r.request.param << ",";
    if (r.result.status == SolveStatus::optimal) {
      csv << r.result.value;
      for (Eigen::Index j = 0; j < r.result.z.size(); ++j) csv << "," << r.result.z[j];
    } else {
      csv << to_string(r.result.status);
      for (size_t j = 0; j < table.tickers.size(); ++j) csv << ",";
    }
    csv << "\n";
  }
  if (o.out.empty()) {
    out << csv.str();
  } else {
    write_text_atomic(o.out, csv.str());
    out << "wrote " << tasks.size() << " rows to " << o.out << "\n";
  }
  return 0;
}

int cmd_serve(const std::string& host, int port, const std::string& store, const std::string& data, int workers,
              std::ostream& out) {
  service::ServiceOptions so;
  so.store_dir = store;
  so.data_root = data;
  so.solve_workers = workers;
  service::Service svc(so);
  service::HttpServer http(svc);
  const int bound = http.bind(host, port);
  if (bound < 0) throw std::runtime_error("cannot bind " + host + ":" + std::to_string(port));
  out << "listening on http://" << host << ":" << bound << std::endl;
  return http.listen() ? 0 : 1;
}

void add_elicit_shape(CLI::App* c, ElicitOpts& o) {
  c->add_option("--range", o.range, "Outcome range lo,hi")->capture_default_str();
  c->add_option("--grid", o.grid, "Initial breakpoints (default lo, mid, 3/4 point, hi)");
  c->add_option("--decimals", o.decimals, "Rounding decimals for inserted breakpoints")->capture_default_str();
  c->add_flag("--fixed-grid", o.fixed_grid, "Keep the initial grid instead of inserting query outcomes");
  c->add_option("--budget-steps", o.budget_steps, "Number of budget values D = s/S")->capture_default_str();
  c->add_option("--p-bounds", o.p_bounds, "Probability bounds lo,hi")->capture_default_str();
}

}  // namespace

std::vector<double> parse_list(const std::string& text) {
  std::vector<std::string> toks;
  std::stringstream ss(text);
  for (std::string t; std::getline(ss, t, ',');) {
    const auto a = t.find_first_not_of(" \t"), b = t.find_last_not_of(" \t");
    toks.push_back(a == std::string::npos ? "" : t.substr(a, b - a + 1));
  }
  auto num = [&](const std::string& t) {
    size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(t, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (t.empty() || used != t.size() || !std::isfinite(v)) throw UsageError("'" + t + "' is not a number in list '" + text + "'");
    return v;
  };
  std::vector<double> out;
  for (size_t i = 0; i < toks.size(); ++i) {
    if (toks[i] != "...") {
      out.push_back(num(toks[i]));
      continue;
    }
    if (out.size() < 2 || i + 1 >= toks.size()) throw UsageError("'...' needs two values before it and one after");
    const double step = out[out.size() - 1] - out[out.size() - 2];
    const double last = num(toks[i + 1]);
    if (!(step > 0.0) || last < out.back()) throw UsageError("'...' needs an increasing progression");
    const double start = out.back();
    for (int k = 1;; ++k) {
      const double v = start + k * step;
      if (v >= last - 1e-9 * std::max(1.0, std::abs(last))) break;
      out.push_back(v);
    }
  }
  if (out.empty()) throw UsageError("empty list");
  return out;
}

int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
  CLI::App app{"Adaptive utility elicitation and preference robust portfolio solves", "prefel"};
  app.require_subcommand(1);

  ElicitOpts eo;
  auto* elicit = app.add_subcommand("elicit", "Run or continue an elicitation and print its metric table");
  elicit->add_option("--utility", eo.utility, "Simulated decision maker: exp10, linear, sshape")->capture_default_str();
  elicit->add_option("--M", eo.m, "Number of queries to answer")->capture_default_str();
  elicit->add_option("--seed", eo.seed, "Seed stored with the session (runs are deterministic)");
  add_elicit_shape(elicit, eo);
  elicit->add_option("--in", eo.in, "Continue this session file");
  elicit->add_option("--out", eo.out, "Write the session file here");
  elicit->add_option("--every", eo.every, "Print a metric row every k queries")->capture_default_str();
  elicit->add_flag("--interactive", eo.interactive, "Answer queries on stdin instead of simulating");
  elicit->add_flag("--quiet", eo.quiet, "Do not print the metric table");

  std::string host = "127.0.0.1", store = "sessions", data = ".";
  int port = 8080, workers = 2;
  auto* serve = app.add_subcommand("serve", "Serve the HTTP/JSON API");
  serve->add_option("--port", port, "Port (0 picks a free one)")->capture_default_str();
  serve->add_option("--host", host)->capture_default_str();
  serve->add_option("--store", store, "Session directory")->capture_default_str();
  serve->add_option("--data", data, "Directory that scenarios_csv_ref paths resolve in")->capture_default_str();
  serve->add_option("--solve-workers", workers, "Concurrent PRO solves")->capture_default_str();

  ProOpts po;
  auto* pro = app.add_subcommand("pro", "Solve the robust portfolio problem for a session");
  pro->add_option("--session", po.session, "Session file")->required();
  pro->add_option("--returns", po.returns, "Scenario CSV (header of tickers, one row per period)")->required();
  pro->add_option("--scheme", po.scheme, "classic, none, budget or gamma")->capture_default_str();
  pro->add_option("--param", po.param, "Budget for budget, exponent for gamma");
  pro->add_option("--mask", po.mask, "Keep only the first s gamma weights");
  pro->add_flag("--json", po.as_json, "Print JSON");

  SweepOpts so;
  auto* sweep = app.add_subcommand("sweep", "Optimal values over elicitation length and conservatism");
  sweep->add_option("--session", so.session, "Use this session's answers instead of simulating");
  sweep->add_option("--utility", so.utility, "Simulated decision maker")->capture_default_str();
  add_elicit_shape(sweep, so.elicit);
  sweep->add_option("--grid-M", so.grid_m, "Query counts")->capture_default_str();
  sweep->add_option("--grid-gamma", so.grid_gamma, "Gamma values (default 0.001,0.25,0.5,0.75,1)");
  sweep->add_option("--grid-budget", so.grid_budget, "Budget values");
  sweep->add_option("--mask", so.mask, "Gamma weight mask length");
  sweep->add_flag("--classic", so.classic, "Also solve the plain maximin");
  sweep->add_option("--returns", so.returns, "Scenario CSV; synthetic returns when absent");
  sweep->add_option("--assets", so.assets, "Synthetic asset count")->capture_default_str();
  sweep->add_option("--scenarios", so.scenarios, "Synthetic period count")->capture_default_str();
  sweep->add_option("--seed", so.seed, "Synthetic return seed")->capture_default_str();
  sweep->add_option("--jobs", so.jobs, "Parallel solves (default: hardware threads)");
  sweep->add_option("--out", so.out, "CSV output (stdout when absent)");

  std::string mpath;
  bool mjson = false;
  auto* metrics = app.add_subcommand("metrics", "Print the metric history and utility band of a session");
  metrics->add_option("--session", mpath, "Session file")->required();
  metrics->add_flag("--json", mjson, "Print JSON");

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (*elicit) return cmd_elicit(eo, in, out, err);
    if (*serve) return cmd_serve(host, port, store, data, workers, out);
    if (*pro) return cmd_pro(po, out);
    if (*sweep) return cmd_sweep(so, out, err);
    if (*metrics) return cmd_metrics(mpath, mjson, out);
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const nlohmann::json::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const service::SessionNotFound& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace prefel::cli
