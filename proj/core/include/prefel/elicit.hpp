#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "prefel/polyhedron.hpp"
#include "prefel/pwl.hpp"
#include "prefel/querygen.hpp"

namespace prefel {

// Thrown when an operation does not fit the session state, e.g. answering
// with nothing pending.
struct SessionConflict : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Named reference utilities for simulated decision makers.
UtilityFn utility_by_name(const std::string& name);
std::vector<std::string> utility_names();

struct QueryRecord {
  QueryParams q;
  int s = 0;
  double cosine = 0.0;
  // +1: B (the sure amount) is weakly preferred; -1: A is preferred.
  std::optional<int> answer;
  std::string issued_at;
  std::string answered_at;
};

struct SessionConfig {
  QueryConfig query;
  int rounding_decimals = 2;
  // Insert query outcomes as breakpoints after every answer.
  bool flexible_grid = true;
  // Uniform reference grid used for the grid-independent band width.
  int reference_points = 11;

  void validate() const;
};

struct MetricsSnapshot {
  int m = 0;
  int n = 0;
  std::optional<double> d_ac;
  double d_r1 = 0.0;
  double d_r2 = 0.0;
  double d_r2_ref = 0.0;
};

// {lo, (lo+hi)/2, (lo+3hi)/4, hi}
std::vector<double> default_initial_grid(double lo, double hi);

// Range of u(x) over the polyhedron at arbitrary points of the range.
std::vector<Interval> utility_range_at(const Polyhedron& p, const BreakpointGrid& grid, const std::vector<double>& xs);

// One adaptive elicitation. The answered records are the source of truth:
// the grid and polyhedron are recomputed from them.
class Session {
 public:
  // `utility` names a simulated decision maker; empty means interactive.
  static Session start(std::string id, double lo, double hi, std::vector<double> initial_grid, std::string utility,
                       SessionConfig config);
  // Rebuilds derived state from stored records.
  static Session restore(std::string id, double lo, double hi, std::vector<double> initial_grid, std::string utility,
                         SessionConfig config, std::vector<QueryRecord> answered, std::optional<QueryRecord> pending,
                         std::vector<MetricsSnapshot> history);

  const std::string& id() const { return id_; }
  double lo() const { return lo_; }
  double hi() const { return hi_; }
  const std::vector<double>& initial_grid() const { return initial_grid_; }
  const std::string& utility() const { return utility_; }
  bool simulated() const { return !utility_.empty(); }
  const SessionConfig& config() const { return config_; }

  const BreakpointGrid& grid() const { return grid_; }
  const Polyhedron& polyhedron() const { return poly_; }
  const std::vector<QueryRecord>& answered() const { return answered_; }
  const std::optional<QueryRecord>& pending() const { return pending_; }
  const std::vector<MetricsSnapshot>& history() const { return history_; }

  // Issues the next query. Throws SessionConflict if one is pending and
  // AllDegenerate once no candidate yields a usable cut.
  const QueryRecord& next_query(const std::string& timestamp = {});
  // h = +1 when B is preferred (or indifferent), -1 when A is preferred.
  void submit_answer(int h, const std::string& timestamp = {});
  int simulated_answer() const;

  // Runs up to m simulated queries; returns how many were answered.
  int run(int m);

  MetricsSnapshot metrics() const;
  // Current lifted true increments (simulated sessions only).
  std::optional<Vec> true_lifted() const;
  AnalyticCenter center() const { return analytic_center(poly_); }

 private:
  Session() = default;
  void rebuild();
  Polyhedron polyhedron_on(const BreakpointGrid& grid) const;

  std::string id_;
  double lo_ = 0.0, hi_ = 1.0;
  std::vector<double> initial_grid_;
  std::string utility_;
  SessionConfig config_;
  std::vector<QueryRecord> answered_;
  std::optional<QueryRecord> pending_;
  std::vector<MetricsSnapshot> history_;
  BreakpointGrid grid_;
  Polyhedron poly_;
};

// +1 iff (1-p) u(r1) + p u(r3) <= u(r2).
int simulated_answer(const UtilityFn& u, const QueryParams& q);

}  // namespace prefel
