#include "prefel/elicit.hpp"

#include <cmath>
#include <map>

namespace prefel {

namespace {

const std::map<std::string, UtilityFn>& registry() {
  static const std::map<std::string, UtilityFn> r = {
      {"exp10", [](double x) { return 1.0 - std::exp(-10.0 * x); }},
      {"linear", [](double x) { return x; }},
      // Convex over losses, concave over gains.
      {"sshape",
       [](double x) { return x <= 0.0 ? 2.0 * (std::exp(8.0 * x) - 1.0) / 8.0 : (1.0 - std::exp(-3.0 * x)) / 3.0; }},
  };
  return r;
}

// Snaps each outcome in order, inserting it before the next is snapped, so
// the values match what BreakpointGrid::with_inserted produces.
QueryParams snap_outcomes(const BreakpointGrid& grid, QueryParams q) {
  BreakpointGrid g = grid;
  for (double* r : {&q.r1, &q.r2, &q.r3}) {
    *r = g.snap(*r);
    const double one[] = {*r};
    g = g.with_inserted(one);
  }
  return q;
}

}  // namespace

UtilityFn utility_by_name(const std::string& name) {
  const auto it = registry().find(name);
  if (it == registry().end()) throw std::invalid_argument("unknown utility '" + name + "'");
  return it->second;
}

std::vector<std::string> utility_names() {
  std::vector<std::string> out;
  for (const auto& [k, v] : registry()) out.push_back(k);
  return out;
}

int simulated_answer(const UtilityFn& u, const QueryParams& q) {
  const double a = (1.0 - q.p) * u(q.r1) + q.p * u(q.r3);
  return a <= u(q.r2) ? 1 : -1;
}

void SessionConfig::validate() const {
  query.validate();
  if (rounding_decimals < 0 || rounding_decimals > 15) throw std::invalid_argument("rounding decimals must lie in [0, 15]");
  if (reference_points < 3) throw std::invalid_argument("reference grid needs at least 3 points");
}

std::vector<double> default_initial_grid(double lo, double hi) {
  return {lo, 0.5 * (lo + hi), 0.25 * lo + 0.75 * hi, hi};
}

std::vector<Interval> utility_range_at(const Polyhedron& p, const BreakpointGrid& grid, const std::vector<double>& xs) {
  const int n = p.dim();
  LpProblem lp = LpProblem::nonnegative(n);
  lp.lower.setConstant(-kInf);
  lp.ineq_matrix = p.a();
  lp.ineq_rhs = p.b();
  std::vector<Interval> out;
  for (double x : xs) {
    const Vec g = g_of_x(grid, x);
    const double last = g[n];
    const Vec obj = (g.head(n).array() - last).matrix();
    lp.objective = obj;
    const Solution hi = solve_lp(lp);
    lp.objective = -obj;
    const Solution lo = solve_lp(lp);
    if (!hi.optimal() || !lo.optimal()) throw std::runtime_error("utility range LP failed");
    out.push_back({-lo.value + last, hi.value + last});
  }
  return out;
}

Session Session::start(std::string id, double lo, double hi, std::vector<double> initial_grid, std::string utility,
                       SessionConfig config) {
  return restore(std::move(id), lo, hi, std::move(initial_grid), std::move(utility), std::move(config), {}, std::nullopt,
                 {});
}

Session Session::restore(std::string id, double lo, double hi, std::vector<double> initial_grid, std::string utility,
                         SessionConfig config, std::vector<QueryRecord> answered, std::optional<QueryRecord> pending,
                         std::vector<MetricsSnapshot> history) {
  if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi)) throw std::invalid_argument("range must satisfy lo < hi");
  config.validate();
  if (initial_grid.empty()) initial_grid = default_initial_grid(lo, hi);
  if (initial_grid.front() != lo || initial_grid.back() != hi)
    throw std::invalid_argument("initial grid must start at lo and end at hi");
  if (!utility.empty()) utility_by_name(utility);
  for (const QueryRecord& r : answered)
    if (!r.answer || (*r.answer != 1 && *r.answer != -1)) throw std::invalid_argument("answered record without a valid answer");

  Session s;
  s.id_ = std::move(id);
  s.lo_ = lo;
  s.hi_ = hi;
  s.initial_grid_ = std::move(initial_grid);
  s.utility_ = std::move(utility);
  s.config_ = std::move(config);
  s.answered_ = std::move(answered);
  s.pending_ = std::move(pending);
  s.history_ = std::move(history);
  if (s.history_.size() > s.answered_.size()) throw std::invalid_argument("more metrics snapshots than answers");
  // Missing snapshots are recomputed by replaying the answer prefixes.
  if (s.history_.size() < s.answered_.size()) {
    Session prefix = s;
    prefix.pending_.reset();
    for (size_t k = s.history_.size() + 1; k <= s.answered_.size(); ++k) {
      prefix.answered_.assign(s.answered_.begin(), s.answered_.begin() + static_cast<std::ptrdiff_t>(k));
      prefix.rebuild();
      s.history_.push_back(prefix.metrics());
    }
  }
  s.rebuild();
  return s;
}

void Session::rebuild() {
  BreakpointGrid grid(initial_grid_, config_.rounding_decimals);
  if (config_.flexible_grid) {
    for (const QueryRecord& r : answered_) {
      const double xs[] = {r.q.r1, r.q.r2, r.q.r3};
      grid = grid.with_inserted(xs);
    }
  }
  poly_ = polyhedron_on(grid);
  grid_ = std::move(grid);
}

Polyhedron Session::polyhedron_on(const BreakpointGrid& grid) const {
  Polyhedron poly = Polyhedron::simplex(grid.size() - 2);
  for (const QueryRecord& r : answered_) {
    try {
      poly = poly.add_cut(cut_vector(grid, r.q), *r.answer);
    } catch (const DegenerateCut&) {
      // A record can only degenerate if it was stored by hand; it carries no
      // information, so it is left out of the polyhedron.
    }
  }
  return poly;
}

const QueryRecord& Session::next_query(const std::string& timestamp) {
  if (pending_) throw SessionConflict("a query is already pending");
  const AnalyticCenter ac = analytic_center(poly_);
  const SonnevendAxis axis = longest_axis_endpoints(poly_, ac);
  const GeneratedQuery gen = generate_query(ac, axis, grid_, config_.query);

  for (const Candidate& cand : gen.ranked) {
    QueryParams q = cand.q;
    BreakpointGrid next = grid_;
    if (config_.flexible_grid) {
      q = snap_outcomes(grid_, q);
      if (!(q.r1 <= q.r2 && q.r2 <= q.r3)) continue;
      const double xs[] = {q.r1, q.r2, q.r3};
      next = grid_.with_inserted(xs);
    }
    const Vec cut = cut_vector(next, q);
    if (cut.cwiseAbs().maxCoeff() <= 1e-10) continue;
    if (reduce_cut({cut, 1}).a.cwiseAbs().maxCoeff() <= 1e-12) continue;
    // Rounding can move the cut off the center; an answer that is already
    // implied would leave the set unchanged and the next query identical.
    if (!splits(config_.flexible_grid ? polyhedron_on(next) : poly_, cut)) continue;
    QueryRecord rec;
    rec.q = q;
    rec.s = cand.s;
    rec.cosine = cand.cosine;
    rec.issued_at = timestamp;
    pending_ = rec;
    return *pending_;
  }
  throw AllDegenerate("every candidate cut vanished after rounding");
}

void Session::submit_answer(int h, const std::string& timestamp) {
  if (!pending_) throw SessionConflict("no query is pending");
  if (h != 1 && h != -1) throw std::invalid_argument("answer must be +1 or -1");
  QueryRecord rec = *pending_;
  rec.answer = h;
  rec.answered_at = timestamp;
  answered_.push_back(std::move(rec));
  pending_.reset();
  rebuild();
  history_.push_back(metrics());
}

int Session::simulated_answer() const {
  if (!simulated()) throw SessionConflict("session has no simulated decision maker");
  if (!pending_) throw SessionConflict("no query is pending");
  return prefel::simulated_answer(utility_by_name(utility_), pending_->q);
}

int Session::run(int m) {
  if (m < 0) throw std::invalid_argument("query count must be nonnegative");
  if (!simulated()) throw SessionConflict("run needs a simulated decision maker");
  int done = 0;
  while (done < m) {
    if (!pending_) {
      try {
        next_query();
      } catch (const AllDegenerate&) {
        break;
      }
    }
    submit_answer(simulated_answer());
    ++done;
  }
  return done;
}

std::optional<Vec> Session::true_lifted() const {
  if (!simulated()) return std::nullopt;
  return true_increments(utility_by_name(utility_), grid_);
}

MetricsSnapshot Session::metrics() const {
  MetricsSnapshot m;
  m.m = static_cast<int>(answered_.size());
  m.n = grid_.size();
  const RadiusMetrics r = radius_metrics(poly_, grid_, true_lifted());
  m.d_ac = r.d_ac;
  m.d_r1 = r.d_r1;
  m.d_r2 = r.d_r2;
  std::vector<double> ref;
  const int k = config_.reference_points;
  for (int i = 0; i < k; ++i) ref.push_back(i + 1 == k ? hi_ : lo_ + (hi_ - lo_) * i / (k - 1));
  for (const Interval& iv : utility_range_at(poly_, grid_, ref)) m.d_r2_ref = std::max(m.d_r2_ref, iv.hi - iv.lo);
  return m;
}

}  // namespace prefel
