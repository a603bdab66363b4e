#include "prefel/querygen.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

namespace prefel {

std::vector<double> QueryConfig::default_d_grid(int s) {
  std::vector<double> out;
  for (int i = 1; i <= s; ++i) out.push_back(static_cast<double>(i) / s);
  return out;
}

void QueryConfig::validate() const {
  if (!(p_bounds.lo > 0.0 && p_bounds.lo <= p_bounds.hi && p_bounds.hi < 1.0))
    throw std::invalid_argument("probability bounds must satisfy 0 < lo <= hi < 1");
  if (d_grid.empty()) throw std::invalid_argument("budget grid is empty");
  for (double d : d_grid)
    if (!(d > 0.0 && d <= 1.0)) throw std::invalid_argument("budget values must lie in (0, 1]");
}

Vec budget_point(const Vec& c_lifted, double d) {
  if (!(d > 0.0 && d <= 1.0)) throw std::invalid_argument("budget D must lie in (0, 1]");
  const auto n = c_lifted.size();
  Vec out = Vec::Ones(n);
  if (d >= 1.0) return out;
  double acc = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (d < acc + c_lifted[i]) {
      out[i] = (d - acc) / c_lifted[i];
      out.tail(n - i - 1).setZero();
      return out;
    }
    acc += c_lifted[i];
  }
  return out;
}

double solve_b(const Vec& v1_lifted, const Vec& c_lifted, const BreakpointGrid& grid, double d) {
  if (v1_lifted.size() != grid.intervals() || c_lifted.size() != grid.intervals())
    throw std::invalid_argument("solve_b: vector sizes do not match the grid");
  const Vec dd = budget_point(c_lifted, d);
  for (int i = 0; i < grid.intervals(); ++i)
    if (dd[i] < 1.0) return grid[i] + dd[i] * grid.width(i);
  return grid.hi();
}

Vec g_a(const BreakpointGrid& grid, double r1, double r3, double p) {
  return (1.0 - p) * g_of_x(grid, r1) + p * g_of_x(grid, r3);
}

Vec cut_vector(const BreakpointGrid& grid, const QueryParams& q) {
  return g_a(grid, q.r1, q.r3, q.p) - g_of_x(grid, q.r2);
}

namespace {

// Coefficients of a linear form u'G_A over (a1, a3, p) for the interval
// pair (i1, i3), with a1 = (1-p) t1 and a3 = p t3.
struct PairForm {
  Eigen::Vector3d coef;
  double constant;
};

PairForm pair_form(const Vec& u, const Vec& cum, int i1, int i3) {
  if (i1 == i3) return {{u[i1], u[i1], 0.0}, cum[i1]};
  return {{u[i1], u[i3], u[i1] + cum[i3] - cum[i1 + 1]}, cum[i1]};
}

Vec prefix_sums(const Vec& u) {
  Vec out = Vec::Zero(u.size() + 1);
  for (Eigen::Index i = 0; i < u.size(); ++i) out[i + 1] = out[i] + u[i];
  return out;
}

}  // namespace

SolveAResult solve_a(const Vec& v2_lifted, const Vec& c_lifted, const BreakpointGrid& grid, double d,
                     const ProbabilityBounds& pb) {
  const int n = grid.intervals();
  if (v2_lifted.size() != n || c_lifted.size() != n) throw std::invalid_argument("solve_a: vector sizes do not match the grid");
  if (!(d > 0.0 && d <= 1.0)) throw std::invalid_argument("budget D must lie in (0, 1]");
  const Vec cc = prefix_sums(c_lifted);
  const Vec cv = prefix_sums(v2_lifted);

  // Inequalities G x <= h over x = (a1, a3, p).
  const std::array<Eigen::Vector3d, 6> g_rows = {
      Eigen::Vector3d(-1, 0, 0), Eigen::Vector3d(0, -1, 0), Eigen::Vector3d(0, 0, -1),
      Eigen::Vector3d(0, 0, 1),  Eigen::Vector3d(1, 0, 1),  Eigen::Vector3d(0, 1, -1)};
  const std::array<double, 6> h = {0.0, 0.0, -pb.lo, pb.hi, 1.0, 0.0};
  constexpr double kFeas = 1e-10;
  constexpr double kTie = 1e-10;

  SolveAResult best;
  bool found = false;
  Eigen::Vector3d best_x = Eigen::Vector3d::Zero();
  for (int i1 = 0; i1 < n; ++i1) {
    for (int i3 = i1; i3 < n; ++i3) {
      const PairForm cf = pair_form(c_lifted, cc, i1, i3);
      const PairForm vf = pair_form(v2_lifted, cv, i1, i3);
      bool pair_found = false;
      double pair_obj = 0.0;
      Eigen::Vector3d pair_x = Eigen::Vector3d::Zero();
      for (int a = 0; a < 6; ++a) {
        for (int b = a + 1; b < 6; ++b) {
          Eigen::Matrix3d m;
          m.row(0) = cf.coef.transpose();
          m.row(1) = g_rows[a].transpose();
          m.row(2) = g_rows[b].transpose();
          if (std::abs(m.determinant()) < 1e-12) continue;
          const Eigen::Vector3d x = m.partialPivLu().solve(Eigen::Vector3d(d - cf.constant, h[a], h[b]));
          bool ok = true;
          for (int k = 0; k < 6 && ok; ++k) ok = g_rows[k].dot(x) <= h[k] + kFeas;
          if (!ok) continue;
          const double obj = vf.constant + vf.coef.dot(x);
          // Within a pair prefer the larger objective, then smaller p,
          // then smaller a1.
          const bool better = !pair_found || obj > pair_obj + kTie ||
                              (obj >= pair_obj - kTie &&
                               (x[2] < pair_x[2] - kTie || (x[2] <= pair_x[2] + kTie && x[0] < pair_x[0] - kTie)));
          if (better) {
            pair_found = true;
            pair_obj = obj;
            pair_x = x;
          }
        }
      }
      if (!pair_found) continue;
      if (!found || pair_obj > best.objective + kTie) {
        found = true;
        best.objective = pair_obj;
        best.i1 = i1;
        best.i3 = i3;
        best_x = pair_x;
      }
    }
  }
  if (!found) throw std::logic_error("solve_a: no interval pair is feasible for D = " + std::to_string(d));

  const double a1 = std::max(best_x[0], 0.0), a3 = std::max(best_x[1], 0.0);
  const double p = std::clamp(best_x[2], pb.lo, pb.hi);
  best.p = p;
  if (best.i1 == best.i3) {
    // Both outcomes share an interval, where g is affine; the lottery is
    // represented by its mixture point.
    const double frac = std::clamp(a1 + a3, 0.0, 1.0);
    best.r1 = best.r3 = grid[best.i1] + frac * grid.width(best.i1);
  } else {
    const double t1 = p < 1.0 ? std::clamp(a1 / (1.0 - p), 0.0, 1.0) : 0.0;
    const double t3 = p > 0.0 ? std::clamp(a3 / p, 0.0, 1.0) : 0.0;
    best.r1 = grid[best.i1] + t1 * grid.width(best.i1);
    best.r3 = grid[best.i3] + t3 * grid.width(best.i3);
  }
  best.g_a = g_a(grid, best.r1, best.r3, best.p);
  return best;
}

double abs_cosine(const Vec& cut, const Vec& dir) {
  const double nc = cut.norm(), nd = dir.norm();
  if (nc == 0.0 || nd == 0.0) return 0.0;
  return std::abs(cut.dot(dir)) / (nc * nd);
}

GeneratedQuery generate_query(const Polyhedron& p, const BreakpointGrid& grid, const QueryConfig& cfg) {
  const AnalyticCenter ac = analytic_center(p);
  return generate_query(ac, longest_axis_endpoints(p, ac), grid, cfg);
}

GeneratedQuery generate_query(const AnalyticCenter& ac, const SonnevendAxis& axis, const BreakpointGrid& grid,
                              const QueryConfig& cfg) {
  cfg.validate();
  const Vec c = ac.lifted;
  const Vec v1 = lift(axis.v1), v2 = lift(axis.v2);
  const Vec dir = v1 - v2;

  GeneratedQuery out;
  for (size_t s = 0; s < cfg.d_grid.size(); ++s) {
    const double d = cfg.d_grid[s];
    Candidate cand;
    cand.s = static_cast<int>(s) + 1;
    cand.q.d = d;
    cand.q.r2 = solve_b(v1, c, grid, d);
    const SolveAResult a = solve_a(v2, c, grid, d, cfg.p_bounds);
    cand.q.r1 = a.r1;
    cand.q.r3 = a.r3;
    cand.q.p = a.p;
    cand.cut = a.g_a - g_of_x(grid, cand.q.r2);
    cand.degenerate = cand.cut.cwiseAbs().maxCoeff() <= 1e-10;
    cand.cosine = cand.degenerate ? 0.0 : abs_cosine(cand.cut, dir);
    out.all.push_back(cand);
  }

  std::vector<Candidate> pool;
  for (const Candidate& c2 : out.all)
    if (!c2.degenerate) pool.push_back(c2);
  if (pool.empty()) throw AllDegenerate("every budget value produced a zero cut");
  while (!pool.empty()) {
    double top = -1.0;
    for (const Candidate& c2 : pool) top = std::max(top, c2.cosine);
    size_t pick = 0;
    for (size_t i = 0; i < pool.size(); ++i) {
      if (pool[i].cosine >= top - cfg.cosine_tie) {
        pick = i;
        break;
      }
    }
    out.ranked.push_back(pool[pick]);
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(pick));
  }
  const Candidate& win = out.ranked.front();
  out.q = win.q;
  out.cut = win.cut;
  out.s = win.s;
  out.cosine = win.cosine;
  return out;
}

}  // namespace prefel
