#include "prefel/polyhedron.hpp"

#include <algorithm>
#include <cmath>

namespace prefel {

ReducedRow reduce_cut(const Cut& cut) {
  const auto n = cut.lifted.size() - 1;
  const double last = cut.lifted[n];
  ReducedRow r;
  r.a = cut.sense * (cut.lifted.head(n).array() - last).matrix();
  r.b = -cut.sense * last;
  return r;
}

Polyhedron Polyhedron::simplex(int dim) {
  if (dim < 1) throw std::invalid_argument("polyhedron dimension must be positive");
  Polyhedron p;
  p.dim_ = dim;
  p.extra_a_ = Mat::Zero(0, dim);
  p.extra_b_ = Vec::Zero(0);
  return p;
}

Polyhedron Polyhedron::add_cut(const Vec& lifted, int sense) const {
  if (lifted.size() != dim_ + 1) throw std::invalid_argument("cut length does not match polyhedron dimension");
  if (sense != 1 && sense != -1) throw std::invalid_argument("cut sense must be +1 or -1");
  Cut cut{lifted, sense};
  const ReducedRow row = reduce_cut(cut);
  const double scale = std::max(1.0, lifted.cwiseAbs().maxCoeff());
  if (lifted.cwiseAbs().maxCoeff() <= 1e-12 || row.a.cwiseAbs().maxCoeff() <= 1e-12 * scale)
    throw DegenerateCut("cut normal is zero on the free coordinates");
  const Vec dir = (sense * lifted).normalized();
  for (const Cut& c : cuts_) {
    if (((c.sense * c.lifted).normalized() - dir).cwiseAbs().maxCoeff() <= 1e-9) return *this;
  }
  Polyhedron out = *this;
  out.cuts_.push_back(std::move(cut));
  return out;
}

Polyhedron Polyhedron::with_rows(const Mat& a, const Vec& b) const {
  if (a.cols() != dim_ || a.rows() != b.size()) throw std::invalid_argument("extra rows have the wrong shape");
  Polyhedron out = *this;
  Mat na(extra_a_.rows() + a.rows(), dim_);
  na << extra_a_, a;
  Vec nb(extra_b_.size() + b.size());
  nb << extra_b_, b;
  out.extra_a_ = std::move(na);
  out.extra_b_ = std::move(nb);
  return out;
}

Mat Polyhedron::a() const {
  Mat a = Mat::Zero(num_rows(), dim_);
  a.row(0).setOnes();
  for (int j = 0; j < dim_; ++j) a(1 + j, j) = -1.0;
  int r = dim_ + 1;
  for (const Cut& c : cuts_) a.row(r++) = reduce_cut(c).a.transpose();
  if (extra_a_.rows() > 0) a.bottomRows(extra_a_.rows()) = extra_a_;
  return a;
}

Vec Polyhedron::b() const {
  Vec b = Vec::Zero(num_rows());
  b[0] = 1.0;
  int r = dim_ + 1;
  for (const Cut& c : cuts_) b[r++] = reduce_cut(c).b;
  if (extra_b_.size() > 0) b.tail(extra_b_.size()) = extra_b_;
  return b;
}

bool Polyhedron::contains(const Vec& v, double tol) const {
  return ((a() * v - b()).array() <= tol).all();
}

namespace {

double log_barrier(const Vec& s) { return -s.array().log().sum(); }

}  // namespace

AnalyticCenter analytic_center(const Polyhedron& p) {
  const Mat a = p.a();
  const Vec b = p.b();
  const int n = p.dim();

  // Chebyshev-style start: max t s.t. a_i'x + t |a_i| <= b_i, t <= 1.
  LpProblem lp = LpProblem::nonnegative(n + 1);
  lp.lower.head(n).setConstant(-kInf);
  lp.lower[n] = -kInf;
  lp.upper[n] = 1.0;
  lp.objective[n] = 1.0;
  lp.ineq_matrix.resize(a.rows(), n + 1);
  lp.ineq_matrix.leftCols(n) = a;
  lp.ineq_matrix.col(n) = a.rowwise().norm();
  lp.ineq_rhs = b;
  const Solution start = solve_lp(lp);
  if (!start.optimal() || start.value <= 1e-9) throw EmptyInterior("polyhedron has no interior point");

  Vec x = start.point.head(n);
  Vec s = b - a * x;
  AnalyticCenter out;
  for (int it = 0; it < 500; ++it) {
    const Vec inv = s.cwiseInverse();
    const Vec grad = a.transpose() * inv;
    out.grad_norm = grad.norm();
    if (out.grad_norm <= 1e-10) break;
    const Mat h = a.transpose() * inv.cwiseAbs2().asDiagonal() * a;
    const Vec dx = -h.llt().solve(grad);
    const double slope = grad.dot(dx);
    if (!(slope < 0)) break;
    ++out.newton_steps;
    // Newton decrement below 1/4: the full step stays interior and
    // converges quadratically, while the Armijo test drowns in round-off.
    if (-slope < 0.0625) {
      const Vec sn = b - a * (x + dx);
      if ((sn.array() > 0).all()) {
        x += dx;
        s = sn;
        continue;
      }
    }
    const double f0 = log_barrier(s);
    double step = 1.0;
    bool moved = false;
    while (step > 1e-16) {
      const Vec sn = b - a * (x + step * dx);
      if ((sn.array() > 0).all() && log_barrier(sn) <= f0 + 0.25 * step * slope) {
        x += step * dx;
        s = sn;
        moved = true;
        break;
      }
      step *= 0.5;
    }
    if (!moved) break;
  }
  out.c = x;
  out.slacks = s;
  out.lifted = lift(x);
  return out;
}

Mat barrier_hessian(const Polyhedron& p, const Vec& x) {
  const Mat a = p.a();
  const Vec s = p.b() - a * x;
  return a.transpose() * s.cwiseInverse().cwiseAbs2().asDiagonal() * a;
}

SonnevendAxis longest_axis_endpoints(const Polyhedron& p, const AnalyticCenter& ac) {
  const Mat a = p.a();
  const Vec s = p.b() - a * ac.c;
  SonnevendAxis ax;
  ax.h = a.transpose() * s.cwiseInverse().cwiseAbs2().asDiagonal() * a;
  ax.direction = min_eigenpair(ax.h).vector;

  auto reach = [&](const Vec& d) {
    const Vec den = a * d;
    double t = kInf;
    for (Eigen::Index i = 0; i < den.size(); ++i) {
      if (den[i] > 1e-12 * std::max(1.0, a.row(i).norm())) t = std::min(t, s[i] / den[i]);
    }
    return t;
  };
  ax.t_plus = reach(ax.direction);
  ax.t_minus = reach(-ax.direction);
  ax.v1 = ac.c + ax.t_plus * ax.direction;
  ax.v2 = ac.c - ax.t_minus * ax.direction;
  return ax;
}

bool splits(const Polyhedron& p, const Vec& lifted, double tol) {
  if (lifted.size() != p.dim() + 1) throw std::invalid_argument("cut does not match polyhedron dimension");
  const ReducedRow r = reduce_cut({lifted, 1});
  LpProblem lp = LpProblem::nonnegative(p.dim());
  lp.lower.setConstant(-kInf);
  lp.ineq_matrix = p.a();
  lp.ineq_rhs = p.b();
  lp.objective = r.a;
  const Solution hi = solve_lp(lp);
  lp.objective = -r.a;
  const Solution lo = solve_lp(lp);
  if (!hi.optimal() || !lo.optimal()) throw std::runtime_error("cut range LP failed");
  const double scale = tol * (1.0 + std::abs(r.b) + r.a.cwiseAbs().maxCoeff());
  return hi.value > r.b + scale && -lo.value < r.b - scale;
}

std::vector<Interval> utility_band(const Polyhedron& p, const BreakpointGrid& grid) {
  if (grid.intervals() != p.dim() + 1) throw std::invalid_argument("grid does not match polyhedron dimension");
  const int n = p.dim();
  LpProblem lp = LpProblem::nonnegative(n);
  lp.lower.setConstant(-kInf);
  lp.ineq_matrix = p.a();
  lp.ineq_rhs = p.b();

  std::vector<Interval> band(grid.size());
  band.front() = {0.0, 0.0};
  band.back() = {1.0, 1.0};
  for (int i = 1; i + 1 < grid.size(); ++i) {
    lp.objective.setZero();
    lp.objective.head(i).setOnes();
    const Solution hi = solve_lp(lp);
    lp.objective = -lp.objective;
    const Solution lo = solve_lp(lp);
    if (!hi.optimal() || !lo.optimal())
      throw std::runtime_error("utility band LP failed: " + to_string(hi.optimal() ? lo.status : hi.status));
    band[i] = {-lo.value, hi.value};
  }
  return band;
}

double cumulative_gap(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) throw std::invalid_argument("cumulative_gap: size mismatch");
  double acc_a = 0.0, acc_b = 0.0, gap = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    acc_a += a[i];
    acc_b += b[i];
    gap = std::max(gap, std::abs(acc_a - acc_b));
  }
  return gap;
}

RadiusMetrics radius_metrics(const Polyhedron& p, const BreakpointGrid& grid, const std::optional<Vec>& v_star) {
  const AnalyticCenter ac = analytic_center(p);
  const SonnevendAxis ax = longest_axis_endpoints(p, ac);
  RadiusMetrics m;
  if (v_star) m.d_ac = cumulative_gap(ac.lifted, *v_star);
  m.d_r1 = (ax.v1 - ax.v2).cwiseAbs().maxCoeff();
  for (const Interval& iv : utility_band(p, grid)) m.d_r2 = std::max(m.d_r2, iv.hi - iv.lo);
  return m;
}

}  // namespace prefel
