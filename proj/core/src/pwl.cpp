#include "prefel/pwl.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace prefel {

BreakpointGrid::BreakpointGrid(std::vector<double> points, int rounding_decimals)
    : points_(std::move(points)), decimals_(rounding_decimals) {
  if (points_.size() < 3) throw std::invalid_argument("grid needs at least 3 breakpoints");
  if (decimals_ < 0 || decimals_ > 15) throw std::invalid_argument("rounding decimals must lie in [0, 15]");
  for (size_t i = 0; i < points_.size(); ++i) {
    if (!std::isfinite(points_[i])) throw std::invalid_argument("grid breakpoints must be finite");
    if (i > 0 && !(points_[i] > points_[i - 1]))
      throw std::invalid_argument("grid breakpoints must be strictly increasing");
  }
}

int BreakpointGrid::interval_of(double x) const {
  if (!contains(x)) throw std::out_of_range("x = " + std::to_string(x) + " outside the grid range");
  if (x == lo()) return 0;
  const auto it = std::lower_bound(points_.begin(), points_.end(), x);
  return static_cast<int>(it - points_.begin()) - 1;
}

int BreakpointGrid::find_point(double x, double tol) const {
  const auto it = std::lower_bound(points_.begin(), points_.end(), x - tol);
  if (it != points_.end() && std::abs(*it - x) <= tol) return static_cast<int>(it - points_.begin());
  return -1;
}

double BreakpointGrid::round(double x) const {
  const double scale = std::pow(10.0, decimals_);
  return std::round(x * scale) / scale;
}

double BreakpointGrid::dedup_tolerance() const { return 0.5 * std::pow(10.0, -decimals_); }

double BreakpointGrid::snap(double x) const {
  const double r = std::clamp(round(x), lo(), hi());
  const int hit = find_point(r, dedup_tolerance() - 1e-12);
  return hit >= 0 ? points_[hit] : r;
}

BreakpointGrid BreakpointGrid::with_inserted(std::span<const double> xs) const {
  BreakpointGrid out = *this;
  for (double x : xs) {
    if (!contains(x)) throw std::out_of_range("inserted breakpoint outside the grid range");
    const double s = out.snap(x);
    if (out.find_point(s, 0.0) >= 0) continue;
    out.points_.insert(std::lower_bound(out.points_.begin(), out.points_.end(), s), s);
  }
  return out;
}

Vec lift(const Vec& free) {
  Vec out(free.size() + 1);
  out.head(free.size()) = free;
  out[free.size()] = 1.0 - free.sum();
  return out;
}

Vec drop_last(const Vec& lifted) { return lifted.head(lifted.size() - 1); }

Vec g_of_x(const BreakpointGrid& grid, double x) {
  const int i = grid.interval_of(x);
  Vec g = Vec::Zero(grid.intervals());
  g.head(i).setOnes();
  g[i] = (x - grid[i]) / grid.width(i);
  return g;
}

PqEncoding pq_matrices(const BreakpointGrid& grid) {
  const int n = grid.intervals();
  PqEncoding e;
  e.p_diag.resize(n);
  e.q = Mat::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    e.p_diag[i] = 1.0 / grid.width(i);
    e.q(i, i) = -grid[i] / grid.width(i);
    for (int j = i + 1; j < n; ++j) e.q(i, j) = 1.0;
  }
  return e;
}

PqPoint pq_encode(const BreakpointGrid& grid, double x) {
  const int i = grid.interval_of(x);
  PqPoint pt{Vec::Zero(grid.intervals()), Vec::Zero(grid.intervals())};
  pt.z[i] = 1.0;
  pt.y[i] = x;
  return pt;
}

double eval_utility(const BreakpointGrid& grid, const Vec& lifted, double x) {
  if (lifted.size() != grid.intervals()) throw std::invalid_argument("increment vector does not match grid");
  return lifted.dot(g_of_x(grid, x));
}

Vec true_increments(const UtilityFn& u, const BreakpointGrid& grid) {
  const double span = u(grid.hi()) - u(grid.lo());
  if (!(std::abs(span) > 0.0) || !std::isfinite(span))
    throw std::invalid_argument("utility is flat over the grid range");
  Vec v(grid.intervals());
  for (int i = 0; i < grid.intervals(); ++i) v[i] = (u(grid[i + 1]) - u(grid[i])) / span;
  return v;
}

Vec refine_increments(const BreakpointGrid& from, const Vec& lifted, const BreakpointGrid& to) {
  Vec out(to.intervals());
  double prev = 0.0;
  for (int i = 0; i < to.intervals(); ++i) {
    const double next = i + 1 == to.intervals() ? lifted.sum() : eval_utility(from, lifted, to[i + 1]);
    out[i] = next - prev;
    prev = next;
  }
  return out;
}

}  // namespace prefel
