#pragma once

#include <functional>
#include <span>
#include <vector>

#include "prefel/numerics.hpp"

namespace prefel {

// Ordered breakpoints x_1 < ... < x_N. Inserted points are rounded to
// `rounding_decimals`; the construction points are kept verbatim.
class BreakpointGrid {
 public:
  BreakpointGrid() = default;
  explicit BreakpointGrid(std::vector<double> points, int rounding_decimals = 2);

  int size() const { return static_cast<int>(points_.size()); }
  int intervals() const { return size() - 1; }
  double lo() const { return points_.front(); }
  double hi() const { return points_.back(); }
  double operator[](int i) const { return points_[i]; }
  double width(int i) const { return points_[i + 1] - points_[i]; }
  const std::vector<double>& points() const { return points_; }
  int rounding_decimals() const { return decimals_; }

  bool contains(double x) const { return x >= lo() && x <= hi(); }
  // Interval index i (0-based) with x in (x_i, x_{i+1}]; x = lo maps to 0.
  int interval_of(double x) const;
  // Index of an existing breakpoint within `tol` of x, or -1.
  int find_point(double x, double tol) const;

  double round(double x) const;
  // Rounds x to the grid decimals and snaps it onto an existing breakpoint
  // closer than half a rounding unit.
  double snap(double x) const;
  double dedup_tolerance() const;
  // New grid with each x snapped and inserted unless already present.
  BreakpointGrid with_inserted(std::span<const double> xs) const;

  bool operator==(const BreakpointGrid&) const = default;

 private:
  std::vector<double> points_;
  int decimals_ = 2;
};

// Lifted increments R v = (v, 1 - e'v) from free coordinates, and back.
Vec lift(const Vec& free);
Vec drop_last(const Vec& lifted);

// (1,...,1, frac, 0,...,0) in R^{N-1}.
Vec g_of_x(const BreakpointGrid& grid, double x);

struct PqEncoding {
  Vec p_diag;  // 1 / (x_{i+1} - x_i)
  Mat q;       // diagonal -x_i / (x_{i+1} - x_i), strict upper part 1
};

PqEncoding pq_matrices(const BreakpointGrid& grid);

struct PqPoint {
  Vec y;
  Vec z;  // one-hot interval indicator
};

PqPoint pq_encode(const BreakpointGrid& grid, double x);

double eval_utility(const BreakpointGrid& grid, const Vec& lifted, double x);

using UtilityFn = std::function<double(double)>;

// Normalized increments (u(x_{i+1}) - u(x_i)) / (u(hi) - u(lo)), lifted form.
Vec true_increments(const UtilityFn& u, const BreakpointGrid& grid);

// Re-expresses lifted increments on a finer grid that contains every
// breakpoint of `from`; the represented function is unchanged.
Vec refine_increments(const BreakpointGrid& from, const Vec& lifted, const BreakpointGrid& to);

}  // namespace prefel
