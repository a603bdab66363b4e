#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "prefel/numerics.hpp"
#include "prefel/pwl.hpp"

namespace prefel {

struct EmptyInterior : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DegenerateCut : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Constraint sense * (Rv)' lifted <= 0.
struct Cut {
  Vec lifted;
  int sense = 1;
};

// Reduced row a'v <= b of a lifted cut, with v_{N-1} = 1 - e'v substituted.
struct ReducedRow {
  Vec a;
  double b = 0.0;
};

ReducedRow reduce_cut(const Cut& cut);

// Ambiguity set over free increments v in R^{dim}: e'v <= 1, v >= 0, the
// accumulated cuts, and optional extra rows (used for synthetic shapes).
class Polyhedron {
 public:
  Polyhedron() = default;
  static Polyhedron simplex(int dim);

  int dim() const { return dim_; }
  const std::vector<Cut>& cuts() const { return cuts_; }

  // Returns a new polyhedron. Throws DegenerateCut for a zero normal;
  // a positive multiple of an existing cut is skipped.
  Polyhedron add_cut(const Vec& lifted, int sense) const;
  Polyhedron with_rows(const Mat& a, const Vec& b) const;

  // Stacked rows: base simplex rows, cuts in insertion order, extra rows.
  Mat a() const;
  Vec b() const;
  int num_rows() const { return dim_ + 1 + static_cast<int>(cuts_.size()) + static_cast<int>(extra_b_.size()); }

  // Every row satisfied within tol.
  bool contains(const Vec& v, double tol) const;

 private:
  int dim_ = 0;
  std::vector<Cut> cuts_;
  Mat extra_a_;
  Vec extra_b_;
};

// True when the hyperplane (Rv)'lifted = 0 crosses the interior, i.e.
// neither answer to the query is already implied by p.
bool splits(const Polyhedron& p, const Vec& lifted, double tol = 1e-9);

struct AnalyticCenter {
  Vec c;
  Vec slacks;
  Vec lifted;
  int newton_steps = 0;
  double grad_norm = 0.0;
};

AnalyticCenter analytic_center(const Polyhedron& p);

// Barrier Hessian sum a_i a_i' / s_i^2 at x.
Mat barrier_hessian(const Polyhedron& p, const Vec& x);

struct SonnevendAxis {
  Mat h;
  Vec direction;  // unit min-eigenvector of h
  Vec v1;         // c + t_plus * direction
  Vec v2;         // c - t_minus * direction
  double t_plus = 0.0;
  double t_minus = 0.0;
};

SonnevendAxis longest_axis_endpoints(const Polyhedron& p, const AnalyticCenter& ac);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

// Range of u(x_i) over the polyhedron for every breakpoint.
std::vector<Interval> utility_band(const Polyhedron& p, const BreakpointGrid& grid);

struct RadiusMetrics {
  std::optional<double> d_ac;
  double d_r1 = 0.0;
  double d_r2 = 0.0;
};

// d_ac needs v_star (lifted, on the same grid).
RadiusMetrics radius_metrics(const Polyhedron& p, const BreakpointGrid& grid, const std::optional<Vec>& v_star);

// max_i |cumsum(a)_i - cumsum(b)_i|.
double cumulative_gap(const Vec& a, const Vec& b);

}  // namespace prefel
