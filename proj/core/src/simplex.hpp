#pragma once

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <vector>

#include "prefel/numerics.hpp"

namespace prefel::detail {

// Basis snapshot that can seed a later solve with the same rows.
struct Basis {
  std::vector<int> head;            // basic column per row
  std::vector<signed char> state;   // per column, see BoundedSimplex::State
};

// Bounded-variable revised simplex on  A x + s = b  with bounds on x and on
// the row slacks (s in [0, 0] for equalities, [0, inf) for <= rows). Only
// variable bounds may change between solves, which is what branch and bound
// needs for warm starts.
class BoundedSimplex {
 public:
  BoundedSimplex(const LpProblem& p, const Tolerances& tol);

  void set_bounds(const Vec& lower, const Vec& upper);
  // Cold start when `warm` is null or unusable.
  Solution solve(const Basis* warm = nullptr);
  Basis basis() const;

 private:
  enum State : signed char { kBasic = 0, kLower = 1, kUpper = 2, kFree = 3 };
  enum class Outcome { optimal, infeasible, unbounded, limit };

  // Product-form update: column `row` of the basis was replaced and the
  // entering column's representation was `alpha`.
  struct Eta {
    int row;
    double pivot;
    std::vector<std::pair<int, double>> entries;  // off-pivot nonzeros
  };

  void ftran(Vec& v) const;  // v <- B^-1 v
  void btran(Vec& v) const;  // v <- B^-T v
  double col_dot(int j, const Vec& v) const;
  Vec column(int j) const;
  Vec alpha(int j) const;
  void place_nonbasic(int j, State s);
  void cold_basis();
  bool load_basis(const Basis& b);
  // Rebuilds the basis inverse; `check` also verifies it against B.
  bool refactor(bool check = false);
  void recompute_xb();
  void pivot(int enter, int row, const Vec& alpha);
  double ftol(double bound) const;
  // Signed distance beyond the bounds of basic row r: < 0 below, > 0 above.
  double violation(int r) const;
  Vec prices(const Vec& cb) const;
  Vec reduced(const Vec& y, bool phase1) const;
  bool dual_feasible(const Vec& d);
  Outcome primal();
  Outcome dual();
  Solution finish(Outcome o) const;

  const Tolerances tol_;
  int n_ = 0, m_ = 0;
  int n_eq_ = 0;
  Eigen::SparseMatrix<double> a_;
  Vec b_, c_;
  Vec lo_, hi_;
  std::vector<int> head_;
  std::vector<int> pos_;
  std::vector<signed char> state_;
  Vec x_;
  mutable Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu_;  // transpose() is non-const
  std::vector<Eta> etas_;
  long iterations_ = 0;
  int since_refactor_ = 0;
};

}  // namespace prefel::detail
