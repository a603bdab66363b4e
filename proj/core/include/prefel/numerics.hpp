#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "prefel/tolerances.hpp"

namespace prefel {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// max objective'x  s.t.  eq_matrix x = eq_rhs,  ineq_matrix x <= ineq_rhs,
// lower <= x <= upper.
struct LpProblem {
  Vec objective;
  Mat eq_matrix;
  Vec eq_rhs;
  Mat ineq_matrix;
  Vec ineq_rhs;
  Vec lower;
  Vec upper;

  // n variables, zero objective, no rows, x >= 0.
  static LpProblem nonnegative(Eigen::Index n);

  Eigen::Index num_vars() const { return objective.size(); }
  // Throws std::invalid_argument describing the first inconsistency.
  void validate() const;
};

struct MilpProblem {
  LpProblem lp;
  std::vector<int> binaries;
  // Each group gets an implicit "sum equals one" row; members must be binary.
  std::vector<std::vector<int>> sos1_groups;

  void validate() const;
};

enum class SolveStatus { optimal, infeasible, unbounded, iteration_limit };

std::string to_string(SolveStatus s);

struct Solution {
  SolveStatus status = SolveStatus::infeasible;
  double value = std::numeric_limits<double>::quiet_NaN();
  Vec point;
  // Row multipliers, equality rows first then inequality rows. Inequality
  // multipliers are >= 0 for the maximization convention used here.
  std::optional<Vec> duals;
  // objective - A' duals, per variable.
  std::optional<Vec> reduced_costs;
  long iterations = 0;
  long nodes = 0;

  bool optimal() const { return status == SolveStatus::optimal; }
};

Solution solve_lp(const LpProblem& p, const Tolerances& tol = kDefaultTolerances);

// Objective value of the LP dual implied by the multipliers of an optimal
// solve: b'y plus the bound terms carried by the reduced costs.
double dual_objective(const LpProblem& p, const Solution& s);

// Branch and bound over LP relaxations. sos1 groups are branched before
// plain binaries; ties go to the lowest group/variable index.
Solution solve_milp(const MilpProblem& p, const Tolerances& tol = kDefaultTolerances);

struct EigenPair {
  double value = 0.0;
  Vec vector;
};

// Smallest eigenpair of a symmetric positive definite matrix. The vector is
// unit length with its first nonzero component positive.
EigenPair min_eigenpair(const Mat& h);

enum class RowSense { le, ge, eq };

// Incremental row/column assembly for the larger formulations. Rows are
// stored sparsely until build().
class ModelBuilder {
 public:
  int add_var(double lo, double hi, double obj = 0.0);
  // Returns the index of the first of `count` consecutive variables.
  int add_vars(int count, double lo, double hi, double obj = 0.0);
  void set_objective(int var, double coef);
  void add_row(const std::vector<std::pair<int, double>>& terms, RowSense sense, double rhs);
  void mark_binary(int var);
  void add_sos1(std::vector<int> group);

  int num_vars() const { return static_cast<int>(lo_.size()); }
  LpProblem lp() const;
  MilpProblem milp() const;

 private:
  struct Row {
    std::vector<std::pair<int, double>> terms;
    RowSense sense;
    double rhs;
  };
  std::vector<double> lo_, hi_, obj_;
  std::vector<Row> rows_;
  std::vector<int> binaries_;
  std::vector<std::vector<int>> sos1_;
};

}  // namespace prefel
