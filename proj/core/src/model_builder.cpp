#include <stdexcept>

#include "prefel/numerics.hpp"

namespace prefel {

int ModelBuilder::add_var(double lo, double hi, double obj) {
  lo_.push_back(lo);
  hi_.push_back(hi);
  obj_.push_back(obj);
  return static_cast<int>(lo_.size()) - 1;
}

int ModelBuilder::add_vars(int count, double lo, double hi, double obj) {
  const int first = num_vars();
  for (int i = 0; i < count; ++i) add_var(lo, hi, obj);
  return first;
}

void ModelBuilder::set_objective(int var, double coef) { obj_.at(var) = coef; }

void ModelBuilder::add_row(const std::vector<std::pair<int, double>>& terms, RowSense sense, double rhs) {
  for (const auto& [j, a] : terms)
    if (j < 0 || j >= num_vars()) throw std::out_of_range("ModelBuilder: row references unknown variable");
  rows_.push_back({terms, sense, rhs});
}

void ModelBuilder::mark_binary(int var) { binaries_.push_back(var); }

void ModelBuilder::add_sos1(std::vector<int> group) { sos1_.push_back(std::move(group)); }

LpProblem ModelBuilder::lp() const {
  const int n = num_vars();
  int ne = 0, ni = 0;
  for (const auto& r : rows_) (r.sense == RowSense::eq ? ne : ni)++;
  LpProblem p;
  p.objective = Eigen::Map<const Vec>(obj_.data(), n);
  p.lower = Eigen::Map<const Vec>(lo_.data(), n);
  p.upper = Eigen::Map<const Vec>(hi_.data(), n);
  p.eq_matrix = Mat::Zero(ne, n);
  p.eq_rhs = Vec::Zero(ne);
  p.ineq_matrix = Mat::Zero(ni, n);
  p.ineq_rhs = Vec::Zero(ni);
  int ie = 0, ii = 0;
  for (const auto& r : rows_) {
    if (r.sense == RowSense::eq) {
      for (const auto& [j, a] : r.terms) p.eq_matrix(ie, j) += a;
      p.eq_rhs[ie++] = r.rhs;
    } else {
      const double s = r.sense == RowSense::le ? 1.0 : -1.0;
      for (const auto& [j, a] : r.terms) p.ineq_matrix(ii, j) += s * a;
      p.ineq_rhs[ii++] = s * r.rhs;
    }
  }
  return p;
}

MilpProblem ModelBuilder::milp() const { return {lp(), binaries_, sos1_}; }

}  // namespace prefel
