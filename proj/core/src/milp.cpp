#include <algorithm>
#include <cmath>
#include <memory>
#include <queue>
#include <stdexcept>
#include <string>

#include "prefel/numerics.hpp"
#include "simplex.hpp"

namespace prefel {

void MilpProblem::validate() const {
  lp.validate();
  const auto n = lp.num_vars();
  std::vector<bool> is_bin(n, false);
  for (int j : binaries) {
    if (j < 0 || j >= n) throw std::invalid_argument("MilpProblem: binary index out of range");
    is_bin[j] = true;
  }
  for (const auto& g : sos1_groups) {
    if (g.empty()) throw std::invalid_argument("MilpProblem: empty sos1 group");
    for (int j : g)
      if (j < 0 || j >= n || !is_bin[j])
        throw std::invalid_argument("MilpProblem: sos1 member " + std::to_string(j) + " is not binary");
  }
}

namespace {

struct Node {
  Vec lower;
  Vec upper;
  double bound;
  long id;
  // Optimal basis of the parent relaxation.
  std::shared_ptr<const detail::Basis> warm;
};

struct NodeOrder {
  bool operator()(const Node& a, const Node& b) const {
    if (a.bound != b.bound) return a.bound < b.bound;
    return a.id < b.id;  // deeper (newer) nodes first among equal bounds
  }
};

}  // namespace

Solution solve_milp(const MilpProblem& p, const Tolerances& tol) {
  p.validate();
  LpProblem base = p.lp;
  const auto n = base.num_vars();
  for (int j : p.binaries) {
    base.lower[j] = std::max(base.lower[j], 0.0);
    base.upper[j] = std::min(base.upper[j], 1.0);
  }
  if (!p.sos1_groups.empty()) {
    const auto old = base.eq_matrix.rows();
    const auto extra = static_cast<Eigen::Index>(p.sos1_groups.size());
    Mat eq = Mat::Zero(old + extra, n);
    if (old > 0) eq.topRows(old) = base.eq_matrix;
    Vec rhs(old + extra);
    if (old > 0) rhs.head(old) = base.eq_rhs;
    for (Eigen::Index g = 0; g < extra; ++g) {
      for (int j : p.sos1_groups[g]) eq(old + g, j) = 1.0;
      rhs[old + g] = 1.0;
    }
    base.eq_matrix = std::move(eq);
    base.eq_rhs = std::move(rhs);
  }

  Solution best;
  best.status = SolveStatus::infeasible;
  double incumbent = -kInf;
  long next_id = 0, nodes = 0, lp_iters = 0;

  detail::BoundedSimplex simplex(base, tol);
  std::priority_queue<Node, std::vector<Node>, NodeOrder> open;
  open.push({base.lower, base.upper, kInf, next_id++, nullptr});
  bool limit_hit = false;

  while (!open.empty()) {
    Node node = open.top();
    open.pop();
    if (node.bound <= incumbent + tol.milp_gap) continue;
    if (nodes >= tol.max_bb_nodes) {
      limit_hit = true;
      break;
    }
    ++nodes;
    simplex.set_bounds(node.lower, node.upper);
    Solution relax = simplex.solve(node.warm.get());
    const auto warm = std::make_shared<const detail::Basis>(simplex.basis());
    lp_iters += relax.iterations;
    if (relax.status == SolveStatus::iteration_limit) {
      limit_hit = true;
      break;
    }
    if (relax.status == SolveStatus::unbounded) {
      Solution s;
      s.status = SolveStatus::unbounded;
      s.nodes = nodes;
      s.iterations = lp_iters;
      return s;
    }
    if (relax.status == SolveStatus::infeasible) continue;
    if (relax.value <= incumbent + tol.milp_gap) continue;
    const Vec& x = relax.point;

    auto fractional = [&](int j) {
      return std::abs(x[j] - std::round(x[j])) > tol.integrality;
    };

    bool branched = false;
    for (const auto& group : p.sos1_groups) {
      std::vector<int> live;
      int active = 0;
      bool frac = false;
      for (int j : group) {
        if (node.upper[j] <= 0.0) continue;
        live.push_back(j);
        if (x[j] > tol.integrality) ++active;
        if (fractional(j)) frac = true;
      }
      if (live.size() < 2 || (active <= 1 && !frac)) continue;
      // Split where the relaxation's cumulative mass crosses one half.
      double total = 0.0;
      for (int j : live) total += std::max(x[j], 0.0);
      double acc = 0.0;
      size_t split = 0;
      for (; split + 2 < live.size(); ++split) {
        acc += std::max(x[live[split]], 0.0);
        if (acc >= 0.5 * total) break;
      }
      Node left{node.lower, node.upper, relax.value, next_id++, warm};
      Node right{node.lower, node.upper, relax.value, next_id++, warm};
      for (size_t t = 0; t < live.size(); ++t) {
        if (t <= split)
          right.upper[live[t]] = 0.0;
        else
          left.upper[live[t]] = 0.0;
      }
      open.push(std::move(left));
      open.push(std::move(right));
      branched = true;
      break;
    }
    if (branched) continue;

    for (int j : p.binaries) {
      if (!fractional(j)) continue;
      Node down{node.lower, node.upper, relax.value, next_id++, warm};
      Node up{node.lower, node.upper, relax.value, next_id++, warm};
      down.upper[j] = 0.0;
      up.lower[j] = 1.0;
      open.push(std::move(down));
      open.push(std::move(up));
      branched = true;
      break;
    }
    if (branched) continue;

    incumbent = relax.value;
    best = relax;
    for (int j : p.binaries) best.point[j] = std::round(best.point[j]);
  }

  best.nodes = nodes;
  best.iterations = lp_iters;
  if (limit_hit) {
    best.status = SolveStatus::iteration_limit;
    if (!std::isfinite(incumbent)) best.value = std::numeric_limits<double>::quiet_NaN();
  }
  return best;
}

}  // namespace prefel
