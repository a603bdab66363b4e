#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "prefel/numerics.hpp"
#include "simplex.hpp"

namespace prefel {

LpProblem LpProblem::nonnegative(Eigen::Index n) {
  LpProblem p;
  p.objective = Vec::Zero(n);
  p.eq_matrix = Mat::Zero(0, n);
  p.eq_rhs = Vec::Zero(0);
  p.ineq_matrix = Mat::Zero(0, n);
  p.ineq_rhs = Vec::Zero(0);
  p.lower = Vec::Zero(n);
  p.upper = Vec::Constant(n, kInf);
  return p;
}

void LpProblem::validate() const {
  const auto n = num_vars();
  auto fail = [](const std::string& msg) { throw std::invalid_argument("LpProblem: " + msg); };
  if (eq_matrix.cols() != n && eq_matrix.rows() > 0) fail("eq_matrix column count");
  if (ineq_matrix.cols() != n && ineq_matrix.rows() > 0) fail("ineq_matrix column count");
  if (eq_matrix.rows() != eq_rhs.size()) fail("eq_rhs size");
  if (ineq_matrix.rows() != ineq_rhs.size()) fail("ineq_rhs size");
  if (lower.size() != n || upper.size() != n) fail("bound vector size");
  for (Eigen::Index j = 0; j < n; ++j) {
    if (std::isnan(lower[j]) || std::isnan(upper[j]) || lower[j] > upper[j])
      fail("bounds of variable " + std::to_string(j));
    if (lower[j] == kInf || upper[j] == -kInf) fail("empty bound on variable " + std::to_string(j));
  }
  if (!objective.allFinite() || !eq_matrix.allFinite() || !ineq_matrix.allFinite() ||
      !eq_rhs.allFinite() || !ineq_rhs.allFinite())
    fail("non-finite data");
}

std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::infeasible: return "infeasible";
    case SolveStatus::unbounded: return "unbounded";
    case SolveStatus::iteration_limit: return "iteration_limit";
  }
  return "unknown";
}

namespace detail {

namespace {

bool finite(double x) { return std::isfinite(x); }

}  // namespace

BoundedSimplex::BoundedSimplex(const LpProblem& p, const Tolerances& tol) : tol_(tol) {
  p.validate();
  n_ = static_cast<int>(p.num_vars());
  n_eq_ = static_cast<int>(p.eq_rhs.size());
  m_ = n_eq_ + static_cast<int>(p.ineq_rhs.size());
  std::vector<Eigen::Triplet<double>> t;
  for (int j = 0; j < n_; ++j) {
    for (int i = 0; i < n_eq_; ++i)
      if (p.eq_matrix(i, j) != 0.0) t.emplace_back(i, j, p.eq_matrix(i, j));
    for (int i = 0; i < m_ - n_eq_; ++i)
      if (p.ineq_matrix(i, j) != 0.0) t.emplace_back(n_eq_ + i, j, p.ineq_matrix(i, j));
  }
  a_.resize(m_, n_);
  a_.setFromTriplets(t.begin(), t.end());
  a_.makeCompressed();
  b_.resize(m_);
  if (n_eq_ > 0) b_.head(n_eq_) = p.eq_rhs;
  if (m_ > n_eq_) b_.tail(m_ - n_eq_) = p.ineq_rhs;
  c_ = Vec::Zero(n_ + m_);
  c_.head(n_) = p.objective;
  lo_ = Vec::Zero(n_ + m_);
  hi_ = Vec::Zero(n_ + m_);
  lo_.head(n_) = p.lower;
  hi_.head(n_) = p.upper;
  for (int r = n_eq_; r < m_; ++r) hi_[n_ + r] = kInf;
  x_ = Vec::Zero(n_ + m_);
  head_.assign(m_, -1);
  pos_.assign(n_ + m_, -1);
  state_.assign(n_ + m_, kLower);
}

void BoundedSimplex::set_bounds(const Vec& lower, const Vec& upper) {
  if (lower.size() != n_ || upper.size() != n_) throw std::invalid_argument("set_bounds: size mismatch");
  lo_.head(n_) = lower;
  hi_.head(n_) = upper;
}

double BoundedSimplex::col_dot(int j, const Vec& v) const {
  if (j >= n_) return v[j - n_];
  double s = 0.0;
  for (Eigen::SparseMatrix<double>::InnerIterator it(a_, j); it; ++it) s += it.value() * v[it.row()];
  return s;
}

Vec BoundedSimplex::column(int j) const {
  Vec col = Vec::Zero(m_);
  if (j >= n_) {
    col[j - n_] = 1.0;
  } else {
    for (Eigen::SparseMatrix<double>::InnerIterator it(a_, j); it; ++it) col[it.row()] = it.value();
  }
  return col;
}

void BoundedSimplex::ftran(Vec& v) const {
  if (m_ == 0) return;
  v = lu_.solve(v);
  for (const Eta& e : etas_) {
    const double xr = v[e.row] / e.pivot;
    if (xr != 0.0)
      for (const auto& [i, a] : e.entries) v[i] -= a * xr;
    v[e.row] = xr;
  }
}

void BoundedSimplex::btran(Vec& v) const {
  if (m_ == 0) return;
  for (auto e = etas_.rbegin(); e != etas_.rend(); ++e) {
    double s = v[e->row];
    for (const auto& [i, a] : e->entries) s -= a * v[i];
    v[e->row] = s / e->pivot;
  }
  v = lu_.transpose().solve(v);
}

Vec BoundedSimplex::alpha(int j) const {
  Vec out = column(j);
  ftran(out);
  return out;
}

void BoundedSimplex::place_nonbasic(int j, State s) {
  if (s == kLower && !finite(lo_[j])) s = finite(hi_[j]) ? kUpper : kFree;
  if (s == kUpper && !finite(hi_[j])) s = finite(lo_[j]) ? kLower : kFree;
  if (s == kFree && (finite(lo_[j]) || finite(hi_[j]))) s = finite(lo_[j]) ? kLower : kUpper;
  state_[j] = s;
  x_[j] = s == kLower ? lo_[j] : s == kUpper ? hi_[j] : 0.0;
}

void BoundedSimplex::cold_basis() {
  std::fill(pos_.begin(), pos_.end(), -1);
  for (int r = 0; r < m_; ++r) {
    head_[r] = n_ + r;
    pos_[n_ + r] = r;
    state_[n_ + r] = kBasic;
  }
  // Boxed columns start at the bound their cost favours so the slack basis
  // is often dual feasible.
  for (int j = 0; j < n_; ++j) place_nonbasic(j, c_[j] > 0.0 ? kUpper : kLower);
  refactor();
}

bool BoundedSimplex::load_basis(const Basis& b) {
  if (static_cast<int>(b.head.size()) != m_ || static_cast<int>(b.state.size()) != n_ + m_) return false;
  std::vector<int> seen(n_ + m_, -1);
  for (int r = 0; r < m_; ++r) {
    const int k = b.head[r];
    if (k < 0 || k >= n_ + m_ || seen[k] >= 0 || b.state[k] != kBasic) return false;
    seen[k] = r;
  }
  head_ = b.head;
  pos_ = seen;
  for (int j = 0; j < n_ + m_; ++j) {
    if (pos_[j] >= 0) {
      state_[j] = kBasic;
    } else {
      if (b.state[j] == kBasic) return false;
      place_nonbasic(j, static_cast<State>(b.state[j]));
    }
  }
  return refactor(true);
}

bool BoundedSimplex::refactor(bool check) {
  since_refactor_ = 0;
  etas_.clear();
  if (m_ == 0) return true;
  std::vector<Eigen::Triplet<double>> t;
  for (int r = 0; r < m_; ++r) {
    const int k = head_[r];
    if (k >= n_) {
      t.emplace_back(k - n_, r, 1.0);
    } else {
      for (Eigen::SparseMatrix<double>::InnerIterator it(a_, k); it; ++it) t.emplace_back(it.row(), r, it.value());
    }
  }
  Eigen::SparseMatrix<double> bm(m_, m_);
  bm.setFromTriplets(t.begin(), t.end());
  bm.makeCompressed();
  lu_.compute(bm);
  if (lu_.info() != Eigen::Success) return false;
  if (check) {
    const Vec ones = Vec::Ones(m_);
    const Vec x = lu_.solve(ones);
    if (!x.allFinite() || (bm * x - ones).cwiseAbs().maxCoeff() > 1e-7 * (1.0 + x.cwiseAbs().maxCoeff()))
      return false;
  }
  recompute_xb();
  return x_.allFinite();
}

void BoundedSimplex::recompute_xb() {
  if (m_ == 0) return;
  Vec rhs = b_;
  for (int j = 0; j < n_ + m_; ++j) {
    if (state_[j] == kBasic || x_[j] == 0.0) continue;
    if (j >= n_) {
      rhs[j - n_] -= x_[j];
    } else {
      for (Eigen::SparseMatrix<double>::InnerIterator it(a_, j); it; ++it) rhs[it.row()] -= it.value() * x_[j];
    }
  }
  ftran(rhs);
  for (int r = 0; r < m_; ++r) x_[head_[r]] = rhs[r];
}

void BoundedSimplex::pivot(int enter, int row, const Vec& al) {
  Eta e{row, al[row], {}};
  for (int i = 0; i < m_; ++i)
    if (i != row && al[i] != 0.0) e.entries.emplace_back(i, al[i]);
  etas_.push_back(std::move(e));
  pos_[head_[row]] = -1;
  head_[row] = enter;
  pos_[enter] = row;
  state_[enter] = kBasic;
}

double BoundedSimplex::ftol(double bound) const { return tol_.feasibility * std::max(1.0, std::abs(bound)); }

double BoundedSimplex::violation(int r) const {
  const int k = head_[r];
  const double v = x_[k];
  if (finite(lo_[k]) && v < lo_[k] - ftol(lo_[k])) return v - lo_[k];
  if (finite(hi_[k]) && v > hi_[k] + ftol(hi_[k])) return v - hi_[k];
  return 0.0;
}

Vec BoundedSimplex::prices(const Vec& cb) const {
  Vec y = cb;
  btran(y);
  return y;
}

Vec BoundedSimplex::reduced(const Vec& y, bool phase1) const {
  Vec d = Vec::Zero(n_ + m_);
  const Vec aty = m_ > 0 ? Vec(a_.transpose() * y) : Vec::Zero(n_);
  for (int j = 0; j < n_ + m_; ++j) {
    if (state_[j] == kBasic) continue;
    const double cj = phase1 ? 0.0 : c_[j];
    d[j] = cj - (j < n_ ? aty[j] : y[j - n_]);
  }
  return d;
}

bool BoundedSimplex::dual_feasible(const Vec& d) {
  bool flipped = false;
  for (int j = 0; j < n_ + m_; ++j) {
    if (state_[j] == kBasic || lo_[j] == hi_[j]) continue;
    const double opt = tol_.optimality;
    if (state_[j] == kLower && d[j] > opt) {
      if (!finite(hi_[j])) return false;
      place_nonbasic(j, kUpper);
      flipped = true;
    } else if (state_[j] == kUpper && d[j] < -opt) {
      if (!finite(lo_[j])) return false;
      place_nonbasic(j, kLower);
      flipped = true;
    } else if (state_[j] == kFree && std::abs(d[j]) > opt) {
      return false;
    }
  }
  if (flipped) return refactor();
  return true;
}

BoundedSimplex::Outcome BoundedSimplex::primal() {
  int degenerate = 0, restarts = 0;
  for (;;) {
    if (iterations_ >= tol_.max_simplex_iterations) return Outcome::limit;
    bool phase1 = false;
    Vec cb = Vec::Zero(m_);
    for (int r = 0; r < m_; ++r) {
      const double v = violation(r);
      if (v != 0.0) {
        phase1 = true;
        cb[r] = v < 0.0 ? 1.0 : -1.0;
      }
    }
    if (!phase1)
      for (int r = 0; r < m_; ++r) cb[r] = c_[head_[r]];
    const Vec d = reduced(prices(cb), phase1);
    const bool bland = degenerate > 50;

    int enter = -1, dir = 0;
    double best = 0.0;
    for (int j = 0; j < n_ + m_; ++j) {
      if (state_[j] == kBasic || lo_[j] == hi_[j]) continue;
      int sdir = 0;
      if (d[j] > tol_.optimality && state_[j] != kUpper) sdir = 1;
      else if (d[j] < -tol_.optimality && state_[j] != kLower) sdir = -1;
      if (sdir == 0) continue;
      if (bland) {
        enter = j;
        dir = sdir;
        break;
      }
      if (std::abs(d[j]) > best) {
        best = std::abs(d[j]);
        enter = j;
        dir = sdir;
      }
    }
    if (enter < 0) {
      if (since_refactor_ > 0) {
        // Accumulated updates can hide a small infeasibility; recompute the
        // basic values before concluding.
        if (phase1) {
          if (!refactor()) return Outcome::limit;
        } else {
          recompute_xb();
          since_refactor_ = 0;
        }
        continue;
      }
      return phase1 ? Outcome::infeasible : Outcome::optimal;
    }

    const Vec al = alpha(enter);
    const double flip = finite(lo_[enter]) && finite(hi_[enter]) ? hi_[enter] - lo_[enter] : kInf;
    // Basic r moves at rate -dir * al[r] per unit step.
    int leave = -1;
    double step = kInf, leave_bound = 0.0;
    {
      double tmax = kInf;
      struct Cand {
        int r;
        double bound, dist, rate;
      };
      std::vector<Cand> cands;
      for (int r = 0; r < m_; ++r) {
        const double rate = -dir * al[r];
        if (std::abs(rate) <= tol_.pivot) continue;
        const int k = head_[r];
        const double v = x_[k];
        double bound;
        if (rate < 0.0) {
          if (finite(hi_[k]) && v > hi_[k] + ftol(hi_[k])) bound = hi_[k];
          else if (finite(lo_[k]) && v >= lo_[k] - ftol(lo_[k])) bound = lo_[k];
          else continue;
        } else {
          if (finite(lo_[k]) && v < lo_[k] - ftol(lo_[k])) bound = lo_[k];
          else if (finite(hi_[k]) && v <= hi_[k] + ftol(hi_[k])) bound = hi_[k];
          else continue;
        }
        const double dist = std::max(rate < 0.0 ? v - bound : bound - v, 0.0);
        cands.push_back({r, bound, dist, std::abs(rate)});
        tmax = std::min(tmax, (dist + ftol(bound)) / std::abs(rate));
      }
      for (const Cand& c : cands) {
        const double ratio = c.dist / c.rate;
        bool take;
        if (bland) {
          take = leave < 0 || ratio < step - 1e-12 || (ratio <= step + 1e-12 && head_[c.r] < head_[leave]);
        } else {
          take = ratio <= tmax && (leave < 0 || c.rate > std::abs(al[leave]));
        }
        if (take) {
          leave = c.r;
          step = ratio;
          leave_bound = c.bound;
        }
      }
    }

    if (leave < 0 || flip <= step) {
      if (!finite(flip)) {
        if (since_refactor_ > 0) {
          if (!refactor()) return Outcome::limit;
          continue;
        }
        if (phase1) {
          if (++restarts > 2) return Outcome::limit;
          cold_basis();
          continue;
        }
        return Outcome::unbounded;
      }
      state_[enter] = dir > 0 ? kUpper : kLower;
      x_[enter] = dir > 0 ? hi_[enter] : lo_[enter];
      for (int r = 0; r < m_; ++r) x_[head_[r]] -= dir * flip * al[r];
      degenerate = 0;
    } else {
      x_[enter] += dir * step;
      for (int r = 0; r < m_; ++r) x_[head_[r]] -= dir * step * al[r];
      const int k = head_[leave];
      x_[k] = leave_bound;
      state_[k] = leave_bound == lo_[k] ? kLower : kUpper;
      pivot(enter, leave, al);
      degenerate = step <= 1e-12 ? degenerate + 1 : 0;
    }
    ++iterations_;
    if (++since_refactor_ >= 64 || !x_.allFinite()) {
      if (!refactor()) {
        if (++restarts > 2) return Outcome::limit;
        cold_basis();
      }
    }
  }
}

BoundedSimplex::Outcome BoundedSimplex::dual() {
  int degenerate = 0;
  for (;;) {
    if (iterations_ >= tol_.max_simplex_iterations) return Outcome::limit;
    const bool bland = degenerate > 50;
    int row = -1;
    double worst = 0.0;
    for (int r = 0; r < m_; ++r) {
      const double v = violation(r);
      if (v == 0.0) continue;
      if (bland) {
        if (row < 0 || head_[r] < head_[row]) row = r;
      } else if (std::abs(v) > worst) {
        worst = std::abs(v);
        row = r;
      }
    }
    if (row < 0) {
      if (since_refactor_ > 0) {
        recompute_xb();
        since_refactor_ = 0;
        continue;
      }
      return Outcome::optimal;
    }
    const int k = head_[row];
    const bool below = violation(row) < 0.0;
    const double target = below ? lo_[k] : hi_[k];
    const double s = below ? 1.0 : -1.0;

    Vec cb(m_);
    for (int r = 0; r < m_; ++r) cb[r] = c_[head_[r]];
    const Vec d = reduced(prices(cb), false);
    Vec rho = Vec::Zero(m_);
    rho[row] = 1.0;
    btran(rho);
    const Vec at_rho = a_.transpose() * rho;

    struct Cand {
      int j;
      double ratio, mag;
    };
    std::vector<Cand> cands;
    double tmax = kInf;
    for (int j = 0; j < n_ + m_; ++j) {
      if (state_[j] == kBasic || lo_[j] == hi_[j]) continue;
      const double arj = j < n_ ? at_rho[j] : rho[j - n_];
      if (std::abs(arj) <= tol_.pivot) continue;
      const bool inc = state_[j] != kUpper, dec = state_[j] != kLower;
      if (!((inc && -arj * s > 0.0) || (dec && arj * s > 0.0))) continue;
      const double num = state_[j] == kLower ? std::max(-d[j], 0.0)
                         : state_[j] == kUpper ? std::max(d[j], 0.0)
                                               : std::abs(d[j]);
      cands.push_back({j, num / std::abs(arj), std::abs(arj)});
      tmax = std::min(tmax, (num + tol_.optimality) / std::abs(arj));
    }
    int enter = -1;
    double best_ratio = kInf, best_mag = 0.0;
    for (const Cand& c : cands) {
      bool take;
      if (bland)
        take = enter < 0 || c.ratio < best_ratio - 1e-12;
      else
        take = c.ratio <= tmax && c.mag > best_mag;
      if (take) {
        enter = c.j;
        best_ratio = c.ratio;
        best_mag = c.mag;
      }
    }
    if (enter < 0) {
      if (since_refactor_ > 0) {
        if (!refactor()) return Outcome::limit;
        continue;
      }
      return Outcome::infeasible;
    }
    const Vec al = alpha(enter);
    const double arj = al[row];
    if (std::abs(arj) <= tol_.pivot) {
      if (!refactor()) return Outcome::limit;
      continue;
    }
    const double delta = (x_[k] - target) / arj;
    x_[enter] += delta;
    for (int r = 0; r < m_; ++r) x_[head_[r]] -= delta * al[r];
    x_[k] = target;
    state_[k] = target == lo_[k] ? kLower : kUpper;
    pivot(enter, row, al);
    degenerate = best_ratio <= 1e-12 ? degenerate + 1 : 0;
    ++iterations_;
    if (++since_refactor_ >= 64 || !x_.allFinite()) {
      if (!refactor()) return Outcome::limit;
    }
  }
}

Basis BoundedSimplex::basis() const { return {head_, state_}; }

Solution BoundedSimplex::solve(const Basis* warm) {
  iterations_ = 0;
  if (!(warm && load_basis(*warm))) cold_basis();
  Outcome o = Outcome::optimal;
  Vec cb(m_);
  for (int r = 0; r < m_; ++r) cb[r] = c_[head_[r]];
  if (dual_feasible(reduced(prices(cb), false))) o = dual();
  if (o == Outcome::optimal) o = primal();
  return finish(o);
}

Solution BoundedSimplex::finish(Outcome o) const {
  Solution sol;
  sol.iterations = iterations_;
  switch (o) {
    case Outcome::infeasible: sol.status = SolveStatus::infeasible; return sol;
    case Outcome::unbounded: sol.status = SolveStatus::unbounded; return sol;
    case Outcome::limit: sol.status = SolveStatus::iteration_limit; return sol;
    case Outcome::optimal: break;
  }
  Vec x = x_.head(n_);
  for (int j = 0; j < n_; ++j) x[j] = std::clamp(x[j], lo_[j], hi_[j]);
  Vec cb(m_);
  for (int r = 0; r < m_; ++r) cb[r] = c_[head_[r]];
  const Vec y = prices(cb);
  sol.status = SolveStatus::optimal;
  sol.point = x;
  sol.value = c_.head(n_).dot(x);
  sol.duals = y;
  sol.reduced_costs = m_ > 0 ? Vec(c_.head(n_) - a_.transpose() * y) : Vec(c_.head(n_));
  return sol;
}

}  // namespace detail

Solution solve_lp(const LpProblem& p, const Tolerances& tol) {
  detail::BoundedSimplex s(p, tol);
  return s.solve();
}

double dual_objective(const LpProblem& p, const Solution& s) {
  if (!s.optimal() || !s.duals || !s.reduced_costs)
    throw std::invalid_argument("dual_objective needs an optimal solution with multipliers");
  const Vec& y = *s.duals;
  const auto ne = p.eq_rhs.size();
  double v = 0.0;
  if (ne > 0) v += p.eq_rhs.dot(y.head(ne));
  if (p.ineq_rhs.size() > 0) v += p.ineq_rhs.dot(y.tail(p.ineq_rhs.size()));
  const Vec& r = *s.reduced_costs;
  for (Eigen::Index j = 0; j < r.size(); ++j) {
    // A variable with nonzero reduced cost sits at the bound it pushes
    // against; the dual pays that bound.
    if (r[j] > 0 && std::isfinite(p.upper[j]))
      v += r[j] * p.upper[j];
    else if (r[j] < 0 && std::isfinite(p.lower[j]))
      v += r[j] * p.lower[j];
    else
      v += r[j] * s.point[j];
  }
  return v;
}

}  // namespace prefel
