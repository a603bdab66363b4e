#include "prefel/pro.hpp"

#include <algorithm>
#include <cmath>

namespace prefel {

void ProInstance::validate() const {
  const int l = intervals();
  if (rows.cols() != l && rows.rows() > 0) throw std::invalid_argument("cut rows do not match the grid");
  if (center.size() != l) throw std::invalid_argument("center does not match the grid");
  if (scenarios.rows() < 1 || scenarios.cols() < 1) throw std::invalid_argument("need at least one scenario and one asset");
  if (!scenarios.allFinite()) throw std::invalid_argument("scenario returns must be finite");
  for (Eigen::Index k = 0; k < scenarios.rows(); ++k) {
    // Over the unit simplex z'xi ranges between the smallest and largest
    // coordinate of xi.
    if (scenarios.row(k).minCoeff() < grid.lo() || scenarios.row(k).maxCoeff() > grid.hi())
      throw std::invalid_argument("scenario " + std::to_string(k + 1) + " has returns outside [" +
                                  std::to_string(grid.lo()) + ", " + std::to_string(grid.hi()) + "]");
  }
}

ProInstance make_instance(const Polyhedron& p, const BreakpointGrid& grid, Mat scenarios, std::optional<Vec> center) {
  if (grid.intervals() != p.dim() + 1) throw std::invalid_argument("grid does not match polyhedron dimension");
  ProInstance inst;
  inst.grid = grid;
  const Mat a = p.a();
  const Vec b = p.b();
  const int l = grid.intervals();
  const int base = p.dim() + 1;
  // a'v <= b on the free part becomes (a, 0)'v - b e'v <= 0 on the lift.
  inst.rows = Mat::Zero(a.rows() - base, l);
  for (Eigen::Index r = base; r < a.rows(); ++r) {
    inst.rows.row(r - base).head(l - 1) = a.row(r);
    inst.rows.row(r - base).array() -= b[r];
  }
  inst.center = center ? *center : analytic_center(p).lifted;
  inst.scenarios = std::move(scenarios);
  inst.validate();
  return inst;
}

Vec mean_g(const ProInstance& inst, const Vec& z) {
  Vec acc = Vec::Zero(inst.intervals());
  for (int k = 0; k < inst.num_scenarios(); ++k) {
    const double x = std::clamp(inst.scenarios.row(k).dot(z), inst.grid.lo(), inst.grid.hi());
    acc += g_of_x(inst.grid, x);
  }
  return acc / inst.num_scenarios();
}

namespace {

// Rows v >= 0, e'v = 1, rows v <= 0 over lifted v stored at [v0, v0+l).
void add_lifted_polyhedron(ModelBuilder& mb, const ProInstance& inst, int v0) {
  const int l = inst.intervals();
  std::vector<std::pair<int, double>> sum;
  for (int i = 0; i < l; ++i) sum.push_back({v0 + i, 1.0});
  mb.add_row(sum, RowSense::eq, 1.0);
  for (Eigen::Index m = 0; m < inst.rows.rows(); ++m) {
    std::vector<std::pair<int, double>> t;
    for (int i = 0; i < l; ++i)
      if (inst.rows(m, i) != 0.0) t.push_back({v0 + i, inst.rows(m, i)});
    mb.add_row(t, RowSense::le, 0.0);
  }
}

LpProblem worst_case_lp(const ProInstance& inst, const Vec& gbar) {
  ModelBuilder mb;
  const int l = inst.intervals();
  const int v0 = mb.add_vars(l, 0.0, kInf);
  for (int i = 0; i < l; ++i) mb.set_objective(v0 + i, -gbar[i]);
  add_lifted_polyhedron(mb, inst, v0);
  return mb.lp();
}

// z, per-scenario (y, b) encoding of g(z'xi_k), and the mean g terms.
struct PortfolioBlock {
  int z0 = 0;
  std::vector<int> y0, b0;
  std::vector<std::vector<std::pair<int, double>>> gbar;  // per interval
};

PortfolioBlock add_portfolio(ModelBuilder& mb, const ProInstance& inst) {
  PortfolioBlock pb;
  const int l = inst.intervals(), n = inst.assets(), kk = inst.num_scenarios();
  const PqEncoding pq = pq_matrices(inst.grid);
  pb.z0 = mb.add_vars(n, 0.0, kInf);
  std::vector<std::pair<int, double>> zsum;
  for (int j = 0; j < n; ++j) zsum.push_back({pb.z0 + j, 1.0});
  mb.add_row(zsum, RowSense::eq, 1.0);
  pb.gbar.assign(l, {});
  for (int k = 0; k < kk; ++k) {
    const int y0 = mb.add_vars(l, -kInf, kInf);
    const int b0 = mb.add_vars(l, 0.0, 1.0);
    std::vector<int> group;
    for (int i = 0; i < l; ++i) {
      mb.mark_binary(b0 + i);
      group.push_back(b0 + i);
    }
    mb.add_sos1(group);
    std::vector<std::pair<int, double>> link;
    for (int i = 0; i < l; ++i) link.push_back({y0 + i, 1.0});
    for (int j = 0; j < n; ++j) link.push_back({pb.z0 + j, -inst.scenarios(k, j)});
    mb.add_row(link, RowSense::eq, 0.0);
    for (int i = 0; i < l; ++i) {
      mb.add_row({{y0 + i, 1.0}, {b0 + i, -inst.grid[i + 1]}}, RowSense::le, 0.0);
      mb.add_row({{y0 + i, -1.0}, {b0 + i, inst.grid[i]}}, RowSense::le, 0.0);
    }
    const double w = 1.0 / kk;
    for (int i = 0; i < l; ++i) {
      pb.gbar[i].push_back({y0 + i, w * pq.p_diag[i]});
      for (int j = i; j < l; ++j) pb.gbar[i].push_back({b0 + j, w * pq.q(i, j)});
    }
    pb.y0.push_back(y0);
    pb.b0.push_back(b0);
  }
  return pb;
}

Vec slice(const Vec& x, int from, int count) { return x.segment(from, count); }

ProResult unsolved(const Solution& s) {
  ProResult r;
  r.status = s.status;
  r.nodes = s.nodes;
  r.value = std::numeric_limits<double>::quiet_NaN();
  return r;
}

}  // namespace

IncrementBox increment_bounds(const ProInstance& inst) {
  inst.validate();
  const int l = inst.intervals();
  LpProblem lp = worst_case_lp(inst, Vec::Zero(l));
  IncrementBox box{inst.center, Vec::Zero(l), Vec::Zero(l)};
  for (int i = 0; i < l; ++i) {
    lp.objective.setZero();
    lp.objective[i] = 1.0;
    const Solution hi = solve_lp(lp);
    lp.objective[i] = -1.0;
    const Solution lo = solve_lp(lp);
    if (!hi.optimal() || !lo.optimal()) throw std::runtime_error("increment bound LP failed");
    box.upper_dev[i] = std::max(hi.value - inst.center[i], 0.0);
    box.lower_dev[i] = std::max(inst.center[i] + lo.value, 0.0);
  }
  return box;
}

Vec sigma_weights(double gamma, int n) {
  if (!(gamma > 0.0 && gamma <= 1.0)) throw std::invalid_argument("gamma must lie in (0, 1]");
  if (n < 3) throw std::invalid_argument("sigma weights need N >= 3");
  Vec s(n - 1);
  for (int i = 1; i < n; ++i) s[i - 1] = std::pow(static_cast<double>(i), gamma - 1.0);
  return s;
}

Vec masked_sigma(const Vec& sigma, int s) {
  if (s < 1 || s > sigma.size()) throw std::invalid_argument("mask length must lie in [1, N-1]");
  Vec out = Vec::Zero(sigma.size());
  out.head(s) = sigma.head(s);
  return out;
}

std::string to_string(Scheme s) {
  switch (s) {
    case Scheme::none: return "none";
    case Scheme::budget: return "budget";
    case Scheme::gamma: return "gamma";
  }
  return "none";
}

Scheme scheme_from_string(const std::string& s) {
  if (s == "none") return Scheme::none;
  if (s == "budget") return Scheme::budget;
  if (s == "gamma") return Scheme::gamma;
  throw std::invalid_argument("unknown scheme '" + s + "' (expected none, budget or gamma)");
}

void ConservatismConfig::validate(int intervals) const {
  switch (scheme) {
    case Scheme::none: break;
    case Scheme::budget:
      if (!(param >= 0.0 && param <= intervals))
        throw std::invalid_argument("budget must lie in [0, " + std::to_string(intervals) + "]");
      break;
    case Scheme::gamma:
      if (!(param > 0.0 && param <= 1.0)) throw std::invalid_argument("gamma must lie in (0, 1]");
      if (mask && (*mask < 1 || *mask > intervals)) throw std::invalid_argument("mask length must lie in [1, N-1]");
      break;
  }
}

Vec ConservatismConfig::sigma(int intervals) const {
  const Vec s = sigma_weights(param, intervals + 1);
  return mask ? masked_sigma(s, *mask) : s;
}

InnerResult inner_worst_case(const ProInstance& inst, const Vec& z, const std::optional<IncrementBox>& box,
                             const ConservatismConfig& cfg) {
  inst.validate();
  const int l = inst.intervals();
  cfg.validate(l);
  if (z.size() != inst.assets() || (z.array() < -1e-12).any() || std::abs(z.sum() - 1.0) > 1e-9)
    throw std::invalid_argument("portfolio must lie in the unit simplex");
  if (cfg.scheme != Scheme::none && !box) throw std::invalid_argument("conservatism schemes need the increment box");
  const Vec gbar = mean_g(inst, z);
  const Vec& c = inst.center;

  ModelBuilder mb;
  const int v0 = mb.add_vars(l, 0.0, kInf);
  for (int i = 0; i < l; ++i) mb.set_objective(v0 + i, -gbar[i]);
  add_lifted_polyhedron(mb, inst, v0);
  if (cfg.scheme == Scheme::none && box) {
    for (int i = 0; i < l; ++i) {
      mb.add_row({{v0 + i, 1.0}}, RowSense::le, c[i] + box->upper_dev[i]);
      mb.add_row({{v0 + i, 1.0}}, RowSense::ge, c[i] - box->lower_dev[i]);
    }
  } else if (cfg.scheme == Scheme::budget) {
    const int y0 = mb.add_vars(l, 0.0, 1.0);
    std::vector<std::pair<int, double>> ysum;
    for (int i = 0; i < l; ++i) ysum.push_back({y0 + i, 1.0});
    mb.add_row(ysum, RowSense::eq, cfg.param);
    for (int i = 0; i < l; ++i) {
      mb.add_row({{v0 + i, 1.0}, {y0 + i, -box->upper_dev[i]}}, RowSense::le, c[i]);
      mb.add_row({{v0 + i, 1.0}, {y0 + i, box->lower_dev[i]}}, RowSense::ge, c[i]);
    }
  } else if (cfg.scheme == Scheme::gamma) {
    const Vec sigma = cfg.sigma(l);
    const int p0 = mb.add_vars(l * l, 0.0, 1.0);
    for (int i = 0; i < l; ++i) {
      std::vector<std::pair<int, double>> rs, cs;
      for (int j = 0; j < l; ++j) {
        rs.push_back({p0 + i * l + j, 1.0});
        cs.push_back({p0 + j * l + i, 1.0});
      }
      mb.add_row(rs, RowSense::eq, 1.0);
      mb.add_row(cs, RowSense::eq, 1.0);
    }
    for (int i = 0; i < l; ++i) {
      std::vector<std::pair<int, double>> up{{v0 + i, 1.0}}, dn{{v0 + i, 1.0}};
      for (int j = 0; j < l; ++j) {
        up.push_back({p0 + i * l + j, -box->upper_dev[i] * sigma[j]});
        dn.push_back({p0 + i * l + j, box->lower_dev[i] * sigma[j]});
      }
      mb.add_row(up, RowSense::le, c[i]);
      mb.add_row(dn, RowSense::ge, c[i]);
    }
  }
  const Solution s = solve_lp(mb.lp());
  if (!s.optimal()) throw std::runtime_error("worst-case LP failed: " + to_string(s.status));
  return {slice(s.point, v0, l), -s.value};
}

ProResult solve_pro_classic(const ProInstance& inst, const Tolerances& tol) {
  inst.validate();
  const int l = inst.intervals(), mm = static_cast<int>(inst.rows.rows());
  ModelBuilder mb;
  const PortfolioBlock pb = add_portfolio(mb, inst);
  const int beta = mb.add_var(-kInf, kInf, 1.0);
  const int th0 = mb.add_vars(mm, 0.0, kInf);
  // gbar + sum_m theta_m row_m >= beta e  (the slack is the multiplier of v >= 0)
  for (int i = 0; i < l; ++i) {
    auto t = pb.gbar[i];
    for (int m = 0; m < mm; ++m)
      if (inst.rows(m, i) != 0.0) t.push_back({th0 + m, inst.rows(m, i)});
    t.push_back({beta, -1.0});
    mb.add_row(t, RowSense::ge, 0.0);
  }
  const Solution s = solve_milp(mb.milp(), tol);
  if (!s.optimal()) return unsolved(s);

  ProResult r;
  r.status = s.status;
  r.nodes = s.nodes;
  r.z = slice(s.point, pb.z0, inst.assets());
  r.value = s.value;
  r.cert.beta = s.point[beta];
  r.cert.theta = slice(s.point, th0, mm);
  const Vec gbar = mean_g(inst, r.z);
  r.cert.eta = gbar + inst.rows.transpose() * r.cert.theta - Vec::Constant(l, r.cert.beta);
  r.cert.stationarity_residual = std::max(0.0, -r.cert.eta.minCoeff());
  return r;
}

ProResult solve_pro_conservative(const ProInstance& inst, const IncrementBox& box, const ConservatismConfig& cfg,
                                 const Tolerances& tol) {
  inst.validate();
  const int l = inst.intervals(), mm = static_cast<int>(inst.rows.rows());
  cfg.validate(l);
  const Vec& c = box.center;
  if (c.size() != l || box.lower_dev.size() != l || box.upper_dev.size() != l)
    throw std::invalid_argument("increment box does not match the grid");

  ModelBuilder mb;
  const PortfolioBlock pb = add_portfolio(mb, inst);
  const int llo = mb.add_vars(l, 0.0, kInf);
  const int lhi = mb.add_vars(l, 0.0, kInf);
  const int beta = mb.add_var(-kInf, kInf);
  const int eta = mb.add_vars(l, 0.0, kInf);
  const int th0 = mb.add_vars(mm, 0.0, kInf);

  // Objective: c'gbar - eta'c + sum_m theta_m row_m'c + scheme terms.
  std::vector<double> obj(mb.num_vars(), 0.0);
  for (int i = 0; i < l; ++i)
    for (const auto& [j, a] : pb.gbar[i]) obj[j] += c[i] * a;
  for (int i = 0; i < l; ++i) obj[eta + i] -= c[i];
  const Vec rc = inst.rows * c;
  for (int m = 0; m < mm; ++m) obj[th0 + m] += rc[m];
  for (int j = 0; j < static_cast<int>(obj.size()); ++j) mb.set_objective(j, obj[j]);

  // Stationarity: gbar - lambda_lo + lambda_hi + beta e - eta + rows' theta = 0.
  for (int i = 0; i < l; ++i) {
    auto t = pb.gbar[i];
    t.push_back({llo + i, -1.0});
    t.push_back({lhi + i, 1.0});
    t.push_back({beta, 1.0});
    t.push_back({eta + i, -1.0});
    for (int m = 0; m < mm; ++m)
      if (inst.rows(m, i) != 0.0) t.push_back({th0 + m, inst.rows(m, i)});
    mb.add_row(t, RowSense::eq, 0.0);
  }

  int tau0 = -1, tau = -1, big = -1, tlo = -1, thi = -1;
  switch (cfg.scheme) {
    case Scheme::none:
      for (int i = 0; i < l; ++i) {
        mb.set_objective(llo + i, -box.lower_dev[i]);
        mb.set_objective(lhi + i, -box.upper_dev[i]);
      }
      break;
    case Scheme::budget:
      tau = mb.add_vars(l, 0.0, kInf, -1.0);
      tau0 = mb.add_var(-kInf, kInf, -cfg.param);
      for (int i = 0; i < l; ++i)
        mb.add_row({{llo + i, -box.lower_dev[i]}, {lhi + i, -box.upper_dev[i]}, {tau + i, 1.0}, {tau0, 1.0}},
                   RowSense::ge, 0.0);
      break;
    case Scheme::gamma: {
      const Vec sigma = cfg.sigma(l);
      big = mb.add_vars(l * l, 0.0, kInf, -1.0);
      tlo = mb.add_vars(l, -kInf, kInf, -1.0);
      thi = mb.add_vars(l, -kInf, kInf, -1.0);
      for (int i = 0; i < l; ++i)
        for (int j = 0; j < l; ++j)
          mb.add_row({{llo + i, -box.lower_dev[i] * sigma[j]},
                      {lhi + i, -box.upper_dev[i] * sigma[j]},
                      {tlo + i, 1.0},
                      {thi + j, 1.0},
                      {big + i * l + j, 1.0}},
                     RowSense::ge, 0.0);
      break;
    }
  }

  const Solution s = solve_milp(mb.milp(), tol);
  if (!s.optimal()) return unsolved(s);

  ProResult r;
  r.status = s.status;
  r.nodes = s.nodes;
  r.z = slice(s.point, pb.z0, inst.assets());
  r.value = s.value;
  DualCertificate& d = r.cert;
  d.lambda_lo = slice(s.point, llo, l);
  d.lambda_hi = slice(s.point, lhi, l);
  d.beta = s.point[beta];
  d.eta = slice(s.point, eta, l);
  d.theta = slice(s.point, th0, mm);
  if (tau >= 0) {
    d.tau = slice(s.point, tau, l);
    d.tau0 = s.point[tau0];
  }
  if (big >= 0) {
    d.big_theta = Eigen::Map<const Mat>(s.point.data() + big, l, l).transpose();
    d.tau_lo = slice(s.point, tlo, l);
    d.tau_hi = slice(s.point, thi, l);
  }
  const Vec gbar = mean_g(inst, r.z);
  const Vec resid = gbar - d.lambda_lo + d.lambda_hi + Vec::Constant(l, d.beta) - d.eta + inst.rows.transpose() * d.theta;
  d.stationarity_residual = resid.cwiseAbs().maxCoeff();
  return r;
}

}  // namespace prefel
