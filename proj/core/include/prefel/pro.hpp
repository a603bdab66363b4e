#pragma once

#include <optional>
#include <string>
#include <vector>

#include "prefel/numerics.hpp"
#include "prefel/polyhedron.hpp"
#include "prefel/pwl.hpp"

namespace prefel {

// Portfolio choice z in the unit simplex against equally likely return
// scenarios, with the utility known only up to an increment polyhedron.
struct ProInstance {
  BreakpointGrid grid;
  // Homogeneous rows over lifted increments: rows * v <= 0 (with v >= 0,
  // e'v = 1 implied).
  Mat rows;
  // Lifted reference point, normally the analytic center.
  Vec center;
  // K x n, one row per scenario.
  Mat scenarios;

  int intervals() const { return grid.intervals(); }
  int assets() const { return static_cast<int>(scenarios.cols()); }
  int num_scenarios() const { return static_cast<int>(scenarios.rows()); }
  // Throws std::invalid_argument when some portfolio return can leave the
  // grid range or shapes disagree.
  void validate() const;
};

// Lifts every non-base row of the polyhedron. When `center` is absent the
// analytic center is used.
ProInstance make_instance(const Polyhedron& p, const BreakpointGrid& grid, Mat scenarios,
                          std::optional<Vec> center = std::nullopt);

// (1/K) sum_k g(z' xi_k).
Vec mean_g(const ProInstance& inst, const Vec& z);

struct IncrementBox {
  Vec center;
  Vec lower_dev;  // center - lower_dev is the smallest feasible value
  Vec upper_dev;
};

IncrementBox increment_bounds(const ProInstance& inst);

// sigma_i = (i/N)^(gamma-1) / (1/N)^(gamma-1), i = 1..N-1.
Vec sigma_weights(double gamma, int n);
// Keeps the first s weights and zeroes the rest.
Vec masked_sigma(const Vec& sigma, int s);

enum class Scheme { none, budget, gamma };

std::string to_string(Scheme s);
Scheme scheme_from_string(const std::string& s);

struct ConservatismConfig {
  Scheme scheme = Scheme::none;
  // Gamma budget for Scheme::budget, gamma exponent for Scheme::gamma.
  double param = 0.0;
  // Optional sigma mask length for Scheme::gamma.
  std::optional<int> mask;

  Vec sigma(int intervals) const;
  void validate(int intervals) const;
};

struct DualCertificate {
  Vec lambda_lo, lambda_hi;
  double beta = 0.0;
  Vec eta;
  Vec theta;
  Mat big_theta;  // gamma scheme
  Vec tau_lo, tau_hi;  // gamma scheme
  Vec tau;  // budget scheme
  double tau0 = 0.0;  // budget scheme
  // Largest violation of the stationarity rows at the returned point.
  double stationarity_residual = 0.0;
};

struct ProResult {
  SolveStatus status = SolveStatus::infeasible;
  Vec z;
  double value = 0.0;
  DualCertificate cert;
  long nodes = 0;
};

struct InnerResult {
  Vec v;
  double value = 0.0;
};

// Worst case over the polyhedron for a fixed portfolio. Scheme none uses
// the box when one is given; the other schemes require it.
InnerResult inner_worst_case(const ProInstance& inst, const Vec& z, const std::optional<IncrementBox>& box,
                             const ConservatismConfig& cfg);

// Maximin over the whole polyhedron as one mixed-integer program.
ProResult solve_pro_classic(const ProInstance& inst, const Tolerances& tol = kDefaultTolerances);

// Maximin with the box and the chosen conservatism scheme.
ProResult solve_pro_conservative(const ProInstance& inst, const IncrementBox& box, const ConservatismConfig& cfg,
                                 const Tolerances& tol = kDefaultTolerances);

}  // namespace prefel
