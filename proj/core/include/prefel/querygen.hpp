#pragma once

#include <stdexcept>
#include <vector>

#include "prefel/numerics.hpp"
#include "prefel/polyhedron.hpp"
#include "prefel/pwl.hpp"

namespace prefel {

// Lottery A pays r1 with probability 1-p and r3 with probability p;
// lottery B pays r2 for sure. d is the budget the pair was generated with.
struct QueryParams {
  double r1 = 0.0;
  double r2 = 0.0;
  double r3 = 0.0;
  double p = 0.5;
  double d = 0.0;
};

struct ProbabilityBounds {
  double lo = 0.05;
  double hi = 0.95;
};

struct QueryConfig {
  ProbabilityBounds p_bounds;
  std::vector<double> d_grid = default_d_grid(10);
  // Cosines closer than this count as equal; the lower budget index wins.
  double cosine_tie = 1e-9;

  static std::vector<double> default_d_grid(int s);
  void validate() const;
};

struct AllDegenerate : std::runtime_error {
  using std::runtime_error::runtime_error;
};

Vec budget_point(const Vec& c_lifted, double d);

// Certain amount whose expected utility under c equals d.
double solve_b(const Vec& v1_lifted, const Vec& c_lifted, const BreakpointGrid& grid, double d);

struct SolveAResult {
  double r1 = 0.0;
  double r3 = 0.0;
  double p = 0.0;
  Vec g_a;
  double objective = 0.0;
  int i1 = 0;
  int i3 = 0;
};

SolveAResult solve_a(const Vec& v2_lifted, const Vec& c_lifted, const BreakpointGrid& grid, double d,
                     const ProbabilityBounds& pb);

// (1-p) g(r1) + p g(r3).
Vec g_a(const BreakpointGrid& grid, double r1, double r3, double p);
// G_A - G_B for the pair.
Vec cut_vector(const BreakpointGrid& grid, const QueryParams& q);

struct Candidate {
  int s = 0;  // 1-based position in the budget grid
  QueryParams q;
  Vec cut;
  double cosine = 0.0;
  bool degenerate = false;
};

struct GeneratedQuery {
  QueryParams q;
  Vec cut;
  int s = 0;
  double cosine = 0.0;
  // Non-degenerate candidates, best first.
  std::vector<Candidate> ranked;
  // Every candidate in budget-grid order.
  std::vector<Candidate> all;
};

// |cut' dir| / (|cut| |dir|), 0 for a zero cut.
double abs_cosine(const Vec& cut, const Vec& dir);

GeneratedQuery generate_query(const Polyhedron& p, const BreakpointGrid& grid, const QueryConfig& cfg);
GeneratedQuery generate_query(const AnalyticCenter& ac, const SonnevendAxis& axis, const BreakpointGrid& grid,
                              const QueryConfig& cfg);

}  // namespace prefel
