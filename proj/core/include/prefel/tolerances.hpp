#pragma once

namespace prefel {

// Every solver threshold lives here so tests and callers can tighten or
// loosen them in one place.
struct Tolerances {
  double feasibility = 1e-9;
  double optimality = 1e-8;
  double milp_gap = 1e-7;
  double integrality = 1e-7;
  double pivot = 1e-9;
  long max_simplex_iterations = 200000;
  long max_bb_nodes = 200000;
};

inline constexpr Tolerances kDefaultTolerances{};

}  // namespace prefel
