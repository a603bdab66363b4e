#pragma once

#include <optional>
#include <string>
#include <vector>

#include "prefel/elicit.hpp"
#include "prefel/pro.hpp"
#include "prefel/service/csv.hpp"
#include "prefel/service/session_io.hpp"

namespace prefel::service {

// "classic" solves the plain maximin; the others run the box reformulation.
struct ProRequest {
  std::string scheme = "none";
  double param = 0.0;
  std::optional<int> mask;
};

struct ProOutcome {
  ProRequest request;
  ProResult result;
  std::vector<std::string> tickers;
  int breakpoints = 0;
};

// Throws std::invalid_argument for bad requests or scenario ranges.
ProOutcome solve_for_session(const Session& s, const ScenarioTable& scenarios, const ProRequest& req,
                             const Tolerances& tol = kDefaultTolerances);
ProOutcome solve_for_polyhedron(const Polyhedron& p, const BreakpointGrid& grid, const ScenarioTable& scenarios,
                                const ProRequest& req, const Tolerances& tol = kDefaultTolerances);

json outcome_json(const ProOutcome& o);

}  // namespace prefel::service
