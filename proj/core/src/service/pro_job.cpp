#include "prefel/service/pro_job.hpp"

namespace prefel::service {

ProOutcome solve_for_polyhedron(const Polyhedron& p, const BreakpointGrid& grid, const ScenarioTable& scenarios,
                                const ProRequest& req, const Tolerances& tol) {
  ProOutcome out;
  out.request = req;
  out.tickers = scenarios.tickers;
  out.breakpoints = grid.size();
  const ProInstance inst = make_instance(p, grid, scenarios.returns);
  if (req.scheme == "classic") {
    out.result = solve_pro_classic(inst, tol);
    return out;
  }
  ConservatismConfig cfg;
  cfg.scheme = scheme_from_string(req.scheme);
  cfg.param = req.param;
  cfg.mask = req.mask;
  cfg.validate(inst.intervals());
  out.result = solve_pro_conservative(inst, increment_bounds(inst), cfg, tol);
  return out;
}

ProOutcome solve_for_session(const Session& s, const ScenarioTable& scenarios, const ProRequest& req,
                             const Tolerances& tol) {
  return solve_for_polyhedron(s.polyhedron(), s.grid(), scenarios, req, tol);
}

json outcome_json(const ProOutcome& o) {
  json j = {{"scheme", o.request.scheme},
            {"parameter", o.request.param},
            {"status", to_string(o.result.status)},
            {"breakpoints", o.breakpoints},
            {"nodes", o.result.nodes}};
  if (o.request.mask) j["mask"] = *o.request.mask;
  if (o.result.status == SolveStatus::optimal) {
    j["value"] = o.result.value;
    j["z"] = std::vector<double>(o.result.z.data(), o.result.z.data() + o.result.z.size());
    j["stationarity_residual"] = o.result.cert.stationarity_residual;
  } else {
    j["value"] = nullptr;
    j["z"] = nullptr;
  }
  j["tickers"] = o.tickers;
  return j;
}

}  // namespace prefel::service
