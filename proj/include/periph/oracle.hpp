#pragma once

// Brute-force reference maximizer used to check the production solvers.
// Never called from the solving paths themselves.

#include <cstdint>
#include <optional>
#include <vector>

#include "periph/model.hpp"
#include "periph/optimize.hpp"

namespace periph::oracle {

struct GridSpec {
  // Points per axis in every round.
  int resolution = 25;
  // First round covers the whole box; each later round re-grids a box
  // shrunk by `shrink` around the incumbent.
  int rounds = 20;
  double shrink = 0.35;
  // Number of well-separated first-round points refined independently.
  int starts = 4;
  // Lower ends of the search box: cusp volume and collar width.
  double cusp_floor = 0.0024787521766663585;  // exp(-6)
  double collar_floor = 0.0;
  // Lower the cusp floor far enough that every vertex of the feasible
  // region lies inside the box.
  bool adaptive_floors = true;
};

/// Throws std::invalid_argument if the spec is malformed or the model has
/// more than four components, InfeasibleError if no grid point is feasible.
/// `history`, when given, receives the best total after each round.
Solution grid_search(const PeripheralModel& model, const GridSpec& spec = {},
                     std::vector<double>* history = nullptr);

struct VerificationReport {
  std::optional<std::uint64_t> instance_seed;
  double candidate_total = 0.0;
  double oracle_total = 0.0;
  bool pass = false;
};

/// PASS iff |candidate - oracle| <= rel_tol * max(1, oracle) and the
/// candidate is not below the oracle by more than rel_tol.
VerificationReport verify_instance(const PeripheralModel& model, const Solution& candidate, double rel_tol,
                                   const GridSpec& spec = {});

}  // namespace periph::oracle
