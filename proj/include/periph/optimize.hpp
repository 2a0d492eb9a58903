#pragma once

// Global and greedy maximization of total peripheral volume, and local
// classification of configurations.
//
// The objective is increasing in every linearized coordinate and convex, so
// over the feasible polytope its maximum sits at a vertex. solve_global
// enumerates vertices directly; it is meant for models with at most about
// eight components.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "periph/deform.hpp"
#include "periph/model.hpp"

namespace periph {

enum class SolveMethod { FrontierEnum, Greedy, Probe };

const char* to_string(SolveMethod method);

struct Solution {
  Configuration config;
  double total = 0.0;
  std::vector<ConstraintOrigin> active_set;
  SolveMethod method = SolveMethod::FrontierEnum;
};

struct SolveStats {
  long long subsets_tried = 0;
  long long singular_skipped = 0;
  long long ill_conditioned_skipped = 0;
  long long feasible_vertices = 0;
};

/// Exact maximum over the vertices of the feasible region. Collar widths are
/// additionally bounded below by zero. Throws ValidationError for malformed
/// models and InfeasibleError if no feasible vertex exists.
Solution solve_global(const PeripheralModel& model, double tol = kDefaultTolerance,
                      SolveStats* stats = nullptr);

/// Maximizes components one at a time in `order`. Each step takes the
/// smallest upper bound from the component's self constraint, its pair
/// constraints with already fixed components, and its pair constraints with
/// collars not yet processed (taken at width zero). Collar widths are clipped
/// at zero.
Solution greedy(const PeripheralModel& model, std::span<const int> order, double tol = kDefaultTolerance);

enum class TwoComponentCase { None, TwoCusps, TwoEqualCollars };

struct GreedyOrderResult {
  Solution best;
  std::vector<int> order;
  TwoComponentCase special_case = TwoComponentCase::None;
  // Filled for the two special cases: greedy with components sorted by
  // descending individual maximum, and whether it matches the best order.
  std::vector<int> descending_order;
  double descending_total = 0.0;
  bool descending_is_optimal = false;
};

/// Individual maximum volume of a component (its self bound, as a volume).
double individual_maximum(const PeripheralModel& model, int index);

/// Best greedy order by exhaustive search over permutations (first in
/// lexicographic order wins ties). Intended for n <= 8.
GreedyOrderResult greedy_best_order(const PeripheralModel& model, double tol = kDefaultTolerance);

struct ProbeResult {
  bool improved = false;
  std::optional<Configuration> witness;
  double base_total = 0.0;
  double witness_total = 0.0;
  int trials = 0;
};

/// Random search for a strictly better feasible configuration within
/// `radius` (Euclidean, linearized coordinates) of `config`. Samples that
/// violate a constraint are repaired by lowering coordinates, so every
/// reported witness is feasible. Improvement requires a gain above
/// 1e-10 * max(1, base total).
ProbeResult local_probe(const PeripheralModel& model, const Configuration& config, double radius,
                        int n_trials, std::uint64_t seed, double tol = kDefaultTolerance);

enum class Verdict { LocalMax, NotLocalMax, Degenerate, Inconclusive };

const char* to_string(Verdict verdict);

struct TreeDeformationEvidence {
  std::vector<int> component;
  int root = 0;
  double t = 0.0;
  Configuration deformed;
  double total_before = 0.0;
  double total_after = 0.0;
};

struct TriangleEvidence {
  std::array<int, 3> indices{};
  std::array<double, 3> sizes{};
  TripleVerdict verdict = TripleVerdict::Degenerate;
  std::array<OneSidedDerivatives, 3> derivatives{};
};

struct RayEvidence {
  // Feasible direction in linearized coordinates and the first-order rate
  // of change of total volume along it.
  std::vector<double> direction;
  double slope = 0.0;
  std::optional<Configuration> witness;
  double witness_total = 0.0;
};

struct Evidence {
  std::string rule;
  std::vector<int> maximal;
  std::vector<std::pair<int, int>> edges;
  std::vector<std::vector<int>> components;
  std::vector<bool> component_is_tree;
  std::optional<TreeDeformationEvidence> deformation;
  std::optional<TriangleEvidence> triangle;
  std::optional<RayEvidence> ray;
  std::optional<ProbeResult> probe;
};

struct Classification {
  Verdict verdict = Verdict::Inconclusive;
  Evidence evidence;
};

struct ClassifyOptions {
  double tol = kDefaultTolerance;
  double probe_radius = 1e-3;
  int probe_trials = 500;
  std::uint64_t probe_seed = 0;
};

/// Decides whether `config` is a local maximum of total volume.
///  1. A tangency component that is a tree with no maximal vertex admits a
///     volume-increasing deformation: NotLocalMax.
///  2. Three mutually tangent non-maximal components: strict triangle test
///     on effective sizes.
///  3. Two or three components otherwise: the remaining patterns (a maximal
///     component with partners maximal or tangent to it) are confirmed by
///     checking the first-order change along every extreme ray of the
///     feasible cone.
///  4. Four or more components: a local probe either finds an improvement
///     (NotLocalMax) or the verdict is Inconclusive.
/// Throws InfeasibleError if the configuration is infeasible.
Classification classify(const PeripheralModel& model, const Configuration& config,
                        const ClassifyOptions& options = {});

}  // namespace periph
