#pragma once

// One-parameter deformations that keep a tree of tangencies active, and the
// closed-form one-sided derivatives of total volume at a triple tangency.
//
// Deformations are parameterized by an additive parameter t attached to the
// root: a collar root moves as d(t) = d0 + t, a cusp root as
// v(t) = v0 * exp(2t) (so t = log(v / v0) / 2). Along every tree edge the
// direction flips, which keeps each edge's tangency exactly:
//
//   collar j: d_j(t) = d_j0 + eps_j * t
//   cusp i:   v_i(t) = v_i0 * exp(2 * eps_i * t),   eps = (-1)^depth.

#include <array>
#include <iosfwd>
#include <stdexcept>
#include <vector>

#include "periph/model.hpp"

namespace periph {

class CycleError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class DeformationRangeError : public std::range_error {
 public:
  DeformationRangeError(const std::string& what, double t) : std::range_error(what), t_(t) {}
  double t() const { return t_; }

 private:
  double t_;
};

/// A rooted spanning tree of one connected component of a tangency graph.
class DeformationTree {
 public:
  /// The component of `root` in `graph`; throws CycleError if it is not a tree.
  static DeformationTree from_graph(const TangencyGraph& graph, int root);
  /// Tree given by explicit edges over vertices 0..n-1; only the component of
  /// `root` is used. Throws CycleError on a cycle in that component.
  static DeformationTree from_edges(int vertex_count, int root, const std::vector<std::pair<int, int>>& edges);

  int root() const { return root_; }
  int vertex_count() const { return static_cast<int>(parent_.size()); }
  /// Tree vertices in breadth-first order, root first.
  const std::vector<int>& vertices() const { return order_; }
  bool contains(int v) const { return sign_[static_cast<std::size_t>(v)] != 0; }
  /// +1 / -1 for tree vertices, 0 outside.
  int sign(int v) const { return sign_[static_cast<std::size_t>(v)]; }
  int parent(int v) const { return parent_[static_cast<std::size_t>(v)]; }
  int depth(int v) const { return depth_[static_cast<std::size_t>(v)]; }
  std::vector<std::pair<int, int>> edges() const;

 private:
  int root_ = 0;
  std::vector<int> order_;
  std::vector<int> parent_;
  std::vector<int> sign_;
  std::vector<int> depth_;
};

/// Per-component motion law: offset is the base value (d or v), sign the
/// direction relative to the root parameter. Components outside the tree
/// have sign 0 and stay fixed.
struct PropagationRule {
  std::vector<ComponentKind> kinds;
  std::vector<int> sign;
  std::vector<double> offset;

  static PropagationRule build(const PeripheralModel& model, const Configuration& base,
                               const DeformationTree& tree);
  /// Throws DeformationRangeError when a collar width leaves [0, inf) or a
  /// cusp volume underflows.
  Configuration at(double t) const;
};

Configuration propagate(const PeripheralModel& model, const Configuration& base,
                        const DeformationTree& tree, double t);

struct CurvePoint {
  double t = 0.0;
  double volume = 0.0;
};

/// n_samples uniformly spaced samples of total volume over [t_lo, t_hi].
std::vector<CurvePoint> volume_curve(const PeripheralModel& model, const Configuration& base,
                                     const DeformationTree& tree, double t_lo, double t_hi,
                                     int n_samples);

/// CSV with header "t,V", shortest round-trip decimals, '\n' line endings.
void write_curve_csv(std::ostream& os, const std::vector<CurvePoint>& curve);

/// Three mutually tangent components. Effective size is the volume for a
/// cusp and the modified volume for a collar.
struct TriplePoint {
  std::array<int, 3> indices{};
  std::array<ComponentKind, 3> kinds{};
  std::array<double, 3> values{};
  std::array<double, 3> areas{};
  std::array<double, 3> sizes{};
  std::array<bool, 3> maximal{};

  /// Builds from a model and configuration; throws std::invalid_argument if
  /// some pair of the three lacks an active constraint within tol.
  static TriplePoint from_model(const PeripheralModel& model, const Configuration& config,
                                std::array<int, 3> indices, double tol = kDefaultTolerance);
  /// Builds directly from kinds, values and collar areas (ignored for cusps).
  /// Mutual tangency is the caller's responsibility.
  static TriplePoint from_values(std::array<ComponentKind, 3> kinds, std::array<double, 3> values,
                                 std::array<double, 3> areas = {});
};

struct OneSidedDerivatives {
  double minus = 0.0;
  double plus = 0.0;
};

/// Left and right derivatives of total volume at the triple tangency, with
/// respect to the pivot's volume (cusp pivot) or width (collar pivot).
/// `pivot` indexes into the triple (0..2). Throws std::invalid_argument if a
/// component is individually maximal.
OneSidedDerivatives one_sided_derivatives_three(const TriplePoint& triple, int pivot);

enum class TripleVerdict { LocalMax, NotLocalMax, Degenerate };

const char* to_string(TripleVerdict verdict);

/// Strict triangle inequalities on the effective sizes. A triangle equality
/// within relative tolerance `tol` is Degenerate.
TripleVerdict classify_triple(const TriplePoint& triple, double tol = kDefaultTolerance);

}  // namespace periph
