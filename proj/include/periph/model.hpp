#pragma once

// Abstract instance data for the peripheral-volume problem.
//
// A PeripheralModel lists the peripheral components of a manifold (cusp
// neighbourhoods and boundary collars) together with the constants that
// govern when two of them, or one of them with itself, become tangent:
//
//   cusp/cusp     K   : v_i * v_j        <= K
//   cusp/collar   R   : v_i              <= (R/2) * exp(-2 d_j)
//   collar/collar D   : d_i + d_j        <= D
//   self (cusp)   vmax: v_i              <= vmax
//   self (collar) dmax: d_j              <= dmax
//
// Taking x_i = log v_i for cusps and keeping d_j for collars turns every
// relation into a linear inequality with non-negative coefficients; that
// linearized form is the ConstraintSet. Residuals and tolerances are always
// measured there.
//
// Pairs that carry no constraint never interact.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace periph {

inline constexpr double kDefaultTolerance = 1e-9;

enum class ComponentKind { Cusp, Collar };

struct Component {
  ComponentKind kind = ComponentKind::Cusp;
  // Hyperbolic area of the boundary surface; zero for cusps.
  double area = 0.0;
  // Set when the collar was specified by genus; area is then 4*pi*(genus-1).
  std::optional<int> genus;

  static Component cusp();
  static Component collar_with_area(double area);
  static Component collar_of_genus(int genus);

  bool is_cusp() const { return kind == ComponentKind::Cusp; }
  bool is_collar() const { return kind == ComponentKind::Collar; }
  friend bool operator==(const Component&, const Component&) = default;
};

struct PairConstraint {
  int i = 0;
  int j = 0;
  double constant = 0.0;
  friend bool operator==(const PairConstraint&, const PairConstraint&) = default;
};

struct SelfConstraint {
  int index = 0;
  double bound = 0.0;
  friend bool operator==(const SelfConstraint&, const SelfConstraint&) = default;
};

struct PeripheralModel {
  std::vector<Component> components;
  std::vector<PairConstraint> pairs;
  std::vector<SelfConstraint> self;

  int size() const { return static_cast<int>(components.size()); }
  const Component& component(int index) const { return components.at(static_cast<std::size_t>(index)); }
  /// Self bound of a component (vmax for cusps, dmax for collars). Requires a valid model.
  double self_bound(int index) const;
  /// Pair constraint on {i, j}, if any.
  std::optional<PairConstraint> pair(int i, int j) const;

  friend bool operator==(const PeripheralModel&, const PeripheralModel&) = default;
};

/// Widths for collars, volumes for cusps; one value per component.
struct Configuration {
  std::vector<double> values;

  int size() const { return static_cast<int>(values.size()); }
  double operator[](int index) const { return values[static_cast<std::size_t>(index)]; }
  double& operator[](int index) { return values[static_cast<std::size_t>(index)]; }
  friend bool operator==(const Configuration&, const Configuration&) = default;
};

/// Where a linear inequality came from. For self constraints j == -1.
struct ConstraintOrigin {
  enum class Kind { Pair, Self };
  Kind kind = Kind::Self;
  int i = 0;
  int j = -1;

  static ConstraintOrigin of_pair(int a, int b) { return {Kind::Pair, a < b ? a : b, a < b ? b : a}; }
  static ConstraintOrigin of_self(int index) { return {Kind::Self, index, -1}; }
  bool is_pair() const { return kind == Kind::Pair; }
  std::string describe() const;
  friend bool operator==(const ConstraintOrigin&, const ConstraintOrigin&) = default;
  friend auto operator<=>(const ConstraintOrigin&, const ConstraintOrigin&) = default;
};

struct Violation {
  std::string message;
  std::optional<ConstraintOrigin> where;
};

class ValidationError : public std::invalid_argument {
 public:
  explicit ValidationError(std::vector<Violation> violations);
  const std::vector<Violation>& violations() const { return violations_; }

 private:
  std::vector<Violation> violations_;
};

class InfeasibleError : public std::runtime_error {
 public:
  InfeasibleError(const std::string& what, std::optional<ConstraintOrigin> where = std::nullopt)
      : std::runtime_error(what), where_(where) {}
  const std::optional<ConstraintOrigin>& where() const { return where_; }

 private:
  std::optional<ConstraintOrigin> where_;
};

/// Linear inequalities A y <= b in the mixed coordinates
/// y_i = log v_i (cusps), y_j = d_j (collars).
/// Rows are ordered: pair constraints in model order, then self constraints
/// in model order.
struct ConstraintSet {
  std::vector<ComponentKind> kinds;
  Eigen::MatrixXd lhs;
  Eigen::VectorXd rhs;
  std::vector<ConstraintOrigin> origins;

  int dimension() const { return static_cast<int>(kinds.size()); }
  int rows() const { return static_cast<int>(origins.size()); }

  Eigen::VectorXd to_linear(const Configuration& config) const;
  Configuration from_linear(const Eigen::VectorXd& point) const;
  /// rhs - lhs * y; non-negative iff the inequality holds.
  Eigen::VectorXd residuals(const Eigen::VectorXd& point) const;
};

struct TangencyGraph {
  int vertex_count = 0;
  // Active pair constraints, i < j, in constraint order.
  std::vector<std::pair<int, int>> edges;
  // Active self constraints.
  std::vector<bool> maximal;

  std::vector<std::vector<int>> adjacency() const;
  /// Vertex sets of connected components (self-loops ignored), each sorted,
  /// ordered by smallest vertex.
  std::vector<std::vector<int>> connected_components() const;
  /// True when the subgraph induced on `vertices` (one connected component)
  /// has no cycle.
  bool is_tree(const std::vector<int>& vertices) const;
  bool has_edge(int a, int b) const;
  /// Active constraints, pairs first then self loops.
  std::vector<ConstraintOrigin> active_set() const;
};

std::vector<Violation> validate(const PeripheralModel& model);

/// Throws ValidationError if the model is malformed.
ConstraintSet build_constraints(const PeripheralModel& model);

/// Throws InfeasibleError naming the first constraint with residual < -tol.
TangencyGraph tangency_graph(const PeripheralModel& model, const Configuration& config,
                             double tol = kDefaultTolerance);

bool is_maximal(const PeripheralModel& model, const Configuration& config, int index,
                double tol = kDefaultTolerance);

/// Sum of cusp volumes plus collar volumes. Feasibility is not checked.
double total_volume(const PeripheralModel& model, const Configuration& config);

/// Synthetic instance: cusps first, then collars. Each unordered pair gets a
/// constraint with probability `density`. K, R/2, D, vmax and dmax are
/// exp(U[-2, 2]); collar genus is uniform in {2, 3, 4}. Self bounds are then
/// capped so that each component can reach its bound against zero-width
/// collar partners: vmax_i <= R_ij/2 and dmax_j <= D_jk.
PeripheralModel gen_random(int n_cusps, int n_collars, std::uint64_t seed, double density = 1.0);

}  // namespace periph
