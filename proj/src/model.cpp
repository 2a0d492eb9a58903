#include "periph/model.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "periph/geometry.hpp"

namespace periph {

Component Component::cusp() { return Component{ComponentKind::Cusp, 0.0, std::nullopt}; }

Component Component::collar_with_area(double area) {
  return Component{ComponentKind::Collar, area, std::nullopt};
}

Component Component::collar_of_genus(int genus) {
  return Component{ComponentKind::Collar, geometry::boundary_area_from_genus(genus), genus};
}

double PeripheralModel::self_bound(int index) const {
  for (const auto& s : self) {
    if (s.index == index) return s.bound;
  }
  throw std::out_of_range("no self constraint for component " + std::to_string(index));
}

std::optional<PairConstraint> PeripheralModel::pair(int i, int j) const {
  for (const auto& p : pairs) {
    if ((p.i == i && p.j == j) || (p.i == j && p.j == i)) return p;
  }
  return std::nullopt;
}

std::string ConstraintOrigin::describe() const {
  std::ostringstream os;
  if (is_pair()) {
    os << "pair (" << i << "," << j << ")";
  } else {
    os << "self " << i;
  }
  return os.str();
}

namespace {

std::string join_messages(const std::vector<Violation>& violations) {
  std::string out = "invalid model:";
  for (const auto& v : violations) out += "\n  " + v.message;
  return out;
}

}  // namespace

ValidationError::ValidationError(std::vector<Violation> violations)
    : std::invalid_argument(join_messages(violations)), violations_(std::move(violations)) {}

std::vector<Violation> validate(const PeripheralModel& model) {
  std::vector<Violation> out;
  const int n = model.size();
  if (n == 0) {
    out.push_back({"model has no components", std::nullopt});
    return out;
  }

  for (int k = 0; k < n; ++k) {
    const Component& c = model.component(k);
    if (!c.is_collar()) continue;
    if (c.genus) {
      if (*c.genus < 2) {
        out.push_back({"component " + std::to_string(k) + ": genus " + std::to_string(*c.genus) +
                           " < 2",
                       std::nullopt});
      } else if (c.area != geometry::boundary_area_from_genus(*c.genus)) {
        out.push_back({"component " + std::to_string(k) + ": area does not match genus", std::nullopt});
      }
    } else if (!(c.area > 0.0) || !std::isfinite(c.area)) {
      out.push_back({"component " + std::to_string(k) + ": collar area must be positive", std::nullopt});
    }
  }

  std::set<std::pair<int, int>> seen_pairs;
  for (const auto& p : model.pairs) {
    const bool in_range = p.i >= 0 && p.i < n && p.j >= 0 && p.j < n;
    const auto origin = ConstraintOrigin::of_pair(p.i, p.j);
    if (!in_range) {
      out.push_back({origin.describe() + ": index out of range", origin});
      continue;
    }
    if (p.i == p.j) {
      out.push_back({origin.describe() + ": pair indices must be distinct", origin});
      continue;
    }
    if (!seen_pairs.insert({origin.i, origin.j}).second) {
      out.push_back({origin.describe() + ": duplicate pair constraint", origin});
    }
    if (!(p.constant > 0.0) || !std::isfinite(p.constant)) {
      out.push_back({origin.describe() + ": non-positive constant", origin});
    }
  }

  std::vector<int> self_count(static_cast<std::size_t>(n), 0);
  for (const auto& s : model.self) {
    const auto origin = ConstraintOrigin::of_self(s.index);
    if (s.index < 0 || s.index >= n) {
      out.push_back({origin.describe() + ": index out of range", origin});
      continue;
    }
    ++self_count[static_cast<std::size_t>(s.index)];
    if (!(s.bound > 0.0) || !std::isfinite(s.bound)) {
      out.push_back({origin.describe() + ": non-positive bound", origin});
    }
  }
  for (int k = 0; k < n; ++k) {
    const int count = self_count[static_cast<std::size_t>(k)];
    if (count == 0) {
      out.push_back({"component " + std::to_string(k) + ": missing self constraint",
                     ConstraintOrigin::of_self(k)});
    } else if (count > 1) {
      out.push_back({"component " + std::to_string(k) + ": duplicate self constraint",
                     ConstraintOrigin::of_self(k)});
    }
  }
  return out;
}

ConstraintSet build_constraints(const PeripheralModel& model) {
  if (auto violations = validate(model); !violations.empty()) {
    throw ValidationError(std::move(violations));
  }
  const int n = model.size();
  const int m = static_cast<int>(model.pairs.size() + model.self.size());

  ConstraintSet cs;
  cs.kinds.reserve(static_cast<std::size_t>(n));
  for (const auto& c : model.components) cs.kinds.push_back(c.kind);
  cs.lhs = Eigen::MatrixXd::Zero(m, n);
  cs.rhs = Eigen::VectorXd::Zero(m);
  cs.origins.reserve(static_cast<std::size_t>(m));

  int row = 0;
  for (const auto& p : model.pairs) {
    const bool cusp_i = model.component(p.i).is_cusp();
    const bool cusp_j = model.component(p.j).is_cusp();
    if (cusp_i && cusp_j) {
      cs.lhs(row, p.i) = 1.0;
      cs.lhs(row, p.j) = 1.0;
      cs.rhs(row) = std::log(p.constant);
    } else if (!cusp_i && !cusp_j) {
      cs.lhs(row, p.i) = 1.0;
      cs.lhs(row, p.j) = 1.0;
      cs.rhs(row) = p.constant;
    } else {
      const int cusp = cusp_i ? p.i : p.j;
      const int collar = cusp_i ? p.j : p.i;
      cs.lhs(row, cusp) = 1.0;
      cs.lhs(row, collar) = 2.0;
      cs.rhs(row) = std::log(0.5 * p.constant);
    }
    cs.origins.push_back(ConstraintOrigin::of_pair(p.i, p.j));
    ++row;
  }
  for (const auto& s : model.self) {
    cs.lhs(row, s.index) = 1.0;
    cs.rhs(row) = model.component(s.index).is_cusp() ? std::log(s.bound) : s.bound;
    cs.origins.push_back(ConstraintOrigin::of_self(s.index));
    ++row;
  }
  return cs;
}

Eigen::VectorXd ConstraintSet::to_linear(const Configuration& config) const {
  if (config.size() != dimension()) {
    throw std::invalid_argument("configuration has " + std::to_string(config.size()) +
                                " values, model has " + std::to_string(dimension()) + " components");
  }
  Eigen::VectorXd y(dimension());
  for (int k = 0; k < dimension(); ++k) {
    const double value = config[k];
    if (kinds[static_cast<std::size_t>(k)] == ComponentKind::Cusp) {
      if (!(value > 0.0)) {
        throw std::invalid_argument("cusp " + std::to_string(k) + " has non-positive volume");
      }
      y(k) = std::log(value);
    } else {
      if (!(value >= 0.0)) {
        throw std::invalid_argument("collar " + std::to_string(k) + " has negative width");
      }
      y(k) = value;
    }
  }
  return y;
}

Configuration ConstraintSet::from_linear(const Eigen::VectorXd& point) const {
  Configuration config;
  config.values.resize(static_cast<std::size_t>(dimension()));
  for (int k = 0; k < dimension(); ++k) {
    config[k] = kinds[static_cast<std::size_t>(k)] == ComponentKind::Cusp ? std::exp(point(k)) : point(k);
  }
  return config;
}

Eigen::VectorXd ConstraintSet::residuals(const Eigen::VectorXd& point) const {
  return rhs - lhs * point;
}

std::vector<std::vector<int>> TangencyGraph::adjacency() const {
  std::vector<std::vector<int>> adj(static_cast<std::size_t>(vertex_count));
  for (const auto& [a, b] : edges) {
    adj[static_cast<std::size_t>(a)].push_back(b);
    adj[static_cast<std::size_t>(b)].push_back(a);
  }
  return adj;
}

std::vector<std::vector<int>> TangencyGraph::connected_components() const {
  const auto adj = adjacency();
  std::vector<int> label(static_cast<std::size_t>(vertex_count), -1);
  std::vector<std::vector<int>> out;
  for (int start = 0; start < vertex_count; ++start) {
    if (label[static_cast<std::size_t>(start)] >= 0) continue;
    const int id = static_cast<int>(out.size());
    out.emplace_back();
    std::vector<int> stack{start};
    label[static_cast<std::size_t>(start)] = id;
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      out.back().push_back(v);
      for (int w : adj[static_cast<std::size_t>(v)]) {
        if (label[static_cast<std::size_t>(w)] < 0) {
          label[static_cast<std::size_t>(w)] = id;
          stack.push_back(w);
        }
      }
    }
    std::sort(out.back().begin(), out.back().end());
  }
  return out;
}

bool TangencyGraph::is_tree(const std::vector<int>& vertices) const {
  const std::set<int> inside(vertices.begin(), vertices.end());
  std::size_t edge_count = 0;
  for (const auto& [a, b] : edges) {
    if (inside.count(a) && inside.count(b)) ++edge_count;
  }
  // A connected graph is a tree iff |E| = |V| - 1.
  return edge_count + 1 == vertices.size();
}

bool TangencyGraph::has_edge(int a, int b) const {
  const auto key = std::minmax(a, b);
  return std::find(edges.begin(), edges.end(), std::pair<int, int>{key.first, key.second}) != edges.end();
}

std::vector<ConstraintOrigin> TangencyGraph::active_set() const {
  std::vector<ConstraintOrigin> out;
  for (const auto& [a, b] : edges) out.push_back(ConstraintOrigin::of_pair(a, b));
  for (int k = 0; k < vertex_count; ++k) {
    if (maximal[static_cast<std::size_t>(k)]) out.push_back(ConstraintOrigin::of_self(k));
  }
  return out;
}

TangencyGraph tangency_graph(const PeripheralModel& model, const Configuration& config, double tol) {
  const ConstraintSet cs = build_constraints(model);
  const Eigen::VectorXd residual = cs.residuals(cs.to_linear(config));

  TangencyGraph graph;
  graph.vertex_count = model.size();
  graph.maximal.assign(static_cast<std::size_t>(model.size()), false);
  for (int r = 0; r < cs.rows(); ++r) {
    const auto& origin = cs.origins[static_cast<std::size_t>(r)];
    if (residual(r) < -tol) {
      std::ostringstream os;
      os << "configuration violates " << origin.describe() << " (residual " << residual(r) << ")";
      throw InfeasibleError(os.str(), origin);
    }
    if (std::abs(residual(r)) <= tol) {
      if (origin.is_pair()) {
        graph.edges.emplace_back(origin.i, origin.j);
      } else {
        graph.maximal[static_cast<std::size_t>(origin.i)] = true;
      }
    }
  }
  return graph;
}

bool is_maximal(const PeripheralModel& model, const Configuration& config, int index, double tol) {
  if (index < 0 || index >= model.size()) {
    throw std::out_of_range("component index " + std::to_string(index) + " out of range");
  }
  return tangency_graph(model, config, tol).maximal[static_cast<std::size_t>(index)];
}

double total_volume(const PeripheralModel& model, const Configuration& config) {
  if (config.size() != model.size()) {
    throw std::invalid_argument("configuration size does not match model");
  }
  double total = 0.0;
  for (int k = 0; k < model.size(); ++k) {
    const Component& c = model.component(k);
    total += c.is_cusp() ? config[k] : geometry::collar_volume(c.area, config[k]);
  }
  return total;
}

PeripheralModel gen_random(int n_cusps, int n_collars, std::uint64_t seed, double density) {
  if (n_cusps < 0 || n_collars < 0 || n_cusps + n_collars < 1) {
    throw std::invalid_argument("gen_random needs at least one component");
  }
  if (!(density >= 0.0 && density <= 1.0)) {
    throw std::invalid_argument("gen_random density must lie in [0, 1]");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> exponent(-2.0, 2.0);
  std::uniform_int_distribution<int> genus(2, 4);
  std::bernoulli_distribution keep_pair(density);
  const auto log_uniform = [&] { return std::exp(exponent(rng)); };

  PeripheralModel model;
  for (int k = 0; k < n_cusps; ++k) model.components.push_back(Component::cusp());
  for (int k = 0; k < n_collars; ++k) model.components.push_back(Component::collar_of_genus(genus(rng)));

  const int n = model.size();
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (!keep_pair(rng)) continue;
      const bool cusp_i = model.component(i).is_cusp();
      const bool cusp_j = model.component(j).is_cusp();
      const double draw = log_uniform();
      // For cusp/collar pairs the draw is R/2.
      const double constant = (cusp_i != cusp_j) ? 2.0 * draw : draw;
      model.pairs.push_back({i, j, constant});
    }
  }
  for (int k = 0; k < n; ++k) {
    double bound = log_uniform();
    // A component reaching its bound with every collar partner at width
    // zero must not overlap that partner's boundary surface.
    for (const auto& p : model.pairs) {
      if (p.i != k && p.j != k) continue;
      const int other = p.i == k ? p.j : p.i;
      if (!model.component(other).is_collar()) continue;
      bound = std::min(bound, model.component(k).is_cusp() ? 0.5 * p.constant : p.constant);
    }
    model.self.push_back({k, bound});
  }
  return model;
}

}  // namespace periph
