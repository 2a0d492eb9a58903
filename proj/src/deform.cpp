#include "periph/deform.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <ostream>
#include <sstream>

#include "periph/format.hpp"
#include "periph/geometry.hpp"

namespace periph {

DeformationTree DeformationTree::from_graph(const TangencyGraph& graph, int root) {
  return from_edges(graph.vertex_count, root, graph.edges);
}

DeformationTree DeformationTree::from_edges(int vertex_count, int root,
                                            const std::vector<std::pair<int, int>>& edges) {
  if (root < 0 || root >= vertex_count) {
    throw std::out_of_range("deformation root " + std::to_string(root) + " out of range");
  }
  std::vector<std::vector<int>> adj(static_cast<std::size_t>(vertex_count));
  for (const auto& [a, b] : edges) {
    if (a < 0 || b < 0 || a >= vertex_count || b >= vertex_count || a == b) {
      throw std::invalid_argument("deformation tree edge out of range");
    }
    adj[static_cast<std::size_t>(a)].push_back(b);
    adj[static_cast<std::size_t>(b)].push_back(a);
  }

  DeformationTree tree;
  tree.root_ = root;
  tree.parent_.assign(static_cast<std::size_t>(vertex_count), -1);
  tree.sign_.assign(static_cast<std::size_t>(vertex_count), 0);
  tree.depth_.assign(static_cast<std::size_t>(vertex_count), -1);

  std::deque<int> queue{root};
  tree.sign_[static_cast<std::size_t>(root)] = 1;
  tree.depth_[static_cast<std::size_t>(root)] = 0;
  std::size_t edge_ends = 0;
  while (!queue.empty()) {
    const int v = queue.front();
    queue.pop_front();
    tree.order_.push_back(v);
    const auto& nbrs = adj[static_cast<std::size_t>(v)];
    edge_ends += nbrs.size();
    for (int w : nbrs) {
      if (tree.sign_[static_cast<std::size_t>(w)] != 0) continue;
      tree.parent_[static_cast<std::size_t>(w)] = v;
      tree.sign_[static_cast<std::size_t>(w)] = -tree.sign_[static_cast<std::size_t>(v)];
      tree.depth_[static_cast<std::size_t>(w)] = tree.depth_[static_cast<std::size_t>(v)] + 1;
      queue.push_back(w);
    }
  }
  // Each edge of the component is counted from both ends.
  if (edge_ends / 2 + 1 != tree.order_.size()) {
    throw CycleError("tangency component of vertex " + std::to_string(root) +
                     " contains a cycle; tree deformation is undefined");
  }
  return tree;
}

std::vector<std::pair<int, int>> DeformationTree::edges() const {
  std::vector<std::pair<int, int>> out;
  for (int v : order_) {
    const int p = parent(v);
    if (p >= 0) out.emplace_back(std::min(p, v), std::max(p, v));
  }
  return out;
}

PropagationRule PropagationRule::build(const PeripheralModel& model, const Configuration& base,
                                       const DeformationTree& tree) {
  if (base.size() != model.size() || tree.vertex_count() != model.size()) {
    throw std::invalid_argument("deformation: model, configuration and tree sizes differ");
  }
  PropagationRule rule;
  rule.offset = base.values;
  for (int k = 0; k < model.size(); ++k) {
    rule.kinds.push_back(model.component(k).kind);
    rule.sign.push_back(tree.sign(k));
  }
  return rule;
}

Configuration PropagationRule::at(double t) const {
  Configuration out;
  out.values = offset;
  for (std::size_t k = 0; k < offset.size(); ++k) {
    if (sign[k] == 0) continue;
    const double step = sign[k] * t;
    double& value = out.values[k];
    if (kinds[k] == ComponentKind::Collar) {
      value = offset[k] + step;
      if (value < 0.0 || (value == 0.0 && t != 0.0)) {
        std::ostringstream os;
        os << "deformation at t=" << shortest_decimal(t) << " drives collar " << k
           << " to width " << value;
        throw DeformationRangeError(os.str(), t);
      }
    } else {
      value = offset[k] * std::exp(2.0 * step);
      if (!(value > 0.0) || !std::isfinite(value)) {
        std::ostringstream os;
        os << "deformation at t=" << shortest_decimal(t) << " drives cusp " << k
           << " volume out of range";
        throw DeformationRangeError(os.str(), t);
      }
    }
  }
  return out;
}

Configuration propagate(const PeripheralModel& model, const Configuration& base,
                        const DeformationTree& tree, double t) {
  return PropagationRule::build(model, base, tree).at(t);
}

std::vector<CurvePoint> volume_curve(const PeripheralModel& model, const Configuration& base,
                                     const DeformationTree& tree, double t_lo, double t_hi,
                                     int n_samples) {
  if (n_samples < 1) throw std::invalid_argument("volume_curve needs at least one sample");
  if (!(t_lo <= t_hi)) throw std::invalid_argument("volume_curve range must satisfy lo <= hi");
  const PropagationRule rule = PropagationRule::build(model, base, tree);
  std::vector<CurvePoint> curve;
  curve.reserve(static_cast<std::size_t>(n_samples));
  const double step = n_samples > 1 ? (t_hi - t_lo) / (n_samples - 1) : 0.0;
  for (int k = 0; k < n_samples; ++k) {
    const double t = (k + 1 == n_samples && n_samples > 1) ? t_hi : t_lo + k * step;
    curve.push_back({t, total_volume(model, rule.at(t))});
  }
  return curve;
}

void write_curve_csv(std::ostream& os, const std::vector<CurvePoint>& curve) {
  os << "t,V\n";
  for (const auto& p : curve) os << shortest_decimal(p.t) << ',' << shortest_decimal(p.volume) << '\n';
}

namespace {

double effective_size(ComponentKind kind, double value, double area) {
  return kind == ComponentKind::Cusp ? value : geometry::collar_modified_volume(area, value);
}

}  // namespace

TriplePoint TriplePoint::from_model(const PeripheralModel& model, const Configuration& config,
                                    std::array<int, 3> indices, double tol) {
  for (int a = 0; a < 3; ++a) {
    if (indices[a] < 0 || indices[a] >= model.size()) {
      throw std::out_of_range("triple index out of range");
    }
    for (int b = a + 1; b < 3; ++b) {
      if (indices[a] == indices[b]) throw std::invalid_argument("triple indices must be distinct");
    }
  }
  const TangencyGraph graph = tangency_graph(model, config, tol);
  for (int a = 0; a < 3; ++a) {
    for (int b = a + 1; b < 3; ++b) {
      if (!graph.has_edge(indices[a], indices[b])) {
        throw std::invalid_argument("components " + std::to_string(indices[a]) + " and " +
                                    std::to_string(indices[b]) + " are not tangent");
      }
    }
  }
  TriplePoint triple;
  triple.indices = indices;
  for (int a = 0; a < 3; ++a) {
    const Component& c = model.component(indices[a]);
    triple.kinds[a] = c.kind;
    triple.values[a] = config[indices[a]];
    triple.areas[a] = c.area;
    triple.sizes[a] = effective_size(c.kind, triple.values[a], c.area);
    triple.maximal[a] = graph.maximal[static_cast<std::size_t>(indices[a])];
  }
  return triple;
}

TriplePoint TriplePoint::from_values(std::array<ComponentKind, 3> kinds, std::array<double, 3> values,
                                     std::array<double, 3> areas) {
  TriplePoint triple;
  triple.indices = {0, 1, 2};
  triple.kinds = kinds;
  triple.values = values;
  for (int a = 0; a < 3; ++a) {
    triple.areas[a] = kinds[a] == ComponentKind::Cusp ? 0.0 : areas[a];
    triple.sizes[a] = effective_size(kinds[a], values[a], triple.areas[a]);
    triple.maximal[a] = false;
  }
  return triple;
}

OneSidedDerivatives one_sided_derivatives_three(const TriplePoint& triple, int pivot) {
  if (pivot < 0 || pivot > 2) throw std::out_of_range("pivot must be 0, 1 or 2");
  for (int a = 0; a < 3; ++a) {
    if (triple.maximal[a]) {
      throw std::invalid_argument("component " + std::to_string(triple.indices[a]) +
                                  " is individually maximal");
    }
  }
  const double s1 = triple.sizes[pivot];
  // The larger partner stays tangent to a shrinking pivot.
  const double a = triple.sizes[(pivot + 1) % 3];
  const double b = triple.sizes[(pivot + 2) % 3];
  const double s2 = std::max(a, b);
  const double s3 = std::min(a, b);

  if (triple.kinds[pivot] == ComponentKind::Cusp) {
    return {1.0 - s2 / s1 + s3 / s1, 1.0 - s2 / s1 - s3 / s1};
  }
  return {2.0 * (s1 - s2 + s3), 2.0 * (s1 - s2 - s3)};
}

const char* to_string(TripleVerdict verdict) {
  switch (verdict) {
    case TripleVerdict::LocalMax: return "LocalMax";
    case TripleVerdict::NotLocalMax: return "NotLocalMax";
    case TripleVerdict::Degenerate: return "Degenerate";
  }
  return "?";
}

TripleVerdict classify_triple(const TriplePoint& triple, double tol) {
  for (int a = 0; a < 3; ++a) {
    if (triple.maximal[a]) {
      throw std::invalid_argument("classify_triple: component " + std::to_string(triple.indices[a]) +
                                  " is individually maximal");
    }
    if (!(triple.sizes[a] > 0.0)) throw std::invalid_argument("classify_triple: non-positive size");
  }
  const auto& s = triple.sizes;
  const double largest = std::max({s[0], s[1], s[2]});
  const double slack = s[0] + s[1] + s[2] - 2.0 * largest;  // sum of others minus largest
  if (std::abs(slack) <= tol * largest) return TripleVerdict::Degenerate;
  return slack > 0.0 ? TripleVerdict::LocalMax : TripleVerdict::NotLocalMax;
}

}  // namespace periph
