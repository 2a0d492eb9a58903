#include "periph/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numeric>
#include <random>
#include <set>

#include "periph/geometry.hpp"

namespace periph {

const char* to_string(SolveMethod method) {
  switch (method) {
    case SolveMethod::FrontierEnum: return "FrontierEnum";
    case SolveMethod::Greedy: return "Greedy";
    case SolveMethod::Probe: return "Probe";
  }
  return "?";
}

const char* to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::LocalMax: return "LocalMax";
    case Verdict::NotLocalMax: return "NotLocalMax";
    case Verdict::Degenerate: return "Degenerate";
    case Verdict::Inconclusive: return "Inconclusive";
  }
  return "?";
}

namespace {

constexpr double kConditionLimit = 1e12;

// Model constraints plus d_j >= 0 for every collar, written as -d_j <= 0.
struct Polytope {
  Eigen::MatrixXd lhs;
  Eigen::VectorXd rhs;
  int model_rows = 0;
};

Polytope with_width_floors(const ConstraintSet& cs) {
  const int n = cs.dimension();
  int collars = 0;
  for (auto kind : cs.kinds) collars += kind == ComponentKind::Collar ? 1 : 0;
  Polytope p;
  p.model_rows = cs.rows();
  p.lhs = Eigen::MatrixXd::Zero(cs.rows() + collars, n);
  p.rhs = Eigen::VectorXd::Zero(cs.rows() + collars);
  p.lhs.topRows(cs.rows()) = cs.lhs;
  p.rhs.head(cs.rows()) = cs.rhs;
  int row = cs.rows();
  for (int k = 0; k < n; ++k) {
    if (cs.kinds[static_cast<std::size_t>(k)] == ComponentKind::Collar) p.lhs(row++, k) = -1.0;
  }
  return p;
}

// Re-derives vertex coordinates from single-variable rows and then along
// two-variable rows, so that coordinates fixed by a bound are bit-exact.
void snap_vertex(const Eigen::MatrixXd& m, const Eigen::VectorXd& r, Eigen::VectorXd& y) {
  const int n = static_cast<int>(y.size());
  std::vector<bool> exact(static_cast<std::size_t>(n), false);
  bool changed = true;
  while (changed) {
    changed = false;
    for (int row = 0; row < m.rows(); ++row) {
      int unknown = -1;
      int unknown_count = 0;
      double known_sum = 0.0;
      for (int k = 0; k < n; ++k) {
        if (m(row, k) == 0.0) continue;
        if (exact[static_cast<std::size_t>(k)]) {
          known_sum += m(row, k) * y(k);
        } else {
          unknown = k;
          ++unknown_count;
        }
      }
      if (unknown_count == 1) {
        y(unknown) = (r(row) - known_sum) / m(row, unknown);
        exact[static_cast<std::size_t>(unknown)] = true;
        changed = true;
      }
    }
  }
}

// Gradient of total volume in linearized coordinates.
Eigen::VectorXd volume_gradient(const PeripheralModel& model, const Configuration& config) {
  Eigen::VectorXd g(model.size());
  for (int k = 0; k < model.size(); ++k) {
    const Component& c = model.component(k);
    g(k) = c.is_cusp() ? config[k] : 2.0 * geometry::collar_modified_volume(c.area, config[k]);
  }
  return g;
}

bool lexicographically_less(const Configuration& a, const Configuration& b) {
  return std::lexicographical_compare(a.values.begin(), a.values.end(), b.values.begin(), b.values.end());
}

bool next_combination(std::vector<int>& pick, int m) {
  const int k = static_cast<int>(pick.size());
  int i = k - 1;
  while (i >= 0 && pick[static_cast<std::size_t>(i)] == m - k + i) --i;
  if (i < 0) return false;
  ++pick[static_cast<std::size_t>(i)];
  for (int j = i + 1; j < k; ++j) pick[static_cast<std::size_t>(j)] = pick[static_cast<std::size_t>(j - 1)] + 1;
  return true;
}

Solution make_solution(const PeripheralModel& model, Configuration config, SolveMethod method, double tol) {
  Solution s;
  s.total = total_volume(model, config);
  s.active_set = tangency_graph(model, config, tol).active_set();
  s.config = std::move(config);
  s.method = method;
  return s;
}

}  // namespace

Solution solve_global(const PeripheralModel& model, double tol, SolveStats* stats) {
  const ConstraintSet cs = build_constraints(model);
  const Polytope poly = with_width_floors(cs);
  const int n = cs.dimension();
  const int m = static_cast<int>(poly.rhs.size());

  SolveStats local;
  std::optional<Configuration> best;
  double best_total = -std::numeric_limits<double>::infinity();

  std::vector<int> pick(static_cast<std::size_t>(n));
  std::iota(pick.begin(), pick.end(), 0);
  Eigen::MatrixXd sub(n, n);
  Eigen::VectorXd sub_rhs(n);
  do {
    ++local.subsets_tried;
    for (int r = 0; r < n; ++r) {
      sub.row(r) = poly.lhs.row(pick[static_cast<std::size_t>(r)]);
      sub_rhs(r) = poly.rhs(pick[static_cast<std::size_t>(r)]);
    }
    const Eigen::FullPivLU<Eigen::MatrixXd> lu(sub);
    if (!lu.isInvertible()) {
      ++local.singular_skipped;
      continue;
    }
    if (lu.rcond() * kConditionLimit < 1.0) {
      ++local.ill_conditioned_skipped;
      continue;
    }
    Eigen::VectorXd y = lu.solve(sub_rhs);
    snap_vertex(sub, sub_rhs, y);
    if (!y.allFinite()) continue;
    const Eigen::VectorXd residual = poly.rhs - poly.lhs * y;
    if (residual.minCoeff() < -tol) continue;
    ++local.feasible_vertices;

    Configuration config = cs.from_linear(y);
    for (int k = 0; k < n; ++k) {
      // Floors satisfied within tol are clamped onto the domain.
      if (cs.kinds[static_cast<std::size_t>(k)] == ComponentKind::Collar && config[k] < 0.0) config[k] = 0.0;
    }
    const double total = total_volume(model, config);
    const double margin = 1e-12 * std::max(1.0, std::abs(best_total));
    const bool better = !best || total > best_total + margin ||
                        (total >= best_total - margin && lexicographically_less(config, *best));
    if (better) {
      best = std::move(config);
      best_total = total;
    }
  } while (next_combination(pick, m));

  if (local.ill_conditioned_skipped > 0) {
    std::clog << "warning: solve_global skipped " << local.ill_conditioned_skipped
              << " ill-conditioned active sets\n";
  }
  if (stats) *stats = local;
  if (!best) throw InfeasibleError("no feasible vertex: the model's constants admit no configuration");
  return make_solution(model, std::move(*best), SolveMethod::FrontierEnum, tol);
}

Solution greedy(const PeripheralModel& model, std::span<const int> order, double tol) {
  build_constraints(model);
  const int n = model.size();
  std::vector<int> sorted(order.begin(), order.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<int> identity(static_cast<std::size_t>(n));
  std::iota(identity.begin(), identity.end(), 0);
  if (sorted != identity) throw std::invalid_argument("greedy order must be a permutation of the components");

  Configuration config;
  config.values.assign(static_cast<std::size_t>(n), 0.0);
  std::vector<bool> fixed(static_cast<std::size_t>(n), false);

  for (int k : order) {
    const bool cusp = model.component(k).is_cusp();
    double bound = model.self_bound(k);
    for (const auto& p : model.pairs) {
      if (p.i != k && p.j != k) continue;
      const int other = p.i == k ? p.j : p.i;
      const bool other_fixed = fixed[static_cast<std::size_t>(other)];
      const bool other_cusp = model.component(other).is_cusp();
      // Unprocessed cusps can shrink arbitrarily; unprocessed collars are
      // taken at width zero.
      if (!other_fixed && other_cusp) continue;
      const double other_value = other_fixed ? config[other] : 0.0;
      double limit = 0.0;
      if (cusp && other_cusp) {
        limit = geometry::cusp_partner_volume(p.constant, other_value);
      } else if (cusp) {
        limit = geometry::cusp_volume_given_collar(p.constant, other_value);
      } else if (other_cusp) {
        limit = 0.5 * std::log(0.5 * p.constant / other_value);
      } else {
        limit = p.constant - other_value;
      }
      bound = std::min(bound, limit);
    }
    config[k] = cusp ? bound : std::max(0.0, bound);
    fixed[static_cast<std::size_t>(k)] = true;
  }
  return make_solution(model, std::move(config), SolveMethod::Greedy, tol);
}

double individual_maximum(const PeripheralModel& model, int index) {
  const Component& c = model.component(index);
  const double bound = model.self_bound(index);
  return c.is_cusp() ? bound : geometry::collar_volume(c.area, bound);
}

GreedyOrderResult greedy_best_order(const PeripheralModel& model, double tol) {
  build_constraints(model);
  const int n = model.size();
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);

  GreedyOrderResult result;
  bool have = false;
  do {
    Solution s = greedy(model, order, tol);
    const double margin = 1e-12 * std::max(1.0, std::abs(result.best.total));
    if (!have || s.total > result.best.total + margin) {
      result.best = std::move(s);
      result.order = order;
      have = true;
    }
  } while (std::next_permutation(order.begin(), order.end()));

  if (n == 2) {
    const Component& a = model.component(0);
    const Component& b = model.component(1);
    if (a.is_cusp() && b.is_cusp()) {
      result.special_case = TwoComponentCase::TwoCusps;
    } else if (a.is_collar() && b.is_collar() && a.area == b.area) {
      result.special_case = TwoComponentCase::TwoEqualCollars;
    }
  }
  if (result.special_case != TwoComponentCase::None) {
    result.descending_order = {0, 1};
    if (individual_maximum(model, 1) > individual_maximum(model, 0)) result.descending_order = {1, 0};
    result.descending_total = greedy(model, result.descending_order, tol).total;
    result.descending_is_optimal =
        result.descending_total >= result.best.total - 1e-9 * std::max(1.0, std::abs(result.best.total));
  }
  return result;
}

ProbeResult local_probe(const PeripheralModel& model, const Configuration& config, double radius,
                        int n_trials, std::uint64_t seed, double tol) {
  const ConstraintSet cs = build_constraints(model);
  const Polytope poly = with_width_floors(cs);
  const int n = cs.dimension();
  const int m = static_cast<int>(poly.rhs.size());

  const Eigen::VectorXd y0 = cs.to_linear(config);
  const Eigen::VectorXd r0 = poly.rhs - poly.lhs * y0;
  if (r0.head(poly.model_rows).size() > 0 && r0.head(poly.model_rows).minCoeff() < -tol) {
    throw InfeasibleError("local_probe: configuration is infeasible");
  }
  // No sample may make a constraint worse than it is at the base point.
  // Repairs aim halfway inside the allowance so that rounding cannot push a
  // repaired row back below it.
  constexpr double kAllowance = 1e-12;
  Eigen::VectorXd floor = r0.cwiseMin(0.0).array() - kAllowance;

  ProbeResult result;
  result.base_total = total_volume(model, config);
  const double margin = 1e-10 * std::max(1.0, std::abs(result.base_total));
  if (!(radius > 0.0) || n_trials <= 0) return result;

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  for (int trial = 0; trial < n_trials; ++trial) {
    ++result.trials;
    Eigen::VectorXd u(n);
    for (int k = 0; k < n; ++k) u(k) = normal(rng);
    const double norm = u.norm();
    if (norm == 0.0) continue;
    u /= norm;
    const double r = radius * std::pow(unit(rng), 1.0 / n);
    Eigen::VectorXd y = y0 + r * u;

    for (int k = 0; k < n; ++k) {
      if (cs.kinds[static_cast<std::size_t>(k)] == ComponentKind::Collar) y(k) = std::max(y(k), 0.0);
    }

    bool ok = true;
    for (int iter = 0; iter < 4 * m + 4; ++iter) {
      const Eigen::VectorXd slack = poly.rhs - poly.lhs * y - floor;
      Eigen::Index worst = 0;
      if (slack.minCoeff(&worst) >= 0.0) break;
      if (worst >= poly.model_rows) {
        // Width floors were enforced up front; only round-off lands here.
        ok = false;
        break;
      }
      // Lower the reducible coordinate of the violated row that the sample
      // moved up the least.
      int pick = -1;
      for (int k = 0; k < n; ++k) {
        if (poly.lhs(worst, k) <= 0.0) continue;
        const bool collar = cs.kinds[static_cast<std::size_t>(k)] == ComponentKind::Collar;
        if (collar && y(k) <= 0.0) continue;
        if (pick < 0 || u(k) < u(pick)) pick = k;
      }
      if (pick < 0) {
        ok = false;
        break;
      }
      double lowered = y(pick) + (slack(worst) - 0.5 * kAllowance) / poly.lhs(worst, pick);
      if (cs.kinds[static_cast<std::size_t>(pick)] == ComponentKind::Collar) lowered = std::max(lowered, 0.0);
      y(pick) = lowered;
    }
    if (!ok) continue;
    if ((poly.rhs - poly.lhs * y - floor).minCoeff() < 0.0) continue;

    const double step = (y - y0).norm();
    if (step > radius) y = y0 + (y - y0) * (radius / step);
    if ((poly.rhs - poly.lhs * y - floor).minCoeff() < 0.0) continue;

    const Configuration candidate = cs.from_linear(y);
    const double total = total_volume(model, candidate);
    if (total > result.base_total + margin && (!result.improved || total > result.witness_total)) {
      result.improved = true;
      result.witness = candidate;
      result.witness_total = total;
    }
  }
  return result;
}

namespace {

// Outcome of the first-order test on the cone of feasible directions.
struct ConeAnalysis {
  enum class Kind { LocalMax, Improving, Degenerate } kind = Kind::LocalMax;
  Eigen::VectorXd direction;
  double slope = 0.0;
};

Eigen::MatrixXd kernel_of(const Eigen::MatrixXd& rows, int n) {
  if (rows.rows() == 0) return Eigen::MatrixXd::Identity(n, n);
  const Eigen::FullPivLU<Eigen::MatrixXd> lu(rows);
  if (lu.rank() == n) return Eigen::MatrixXd(n, 0);
  return lu.kernel();
}

ConeAnalysis analyze_cone(const Eigen::MatrixXd& active, const Eigen::VectorXd& gradient) {
  const int n = static_cast<int>(gradient.size());
  const double eps = 1e-12 * std::max(1.0, gradient.norm());
  ConeAnalysis out;

  const Eigen::MatrixXd lineality = kernel_of(active, n);
  if (lineality.cols() > 0) {
    // Both directions of a line are feasible and the objective is strictly
    // convex along it, so one of them improves.
    Eigen::VectorXd dir = lineality.col(0).normalized();
    if (gradient.dot(dir) < 0.0) dir = -dir;
    out.kind = ConeAnalysis::Kind::Improving;
    out.direction = dir;
    out.slope = gradient.dot(dir);
    return out;
  }

  const int k = static_cast<int>(active.rows());
  std::vector<int> pick(static_cast<std::size_t>(n - 1));
  std::iota(pick.begin(), pick.end(), 0);
  bool have_ray = false;
  do {
    Eigen::MatrixXd sub(n - 1, n);
    for (int r = 0; r < n - 1; ++r) sub.row(r) = active.row(pick[static_cast<std::size_t>(r)]);
    const Eigen::MatrixXd ker = kernel_of(sub, n);
    if (ker.cols() != 1) continue;
    Eigen::VectorXd e = ker.col(0).normalized();
    const double tiny = 1e-12;
    if ((active * e).maxCoeff() > tiny) {
      e = -e;
      if ((active * e).maxCoeff() > tiny) continue;
    }
    const double slope = gradient.dot(e);
    if (!have_ray || slope > out.slope) {
      out.direction = e;
      out.slope = slope;
      have_ray = true;
    }
  } while (n - 1 > 0 && next_combination(pick, k));

  if (!have_ray) {
    out.kind = ConeAnalysis::Kind::LocalMax;
  } else if (out.slope > eps) {
    out.kind = ConeAnalysis::Kind::Improving;
  } else if (out.slope >= -eps) {
    out.kind = ConeAnalysis::Kind::Degenerate;
  } else {
    out.kind = ConeAnalysis::Kind::LocalMax;
  }
  return out;
}

// Largest step h >= 0 with y0 + h * dir satisfying every constraint whose
// residual at y0 exceeds tol.
double max_step(const Polytope& poly, const Eigen::VectorXd& y0, const Eigen::VectorXd& dir, double tol) {
  const Eigen::VectorXd residual = poly.rhs - poly.lhs * y0;
  const Eigen::VectorXd rate = poly.lhs * dir;
  double h = std::numeric_limits<double>::infinity();
  for (Eigen::Index r = 0; r < residual.size(); ++r) {
    if (residual(r) > tol && rate(r) > 0.0) h = std::min(h, residual(r) / rate(r));
  }
  return h;
}

std::optional<TreeDeformationEvidence> tree_deformation(const PeripheralModel& model, const ConstraintSet& cs,
                                                        const Polytope& poly, const Configuration& config,
                                                        const TangencyGraph& graph,
                                                        const std::vector<int>& component, double radius,
                                                        double tol) {
  const int root = component.front();
  const DeformationTree tree = DeformationTree::from_edges(model.size(), root, graph.edges);
  const Eigen::VectorXd y0 = cs.to_linear(config);
  Eigen::VectorXd rate = Eigen::VectorXd::Zero(model.size());
  for (int v : tree.vertices()) rate(v) = (model.component(v).is_cusp() ? 2.0 : 1.0) * tree.sign(v);

  const double total = total_volume(model, config);
  std::optional<TreeDeformationEvidence> best;
  for (double dir : {1.0, -1.0}) {
    const double h = std::min(radius, 0.5 * max_step(poly, y0, dir * rate, tol));
    if (!(h > 0.0)) continue;
    Configuration moved;
    try {
      moved = propagate(model, config, tree, dir * h);
    } catch (const DeformationRangeError&) {
      continue;
    }
    const double after = total_volume(model, moved);
    if (!best || after > best->total_after) {
      best = TreeDeformationEvidence{component, root, dir * h, std::move(moved), total, after};
    }
  }
  return best;
}

RayEvidence ray_evidence(const PeripheralModel& model, const ConstraintSet& cs, const Polytope& poly,
                         const Configuration& config, const Eigen::VectorXd& dir, double slope,
                         double radius, double tol) {
  RayEvidence ev;
  ev.direction.assign(dir.data(), dir.data() + dir.size());
  ev.slope = slope;
  const Eigen::VectorXd y0 = cs.to_linear(config);
  const double h = std::min(radius, 0.5 * max_step(poly, y0, dir, tol));
  if (h > 0.0) {
    Eigen::VectorXd y = y0 + h * dir;
    for (int k = 0; k < cs.dimension(); ++k) {
      if (cs.kinds[static_cast<std::size_t>(k)] == ComponentKind::Collar) y(k) = std::max(y(k), 0.0);
    }
    const Configuration moved = cs.from_linear(y);
    const double after = total_volume(model, moved);
    if (after > total_volume(model, config)) {
      ev.witness = moved;
      ev.witness_total = after;
    }
  }
  return ev;
}

}  // namespace

Classification classify(const PeripheralModel& model, const Configuration& config, const ClassifyOptions& options) {
  const double tol = options.tol;
  const ConstraintSet cs = build_constraints(model);
  const Polytope poly = with_width_floors(cs);
  const TangencyGraph graph = tangency_graph(model, config, tol);
  const int n = model.size();

  Classification out;
  Evidence& ev = out.evidence;
  ev.edges = graph.edges;
  for (int k = 0; k < n; ++k) {
    if (graph.maximal[static_cast<std::size_t>(k)]) ev.maximal.push_back(k);
  }
  ev.components = graph.connected_components();
  for (const auto& comp : ev.components) ev.component_is_tree.push_back(graph.is_tree(comp));

  // Tree rule.
  for (std::size_t c = 0; c < ev.components.size(); ++c) {
    const auto& comp = ev.components[c];
    if (!ev.component_is_tree[c]) continue;
    const bool any_maximal = std::any_of(comp.begin(), comp.end(),
                                         [&](int v) { return graph.maximal[static_cast<std::size_t>(v)]; });
    if (any_maximal) continue;
    // A zero-width collar blocks one direction of the deformation.
    const bool pinned = std::any_of(comp.begin(), comp.end(), [&](int v) {
      return model.component(v).is_collar() && config[v] <= tol;
    });
    if (pinned) continue;
    ev.rule = "tree";
    ev.deformation = tree_deformation(model, cs, poly, config, graph, comp, options.probe_radius, tol);
    out.verdict = Verdict::NotLocalMax;
    return out;
  }

  // Triple tangency with no maximal component.
  if (n == 3 && graph.edges.size() == 3 && ev.maximal.empty()) {
    const TriplePoint triple = TriplePoint::from_model(model, config, {0, 1, 2}, tol);
    TriangleEvidence tri;
    tri.indices = triple.indices;
    tri.sizes = triple.sizes;
    tri.verdict = classify_triple(triple, tol);
    for (int p = 0; p < 3; ++p) tri.derivatives[static_cast<std::size_t>(p)] = one_sided_derivatives_three(triple, p);
    ev.rule = "triangle";
    ev.triangle = tri;
    switch (tri.verdict) {
      case TripleVerdict::LocalMax:
        out.verdict = Verdict::LocalMax;
        break;
      case TripleVerdict::Degenerate:
        out.verdict = Verdict::Degenerate;
        break;
      case TripleVerdict::NotLocalMax: {
        out.verdict = Verdict::NotLocalMax;
        // Inflate the component that violates the triangle inequality; the
        // other two stay tangent to it.
        const int pivot = static_cast<int>(std::max_element(tri.sizes.begin(), tri.sizes.end()) - tri.sizes.begin());
        const int a = (pivot + 1) % 3;
        const int b = (pivot + 2) % 3;
        const DeformationTree star = DeformationTree::from_edges(3, pivot, {{pivot, a}, {pivot, b}});
        Eigen::VectorXd rate(3);
        for (int v = 0; v < 3; ++v) rate(v) = (model.component(v).is_cusp() ? 2.0 : 1.0) * star.sign(v);
        const double h = std::min(options.probe_radius, 0.5 * max_step(poly, cs.to_linear(config), rate, tol));
        if (h > 0.0) {
          try {
            Configuration moved = propagate(model, config, star, h);
            const double before = total_volume(model, config);
            const double after = total_volume(model, moved);
            ev.deformation = TreeDeformationEvidence{{0, 1, 2}, pivot, h, std::move(moved), before, after};
          } catch (const DeformationRangeError&) {
          }
        }
        break;
      }
    }
    return out;
  }

  if (n <= 3) {
    // Every remaining tangency component contains a maximal vertex. Check
    // the first-order change along the extreme rays of the feasible cone.
    ev.rule = n == 2 ? "two-component" : "maximal-pattern";
    const Eigen::VectorXd y0 = cs.to_linear(config);
    const Eigen::VectorXd residual = poly.rhs - poly.lhs * y0;
    std::vector<int> rows;
    for (int r = 0; r < residual.size(); ++r) {
      if (std::abs(residual(r)) <= tol) rows.push_back(r);
    }
    Eigen::MatrixXd active(static_cast<Eigen::Index>(rows.size()), n);
    for (std::size_t r = 0; r < rows.size(); ++r) active.row(static_cast<Eigen::Index>(r)) = poly.lhs.row(rows[r]);
    const ConeAnalysis cone = analyze_cone(active, volume_gradient(model, config));
    switch (cone.kind) {
      case ConeAnalysis::Kind::LocalMax:
        out.verdict = Verdict::LocalMax;
        break;
      case ConeAnalysis::Kind::Degenerate:
        out.verdict = Verdict::Degenerate;
        ev.ray = ray_evidence(model, cs, poly, config, cone.direction, cone.slope, options.probe_radius, tol);
        break;
      case ConeAnalysis::Kind::Improving:
        out.verdict = Verdict::NotLocalMax;
        ev.ray = ray_evidence(model, cs, poly, config, cone.direction, cone.slope, options.probe_radius, tol);
        break;
    }
    return out;
  }

  ev.rule = "probe";
  ev.probe = local_probe(model, config, options.probe_radius, options.probe_trials, options.probe_seed, tol);
  out.verdict = ev.probe->improved ? Verdict::NotLocalMax : Verdict::Inconclusive;
  return out;
}

}  // namespace periph
