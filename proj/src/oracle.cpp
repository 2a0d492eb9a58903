#include "periph/oracle.hpp"

#include <algorithm>
#include <cmath>

#include "periph/geometry.hpp"

namespace periph::oracle {

namespace {

struct Box {
  Eigen::VectorXd lo;
  Eigen::VectorXd hi;
};

struct Candidate {
  Eigen::VectorXd point;
  double total = 0.0;
};

class Objective {
 public:
  Objective(const PeripheralModel& model, const ConstraintSet& cs) : cs_(cs) {
    for (const auto& c : model.components) areas_.push_back(c.area);
  }

  bool feasible(const Eigen::VectorXd& y) const { return (cs_.rhs - cs_.lhs * y).minCoeff() >= 0.0; }

  double operator()(const Eigen::VectorXd& y) const {
    double total = 0.0;
    for (Eigen::Index k = 0; k < y.size(); ++k) {
      total += cs_.kinds[static_cast<std::size_t>(k)] == ComponentKind::Cusp
                   ? std::exp(y(k))
                   : geometry::collar_volume(areas_[static_cast<std::size_t>(k)], y(k));
    }
    return total;
  }

 private:
  const ConstraintSet& cs_;
  std::vector<double> areas_;
};

Box search_box(const PeripheralModel& model, const ConstraintSet& cs, const GridSpec& spec) {
  const int n = cs.dimension();
  Box box{Eigen::VectorXd(n), Eigen::VectorXd(n)};
  for (int k = 0; k < n; ++k) {
    const bool cusp = cs.kinds[static_cast<std::size_t>(k)] == ComponentKind::Cusp;
    const double bound = model.self_bound(k);
    box.hi(k) = cusp ? std::log(bound) : bound;
    box.lo(k) = cusp ? std::log(spec.cusp_floor) : spec.collar_floor;
  }
  if (!spec.adaptive_floors) return box;
  // The smallest value a cusp coordinate takes at any vertex is bounded by
  // its pair rows with every partner at its upper bound.
  for (int r = 0; r < cs.rows(); ++r) {
    for (int k = 0; k < n; ++k) {
      if (cs.kinds[static_cast<std::size_t>(k)] != ComponentKind::Cusp || cs.lhs(r, k) == 0.0) continue;
      double rest = 0.0;
      for (int o = 0; o < n; ++o) {
        if (o != k) rest += cs.lhs(r, o) * box.hi(o);
      }
      box.lo(k) = std::min(box.lo(k), (cs.rhs(r) - rest) / cs.lhs(r, k) - 1.0);
    }
  }
  return box;
}

// Evaluates a regular grid over `box`, keeping the `keep` best feasible
// points that are at least `separation` grid steps apart (Chebyshev).
std::vector<Candidate> scan(const Objective& objective, const Box& box, int resolution, int keep,
                            double separation) {
  const int n = static_cast<int>(box.lo.size());
  const Eigen::VectorXd step = (box.hi - box.lo) / static_cast<double>(resolution - 1);
  std::vector<int> index(static_cast<std::size_t>(n), 0);
  std::vector<Candidate> best;
  Eigen::VectorXd y = box.lo;

  const auto far_enough = [&](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    for (int k = 0; k < n; ++k) {
      if (step(k) > 0.0 && std::abs(a(k) - b(k)) > separation * step(k)) return true;
    }
    return false;
  };

  while (true) {
    for (int k = 0; k < n; ++k) {
      const int i = index[static_cast<std::size_t>(k)];
      y(k) = i + 1 == resolution ? box.hi(k) : box.lo(k) + i * step(k);
    }
    if (objective.feasible(y)) {
      const double total = objective(y);
      if (static_cast<int>(best.size()) < keep || total > best.back().total) {
        // Replace a close neighbour if one exists, otherwise the worst.
        auto clash = std::find_if(best.begin(), best.end(),
                                  [&](const Candidate& c) { return !far_enough(c.point, y); });
        if (clash != best.end()) {
          if (total > clash->total) *clash = Candidate{y, total};
        } else if (static_cast<int>(best.size()) < keep) {
          best.push_back({y, total});
        } else {
          best.back() = Candidate{y, total};
        }
        std::stable_sort(best.begin(), best.end(),
                         [](const Candidate& a, const Candidate& b) { return a.total > b.total; });
      }
    }
    int k = 0;
    while (k < n && ++index[static_cast<std::size_t>(k)] == resolution) {
      index[static_cast<std::size_t>(k)] = 0;
      ++k;
    }
    if (k == n) break;
  }
  return best;
}

}  // namespace

Solution grid_search(const PeripheralModel& model, const GridSpec& spec, std::vector<double>* history) {
  if (spec.resolution < 3 || !(spec.shrink > 0.0 && spec.shrink < 1.0) || spec.rounds < 1 || spec.starts < 1) {
    throw std::invalid_argument("grid spec needs resolution >= 3, shrink in (0, 1), rounds >= 1, starts >= 1");
  }
  const ConstraintSet cs = build_constraints(model);
  const int n = cs.dimension();
  if (n > 4) throw std::invalid_argument("grid_search supports at most 4 components");

  const Objective objective(model, cs);
  const Box full = search_box(model, cs, spec);

  std::vector<Candidate> incumbents = scan(objective, full, spec.resolution, spec.starts, 2.0);
  if (incumbents.empty()) {
    throw InfeasibleError("grid_search found no feasible grid point; lower the floors or refine");
  }
  std::vector<double> rounds{incumbents.front().total};

  Eigen::VectorXd half = 0.5 * (full.hi - full.lo);
  for (int round = 1; round < spec.rounds; ++round) {
    half *= spec.shrink;
    for (auto& inc : incumbents) {
      Box local{(inc.point - half).cwiseMax(full.lo), (inc.point + half).cwiseMin(full.hi)};
      const auto found = scan(objective, local, spec.resolution, 1, 0.0);
      if (!found.empty() && found.front().total > inc.total) inc = found.front();
    }
    double best = rounds.back();
    for (const auto& inc : incumbents) best = std::max(best, inc.total);
    rounds.push_back(best);
  }

  const auto winner = std::max_element(incumbents.begin(), incumbents.end(),
                                       [](const Candidate& a, const Candidate& b) { return a.total < b.total; });
  if (history) *history = rounds;

  Solution s;
  s.config = cs.from_linear(winner->point);
  s.total = total_volume(model, s.config);
  s.active_set = tangency_graph(model, s.config).active_set();
  s.method = SolveMethod::Probe;
  return s;
}

VerificationReport verify_instance(const PeripheralModel& model, const Solution& candidate, double rel_tol,
                                   const GridSpec& spec) {
  const Solution reference = grid_search(model, spec);
  VerificationReport report;
  report.candidate_total = candidate.total;
  report.oracle_total = reference.total;
  report.pass = std::abs(candidate.total - reference.total) <= rel_tol * std::max(1.0, reference.total) &&
                candidate.total >= reference.total - rel_tol;
  return report;
}

}  // namespace periph::oracle
