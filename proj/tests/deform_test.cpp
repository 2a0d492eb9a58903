#include <cmath>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "periph/deform.hpp"
#include "periph/geometry.hpp"
#include "reference.hpp"

using namespace periph;
using periph::testing::relative_error;

namespace {

PeripheralModel cusp_pair(double k) {
  PeripheralModel m;
  m.components = {Component::cusp(), Component::cusp()};
  m.pairs = {{0, 1, k}};
  m.self = {{0, 100}, {1, 100}};
  return m;
}

// Width with the given modified volume for an area-4 collar.
double width_with_size(double s) { return 0.5 * std::acosh(s - 1.0); }

void check_conservation(const PeripheralModel& m, const Configuration& base, const Configuration& moved,
                        const std::vector<std::pair<int, int>>& edges) {
  for (const auto& [i, j] : edges) {
    const bool ci = m.component(i).is_cusp();
    const bool cj = m.component(j).is_cusp();
    if (ci && cj) {
      EXPECT_LT(relative_error(moved[i] * moved[j], base[i] * base[j]), 1e-12);
    } else if (!ci && !cj) {
      EXPECT_NEAR(moved[i] + moved[j], base[i] + base[j], 1e-12);
    } else {
      const int cusp = ci ? i : j;
      const int collar = ci ? j : i;
      EXPECT_LT(relative_error(moved[cusp] * std::exp(2 * moved[collar]), base[cusp] * std::exp(2 * base[collar])),
                1e-12);
    }
  }
}

}  // namespace

TEST(DeformationTree, SignsAndCycles) {
  const auto tree = DeformationTree::from_edges(4, 1, {{0, 1}, {1, 2}, {2, 3}});
  EXPECT_EQ(tree.sign(1), 1);
  EXPECT_EQ(tree.sign(0), -1);
  EXPECT_EQ(tree.sign(2), -1);
  EXPECT_EQ(tree.sign(3), 1);
  EXPECT_EQ(tree.depth(3), 2);
  EXPECT_EQ(tree.parent(3), 2);
  EXPECT_THROW(DeformationTree::from_edges(3, 0, {{0, 1}, {1, 2}, {0, 2}}), CycleError);
  const auto partial = DeformationTree::from_edges(4, 0, {{0, 1}, {2, 3}});
  EXPECT_FALSE(partial.contains(2));
}

TEST(DeformationTree, SignParityRandomTrees) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + trial % 9;
    std::vector<int> parent(static_cast<std::size_t>(n), -1);
    std::vector<std::pair<int, int>> edges;
    for (int k = 1; k < n; ++k) {
      parent[static_cast<std::size_t>(k)] = std::uniform_int_distribution<int>(0, k - 1)(rng);
      edges.emplace_back(parent[static_cast<std::size_t>(k)], k);
    }
    const int root = std::uniform_int_distribution<int>(0, n - 1)(rng);
    const auto tree = DeformationTree::from_edges(n, root, edges);
    // Path length from root via the tree's own parent pointers, counted independently.
    for (int v = 0; v < n; ++v) {
      int length = 0;
      for (int w = v; w != root; w = tree.parent(w)) ++length;
      EXPECT_EQ(tree.sign(v), length % 2 == 0 ? 1 : -1);
      EXPECT_EQ(tree.depth(v), length);
    }
  }
}

TEST(Propagate, Examples) {
  const auto m = cusp_pair(6);
  const Configuration base{{2, 3}};
  const auto tree = DeformationTree::from_edges(2, 0, {{0, 1}});
  const auto moved = propagate(m, base, tree, 0.5 * std::log(2.0));
  EXPECT_NEAR(moved[0], 4.0, 1e-14);
  EXPECT_NEAR(moved[1], 1.5, 1e-14);
  EXPECT_NEAR(moved[0] * moved[1], 6.0, 1e-13);
  EXPECT_EQ(propagate(m, base, tree, 0.0), base);

  PeripheralModel mixed;
  mixed.components = {Component::cusp(), Component::collar_of_genus(2)};
  mixed.pairs = {{0, 1, 2}};
  mixed.self = {{0, 5}, {1, 5}};
  const auto chain = DeformationTree::from_edges(2, 1, {{0, 1}});
  const auto c = propagate(mixed, Configuration{{1, 0}}, chain, 0.5);
  EXPECT_LT(relative_error(c[0], 0.36787944117144233), 1e-15);
  EXPECT_EQ(c[1], 0.5);
}

TEST(Propagate, RangeErrors) {
  PeripheralModel m;
  m.components = {Component::collar_of_genus(2), Component::collar_of_genus(2)};
  m.pairs = {{0, 1, 1}};
  m.self = {{0, 1}, {1, 1}};
  const auto tree = DeformationTree::from_edges(2, 0, {{0, 1}});
  try {
    propagate(m, Configuration{{0.5, 0.5}}, tree, 0.75);
    FAIL();
  } catch (const DeformationRangeError& e) {
    EXPECT_EQ(e.t(), 0.75);
  }
}

TEST(Propagate, ConservationOnRandomTrees) {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> t_dist(-0.05, 0.05);
  for (int trial = 0; trial < 100; ++trial) {
    const auto inst = periph::testing::random_tree_instance(rng);
    const int root = inst.tree_vertices[static_cast<std::size_t>(trial) % inst.tree_vertices.size()];
    const auto tree = DeformationTree::from_edges(inst.model.size(), root, inst.tree_edges);
    const auto moved = propagate(inst.model, inst.config, tree, t_dist(rng));
    check_conservation(inst.model, inst.config, moved, inst.tree_edges);
  }
}

TEST(VolumeCurve, SymmetricCuspPair) {
  const auto m = cusp_pair(9);
  const auto tree = DeformationTree::from_edges(2, 0, {{0, 1}});
  const auto curve = volume_curve(m, Configuration{{3, 3}}, tree, -0.2, 0.2, 41);
  ASSERT_EQ(curve.size(), 41u);
  EXPECT_EQ(curve.back().t, 0.2);
  for (std::size_t k = 0; k < curve.size(); ++k) {
    const double x = curve[k].t;
    EXPECT_NEAR(curve[k].volume, 3 * std::exp(2 * x) + 3 * std::exp(-2 * x), 1e-12);
    EXPECT_NEAR(curve[k].volume, curve[curve.size() - 1 - k].volume, 1e-12);
    EXPECT_GE(curve[k].volume, 6.0 - 1e-12);
  }
}

TEST(VolumeCurve, CsvFormat) {
  const auto m = cusp_pair(9);
  const auto tree = DeformationTree::from_edges(2, 0, {{0, 1}});
  std::ostringstream os;
  write_curve_csv(os, volume_curve(m, Configuration{{3, 3}}, tree, 0.0, 0.0, 1));
  EXPECT_EQ(os.str(), "t,V\n0,6\n");
}

TEST(VolumeCurve, ConvexOnRandomTrees) {
  std::mt19937_64 rng(77);
  const double h = 1e-3;
  for (int trial = 0; trial < 100; ++trial) {
    const auto inst = periph::testing::random_tree_instance(rng);
    const auto tree = DeformationTree::from_edges(inst.model.size(), inst.tree_vertices[0], inst.tree_edges);
    const auto curve = volume_curve(inst.model, inst.config, tree, -20 * h, 20 * h, 41);
    for (std::size_t k = 1; k + 1 < curve.size(); ++k) {
      EXPECT_GE(curve[k - 1].volume - 2 * curve[k].volume + curve[k + 1].volume, -1e-10);
    }
  }
}

TEST(OneSidedDerivatives, Examples) {
  using K = ComponentKind;
  const auto cusps = TriplePoint::from_values({K::Cusp, K::Cusp, K::Cusp}, {3, 5, 4});
  const auto dc = one_sided_derivatives_three(cusps, 0);
  EXPECT_NEAR(dc.minus, 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(dc.plus, -2.0, 1e-15);

  const auto collars = TriplePoint::from_values({K::Collar, K::Collar, K::Collar},
                                                {width_with_size(3), width_with_size(5), width_with_size(4)},
                                                {4, 4, 4});
  EXPECT_NEAR(collars.sizes[0], 3.0, 1e-14);
  const auto dl = one_sided_derivatives_three(collars, 0);
  EXPECT_NEAR(dl.minus, 4.0, 1e-13);
  EXPECT_NEAR(dl.plus, -12.0, 1e-13);
}

TEST(OneSidedDerivatives, MatchPiecewiseFiniteDifferences) {
  std::mt19937_64 rng(4242);
  for (int which = 1; which <= 4; ++which) {
    for (int trial = 0; trial < 100; ++trial) {
      const auto tri = periph::testing::random_triple(which, rng);
      const auto point = TriplePoint::from_model(tri.model, tri.config, {0, 1, 2});
      for (int pivot = 0; pivot < 3; ++pivot) {
        const auto closed = one_sided_derivatives_three(point, pivot);
        const double scale = tri.model.component(pivot).is_cusp() ? tri.config[pivot] : 1.0;
        const auto [minus, plus] = periph::testing::finite_difference_one_sided(tri.model, tri.config, pivot,
                                                                               1e-5 * scale);
        const double tol_minus = 1e-5 * std::max(1.0, std::abs(closed.minus));
        const double tol_plus = 1e-5 * std::max(1.0, std::abs(closed.plus));
        EXPECT_NEAR(minus, closed.minus, tol_minus) << "case " << which << " pivot " << pivot;
        EXPECT_NEAR(plus, closed.plus, tol_plus) << "case " << which << " pivot " << pivot;
      }
    }
  }
}

TEST(ClassifyTriple, Examples) {
  using K = ComponentKind;
  const std::array<K, 3> cusps{K::Cusp, K::Cusp, K::Cusp};
  EXPECT_EQ(classify_triple(TriplePoint::from_values(cusps, {3, 5, 4})), TripleVerdict::LocalMax);
  EXPECT_EQ(classify_triple(TriplePoint::from_values(cusps, {1, 5, 2})), TripleVerdict::NotLocalMax);
  EXPECT_EQ(classify_triple(TriplePoint::from_values(cusps, {2, 5, 3})), TripleVerdict::Degenerate);
}

TEST(ClassifyTriple, EquivalentToDerivativeSigns) {
  std::mt19937_64 rng(8);
  int local = 0;
  int not_local = 0;
  for (int which = 1; which <= 4; ++which) {
    for (int trial = 0; trial < 200; ++trial) {
      const auto tri = periph::testing::random_triple(which, rng);
      const auto point = TriplePoint::from_model(tri.model, tri.config, {0, 1, 2});
      const auto verdict = classify_triple(point);
      bool all_signs = true;
      for (int pivot = 0; pivot < 3; ++pivot) {
        const auto d = one_sided_derivatives_three(point, pivot);
        all_signs = all_signs && d.plus < 0.0 && 0.0 < d.minus;
      }
      if (verdict == TripleVerdict::Degenerate) continue;
      EXPECT_EQ(verdict == TripleVerdict::LocalMax, all_signs);
      (verdict == TripleVerdict::LocalMax ? local : not_local)++;
    }
  }
  EXPECT_GT(local, 50);
  EXPECT_GT(not_local, 50);
}

TEST(TriplePoint, RequiresMutualTangency) {
  auto m = cusp_pair(6);
  m.components.push_back(Component::cusp());
  m.self.push_back({2, 10});
  EXPECT_THROW(TriplePoint::from_model(m, Configuration{{2, 3, 1}}, {0, 1, 2}), std::invalid_argument);
}
