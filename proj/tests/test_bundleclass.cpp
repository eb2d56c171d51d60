#include "diffeo/bundleclass.hpp"
#include "diffeo/catalog.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

using namespace diffeo;

namespace {

/// First Betti number of the nerve graph: edges − vertices + components.
int betti1(const CoverGraph& g) {
  std::vector<int> parent(static_cast<std::size_t>(g.pieces));
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  int components = g.pieces;
  for (const auto& o : g.overlaps) {
    const int a = find(o.i), b = find(o.j);
    if (a != b) {
      parent[a] = b;
      --components;
    }
  }
  return static_cast<int>(g.overlaps.size()) - g.pieces + components;
}

struct Reflection {
  Domain R = Domain::interval("R", -4.0, 4.0);
  Domain B = Domain::interval("B", -1.0, 1.0);
  ActionGroupoid g = reflection_action(R);
  PrincipalBundle P1 = pullback_unit_bundle(g, catalog::make_map("p1", B), "P1", {vec({0.0})});
  PrincipalBundle P2 = pullback_unit_bundle(g, catalog::make_map("p2", B), "P2", {vec({0.0})});
};

}  // namespace

TEST(Cocycles, CountsMatchNerveCohomology) {
  // Abelian Γ and no triple overlaps: H¹ = Γ^{b₁}.
  CoverGraph theta{"theta", 2, {{0, 1, "a"}, {0, 1, "b"}, {0, 1, "c"}}, {}};
  for (const CoverGraph& graph : {CoverGraph::two_arc_circle(), CoverGraph::interval(), CoverGraph::disjoint(3), theta}) {
    ASSERT_TRUE(graph.triples.empty());
    for (int n : {2, 3}) {
      const auto expected = static_cast<std::size_t>(std::pow(n, betti1(graph)));
      EXPECT_EQ(cocycle_classes(GroupModel::cyclic(n), graph).size(), expected) << graph.name << " Z" << n;
    }
  }
}

TEST(Cocycles, ThreeArcCircle) {
  EXPECT_EQ(cocycle_classes(GroupModel::cyclic(2), CoverGraph::three_arc_circle()).size(), 2u);
  EXPECT_EQ(cocycle_classes(GroupModel::cyclic(3), CoverGraph::three_arc_circle()).size(), 3u);
}

TEST(Cocycles, ClassesPartitionAllCocycles) {
  const auto g = GroupModel::cyclic(3);
  const auto graph = CoverGraph::two_arc_circle();
  const auto classes = cocycle_classes(g, graph);
  std::size_t total = 0;
  for (const auto& c : classes) {
    total += c.count;
    for (const auto& m : c.members) EXPECT_TRUE(cohomologous(m, c.representative));
  }
  EXPECT_EQ(total, enumerate_cocycles(g, graph).size());
  for (std::size_t i = 0; i < classes.size(); ++i)
    for (std::size_t j = i + 1; j < classes.size(); ++j)
      EXPECT_FALSE(cohomologous(classes[i].representative, classes[j].representative));
}

TEST(Cocycles, CoboundaryPreservesClass) {
  const auto g = GroupModel::cyclic(3);
  std::mt19937_64 rng(4);
  for (const auto& c : enumerate_cocycles(g, CoverGraph::two_arc_circle())) {
    const std::vector<GroupElement> h = {GroupElement{static_cast<int>(rng() % 3), 0.0},
                                         GroupElement{static_cast<int>(rng() % 3), 0.0}};
    EXPECT_TRUE(cohomologous(c, apply_coboundary(c, h)));
  }
}

TEST(Cocycles, InvalidTransitionsAreRefuted) {
  Cocycle c{CoverGraph::two_arc_circle(), GroupModel::cyclic(2), {GroupElement{0, 0.0}}};
  EXPECT_EQ(c.validate().status, Status::Refuted);
}

TEST(Reflection, FiberwiseButNotLocallyIsomorphic) {
  Reflection r;
  EXPECT_TRUE(fiberwise_isomorphic(r.P1, r.P2, r.g).passed());
  EXPECT_TRUE(fiberwise_isomorphic(r.P1, r.P2, r.g, FiberRoute::GammaSet).passed());
  const LocalIsoResult l = locally_isomorphic(r.P1, r.P2, r.g);
  EXPECT_EQ(l.verdict.status, Status::Refuted);
  ASSERT_TRUE(l.verdict.point.has_value());
  EXPECT_LE(std::abs((*l.verdict.point)(0)), 1e-3);
}

TEST(Reflection, RefinedWorkingCoverStillRefutes) {
  Reflection r;
  const OpenCover cover{r.B, {Domain::interval("a", -1.0, 0.1), Domain::interval("b", -0.1, 1.0)}};
  const LocalIsoResult l = locally_isomorphic(r.P1, r.P2, r.g, cover);
  EXPECT_EQ(l.verdict.status, Status::Refuted);
  EXPECT_LE(std::abs((*l.verdict.point)(0)), 1e-3);
}

TEST(Reflection, SelfIsomorphism) {
  Reflection r;
  EXPECT_TRUE(locally_isomorphic(r.P1, r.P1, r.g).verdict.passed());
  EXPECT_TRUE(globally_isomorphic(r.P2, r.P2, r.g).verdict.passed());
  EXPECT_EQ(globally_isomorphic(r.P1, r.P2, r.g).verdict.status, Status::Refuted);
}

TEST(Reflection, AwayFromZeroTheBundlesAgree) {
  Reflection r;
  const Domain Bp = Domain::interval("B", 0.1, 1.0);
  const auto P = pullback_unit_bundle(r.g, catalog::make_map("p1", Bp), "P");
  const auto Q = pullback_unit_bundle(r.g, catalog::make_map("p2", Bp), "Q");
  EXPECT_TRUE(locally_isomorphic(P, Q, r.g).verdict.passed());
}

TEST(Partitions, ChainOnRandomLists) {
  Reflection r;
  const std::vector<AnyBundle> pool = {r.P1, r.P2, pullback_unit_bundle(r.g, catalog::make_map("sin", r.B), "S")};
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<AnyBundle> list;
    for (int k = 0; k < 4; ++k) list.push_back(pool[rng() % pool.size()]);
    const Partition iso = isomorphism_classes(list, r.g);
    const Partition disc = discretization_classes(list, r.g);
    const Partition coarse = coarse_classes(list, r.g);
    EXPECT_TRUE(refines(iso, disc));
    EXPECT_TRUE(refines(disc, coarse));
  }
}

TEST(Partitions, GerbesHaveOneDiscretizationClass) {
  for (int n : {2, 3}) {
    const auto G = GroupModel::cyclic(n);
    std::vector<AnyBundle> list;
    for (const auto& c : cocycle_classes(G, CoverGraph::two_arc_circle()))
      list.push_back(CocycleBundle{c.representative.describe(), c.representative});
    const auto g = trivial_action(G, Domain::point());
    EXPECT_EQ(isomorphism_classes(list, g).count(), static_cast<std::size_t>(n));
    EXPECT_EQ(discretization_classes(list, g).count(), 1u);
    EXPECT_EQ(coarse_classes(list, g).count(), 1u);
  }
}

TEST(Partitions, CircleGroupIsOutsideTheDecidableClass) {
  const Domain D = catalog::disk("D", 2.0);
  const auto g = rotation_action(D);
  const auto P = pullback_unit_bundle(g, identity_map(D), "P");
  EXPECT_EQ(locally_isomorphic(P, P, g).verdict.status, Status::Unknown);
}
