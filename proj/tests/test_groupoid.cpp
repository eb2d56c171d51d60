#include "diffeo/catalog.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace diffeo;

TEST(Group, CyclicLaws) {
  for (int n : {1, 2, 3, 5}) {
    const GroupModel g = GroupModel::cyclic(n);
    EXPECT_TRUE(g.validate().passed());
    EXPECT_EQ(g.order(), n);
    for (const auto& a : g.elements()) EXPECT_TRUE(g.equal(g.multiply(a, g.inverse(a)), g.identity()));
  }
}

TEST(Group, CircleLaws) {
  const GroupModel g = GroupModel::circle();
  EXPECT_FALSE(g.is_finite());
  EXPECT_TRUE(g.validate().passed());
  const GroupElement a{0, 3.0}, b{0, 4.0};
  EXPECT_TRUE(g.equal(g.multiply(a, b), GroupElement{0, 7.0 - 2 * M_PI}));
}

TEST(Group, NonAssociativeTableIsRejected) {
  // Latin square with identity 0 that is not associative.
  const std::vector<std::vector<int>> t = {
      {0, 1, 2, 3, 4}, {1, 0, 3, 4, 2}, {2, 4, 0, 1, 3}, {3, 2, 4, 0, 1}, {4, 3, 1, 2, 0}};
  bool rejected = false;
  try {
    rejected = !GroupModel::finite("L5", t).validate().passed();
  } catch (const Error&) {
    rejected = true;
  }
  EXPECT_TRUE(rejected);
}

TEST(Action, LawsHold) {
  const Domain R = Domain::interval("R", -4.0, 4.0);
  const Domain D = catalog::disk("D", 2.0);
  EXPECT_TRUE(reflection_action(R).validate().passed());
  EXPECT_TRUE(rotation_action(D).validate().passed());
  EXPECT_TRUE(scaling_action(3, D).validate().passed());
  EXPECT_TRUE(trivial_action(GroupModel::cyclic(2), R).validate().passed());
}

TEST(Action, OrbitDistance) {
  const Domain R = Domain::interval("R", -4.0, 4.0);
  const auto g = reflection_action(R);
  EXPECT_TRUE(g.same_orbit(vec({1.5}), vec({-1.5})));
  EXPECT_FALSE(g.same_orbit(vec({1.5}), vec({1.4})));
  EXPECT_NEAR(g.orbit_distance(vec({1.5}), vec({-1.4})), 0.1, 1e-12);
}

TEST(Action, RotationOrbitsAreCircles) {
  const Domain D = catalog::disk("D", 2.0);
  const auto g = rotation_action(D, false);
  std::mt19937_64 rng(3);
  for (int k = 0; k < 20; ++k) {
    const double r = 1.8 * unit_uniform(rng), a = 2 * M_PI * unit_uniform(rng), b = 2 * M_PI * unit_uniform(rng);
    const Vector x = vec({r * std::cos(a), r * std::sin(a)});
    const Vector y = vec({r * std::cos(b), r * std::sin(b)});
    EXPECT_TRUE(g.same_orbit(x, y, 1e-9));
    EXPECT_FALSE(g.same_orbit(x, y * 1.01 + vec({0.01, 0.0}), 1e-9));
  }
}

TEST(Action, OrbitPropertyOnSamples) {
  const Domain R = Domain::interval("R", -4.0, 4.0);
  const auto g = reflection_action(R);
  for (const auto& x : R.samples())
    for (const auto& gamma : g.group().elements()) EXPECT_TRUE(g.same_orbit(x, g.act(gamma, x)));
}

TEST(Bundle, FibersHaveGroupSize) {
  const Domain R = Domain::interval("R", -4.0, 4.0);
  const Domain B = Domain::interval("B", -1.0, 1.0);
  const auto g = reflection_action(R);
  const auto P = pullback_unit_bundle(g, catalog::make_map("p1", B), "P1");
  for (const auto& b : B.samples()) {
    const FiberDescriptor f = fiber(P, g, b);
    ASSERT_EQ(f.points.size(), 2u);
    for (const auto& p : f.points) EXPECT_TRUE(P.contains(g, p));
  }
  const FiberDescriptor f0 = fiber(P, g, vec({0.0}));
  EXPECT_EQ(f0.points.size(), 2u);
}

TEST(Bundle, InducedPlotVerifies) {
  const Domain R = Domain::interval("R", -4.0, 4.0);
  const Domain B = Domain::interval("B", -1.0, 1.0);
  const auto g = reflection_action(R);
  for (const char* q : {"p1", "p2", "sin"}) {
    const auto P = pullback_unit_bundle(g, catalog::make_map(q, B), q);
    const auto [plot, w] = plot_from_bundle(P, g);
    EXPECT_TRUE(verify_plot(orbit_space(g), plot, w).passed()) << q;
  }
}

TEST(Bundle, SectionIndependence) {
  const Domain D = catalog::disk("D", 2.0);
  const auto g = rotation_action(D);
  const auto P = pullback_unit_bundle(g, identity_map(D), "unit");
  for (double angle : {0.3, 2.0, -1.0})
    EXPECT_TRUE(section_independence(P, g, P.canonical_section(), translated_section(P, g, GroupElement{0, angle}))
                    .passed());
}

TEST(Bundle, GeneratorRoundtrip) {
  const Domain R = Domain::interval("R", -4.0, 4.0);
  const Domain D = catalog::disk("D", 2.0);
  EXPECT_TRUE(generator_roundtrip(reflection_action(R)).passed());
  EXPECT_TRUE(generator_roundtrip(rotation_action(D)).passed());
  EXPECT_TRUE(generator_roundtrip(trivial_action(GroupModel::cyclic(3), R)).passed());
}

TEST(Bundle, MapLeavingTheSpaceRaises) {
  const Domain R = Domain::interval("R", -1.0, 1.0);
  const Domain B = Domain::interval("B", -1.0, 1.0);
  const auto g = reflection_action(R);
  EXPECT_THROW(pullback_unit_bundle(g, catalog::make_map("affine", B, {3.0, 0.0}), "P"), Error);
}
