#include "diffeo/catalog.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace diffeo;

TEST(Domain, SamplesAreInsideAndReproducible) {
  const Domain a = Domain::interval("I", -1.0, 2.0, SampleConfig{64, 7});
  const Domain b = Domain::interval("I", -1.0, 2.0, SampleConfig{64, 7});
  ASSERT_EQ(a.samples().size(), 64u);
  for (std::size_t i = 0; i < a.samples().size(); ++i) {
    EXPECT_TRUE(a.contains(a.samples()[i]));
    EXPECT_EQ(a.samples()[i], b.samples()[i]);
  }
}

TEST(Domain, SeedChangesSamples) {
  const Domain a = Domain::interval("I", -1.0, 1.0, SampleConfig{32, 0});
  const Domain b = Domain::interval("I", -1.0, 1.0, SampleConfig{32, 5});
  bool differ = false;
  for (std::size_t i = 0; i < a.samples().size(); ++i) differ |= a.samples()[i] != b.samples()[i];
  EXPECT_TRUE(differ);
}

TEST(Domain, OpenBoundariesAreExcluded) {
  const Domain d = Domain::interval("I", 0.0, 1.0);
  EXPECT_FALSE(d.contains(vec({0.0})));
  EXPECT_FALSE(d.contains(vec({1.0})));
  EXPECT_TRUE(d.contains(vec({0.5})));
  EXPECT_FALSE(d.contains(vec({0.5, 0.5})));
}

TEST(Domain, DiskAndUnion) {
  const Domain D = catalog::disk("D", 1.0);
  EXPECT_TRUE(D.contains(vec({0.5, 0.5})));
  EXPECT_FALSE(D.contains(vec({0.8, 0.8})));
  for (const auto& x : D.samples()) EXPECT_LT(x.norm(), 1.0);
  const Domain U = Domain::disjoint_union("U", {Box{vec({0.0}), vec({1.0})}, Box{vec({2.0}), vec({3.0})}});
  EXPECT_TRUE(U.contains(vec({2.5})));
  EXPECT_FALSE(U.contains(vec({1.5})));
  EXPECT_EQ(U.component_of(vec({2.5})), 1);
  EXPECT_TRUE(check_domain(U).passed());
  EXPECT_TRUE(check_domain(Domain::point()).passed());
}

TEST(Jacobian, CubeMatchesHandDerivative) {
  const Domain I = Domain::interval("I", -2.0, 2.0);
  const SmoothEuclMap cube("cube", I, 1, [](const Vector& x) { return vec({x(0) * x(0) * x(0)}); });
  for (double x : {-1.5, -0.3, 0.0, 0.7, 1.9}) {
    const double fd = fd_jacobian(cube, vec({x}), 1e-5)(0, 0);
    EXPECT_NEAR(fd, 3 * x * x, 1e-6);
  }
}

TEST(Jacobian, ProfileDerivativeAtOne) {
  const Domain I = Domain::interval("I", -1.5, 1.5);
  const auto m = catalog::make_map("exp_profile", I);
  EXPECT_NEAR(fd_jacobian(m, vec({1.0}), 1e-5)(0, 0), 2 * std::exp(-1.0), 1e-6);
  EXPECT_NEAR(m.jacobian(vec({1.0}))(0, 0), 2 * std::exp(-1.0), 1e-12);
}

TEST(Jacobian, PolarMatchesHandDerivative) {
  const Domain Q = Domain::box("Q", vec({0.1, -3.0}), vec({2.0, 3.0}));
  const auto polar = catalog::make_map("polar", Q);
  for (const auto& u : Q.samples()) {
    const double r = u(0), t = u(1);
    Matrix J(2, 2);
    J << std::cos(t), -r * std::sin(t), std::sin(t), r * std::cos(t);
    EXPECT_LE(max_abs(Matrix(polar.jacobian(u) - J)), 1e-12);
  }
}

TEST(Jacobian, WrongAnalyticJacobianIsRefuted) {
  const Domain I = Domain::interval("I", -1.0, 1.0);
  const SmoothEuclMap bad("bad", I, 1, [](const Vector& x) { return vec({x(0) * x(0)}); },
                          [](const Vector& x) { return Matrix::Constant(1, 1, x(0)); });
  const Verdict v = check_jacobian(bad);
  EXPECT_EQ(v.status, Status::Refuted);
  ASSERT_TRUE(v.point.has_value());
  ASSERT_TRUE(v.deviation.has_value());
  EXPECT_GT(*v.deviation, 1e-6);
}

TEST(Jacobian, CatalogSweep) {
  for (const auto& e : catalog::sweep_entries()) {
    const Verdict v = check_jacobian(catalog::make_map(e.expr, e.domain, e.params));
    EXPECT_TRUE(v.passed()) << e.expr << ": " << v.reason;
  }
}

TEST(Compose, ChainRuleOnRandomPairs) {
  std::mt19937_64 rng(11);
  const Domain I = Domain::interval("J", -2.5, 2.5, SampleConfig{12, 1});
  const auto maps = catalog::self_maps(I);
  for (int k = 0; k < 30; ++k) {
    const auto& f = maps[rng() % maps.size()];
    const auto& g = maps[rng() % maps.size()];
    const SmoothEuclMap c = compose(g, f);
    for (const auto& x : c.domain().samples()) {
      if (std::abs(x(0)) > 2.4) continue;
      const Matrix expected = g.jacobian(f(x)) * f.jacobian(x);
      EXPECT_LE(max_abs(Matrix(c.jacobian(x) - expected)), 1e-12);
      EXPECT_LE(max_abs(Matrix(c.jacobian(x) - fd_jacobian(c, x, 1e-5))), 1e-5);
    }
  }
}

TEST(Maps, MapsInto) {
  const Domain I = Domain::interval("I", -1.0, 1.0);
  const Domain small = Domain::interval("S", -0.5, 0.5);
  EXPECT_TRUE(maps_into(catalog::make_map("affine", I, {0.4, 0.0}), small).passed());
  EXPECT_EQ(maps_into(catalog::make_map("affine", I, {2.0, 0.0}), small).status, Status::Refuted);
}

TEST(Cover, OverlappingIntervalsCover) {
  const Domain I = Domain::interval("I", -1.0, 1.0);
  const OpenCover good{I, {Domain::interval("a", -1.0, 0.5), Domain::interval("b", -0.5, 1.0)}};
  EXPECT_TRUE(check_cover(good).passed());
  const OpenCover gap{I, {Domain::interval("a", -1.0, 0.0), Domain::interval("b", 0.1, 1.0)}};
  EXPECT_EQ(check_cover(gap).status, Status::Refuted);
}

TEST(Catalog, UnknownNamesRaise) {
  const Domain I = Domain::interval("I", -1.0, 1.0);
  try {
    catalog::make_map("nope", I);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::UnresolvedName);
  }
}
