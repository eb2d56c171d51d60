#include "diffeo/catalog.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace diffeo;

namespace {
const Domain R = Domain::interval("R", -4.0, 4.0);
const Domain B15 = Domain::interval("B15", -1.5, 1.5);
const Domain D = catalog::disk("D", 2.0);
}  // namespace

TEST(Indices, BinomialCounts) {
  for (int n = 0; n <= 4; ++n)
    for (int k = 0; k <= n; ++k) EXPECT_EQ(multi_indices(n, k).size(), static_cast<std::size_t>(binomial(n, k)));
}

TEST(Pullback, ProfileAlongP1AtOne) {
  const auto w = pullback(catalog::make_map("p1", B15), catalog::make_form("x_dx", R));
  EXPECT_NEAR(w(vec({1.0}))(0), 2 * std::exp(-2.0), 1e-12);
}

TEST(Pullback, OneFormMatchesChainRule) {
  // f*(x dx) = f(u) f'(u) du.
  const auto f = catalog::make_map("tanh", B15);
  const auto w = pullback(f, catalog::make_form("x_dx", R));
  for (const auto& u : B15.samples()) {
    const double t = std::tanh(u(0));
    EXPECT_NEAR(w(u)(0), t * (1 - t * t), 1e-12);
  }
}

TEST(Pullback, AreaFormAlongPolarIsJacobianDeterminant) {
  const Domain Q = Domain::box("Q", vec({0.1, -3.0}), vec({1.4, 3.0}));
  const Domain P = Domain::box("P", vec({-2.0, -2.0}), vec({2.0, 2.0}));
  const auto w = pullback(catalog::make_map("polar", Q), catalog::make_form("dx_dy", P, 2));
  for (const auto& u : Q.samples()) EXPECT_NEAR(w(u)(0), u(0), 1e-12);
}

TEST(Pullback, Functorial) {
  const auto f = catalog::make_map("affine", B15, {0.5, 0.1});
  const auto g = catalog::make_map("sin", B15);
  const auto w = catalog::make_form("x_dx", B15);
  const auto lhs = pullback(compose(g, f), w);
  const auto rhs = pullback(f, pullback(g, w));
  EXPECT_TRUE(compare_forms(lhs, rhs, 1e-12).passed());
}

TEST(Pullback, DimensionMismatchRaises) {
  try {
    pullback(catalog::make_map("sin", B15), catalog::make_form("x_dx_plus_y_dy", D));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DimensionMismatch);
  }
}

TEST(Exterior, DSquaredVanishes) {
  const auto d2 = exterior_derivative(exterior_derivative(catalog::make_form("radius_squared", D, 0)));
  for (const auto& x : D.samples()) EXPECT_LE(max_abs(d2(x)), 1e-6);
}

TEST(Exterior, DerivativeOfXDy) {
  const auto dw = exterior_derivative(catalog::make_form("x_dy", D));
  EXPECT_TRUE(compare_forms(dw, catalog::make_form("dx_dy", D, 2), 1e-6).passed());
  const auto dv = exterior_derivative(catalog::make_form("x_dy_minus_y_dx", D));
  EXPECT_TRUE(compare_forms(dv, linear_combination(2.0, catalog::make_form("dx_dy", D, 2), 0.0,
                                                   catalog::make_form("dx_dy", D, 2)),
                            1e-6)
                  .passed());
}

TEST(Wedge, Antisymmetric) {
  const auto a = catalog::make_form("dx", D), b = catalog::make_form("dy", D);
  EXPECT_TRUE(compare_forms(wedge(a, b), catalog::make_form("dx_dy", D, 2), 1e-12).passed());
  EXPECT_TRUE(compare_forms(wedge(a, b), linear_combination(-1.0, wedge(b, a), 0.0, wedge(b, a)), 1e-12).passed());
  for (const auto& x : D.samples()) EXPECT_LE(max_abs(wedge(a, a)(x)), 1e-12);
}

TEST(Basic, ReflectionInvariantForms) {
  const auto g = reflection_action(R);
  EXPECT_TRUE(basic_check(catalog::make_form("x_dx", R), g).passed());
  EXPECT_TRUE(basic_check(catalog::make_form("x_squared", R, 0), g).passed());
  const Verdict v = basic_check(catalog::make_form("dx", R), g);
  EXPECT_EQ(v.status, Status::Refuted);
  EXPECT_TRUE(v.point.has_value());
}

TEST(Basic, RotationNeedsInvarianceAndHorizontality) {
  const auto g = rotation_action(D);
  EXPECT_TRUE(basic_check(catalog::make_form("x_dx_plus_y_dy", D), g).passed());
  EXPECT_TRUE(basic_check(catalog::make_form("radius_squared", D, 0), g).passed());
  EXPECT_EQ(basic_check(catalog::make_form("y_dx", D), g).status, Status::Refuted);
  // Invariant but not horizontal.
  EXPECT_EQ(basic_check(catalog::make_form("x_dy_minus_y_dx", D), g).status, Status::Refuted);
  EXPECT_EQ(basic_check(catalog::make_form("dx_dy", D, 2), g).status, Status::Refuted);
}

TEST(Basic, NonBasicFormRaises) {
  try {
    basic_to_orbit_form(catalog::make_form("dx", R), reflection_action(R));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NotBasic);
  }
}

TEST(Basic, RoundTrips) {
  const auto g = reflection_action(R);
  const auto mu = catalog::make_form("x_dx", R);
  const auto a = basic_to_orbit_form(mu, g);
  EXPECT_TRUE(compare_forms(orbit_form_to_basic(a, g), mu, 1e-12).passed());
  EXPECT_TRUE(compare_orbit_forms(basic_to_orbit_form(orbit_form_to_basic(a, g), g), a, 1e-12).passed());
  const auto h = rotation_action(D);
  const auto nu = catalog::make_form("x_dx_plus_y_dy", D);
  EXPECT_TRUE(compare_forms(orbit_form_to_basic(basic_to_orbit_form(nu, h), h), nu, 1e-12).passed());
}

TEST(Basic, LiftIndependence) {
  const auto g = reflection_action(R);
  const auto mu = catalog::make_form("x_dx", R);
  Tolerances t;
  t.eq_tol = 1e-9;
  EXPECT_TRUE(lift_independence(mu, g, catalog::make_map("p1", B15), catalog::make_map("p2", B15), t).passed());
  const auto h = rotation_action(D);
  EXPECT_TRUE(lift_independence(catalog::make_form("x_dx_plus_y_dy", D), h, identity_map(D),
                                catalog::make_map("rotate", D, {1.1}), t)
                  .passed());
}

TEST(Basic, LiftsOfDifferentPlotsAreRejected) {
  const auto g = reflection_action(R);
  const Verdict v = lift_independence(catalog::make_form("x_dx", R), g, catalog::make_map("sin", B15),
                                      catalog::make_map("cos", B15));
  EXPECT_FALSE(v.passed());
}

TEST(Compatibility, AlongRandomAffineMaps) {
  const auto g = reflection_action(R);
  const auto a = basic_to_orbit_form(catalog::make_form("x_dx", R), g);
  const Domain B = Domain::interval("B", -1.0, 1.0);
  const auto P = pullback_unit_bundle(g, catalog::make_map("p1", B), "P1");
  const auto [p, w] = plot_from_bundle(P, g);
  std::mt19937_64 rng(2);
  for (int k = 0; k < 5; ++k) {
    const double s = 0.9 * unit_uniform(rng) - 0.45, c = 0.4 * unit_uniform(rng) - 0.2;
    const auto f = catalog::make_map("affine", B, {s, c});
    const Verdict v = check_compatibility(a, p, w, f);
    EXPECT_TRUE(v.passed()) << v.reason;
  }
}

TEST(Compatibility, ManifoldFormsAreCompatible) {
  const auto a = manifold_form(catalog::make_form("x_dx", R));
  const Domain B = Domain::interval("B", -1.0, 1.0);
  const auto m = catalog::make_map("tanh", B);
  const Plot p = plot_of(m, a.space.carrier.name);
  EXPECT_TRUE(check_compatibility(a, p, identity_factor_witness(m), catalog::make_map("affine", B, {0.5, 0.0})).passed());
}
