#include "diffeo/catalog.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace diffeo;

namespace {
const Domain R = Domain::interval("R", -3.0, 3.0);
const Domain I = Domain::interval("I", -1.0, 1.0);
}  // namespace

TEST(Plots, SmoothMapIsAPlotOfTheManifold) {
  const DiffeologicalSpace X = manifold_space(R);
  const auto m = catalog::make_map("sin", I);
  EXPECT_TRUE(verify_plot(X, plot_of(m, X.carrier.name), identity_factor_witness(m)).passed());
}

TEST(Plots, WrongFactorIsRefuted) {
  const DiffeologicalSpace X = manifold_space(R);
  const auto m = catalog::make_map("sin", I);
  const auto other = catalog::make_map("cos", I);
  const Verdict v = verify_plot(X, plot_of(m, X.carrier.name), identity_factor_witness(other));
  EXPECT_EQ(v.status, Status::Refuted);
  EXPECT_TRUE(v.point.has_value());
}

TEST(Plots, ConstantWitness) {
  const DiffeologicalSpace X = manifold_space(R);
  const Plot c = constant_plot(I, Element{vec({0.5}), 0}, X.carrier.name);
  EXPECT_TRUE(verify_plot(X, c, PlotWitness::single(I, ConstantAt{Element{vec({0.5}), 0}})).passed());
  EXPECT_EQ(verify_plot(X, c, PlotWitness::single(I, ConstantAt{Element{vec({0.6}), 0}})).status, Status::Refuted);
}

TEST(Plots, PrecompositionStaysAPlot) {
  const DiffeologicalSpace X = manifold_space(R);
  const auto m = catalog::make_map("tanh", I);
  const auto f = catalog::make_map("affine", I, {0.5, 0.2});
  const Plot p = plot_of(m, X.carrier.name);
  const PlotWitness w = identity_factor_witness(m);
  EXPECT_TRUE(verify_plot(X, precompose(p, f), precompose(w, f)).passed());
}

TEST(Quotient, NonTransitiveRelationRaises) {
  const DiffeologicalSpace X = manifold_space(R);
  auto near = [](const Element& a, const Element& b) { return std::abs(a.value(0) - b.value(0)) < 0.5; };
  try {
    quotient(X, near, "near");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NotEquivalence);
  }
}

TEST(Quotient, LiftWitnessVerifies) {
  const DiffeologicalSpace X = manifold_space(R);
  auto sign_eq = [](const Element& a, const Element& b) { return std::abs(a.value(0)) == std::abs(b.value(0)); };
  const DiffeologicalSpace Q = quotient(X, sign_eq, "pm");
  const auto q = catalog::make_map("square", I);
  const Plot p{"π∘sq", I, Q.carrier.name, [q](const Vector& u) { return Element{q(u), 0}; }};
  EXPECT_TRUE(verify_plot(Q, p, lift_witness(q, X.carrier.name)).passed());
}

TEST(DOpen, IntervalIsOpenPointIsNot) {
  const DiffeologicalSpace X = manifold_space(R);
  const SmoothEuclMap id = identity_map(R);
  const std::vector<WitnessedPlot> probes = {{plot_of(id, X.carrier.name), identity_factor_witness(id)}};
  const auto interval = [](const Element& e) { return e.value(0) > 0.5 && e.value(0) < 1.5; };
  EXPECT_TRUE(d_open(X, interval, probes).passed());
  const Vector s = R.samples().front();
  const auto singleton = [s](const Element& e) { return max_abs(Vector(e.value - s)) == 0.0; };
  const Verdict v = d_open(X, singleton, probes);
  EXPECT_EQ(v.status, Status::Refuted);
  ASSERT_TRUE(v.sample.has_value());
  EXPECT_EQ(*v.sample, 0u);
}

TEST(SmoothMaps, SquareIsSmoothOnTheLine) {
  const DiffeologicalSpace X = manifold_space(I);
  const DiffeologicalSpace Y = manifold_space(R);
  const SmoothEuclMap id = identity_map(I);
  const auto sq = catalog::make_map("square", I);
  const Verdict v = check_smooth_map([](const Element& e) { return Element{vec({e.value(0) * e.value(0)}), 0}; }, X, Y,
                                     {{plot_of(id, X.carrier.name), identity_factor_witness(id)}},
                                     {identity_factor_witness(sq)});
  EXPECT_TRUE(v.passed()) << v.reason;
}

TEST(SmoothMaps, MissingWitnessRaises) {
  const DiffeologicalSpace X = manifold_space(I);
  const SmoothEuclMap id = identity_map(I);
  EXPECT_THROW(check_smooth_map([](const Element& e) { return e; }, X, X,
                                {{plot_of(id, X.carrier.name), identity_factor_witness(id)}}, {}),
               Error);
}
