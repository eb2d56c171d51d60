// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.
#include "diffeo/tables.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <variant>

using namespace diffeo;

namespace {

constexpr double kEqTol = 1e-9;
constexpr double kFdTol = 1e-6;
constexpr double kFdStep = 1e-5;
constexpr double kFormTol = 1e-6;
constexpr double kExactTol = 1e-12;
constexpr double kWitnessTol = 1e-3;
constexpr double kLiftTol = 1e-9;
constexpr double kChainTol = 1e-5;
constexpr std::size_t kSamples = 64;
constexpr std::uint64_t kSeed = 0;
constexpr int kAdjunctionTrials = 100;
constexpr int kChainPairs = 50;

Tolerances tolerances() {
  Tolerances t;
  t.eq_tol = kEqTol;
  t.fd_tol = kFdTol;
  t.fd_step = kFdStep;
  t.form_tol = kFormTol;
  t.exact_tol = kExactTol;
  return t;
}

const SampleConfig kCfg{kSamples, kSeed};

struct Check {
  bool ok = true;
  std::string note;
  void require(bool cond, const std::string& what) {
    if (!cond && ok) {
      ok = false;
      note = what;
    }
  }
};

struct Reflection {
  Domain R = Domain::interval("R", -4.0, 4.0, kCfg);
  Domain B = Domain::interval("B", -1.0, 1.0, kCfg);
  ActionGroupoid g = reflection_action(R);
  PrincipalBundle P1 = pullback_unit_bundle(g, catalog::make_map("p1", B), "P1", {vec({0.0})}, kEqTol);
  PrincipalBundle P2 = pullback_unit_bundle(g, catalog::make_map("p2", B), "P2", {vec({0.0})}, kEqTol);
};

Check criterion1() {
  Check c;
  Reflection r;
  c.require(fiberwise_isomorphic(r.P1, r.P2, r.g, FiberRoute::AnchorOrbit, kEqTol).passed(), "not fiberwise iso");
  const LocalIsoResult l = locally_isomorphic(r.P1, r.P2, r.g, std::nullopt, kEqTol);
  c.require(l.verdict.status == Status::Refuted, "local iso not refuted");
  c.require(l.verdict.point && std::abs((*l.verdict.point)(0)) <= kWitnessTol, "witness not near 0");
  const auto a = plot_from_bundle(r.P1, r.g, std::nullopt, kEqTol).first;
  const auto b = plot_from_bundle(r.P2, r.g, std::nullopt, kEqTol).first;
  const auto& s = r.B.samples();
  c.require(s.size() == kSamples, "sample count");
  for (const auto& u : s) c.require(r.g.orbit_distance(a(u).value, b(u).value, kEqTol) <= kEqTol, "plots differ");
  return c;
}

Check criterion2() {
  Check c;
  const auto G = GroupModel::cyclic(2);
  const auto classes = cocycle_classes(G, CoverGraph::two_arc_circle());
  c.require(classes.size() == 2, "cocycle classes != 2");
  std::vector<AnyBundle> list;
  for (const auto& k : classes) list.push_back(CocycleBundle{k.representative.describe(), k.representative});
  c.require(discretization_classes(list, trivial_action(G, Domain::point()), kEqTol).count() == 1,
            "discretization classes != 1");
  const FinitePresheaf P = pi0_gerbe_table(circle_site(), G, circle_site_graphs());
  const std::size_t S = P.site->object_index("S");
  c.require(P.size(S) == 2, "presheaf S != 2");
  c.require(sheafify(P).sheaf.size(S) == 1, "sheafified S != 1");
  return c;
}

Check criterion3() {
  Check c;
  const SitePtr site = forms_site(kCfg);
  using Seeds = std::map<std::string, std::vector<std::string>>;
  const Tolerances t = tolerances();
  const FinitePresheaf O0 = omega_table(site, 0, Seeds{{"I", {"one", "x", "x_squared"}}, {"Q", {"radius_squared"}}}, t);
  const FinitePresheaf O1 =
      omega_table(site, 1, Seeds{{"I", {"dx", "x_dx"}}, {"Q", {"x_dx_plus_y_dy", "y_dx"}}}, t);
  const FinitePresheaf O2 = omega_table(site, 2, Seeds{{"Q", {"dx_dy"}}}, t);
  for (const FinitePresheaf* P : {&O1, &O2}) {
    bool nontrivial = false;
    for (std::size_t o = 0; o < P->labels.size(); ++o) nontrivial |= P->size(o) > 1;
    c.require(nontrivial, P->name + " is trivial before κ");
    const auto K = concretize_kappa(*P);
    for (std::size_t o = 0; o < K.presheaf.labels.size(); ++o)
      c.require(K.presheaf.size(o) == 1, P->name + " does not collapse");
  }
  const auto K0 = concretize_kappa(O0);
  c.require(is_isomorphism(O0, K0.presheaf, K0.unit), "Ω0 not preserved");
  return c;
}

Check criterion4() {
  Check c;
  Reflection r;
  const Domain D = catalog::disk("D", 2.0, kCfg);
  const ActionGroupoid so2 = rotation_action(D);
  const Domain T = Domain::interval("T", -3.0, 3.0, kCfg);
  struct Case {
    const ActionGroupoid* g;
    SmoothEuclMap q;
  };
  const std::vector<Case> cases = {{&r.g, catalog::make_map("p1", r.B)},
                                   {&r.g, catalog::make_map("p2", r.B)},
                                   {&r.g, catalog::make_map("sin", r.B)},
                                   {&so2, identity_map(D)},
                                   {&so2, catalog::make_map("rotate", D, {0.7})},
                                   {&so2, catalog::make_map("circle", T, {1.0})}};
  for (const auto& k : cases) {
    const auto P = pullback_unit_bundle(*k.g, k.q, k.q.name(), {}, kEqTol);
    const auto [p, w] = plot_from_bundle(P, *k.g, std::nullopt, kEqTol);
    bool lifts = !w.pieces.empty();
    for (const auto& piece : w.pieces) lifts &= std::holds_alternative<Lift>(piece);
    c.require(lifts, k.q.name() + " witness is not a lift");
    c.require(verify_plot(orbit_space(*k.g, kEqTol), p, w).passed(), k.q.name() + " plot fails");
  }
  c.require(generator_roundtrip(r.g, kEqTol).passed(), "Z2 roundtrip");
  c.require(generator_roundtrip(so2, kEqTol).passed(), "SO2 roundtrip");
  return c;
}

Check criterion5() {
  Check c;
  const Tolerances t = tolerances();
  Reflection r;
  const Domain D = catalog::disk("D", 2.0, kCfg);
  const ActionGroupoid so2 = rotation_action(D);
  const EuclForm xdx = catalog::make_form("x_dx", r.R);
  const EuclForm radial = catalog::make_form("x_dx_plus_y_dy", D);
  c.require(basic_check(xdx, r.g, t).passed(), "x dx not basic");
  c.require(basic_check(radial, so2, t).passed(), "x dx + y dy not basic");
  c.require(basic_check(catalog::make_form("dx", r.R), r.g, t).status == Status::Refuted, "dx not refuted");
  using FormCase = std::pair<const EuclForm*, const ActionGroupoid*>;
  for (const auto& [mu, g] : {FormCase{&xdx, &r.g}, FormCase{&radial, &so2}}) {
    const DiffeologicalForm a = basic_to_orbit_form(*mu, *g, t);
    const EuclForm back = orbit_form_to_basic(a, *g, t);
    c.require(compare_forms(back, *mu, kExactTol).passed(), mu->name() + " basic round trip");
    c.require(compare_orbit_forms(basic_to_orbit_form(back, *g, t), a, kExactTol).passed(),
              mu->name() + " orbit round trip");
  }
  Tolerances lt = t;
  lt.eq_tol = kLiftTol;
  const Domain B15 = Domain::interval("B15", -1.5, 1.5, kCfg);
  c.require(lift_independence(xdx, r.g, catalog::make_map("p1", B15), catalog::make_map("p2", B15), lt).passed(),
            "Z2 lift independence");
  c.require(lift_independence(radial, so2, identity_map(D), catalog::make_map("rotate", D, {0.7}), lt).passed(),
            "SO2 lift independence");
  return c;
}

Check criterion6() {
  Check c;
  const SitePtr site = small_random_site();
  std::mt19937_64 rng(kSeed);
  int passed = 0;
  for (int t = 0; t < kAdjunctionTrials; ++t) {
    const auto trial = random_adjunction_trial(site, rng);
    const auto res = verify_left_adjoint_factorization(trial.P, trial.C, trial.phi);
    passed += res.verdict.passed() && res.factorizations == 1;
  }
  c.require(passed == kAdjunctionTrials, std::to_string(passed) + "/" + std::to_string(kAdjunctionTrials));
  return c;
}

Check criterion7() {
  Check c;
  Reflection r;
  const std::vector<AnyBundle> list = {r.P1, r.P2, r.P1,
                                       pullback_unit_bundle(r.g, catalog::make_map("sin", r.B), "S", {}, kEqTol)};
  const Partition iso = isomorphism_classes(list, r.g, kEqTol);
  const Partition disc = discretization_classes(list, r.g, kEqTol);
  const Partition coarse = coarse_classes(list, r.g, kEqTol);
  c.require(refines(iso, disc) && refines(disc, coarse), "chain fails");
  for (int n : {2, 3}) {
    const auto G = GroupModel::cyclic(n);
    std::vector<AnyBundle> gerbes;
    for (const auto& k : cocycle_classes(G, CoverGraph::two_arc_circle()))
      gerbes.push_back(CocycleBundle{k.representative.describe(), k.representative});
    const auto g = trivial_action(G, Domain::point());
    const Partition gi = isomorphism_classes(gerbes, g, kEqTol), gd = discretization_classes(gerbes, g, kEqTol);
    c.require(gi.count() == static_cast<std::size_t>(n), "BZ" + std::to_string(n) + " iso classes");
    c.require(gd.count() == 1, "BZ" + std::to_string(n) + " discretization classes");
    c.require(refines(gi, gd) && refines(gd, coarse_classes(gerbes, g, kEqTol)), "gerbe chain");
  }
  return c;
}

Check criterion8() {
  Check c;
  Reflection r;
  const DiffeologicalSpace X = orbit_space(r.g, kEqTol);
  const std::vector<WitnessedPlot> probes = {quotient_of_identity(r.g, kEqTol)};
  c.require(d_open(X, catalog::make_indicator("orbit_of", r.g, {0.0}, kEqTol), probes).status == Status::Refuted,
            "orbit of 0 not refuted");
  c.require(d_open(X, catalog::make_indicator("abs_between", r.g, {1.0, 2.0}, kEqTol), probes).passed(),
            "abs_between(1,2) refuted");
  return c;
}

Check criterion9() {
  Check c;
  Tolerances t = tolerances();
  for (const auto& e : catalog::sweep_entries(kCfg))
    c.require(check_jacobian(catalog::make_map(e.expr, e.domain, e.params), t).passed(), e.expr + " jacobian");
  std::mt19937_64 rng(kSeed);
  const Domain I = Domain::interval("J", -2.5, 2.5, SampleConfig{16, kSeed});
  const Domain Q = Domain::box("J2", vec({-2.5, -2.5}), vec({2.5, 2.5}), {}, SampleConfig{16, kSeed});
  const auto one = catalog::self_maps(I), two = catalog::self_maps(Q);
  for (int k = 0; k < kChainPairs; ++k) {
    const auto& pool = unit_uniform(rng) < 0.5 ? one : two;
    const auto& f = pool[static_cast<std::size_t>(unit_uniform(rng) * static_cast<double>(pool.size()))];
    const auto& g = pool[static_cast<std::size_t>(unit_uniform(rng) * static_cast<double>(pool.size()))];
    const SmoothEuclMap h = compose(g, f);
    for (const auto& x : h.domain().samples()) {
      if ((x.array().abs() > 2.4).any()) continue;
      const Matrix chain = g.jacobian(f(x)) * f.jacobian(x);
      c.require(max_abs(Matrix(chain - fd_jacobian(h, x, kFdStep))) <= kChainTol, g.name() + "∘" + f.name());
    }
  }
  return c;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Check()>>> criteria = {
      {"reflection bundles: fiberwise iso, local iso refuted near 0, equal plots", criterion1},
      {"BZ2 on the circle: 2 cocycle classes, 1 discretization class, sheafify 2 -> 1", criterion2},
      {"kappa collapses Omega1 and Omega2, preserves Omega0", criterion3},
      {"bundle plots carry lift witnesses; generator round trip (Z2, SO2)", criterion4},
      {"basic forms, round trips, lift independence", criterion5},
      {"100 random adjunction trials factor uniquely", criterion6},
      {"iso refines disc refines coarse; BZ2, BZ3 single discretization class", criterion7},
      {"D-topology on R/+-: orbit of 0 not open, 1<|x|<2 open", criterion8},
      {"fd matches analytic jacobians; chain rule on 50 random pairs", criterion9},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Check c;
    try {
      c = criteria[i].second();
    } catch (const Error& e) {
      c.ok = false;
      c.note = e.what();
    }
    failures += !c.ok;
    std::printf("criterion %zu: %s  %s%s%s\n", i + 1, c.ok ? "PASS" : "FAIL", criteria[i].first.c_str(),
                c.ok ? "" : "  (", c.ok ? "" : (c.note + ")").c_str());
  }
  return failures == 0 ? 0 : 1;
}
