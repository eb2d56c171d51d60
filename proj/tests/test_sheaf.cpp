#include "diffeo/tables.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace diffeo;

namespace {

using Seeds = std::map<std::string, std::vector<std::string>>;

FinitePresheaf omega(int k) {
  static const SitePtr site = forms_site();
  const Seeds seeds = k == 0   ? Seeds{{"I", {"one", "x", "x_squared"}}, {"Q", {"radius_squared"}}}
                      : k == 1 ? Seeds{{"I", {"dx", "x_dx"}}, {"Q", {"x_dx_plus_y_dy", "y_dx"}}}
                               : Seeds{{"Q", {"dx_dy"}}};
  return omega_table(site, k, seeds);
}

std::size_t total(const FinitePresheaf& P) {
  std::size_t n = 0;
  for (std::size_t o = 0; o < P.labels.size(); ++o) n += P.size(o);
  return n;
}

/// Brute-force concreteness oracle: elements at o are told apart by their
/// restrictions along the point inclusions into o.
bool concrete_oracle(const FinitePresheaf& P) {
  const auto& S = *P.site;
  for (std::size_t o = 0; o < S.objects().size(); ++o) {
    for (std::size_t x = 0; x < P.size(o); ++x) {
      for (std::size_t y = x + 1; y < P.size(o); ++y) {
        bool apart = false;
        for (std::size_t a = 0; a < S.arrows().size(); ++a)
          if (S.arrow(a).target == o && S.arrow(a).source == ProbeSite::point() && !S.arrow(a).identity)
            apart |= P.restrict(a, x) != P.restrict(a, y);
        if (o == ProbeSite::point()) apart = true;
        if (!apart) return false;
      }
    }
  }
  return true;
}

}  // namespace

TEST(Site, BuiltinsValidate) {
  EXPECT_TRUE(forms_site()->validate().passed());
  EXPECT_TRUE(circle_site()->validate().passed());
  EXPECT_TRUE(small_random_site()->validate().passed());
}

TEST(Site, UnknownNamesRaise) {
  const auto s = circle_site();
  EXPECT_THROW(s->object_index("nope"), Error);
  EXPECT_THROW(s->arrow_index("nope"), Error);
}

TEST(Omega, TablesAreValidPresheaves) {
  for (int k : {0, 1, 2}) {
    const FinitePresheaf P = omega(k);
    EXPECT_TRUE(P.validate().passed()) << k;
    EXPECT_TRUE(sheaf_condition(P).passed()) << k;
  }
}

TEST(Omega, ZeroFormsAreConcreteAndPreserved) {
  const FinitePresheaf P = omega(0);
  EXPECT_TRUE(is_concrete(P).passed());
  EXPECT_TRUE(concrete_oracle(P));
  const auto K = concretize_kappa(P);
  EXPECT_TRUE(is_isomorphism(P, K.presheaf, K.unit));
}

TEST(Omega, HigherFormsCollapse) {
  for (int k : {1, 2}) {
    const FinitePresheaf P = omega(k);
    EXPECT_FALSE(is_concrete(P).passed());
    EXPECT_FALSE(concrete_oracle(P));
    const auto K = concretize_kappa(P);
    for (std::size_t o = 0; o < K.presheaf.labels.size(); ++o) EXPECT_EQ(K.presheaf.size(o), 1u) << k;
    const auto H = kappa_hat(P);
    for (std::size_t o = 0; o < H.sheaf.labels.size(); ++o) EXPECT_EQ(H.sheaf.size(o), 1u) << k;
  }
}

TEST(Kappa, ResultIsConcreteAndUnitIsNatural) {
  for (int k : {0, 1, 2}) {
    const FinitePresheaf P = omega(k);
    const auto K = concretize_kappa(P);
    EXPECT_TRUE(is_concrete(K.presheaf).passed());
    EXPECT_TRUE(concrete_oracle(K.presheaf));
    EXPECT_TRUE(check_naturality(P, K.presheaf, K.unit).passed());
  }
}

TEST(Kappa, Idempotent) {
  const auto K = concretize_kappa(omega(1)).presheaf;
  const auto KK = concretize_kappa(K);
  EXPECT_TRUE(is_isomorphism(K, KK.presheaf, KK.unit));
}

TEST(Gerbe, SheafifyIdentifiesNontrivialBundles) {
  for (int n : {2, 3}) {
    const FinitePresheaf P = pi0_gerbe_table(circle_site(), GroupModel::cyclic(n), circle_site_graphs());
    const std::size_t S = P.site->object_index("S");
    EXPECT_EQ(P.size(S), static_cast<std::size_t>(n));
    EXPECT_EQ(sheaf_condition(P).status, Status::Refuted);
    const auto R = sheafify(P);
    EXPECT_EQ(R.sheaf.size(S), 1u);
    EXPECT_TRUE(sheaf_condition(R.sheaf).passed());
    EXPECT_TRUE(check_naturality(P, R.sheaf, R.unit).passed());
  }
}

TEST(Sheafify, NoOpOnSheaves) {
  const FinitePresheaf P = omega(0);
  const auto R = sheafify(P);
  EXPECT_TRUE(is_isomorphism(P, R.sheaf, R.unit));
}

TEST(Sheafify, ThenKappaAgreesWithKappaThenSheafify) {
  const FinitePresheaf P = pi0_gerbe_table(circle_site(), GroupModel::cyclic(2), circle_site_graphs());
  const auto a = sheafify(concretize_kappa(sheafify(P).sheaf).presheaf).sheaf;
  const auto b = kappa_hat(P).sheaf;
  EXPECT_TRUE(find_isomorphism(a, b).has_value());
}

TEST(Adjunction, RandomTrialsFactorUniquely) {
  const SitePtr site = small_random_site();
  std::mt19937_64 rng(12345);
  for (int t = 0; t < 60; ++t) {
    const auto trial = random_adjunction_trial(site, rng);
    ASSERT_TRUE(trial.P.validate().passed());
    ASSERT_TRUE(is_concrete(trial.C).passed());
    const auto res = verify_left_adjoint_factorization(trial.P, trial.C, trial.phi);
    EXPECT_TRUE(res.verdict.passed()) << "trial " << t << ": " << res.verdict.reason;
    EXPECT_EQ(res.factorizations, 1u);
    ASSERT_TRUE(res.witness.has_value());
    // ψ∘η = φ componentwise.
    const auto K = kappa_hat(trial.P);
    for (std::size_t o = 0; o < trial.P.labels.size(); ++o)
      for (std::size_t x = 0; x < trial.P.size(o); ++x)
        EXPECT_EQ(res.witness->component[o][K.unit.component[o][x]], trial.phi.component[o][x]);
  }
}

TEST(Adjunction, NonConcreteTargetIsRejected) {
  const FinitePresheaf P = omega(1);
  EXPECT_THROW(verify_left_adjoint_factorization(P, P, PresheafMorphism::identity(P)), Error);
}

TEST(Naturality, BrokenMorphismIsRefuted) {
  const FinitePresheaf P = omega(0);
  PresheafMorphism m = PresheafMorphism::identity(P);
  const std::size_t I = P.site->object_index("I");
  std::swap(m.component[I][1], m.component[I][2]);
  EXPECT_EQ(check_naturality(P, P, m).status, Status::Refuted);
}

TEST(Concreteness, PointlessSiteRaises) {
  auto s = std::make_shared<ProbeSite>("bare");
  const auto U = s->add_object("U");
  const FinitePresheaf P = FinitePresheaf::make(s, "P", {{"p"}, {"a", "b"}});
  try {
    is_concrete_at(P, U);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NoPoints);
  }
}

TEST(Concreteness, SizesShrinkUnderKappa) {
  for (int k : {0, 1, 2}) EXPECT_LE(total(concretize_kappa(omega(k)).presheaf), total(omega(k)));
}
