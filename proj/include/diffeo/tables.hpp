// Bundled probe sites and the presheaf tables built on them: Ωᵏ closed
// under pullback, and π₀(BΓ) from cocycle classes.
#pragma once

#include "diffeo/bundleclass.hpp"
#include "diffeo/catalog.hpp"
#include "diffeo/sheaf.hpp"

#include <map>
#include <memory>
#include <string>
#include <vector>

namespace diffeo {

/// *, I = (−1,1) covered by I1 = (−1,½) and I2 = (−½,1) with overlap
/// I12 = (−½,½), and the square Q = (−1,1)² receiving I along x ↦ (x,0).
/// Points sit at ±¼, ±¾ (and (0,½) in Q).
inline SitePtr forms_site(SampleConfig cfg = {}) {
  auto s = std::make_shared<ProbeSite>("forms");
  const Domain I = Domain::interval("I", -1.0, 1.0, cfg);
  const Domain I1 = Domain::interval("I1", -1.0, 0.5, cfg);
  const Domain I2 = Domain::interval("I2", -0.5, 1.0, cfg);
  const Domain I12 = Domain::interval("I12", -0.5, 0.5, cfg);
  const Domain Q = Domain::box("Q", vec({-1.0, -1.0}), vec({1.0, 1.0}), {}, cfg);
  const auto oI = s->add_object("I", I), o1 = s->add_object("I1", I1), o2 = s->add_object("I2", I2);
  const auto o12 = s->add_object("I12", I12), oQ = s->add_object("Q", Q);
  const auto i1 = s->add_arrow("i1", o1, oI, inclusion_map(I1, I));
  const auto i2 = s->add_arrow("i2", o2, oI, inclusion_map(I2, I));
  const auto j1 = s->add_arrow("j1", o12, o1, inclusion_map(I12, I1));
  const auto j2 = s->add_arrow("j2", o12, o2, inclusion_map(I12, I2));
  s->add_arrow("i12", o12, oI, inclusion_map(I12, I));
  s->add_arrow("line", oI, oQ, catalog::make_map("line", I, {0.0}));
  for (double p : {-0.75, -0.25, 0.25, 0.75}) {
    for (auto [o, d] : {std::pair{oI, I}, {o1, I1}, {o2, I2}, {o12, I12}})
      if (d.contains(vec({p}))) s->add_point(o, vec({p}));
    s->add_point(oQ, vec({p, 0.0}));
  }
  s->add_point(oQ, vec({0.0, 0.5}));
  s->add_cover("I=I1∪I2", oI, {i1, i2}, {ProbeSite::Overlap{0, 1, j1, j2}});
  s->close_under_composition();
  return s;
}

/// Abstract circle S = A ∪ B with overlap W of two components. Points are at
/// angles 0, 90, 180, 270; A holds 0/90/270, B holds 90/180/270, W holds
/// 90 and 270.
inline SitePtr circle_site() {
  auto s = std::make_shared<ProbeSite>("circle");
  const auto A = s->add_object("A"), B = s->add_object("B"), W = s->add_object("W"), S = s->add_object("S");
  const auto iA = s->add_arrow("iA", A, S), iB = s->add_arrow("iB", B, S);
  const auto lA = s->add_arrow("lA", W, A), lB = s->add_arrow("lB", W, B);
  std::map<std::string, std::size_t> pt;
  auto point = [&](std::size_t o, const std::string& name) { pt[name] = s->add_arrow(name, ProbeSite::point(), o); };
  for (const char* n : {"s0", "s90", "s180", "s270"}) point(S, n);
  for (const char* n : {"a0", "a90", "a270"}) point(A, n);
  for (const char* n : {"b90", "b180", "b270"}) point(B, n);
  for (const char* n : {"w90", "w270"}) point(W, n);
  for (const char* d : {"0", "90", "270"}) s->add_composition(iA, pt[std::string("a") + d], pt[std::string("s") + d]);
  for (const char* d : {"90", "180", "270"}) s->add_composition(iB, pt[std::string("b") + d], pt[std::string("s") + d]);
  for (const char* d : {"90", "270"}) {
    s->add_composition(lA, pt[std::string("w") + d], pt[std::string("a") + d]);
    s->add_composition(lB, pt[std::string("w") + d], pt[std::string("b") + d]);
  }
  s->add_cover("S=A∪B", S, {iA, iB}, {ProbeSite::Overlap{0, 1, lA, lB}});
  return s;
}

/// Ωᵏ on a site of concrete objects: the zero form and the seeds on each
/// object, closed under pullback along every arrow, with forms identified
/// when they agree at the object's samples within form_tol.
inline FinitePresheaf omega_table(const SitePtr& site, int degree,
                                  const std::map<std::string, std::vector<std::string>>& seeds,
                                  const Tolerances& tol = {}) {
  const auto& S = *site;
  std::vector<std::vector<EuclForm>> forms(S.objects().size());
  std::vector<std::vector<std::string>> labels(S.objects().size());
  auto find_or_add = [&](std::size_t o, const EuclForm& w, const std::string& label) {
    const auto& samples = S.object(o).domain->samples();
    for (std::size_t k = 0; k < forms[o].size(); ++k)
      if (form_distance(forms[o][k], w, samples) <= tol.form_tol) return std::pair{k, false};
    forms[o].push_back(w);
    labels[o].push_back(label);
    return std::pair{forms[o].size() - 1, true};
  };
  for (std::size_t o = 0; o < S.objects().size(); ++o) {
    if (!S.object(o).domain) throw Error(ErrorKind::MalformedSite, "Ωᵏ needs concrete objects");
    find_or_add(o, EuclForm::zero(*S.object(o).domain, degree), "0");
  }
  for (const auto& [name, list] : seeds) {
    const std::size_t o = S.object_index(name);
    for (const auto& expr : list) {
      const EuclForm w = catalog::make_form(expr, *S.object(o).domain, degree);
      if (w.degree() != degree)
        throw Error(ErrorKind::InvalidArgument, expr + " is not a " + std::to_string(degree) + "-form");
      find_or_add(o, w, expr);
    }
  }
  bool changed = true;
  for (int round = 0; changed; ++round) {
    if (round > 16) throw Error(ErrorKind::NonTermination, "Ωᵏ closure under pullback did not stabilize");
    changed = false;
    for (const auto& a : S.arrows()) {
      if (a.identity) continue;
      if (!a.map) throw Error(ErrorKind::MalformedSite, "arrow " + a.name + " has no map");
      for (std::size_t k = 0; k < forms[a.target].size(); ++k) {
        const EuclForm w = forms[a.target][k];
        const std::string label = labels[a.target][k] == "0" ? "0" : a.name + "*" + labels[a.target][k];
        changed |= find_or_add(a.source, pullback(*a.map, w, tol), label).second;
      }
    }
  }
  FinitePresheaf P = FinitePresheaf::make(site, "Ω" + std::to_string(degree), labels);
  for (std::size_t ai = 0; ai < S.arrows().size(); ++ai) {
    const auto& a = S.arrow(ai);
    if (a.identity) continue;
    for (const auto& w : forms[a.target])
      P.restriction[ai].push_back(find_or_add(a.source, pullback(*a.map, w, tol), "?").first);
  }
  return P;
}

/// Cover graph of each object of the circle site.
inline std::map<std::string, CoverGraph> circle_site_graphs() {
  return {{"*", CoverGraph::interval()},
          {"A", CoverGraph::interval()},
          {"B", CoverGraph::interval()},
          {"W", CoverGraph::disjoint(2)},
          {"S", CoverGraph::two_arc_circle()}};
}

/// π₀(BΓ): isomorphism classes of Γ-bundles on each object, computed as
/// cocycle classes over the object's cover graph. Restrictions into
/// objects with one class are constant; others must be identities.
inline FinitePresheaf pi0_gerbe_table(const SitePtr& site, const GroupModel& group,
                                      const std::map<std::string, CoverGraph>& graphs) {
  const auto& S = *site;
  std::vector<std::vector<std::string>> labels(S.objects().size());
  for (std::size_t o = 0; o < S.objects().size(); ++o) {
    const auto it = graphs.find(S.object(o).name);
    if (it == graphs.end()) throw Error(ErrorKind::UnresolvedName, "no cover graph for " + S.object(o).name);
    for (const auto& c : cocycle_classes(group, it->second)) labels[o].push_back(c.representative.describe());
  }
  FinitePresheaf P = FinitePresheaf::make(site, "π0(B" + group.name() + ")", labels);
  for (std::size_t ai = 0; ai < S.arrows().size(); ++ai) {
    const auto& a = S.arrow(ai);
    if (a.identity) continue;
    if (labels[a.source].size() != 1)
      throw Error(ErrorKind::InvalidArgument, "restriction along " + a.name + " needs a map of cover graphs");
    P.restriction[ai].assign(labels[a.target].size(), 0);
  }
  return P;
}

}  // namespace diffeo
