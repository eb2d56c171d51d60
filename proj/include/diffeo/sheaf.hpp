// Presheaves of finite sets on a finite probe site: concreteness, the
// concretization κ, sheafification on declared covers, κ̂ and an exhaustive
// check of the universal property of κ̂ ⊣ inclusion.
#pragma once

#include "diffeo/euclid.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <map>
#include <memory>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <tuple>
#include <vector>

namespace diffeo {

/// A finite category of probe objects with designated covers. Object 0 is
/// the point *; its identity counts as a point inclusion.
class ProbeSite {
 public:
  struct Object {
    std::string name;
    std::optional<Domain> domain;
  };
  struct Arrow {
    std::string name;
    std::size_t source = 0;
    std::size_t target = 0;
    bool point_inclusion = false;
    bool identity = false;
    std::optional<SmoothEuclMap> map;
  };
  /// result = outer ∘ inner, with inner: A → B and outer: B → C.
  struct Composition {
    std::size_t outer = 0;
    std::size_t inner = 0;
    std::size_t result = 0;
  };
  /// Overlap object W of pieces i and j, with left: W → U_i and right: W → U_j.
  struct Overlap {
    std::size_t i = 0;
    std::size_t j = 0;
    std::size_t left = 0;
    std::size_t right = 0;
  };
  struct Cover {
    std::string name;
    std::size_t object = 0;
    std::vector<std::size_t> pieces;  // arrows U_i → U
    std::vector<Overlap> overlaps;
  };

  explicit ProbeSite(std::string name = "site") : name_(std::move(name)) {
    add_object("*", Domain::point());
    arrows_[0].point_inclusion = true;
  }

  const std::string& name() const { return name_; }
  static constexpr std::size_t point() { return 0; }
  const std::vector<Object>& objects() const { return objects_; }
  const std::vector<Arrow>& arrows() const { return arrows_; }
  const std::vector<Composition>& compositions() const { return compositions_; }
  const std::vector<Cover>& covers() const { return covers_; }
  const Object& object(std::size_t i) const { return objects_.at(i); }
  const Arrow& arrow(std::size_t i) const { return arrows_.at(i); }

  std::size_t add_object(std::string name, std::optional<Domain> domain = std::nullopt) {
    if (find_object(name)) throw Error(ErrorKind::MalformedSite, "duplicate object " + name);
    objects_.push_back(Object{name, std::move(domain)});
    const std::size_t o = objects_.size() - 1;
    std::optional<SmoothEuclMap> id;
    if (objects_[o].domain) id = identity_map(*objects_[o].domain);
    arrows_.push_back(Arrow{"id_" + name, o, o, false, true, std::move(id)});
    identity_.push_back(arrows_.size() - 1);
    return o;
  }

  std::size_t add_arrow(std::string name, std::size_t source, std::size_t target,
                        std::optional<SmoothEuclMap> map = std::nullopt) {
    check_object(source);
    check_object(target);
    if (find_arrow(name)) throw Error(ErrorKind::MalformedSite, "duplicate arrow " + name);
    if (map) {
      const auto& sd = objects_[source].domain;
      const auto& td = objects_[target].domain;
      if (!sd || !td || map->dim() != sd->dim() || map->codim() != td->dim())
        throw Error(ErrorKind::MalformedSite, "arrow " + name + " has a map of the wrong shape");
    }
    arrows_.push_back(Arrow{std::move(name), source, target, source == point(), false, std::move(map)});
    return arrows_.size() - 1;
  }

  /// Point inclusion * → target at `at` (constant map when target is concrete).
  std::size_t add_point(std::size_t target, const Vector& at, std::string name = {}) {
    check_object(target);
    std::optional<SmoothEuclMap> map;
    if (const auto& d = objects_[target].domain) {
      if (!d->contains(at)) throw Error(ErrorKind::MalformedSite, "point outside " + objects_[target].name);
      map = constant_map(Domain::point(), at, "pt");
    }
    if (name.empty()) name = objects_[target].name + "@" + point_label(at);
    return add_arrow(std::move(name), point(), target, std::move(map));
  }

  void add_composition(std::size_t outer, std::size_t inner, std::size_t result) {
    const Arrow &o = arrow(outer), &i = arrow(inner), &r = arrow(result);
    if (i.target != o.source || r.source != i.source || r.target != o.target)
      throw Error(ErrorKind::MalformedSite, "composition " + o.name + "∘" + i.name + " = " + r.name +
                                                " does not typecheck");
    compositions_.push_back(Composition{outer, inner, result});
  }

  std::size_t add_cover(std::string name, std::size_t object, std::vector<std::size_t> pieces,
                        std::vector<Overlap> overlaps) {
    check_object(object);
    for (auto p : pieces)
      if (arrow(p).target != object) throw Error(ErrorKind::MalformedSite, "cover piece does not land in object");
    for (const auto& ov : overlaps) {
      if (ov.i >= pieces.size() || ov.j >= pieces.size())
        throw Error(ErrorKind::MalformedSite, "overlap refers to a missing piece");
      if (arrow(ov.left).target != arrow(pieces[ov.i]).source ||
          arrow(ov.right).target != arrow(pieces[ov.j]).source ||
          arrow(ov.left).source != arrow(ov.right).source)
        throw Error(ErrorKind::MalformedSite, "overlap arrows do not match cover pieces");
    }
    covers_.push_back(Cover{std::move(name), object, std::move(pieces), std::move(overlaps)});
    return covers_.size() - 1;
  }

  /// Declares every composite of concrete arrows that coincides (at the
  /// source's samples) with an existing arrow. Returns the number declared.
  std::size_t close_under_composition(double eq_tol = Tolerances{}.eq_tol) {
    std::set<std::tuple<std::size_t, std::size_t, std::size_t>> seen;
    for (const auto& c : compositions_) seen.emplace(c.outer, c.inner, c.result);
    std::size_t added = 0;
    const std::size_t n = arrows_.size();
    for (std::size_t in = 0; in < n; ++in) {
      for (std::size_t out = 0; out < n; ++out) {
        const Arrow &i = arrows_[in], &o = arrows_[out];
        if (i.target != o.source || !i.map || !o.map || i.identity || o.identity) continue;
        for (std::size_t r = 0; r < n; ++r) {
          const Arrow& a = arrows_[r];
          if (a.source != i.source || a.target != o.target || !a.map) continue;
          bool same = true;
          for (const auto& u : objects_[i.source].domain->samples()) {
            if (max_abs(Vector((*o.map)((*i.map)(u)) - (*a.map)(u))) > eq_tol) {
              same = false;
              break;
            }
          }
          if (same && seen.emplace(out, in, r).second) {
            compositions_.push_back(Composition{out, in, r});
            ++added;
          }
        }
      }
    }
    return added;
  }

  std::optional<std::size_t> find_object(const std::string& name) const {
    for (std::size_t i = 0; i < objects_.size(); ++i)
      if (objects_[i].name == name) return i;
    return std::nullopt;
  }
  std::optional<std::size_t> find_arrow(const std::string& name) const {
    for (std::size_t i = 0; i < arrows_.size(); ++i)
      if (arrows_[i].name == name) return i;
    return std::nullopt;
  }
  std::size_t object_index(const std::string& name) const {
    if (auto o = find_object(name)) return *o;
    throw Error(ErrorKind::UnresolvedName, "no site object " + name);
  }
  std::size_t arrow_index(const std::string& name) const {
    if (auto a = find_arrow(name)) return *a;
    throw Error(ErrorKind::UnresolvedName, "no site arrow " + name);
  }
  std::size_t identity(std::size_t object) const { return identity_.at(object); }

  std::vector<std::size_t> point_inclusions(std::size_t object) const {
    std::vector<std::size_t> out;
    for (std::size_t a = 0; a < arrows_.size(); ++a)
      if (arrows_[a].point_inclusion && arrows_[a].target == object) out.push_back(a);
    return out;
  }

  std::vector<std::size_t> covers_of(std::size_t object) const {
    std::vector<std::size_t> out;
    for (std::size_t c = 0; c < covers_.size(); ++c)
      if (covers_[c].object == object) out.push_back(c);
    return out;
  }

  /// Site invariants: points everywhere, well-typed covers, declared
  /// compositions agreeing with concrete maps, and associativity wherever
  /// both bracketings are declared.
  Verdict validate(double eq_tol = Tolerances{}.eq_tol) const {
    for (std::size_t o = 0; o < objects_.size(); ++o)
      if (point_inclusions(o).empty()) return Verdict::refuted("object " + objects_[o].name + " has no points");
    for (const auto& c : compositions_) {
      const Arrow &o = arrows_[c.outer], &i = arrows_[c.inner], &r = arrows_[c.result];
      if (!o.map || !i.map || !r.map) continue;
      for (const auto& u : objects_[i.source].domain->samples()) {
        const double dev = max_abs(Vector((*o.map)((*i.map)(u)) - (*r.map)(u)));
        if (dev > eq_tol)
          return Verdict::refuted("declared composite " + r.name + " disagrees with " + o.name + "∘" + i.name)
              .at(u)
              .with_deviation(dev);
      }
    }
    for (const auto& ab : compositions_) {
      for (const auto& bc : compositions_) {
        if (bc.inner != ab.outer) continue;
        // (c∘b)∘a and c∘(b∘a)
        auto left = composite(bc.result, ab.inner);
        auto right = composite(bc.outer, ab.result);
        if (left && right && *left != *right)
          return Verdict::refuted("composition is not associative at " + arrows_[ab.inner].name);
      }
    }
    return Verdict::pass();
  }

  /// Declared composite outer∘inner, identities included.
  std::optional<std::size_t> composite(std::size_t outer, std::size_t inner) const {
    if (arrows_.at(outer).identity) return inner;
    if (arrows_.at(inner).identity) return outer;
    for (const auto& c : compositions_)
      if (c.outer == outer && c.inner == inner) return c.result;
    return std::nullopt;
  }

 private:
  static std::string point_label(const Vector& v) {
    std::string s = "(";
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      if (i) s += ",";
      char buf[32];
      std::snprintf(buf, sizeof buf, "%g", v(i));
      s += buf;
    }
    return s + ")";
  }
  void check_object(std::size_t o) const {
    if (o >= objects_.size()) throw Error(ErrorKind::MalformedSite, "object index out of range");
  }

  std::string name_;
  std::vector<Object> objects_;
  std::vector<Arrow> arrows_;
  std::vector<std::size_t> identity_;
  std::vector<Composition> compositions_;
  std::vector<Cover> covers_;
};

using SitePtr = std::shared_ptr<const ProbeSite>;

/// A presheaf of finite sets: per object the elements (by label), per arrow
/// a: A → B the restriction a*: P(B) → P(A).
struct FinitePresheaf {
  SitePtr site;
  std::string name;
  std::vector<std::vector<std::string>> labels;
  std::vector<std::vector<std::size_t>> restriction;

  /// Identity restrictions filled in; all others left to the caller.
  static FinitePresheaf make(SitePtr site, std::string name, std::vector<std::vector<std::string>> labels) {
    if (labels.size() != site->objects().size())
      throw Error(ErrorKind::InvalidArgument, "one value set per site object is required");
    FinitePresheaf P{site, std::move(name), std::move(labels), {}};
    P.restriction.resize(site->arrows().size());
    for (std::size_t o = 0; o < site->objects().size(); ++o) {
      auto& r = P.restriction[site->identity(o)];
      r.resize(P.labels[o].size());
      std::iota(r.begin(), r.end(), 0);
    }
    return P;
  }

  std::size_t size(std::size_t object) const { return labels.at(object).size(); }

  std::size_t restrict(std::size_t arrow, std::size_t element) const { return restriction.at(arrow).at(element); }

  std::size_t element_index(std::size_t object, const std::string& label) const {
    const auto& l = labels.at(object);
    const auto it = std::find(l.begin(), l.end(), label);
    if (it == l.end()) throw Error(ErrorKind::UnresolvedName, "no element " + label + " in " + name);
    return static_cast<std::size_t>(it - l.begin());
  }

  /// Table shapes, identities, and functoriality on declared compositions.
  Verdict validate() const {
    const auto& S = *site;
    if (restriction.size() != S.arrows().size()) return Verdict::refuted("one restriction per arrow is required");
    for (std::size_t a = 0; a < S.arrows().size(); ++a) {
      const auto& ar = S.arrow(a);
      if (restriction[a].size() != size(ar.target))
        return Verdict::refuted("restriction along " + ar.name + " has the wrong domain size");
      for (auto x : restriction[a])
        if (x >= size(ar.source)) return Verdict::refuted("restriction along " + ar.name + " leaves the value set");
      if (ar.identity)
        for (std::size_t x = 0; x < restriction[a].size(); ++x)
          if (restriction[a][x] != x) return Verdict::refuted("identity restriction is not the identity");
    }
    for (const auto& c : S.compositions()) {
      for (std::size_t x = 0; x < size(S.arrow(c.outer).target); ++x) {
        if (restrict(c.result, x) != restrict(c.inner, restrict(c.outer, x)))
          return Verdict::refuted("functoriality fails for " + S.arrow(c.result).name + " at " +
                                  labels[S.arrow(c.outer).target][x]);
      }
    }
    return Verdict::pass();
  }
};

/// Per-object functions commuting with restrictions.
struct PresheafMorphism {
  std::vector<std::vector<std::size_t>> component;

  static PresheafMorphism identity(const FinitePresheaf& P) {
    PresheafMorphism m;
    for (std::size_t o = 0; o < P.labels.size(); ++o) {
      m.component.emplace_back(P.size(o));
      std::iota(m.component.back().begin(), m.component.back().end(), 0);
    }
    return m;
  }

  /// this ∘ first
  PresheafMorphism after(const PresheafMorphism& first) const {
    PresheafMorphism m;
    for (std::size_t o = 0; o < first.component.size(); ++o) {
      m.component.emplace_back();
      for (auto x : first.component[o]) m.component.back().push_back(component.at(o).at(x));
    }
    return m;
  }

  bool operator==(const PresheafMorphism&) const = default;
};

inline Verdict check_naturality(const FinitePresheaf& P, const FinitePresheaf& Q, const PresheafMorphism& phi) {
  if (P.site != Q.site) throw Error(ErrorKind::InvalidArgument, "presheaves on different sites");
  const auto& S = *P.site;
  if (phi.component.size() != S.objects().size()) return Verdict::refuted("one component per object is required");
  for (std::size_t o = 0; o < S.objects().size(); ++o) {
    if (phi.component[o].size() != P.size(o)) return Verdict::refuted("component has the wrong domain size");
    for (auto y : phi.component[o])
      if (y >= Q.size(o)) return Verdict::refuted("component leaves the target value set");
  }
  for (std::size_t a = 0; a < S.arrows().size(); ++a) {
    const auto& ar = S.arrow(a);
    for (std::size_t x = 0; x < P.size(ar.target); ++x)
      if (phi.component[ar.source][P.restrict(a, x)] != Q.restrict(a, phi.component[ar.target][x]))
        return Verdict::refuted("naturality square fails along " + ar.name + " at " + P.labels[ar.target][x]);
  }
  return Verdict::pass();
}

/// Same element counts and a natural bijection given by `phi`.
inline bool is_isomorphism(const FinitePresheaf& P, const FinitePresheaf& Q, const PresheafMorphism& phi) {
  if (!check_naturality(P, Q, phi).passed()) return false;
  for (std::size_t o = 0; o < phi.component.size(); ++o) {
    if (P.size(o) != Q.size(o)) return false;
    std::set<std::size_t> img(phi.component[o].begin(), phi.component[o].end());
    if (img.size() != Q.size(o)) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Concreteness

namespace detail {
inline std::vector<std::size_t> point_tuple(const FinitePresheaf& P, std::size_t object, std::size_t x) {
  std::vector<std::size_t> t;
  for (auto a : P.site->point_inclusions(object)) t.push_back(P.restrict(a, x));
  return t;
}
}  // namespace detail

/// p ↦ (u*p over all point inclusions u of U) is injective on P(U).
inline Verdict is_concrete_at(const FinitePresheaf& P, std::size_t object) {
  if (P.site->point_inclusions(object).empty())
    throw Error(ErrorKind::NoPoints, "object " + P.site->object(object).name + " has no point inclusions");
  std::map<std::vector<std::size_t>, std::size_t> seen;
  for (std::size_t x = 0; x < P.size(object); ++x) {
    auto [it, fresh] = seen.emplace(detail::point_tuple(P, object, x), x);
    if (!fresh)
      return Verdict::refuted("elements " + P.labels[object][it->second] + " and " + P.labels[object][x] +
                              " have the same point values on " + P.site->object(object).name);
  }
  return Verdict::pass();
}

inline Verdict is_concrete(const FinitePresheaf& P) {
  for (std::size_t o = 0; o < P.labels.size(); ++o)
    if (Verdict v = is_concrete_at(P, o); !v.passed()) return v;
  return Verdict::pass();
}

struct QuotientResult {
  FinitePresheaf presheaf;
  PresheafMorphism unit;  // input → presheaf
};

namespace detail {

inline std::string class_label(const std::vector<std::string>& members) {
  if (members.size() == 1) return members.front();
  std::string s = "[";
  for (std::size_t k = 0; k < members.size(); ++k) s += (k ? "|" : "") + members[k];
  return s + "]";
}

/// Quotient by per-object class assignments (class ids dense, in first-seen
/// order). Restrictions must respect the classes.
inline QuotientResult quotient_presheaf(const FinitePresheaf& P, const std::vector<std::vector<std::size_t>>& cls,
                                        std::string name) {
  const auto& S = *P.site;
  std::vector<std::vector<std::string>> labels(S.objects().size());
  std::vector<std::vector<std::size_t>> rep(S.objects().size());
  for (std::size_t o = 0; o < S.objects().size(); ++o) {
    std::vector<std::vector<std::string>> members;
    for (std::size_t x = 0; x < P.size(o); ++x) {
      if (cls[o][x] >= members.size()) {
        members.resize(cls[o][x] + 1);
        rep[o].resize(cls[o][x] + 1);
        rep[o][cls[o][x]] = x;
      }
      members[cls[o][x]].push_back(P.labels[o][x]);
    }
    for (const auto& m : members) labels[o].push_back(class_label(m));
  }
  FinitePresheaf Q = FinitePresheaf::make(P.site, std::move(name), std::move(labels));
  for (std::size_t a = 0; a < S.arrows().size(); ++a) {
    const auto& ar = S.arrow(a);
    auto& r = Q.restriction[a];
    r.assign(Q.size(ar.target), 0);
    for (std::size_t x = 0; x < P.size(ar.target); ++x) {
      const std::size_t image = cls[ar.source][P.restrict(a, x)];
      const std::size_t want = cls[ar.source][P.restrict(a, rep[ar.target][cls[ar.target][x]])];
      if (image != want)
        throw Error(ErrorKind::DescentFailure, "restriction along " + ar.name + " does not respect the quotient");
      r[cls[ar.target][x]] = image;
    }
  }
  return {std::move(Q), PresheafMorphism{cls}};
}

inline std::vector<std::size_t> dense_ids(const std::vector<std::size_t>& roots) {
  std::map<std::size_t, std::size_t> id;
  std::vector<std::size_t> out;
  for (auto r : roots) out.push_back(id.try_emplace(r, id.size()).first->second);
  return out;
}

}  // namespace detail

/// κ(P): identify elements with equal point-restriction tuples.
inline QuotientResult concretize_kappa(const FinitePresheaf& P) {
  std::vector<std::vector<std::size_t>> cls;
  for (std::size_t o = 0; o < P.labels.size(); ++o) {
    std::map<std::vector<std::size_t>, std::size_t> id;
    cls.emplace_back();
    for (std::size_t x = 0; x < P.size(o); ++x)
      cls.back().push_back(id.try_emplace(detail::point_tuple(P, o, x), id.size()).first->second);
  }
  return detail::quotient_presheaf(P, cls, "κ(" + P.name + ")");
}

// ---------------------------------------------------------------------------
// Sheaf condition and sheafification

namespace detail {

inline std::uint64_t checked_product(const FinitePresheaf& P, const ProbeSite::Cover& c) {
  std::uint64_t n = 1;
  for (auto p : c.pieces) {
    n *= std::max<std::uint64_t>(P.size(P.site->arrow(p).source), 1);
    if (n > 1'000'000) throw Error(ErrorKind::SearchTooLarge, "cover " + c.name + " has too many families");
  }
  return n;
}

/// All families (one element per piece) agreeing on every overlap.
inline std::vector<std::vector<std::size_t>> compatible_families(const FinitePresheaf& P, const ProbeSite::Cover& c) {
  std::vector<std::vector<std::size_t>> out;
  const std::uint64_t total = checked_product(P, c);
  for (std::uint64_t code = 0; code < total; ++code) {
    std::vector<std::size_t> fam;
    std::uint64_t rest = code;
    bool empty = false;
    for (auto p : c.pieces) {
      const std::size_t n = P.size(P.site->arrow(p).source);
      if (n == 0) {
        empty = true;
        break;
      }
      fam.push_back(rest % n);
      rest /= n;
    }
    if (empty) return out;
    bool ok = true;
    for (const auto& ov : c.overlaps)
      if (P.restrict(ov.left, fam[ov.i]) != P.restrict(ov.right, fam[ov.j])) ok = false;
    if (ok) out.push_back(std::move(fam));
  }
  return out;
}

inline std::vector<std::size_t> family_of(const FinitePresheaf& P, const ProbeSite::Cover& c, std::size_t x) {
  std::vector<std::size_t> fam;
  for (auto p : c.pieces) fam.push_back(P.restrict(p, x));
  return fam;
}

}  // namespace detail

/// Unique gluing of compatible families on every declared cover.
inline Verdict sheaf_condition(const FinitePresheaf& P) {
  const auto& S = *P.site;
  for (std::size_t ci = 0; ci < S.covers().size(); ++ci) {
    const auto& c = S.covers()[ci];
    std::map<std::vector<std::size_t>, std::size_t> glued;
    for (std::size_t x = 0; x < P.size(c.object); ++x) {
      auto [it, fresh] = glued.emplace(detail::family_of(P, c, x), x);
      if (!fresh)
        return Verdict::refuted("not separated on cover " + c.name + ": " + P.labels[c.object][it->second] +
                                " and " + P.labels[c.object][x] + " agree on every piece")
            .in_piece(ci);
    }
    for (const auto& fam : detail::compatible_families(P, c))
      if (!glued.count(fam))
        return Verdict::refuted("a compatible family on cover " + c.name + " has no gluing").in_piece(ci);
  }
  return Verdict::pass();
}

struct SheafifyResult {
  FinitePresheaf sheaf;
  PresheafMorphism unit;
  int iterations = 0;
};

namespace detail {

/// Separated quotient: smallest congruence containing "agrees on every piece
/// of some cover" and closed under restriction.
inline QuotientResult separate(const FinitePresheaf& P) {
  const auto& S = *P.site;
  std::vector<std::vector<std::size_t>> parent(S.objects().size());
  for (std::size_t o = 0; o < parent.size(); ++o) {
    parent[o].resize(P.size(o));
    std::iota(parent[o].begin(), parent[o].end(), 0);
  }
  auto find = [&](std::size_t o, std::size_t x) {
    while (parent[o][x] != x) x = parent[o][x] = parent[o][parent[o][x]];
    return x;
  };
  auto unite = [&](std::size_t o, std::size_t x, std::size_t y) {
    x = find(o, x);
    y = find(o, y);
    if (x == y) return false;
    parent[o][std::max(x, y)] = std::min(x, y);
    return true;
  };
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& c : S.covers()) {
      for (std::size_t x = 0; x < P.size(c.object); ++x) {
        for (std::size_t y = x + 1; y < P.size(c.object); ++y) {
          if (find(c.object, x) == find(c.object, y)) continue;
          bool agree = true;
          for (auto p : c.pieces) {
            const std::size_t src = S.arrow(p).source;
            if (find(src, P.restrict(p, x)) != find(src, P.restrict(p, y))) {
              agree = false;
              break;
            }
          }
          if (agree) changed |= unite(c.object, x, y);
        }
      }
    }
    for (std::size_t a = 0; a < S.arrows().size(); ++a) {
      const auto& ar = S.arrow(a);
      for (std::size_t x = 0; x < P.size(ar.target); ++x) {
        const std::size_t r = find(ar.target, x);
        if (r != x) changed |= unite(ar.source, P.restrict(a, x), P.restrict(a, r));
      }
    }
  }
  std::vector<std::vector<std::size_t>> cls(parent.size());
  for (std::size_t o = 0; o < parent.size(); ++o) {
    std::vector<std::size_t> roots;
    for (std::size_t x = 0; x < P.size(o); ++x) roots.push_back(find(o, x));
    cls[o] = dense_ids(roots);
  }
  return quotient_presheaf(P, cls, P.name);
}

/// Restriction of a glued family along an arrow into the covered object.
/// The arrow must be a piece, the identity, or a declared composite
/// piece∘b; otherwise the finite site cannot restrict new sections.
inline std::size_t restrict_family(const FinitePresheaf& P, const ProbeSite::Cover& c,
                                   const std::vector<std::size_t>& fam, std::size_t arrow) {
  const auto& S = *P.site;
  for (std::size_t i = 0; i < c.pieces.size(); ++i)
    if (c.pieces[i] == arrow) return fam[i];
  for (const auto& comp : S.compositions()) {
    if (comp.result != arrow) continue;
    for (std::size_t i = 0; i < c.pieces.size(); ++i)
      if (c.pieces[i] == comp.outer) return P.restrict(comp.inner, fam[i]);
  }
  throw Error(ErrorKind::MalformedSite, "arrow " + S.arrow(arrow).name + " into " + S.object(c.object).name +
                                            " does not factor through cover " + c.name);
}

/// Adds one new element per compatible family that has no gluing yet.
inline FinitePresheaf glue(const FinitePresheaf& P) {
  const auto& S = *P.site;
  FinitePresheaf Q = P;
  for (const auto& c : S.covers()) {
    std::set<std::vector<std::size_t>> glued;
    for (std::size_t x = 0; x < P.size(c.object); ++x) glued.insert(family_of(P, c, x));
    for (const auto& fam : compatible_families(P, c)) {
      if (glued.count(fam)) continue;
      std::string label = "glue(";
      for (std::size_t i = 0; i < fam.size(); ++i)
        label += (i ? "," : "") + P.labels[S.arrow(c.pieces[i]).source][fam[i]];
      Q.labels[c.object].push_back(label + ")");
      for (std::size_t a = 0; a < S.arrows().size(); ++a) {
        if (S.arrow(a).target != c.object) continue;
        if (S.arrow(a).identity) {
          Q.restriction[a].push_back(Q.labels[c.object].size() - 1);
        } else {
          Q.restriction[a].push_back(restrict_family(P, c, fam, a));
        }
      }
    }
  }
  return Q;
}

}  // namespace detail

/// Plus construction on the declared covers: separate, glue, repeat until
/// the sheaf condition holds. Three rounds without a fixpoint means the
/// cover data is malformed.
inline SheafifyResult sheafify(const FinitePresheaf& P) {
  FinitePresheaf cur = P;
  PresheafMorphism unit = PresheafMorphism::identity(P);
  for (int it = 0; it <= 3; ++it) {
    if (sheaf_condition(cur).passed()) {
      cur.name = "sh(" + P.name + ")";
      return {std::move(cur), std::move(unit), it};
    }
    if (it == 3) break;
    QuotientResult sep = detail::separate(cur);
    unit = sep.unit.after(unit);
    // Glued elements are appended, so the unit's indices stay valid.
    cur = detail::glue(sep.presheaf);
  }
  throw Error(ErrorKind::NonTermination, "sheafification of " + P.name + " did not stabilize in 3 rounds");
}

struct KappaHatResult {
  FinitePresheaf sheaf;
  PresheafMorphism unit;  // P → κ̂(P)
};

/// κ̂(P) = sheafify(κ(P)).
inline KappaHatResult kappa_hat(const FinitePresheaf& P) {
  QuotientResult k = concretize_kappa(P);
  SheafifyResult s = sheafify(k.presheaf);
  s.sheaf.name = "κ̂(" + P.name + ")";
  return {std::move(s.sheaf), s.unit.after(k.unit)};
}

/// Some natural bijection P ≅ Q, found by exhaustive search.
inline std::optional<PresheafMorphism> find_isomorphism(const FinitePresheaf& P, const FinitePresheaf& Q,
                                                        std::size_t node_bound = 1'000'000);

// ---------------------------------------------------------------------------
// Universal property of κ̂

struct FactorizationResult {
  Verdict verdict;
  std::size_t factorizations = 0;
  std::size_t nodes = 0;
  std::optional<PresheafMorphism> witness;
};

namespace detail {

/// Enumerates natural transformations K → C extending the partial
/// assignment `fixed` (entries SIZE_MAX are free), stopping after `limit`.
inline std::vector<PresheafMorphism> enumerate_morphisms(const FinitePresheaf& K, const FinitePresheaf& C,
                                                         std::vector<std::vector<std::size_t>> fixed,
                                                         std::size_t limit, std::size_t node_bound,
                                                         std::size_t& nodes) {
  const auto& S = *K.site;
  constexpr std::size_t kFree = static_cast<std::size_t>(-1);
  std::vector<std::pair<std::size_t, std::size_t>> slots;
  for (std::size_t o = 0; o < S.objects().size(); ++o)
    for (std::size_t x = 0; x < K.size(o); ++x) slots.emplace_back(o, x);
  std::vector<PresheafMorphism> found;
  auto& psi = fixed;

  auto consistent = [&]() {
    for (std::size_t a = 0; a < S.arrows().size(); ++a) {
      const auto& ar = S.arrow(a);
      for (std::size_t x = 0; x < K.size(ar.target); ++x) {
        const std::size_t top = psi[ar.target][x];
        const std::size_t bottom = psi[ar.source][K.restrict(a, x)];
        if (top != kFree && bottom != kFree && C.restrict(a, top) != bottom) return false;
      }
    }
    return true;
  };

  std::function<void(std::size_t)> search = [&](std::size_t k) {
    if (found.size() >= limit) return;
    if (++nodes > node_bound) throw Error(ErrorKind::SearchTooLarge, "morphism search exceeds the node bound");
    if (!consistent()) return;
    if (k == slots.size()) {
      found.push_back(PresheafMorphism{psi});
      return;
    }
    const auto [o, x] = slots[k];
    if (psi[o][x] != kFree) {
      search(k + 1);
      return;
    }
    for (std::size_t y = 0; y < C.size(o) && found.size() < limit; ++y) {
      psi[o][x] = y;
      search(k + 1);
    }
    psi[o][x] = kFree;
  };
  search(0);
  return found;
}

}  // namespace detail

/// Pass iff exactly one ψ: κ̂(P) → C satisfies ψ∘η = φ, with η the unit.
/// C must be a concrete sheaf.
inline FactorizationResult verify_left_adjoint_factorization(const FinitePresheaf& P, const FinitePresheaf& C,
                                                             const PresheafMorphism& phi,
                                                             std::size_t node_bound = 1'000'000) {
  if (P.site != C.site) throw Error(ErrorKind::InvalidArgument, "presheaves on different sites");
  if (Verdict v = is_concrete(C); !v.passed())
    throw Error(ErrorKind::InvalidArgument, "target is not concrete: " + v.reason);
  if (Verdict v = sheaf_condition(C); !v.passed())
    throw Error(ErrorKind::InvalidArgument, "target is not a sheaf: " + v.reason);
  if (Verdict v = check_naturality(P, C, phi); !v.passed())
    throw Error(ErrorKind::InvalidArgument, "φ is not natural: " + v.reason);

  const KappaHatResult K = kappa_hat(P);
  constexpr std::size_t kFree = static_cast<std::size_t>(-1);
  std::vector<std::vector<std::size_t>> fixed(K.sheaf.labels.size());
  FactorizationResult out;
  for (std::size_t o = 0; o < fixed.size(); ++o) {
    fixed[o].assign(K.sheaf.size(o), kFree);
    for (std::size_t x = 0; x < P.size(o); ++x) {
      std::size_t& slot = fixed[o][K.unit.component[o][x]];
      const std::size_t want = phi.component[o][x];
      if (slot != kFree && slot != want) {
        out.verdict = Verdict::refuted("φ does not factor: two elements with the same image in κ̂ go apart");
        return out;
      }
      slot = want;
    }
  }
  const auto found = detail::enumerate_morphisms(K.sheaf, C, fixed, 2, node_bound, out.nodes);
  out.factorizations = found.size();
  if (found.size() == 1) {
    out.verdict = Verdict::pass("unique factorization through κ̂");
    out.witness = found.front();
  } else if (found.empty()) {
    out.verdict = Verdict::refuted("no factorization through κ̂");
  } else {
    out.verdict = Verdict::refuted("factorization through κ̂ is not unique");
  }
  return out;
}

inline std::optional<PresheafMorphism> find_isomorphism(const FinitePresheaf& P, const FinitePresheaf& Q,
                                                        std::size_t node_bound) {
  for (std::size_t o = 0; o < P.labels.size(); ++o)
    if (P.size(o) != Q.size(o)) return std::nullopt;
  constexpr std::size_t kFree = static_cast<std::size_t>(-1);
  std::vector<std::vector<std::size_t>> fixed;
  for (std::size_t o = 0; o < P.labels.size(); ++o) fixed.emplace_back(P.size(o), kFree);
  std::size_t nodes = 0;
  // Natural maps are few on desk-scale tables; filter them for bijectivity.
  const auto all = detail::enumerate_morphisms(P, Q, fixed, node_bound, node_bound, nodes);
  for (const auto& m : all)
    if (is_isomorphism(P, Q, m)) return m;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Random adjunction trials

/// Site *, U, V with f: V → U, points u0,u1,u2 of U and v0,v1 of V, and
/// f∘v_k = u_k.
inline SitePtr small_random_site() {
  auto s = std::make_shared<ProbeSite>("small");
  const auto U = s->add_object("U"), V = s->add_object("V");
  const auto f = s->add_arrow("f", V, U);
  std::vector<std::size_t> u, v;
  for (int k = 0; k < 3; ++k) u.push_back(s->add_arrow("u" + std::to_string(k), ProbeSite::point(), U));
  for (int k = 0; k < 2; ++k) v.push_back(s->add_arrow("v" + std::to_string(k), ProbeSite::point(), V));
  for (int k = 0; k < 2; ++k) s->add_composition(f, v[k], u[k]);
  return s;
}

struct AdjunctionTrial {
  FinitePresheaf P;
  FinitePresheaf C;
  PresheafMorphism phi;
};

/// Random P (at most 4 elements per object), a random concrete C of point
/// functions containing the image of a random φ on points, and the φ this
/// forces on U and V.
inline AdjunctionTrial random_adjunction_trial(const SitePtr& site, std::mt19937_64& rng) {
  const auto& S = *site;
  auto pick = [&](std::size_t n) { return static_cast<std::size_t>(unit_uniform(rng) * static_cast<double>(n)); };
  const std::size_t U = S.object_index("U"), V = S.object_index("V");
  const std::size_t f = S.arrow_index("f");
  const std::size_t u[3] = {S.arrow_index("u0"), S.arrow_index("u1"), S.arrow_index("u2")};
  const std::size_t v[2] = {S.arrow_index("v0"), S.arrow_index("v1")};

  std::vector<std::size_t> n(3);
  for (auto& k : n) k = 1 + pick(4);
  std::vector<std::vector<std::string>> labels(3);
  const char* names = "pUV";
  for (std::size_t o = 0; o < 3; ++o)
    for (std::size_t x = 0; x < n[o]; ++x) labels[o].push_back(std::string(1, names[o]) + std::to_string(x));
  FinitePresheaf P = FinitePresheaf::make(site, "P", labels);
  auto random_map = [&](std::size_t from, std::size_t to) {
    std::vector<std::size_t> r(from);
    for (auto& y : r) y = pick(to);
    return r;
  };
  P.restriction[f] = random_map(n[U], n[V]);
  for (auto a : v) P.restriction[a] = random_map(n[V], n[0]);
  for (int k = 0; k < 2; ++k) {
    P.restriction[u[k]].resize(n[U]);
    for (std::size_t x = 0; x < n[U]; ++x) P.restriction[u[k]][x] = P.restrict(v[k], P.restrict(f, x));
  }
  P.restriction[u[2]] = random_map(n[U], n[0]);

  // C(*) = {0..m-1}; C(U), C(V) are sets of point functions.
  const std::size_t m = 1 + pick(3);
  std::vector<std::size_t> phi_pt(n[0]);
  for (auto& y : phi_pt) y = pick(m);
  std::vector<std::vector<std::size_t>> cu, cv;
  auto add = [](std::vector<std::vector<std::size_t>>& set, std::vector<std::size_t> t) {
    if (std::find(set.begin(), set.end(), t) == set.end()) set.push_back(std::move(t));
  };
  for (std::size_t x = 0; x < n[U]; ++x)
    add(cu, {phi_pt[P.restrict(u[0], x)], phi_pt[P.restrict(u[1], x)], phi_pt[P.restrict(u[2], x)]});
  for (std::size_t x = 0; x < n[V]; ++x) add(cv, {phi_pt[P.restrict(v[0], x)], phi_pt[P.restrict(v[1], x)]});
  for (std::size_t e = pick(3); e > 0; --e) add(cu, {pick(m), pick(m), pick(m)});
  for (std::size_t e = pick(2); e > 0; --e) add(cv, {pick(m), pick(m)});
  for (const auto& t : cu) add(cv, {t[0], t[1]});

  auto tuple_label = [](char c, const std::vector<std::size_t>& t) {
    std::string s(1, c);
    for (auto y : t) s += std::to_string(y);
    return s;
  };
  std::vector<std::vector<std::string>> clabels(3);
  for (std::size_t y = 0; y < m; ++y) clabels[0].push_back("c" + std::to_string(y));
  for (const auto& t : cu) clabels[U].push_back(tuple_label('U', t));
  for (const auto& t : cv) clabels[V].push_back(tuple_label('V', t));
  FinitePresheaf C = FinitePresheaf::make(site, "C", clabels);
  auto index_in = [](const std::vector<std::vector<std::size_t>>& set, const std::vector<std::size_t>& t) {
    return static_cast<std::size_t>(std::find(set.begin(), set.end(), t) - set.begin());
  };
  for (std::size_t k = 0; k < 3; ++k)
    for (const auto& t : cu) C.restriction[u[k]].push_back(t[k]);
  for (std::size_t k = 0; k < 2; ++k)
    for (const auto& t : cv) C.restriction[v[k]].push_back(t[k]);
  for (const auto& t : cu) C.restriction[f].push_back(index_in(cv, {t[0], t[1]}));

  PresheafMorphism phi;
  phi.component.resize(3);
  phi.component[0] = phi_pt;
  for (std::size_t x = 0; x < n[U]; ++x)
    phi.component[U].push_back(
        index_in(cu, {phi_pt[P.restrict(u[0], x)], phi_pt[P.restrict(u[1], x)], phi_pt[P.restrict(u[2], x)]}));
  for (std::size_t x = 0; x < n[V]; ++x)
    phi.component[V].push_back(index_in(cv, {phi_pt[P.restrict(v[0], x)], phi_pt[P.restrict(v[1], x)]}));
  return {std::move(P), std::move(C), std::move(phi)};
}

}  // namespace diffeo
