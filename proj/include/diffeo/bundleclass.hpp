// Equivalence relations on principal bundles: isomorphic, locally isomorphic
// (equality after discretization) and fiberwise isomorphic (equality in the
// coarse moduli space), plus brute-force Čech classes for finite groups.
#pragma once

#include "diffeo/groupoid.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace diffeo {

// ---------------------------------------------------------------------------
// Cocycles over cover graphs

/// One connected component of the overlap of pieces i < j.
struct OverlapComponent {
  int i = 0;
  int j = 0;
  std::string label;
};

/// One connected component of a triple overlap, given by the overlap
/// components it lies in; the cocycle condition is g_ij·g_jk = g_ik there.
struct TripleComponent {
  std::size_t ij = 0;
  std::size_t jk = 0;
  std::size_t ik = 0;
};

/// Combinatorial shadow of an open cover: pieces, overlap components and
/// triple-overlap components.
struct CoverGraph {
  std::string name;
  int pieces = 1;
  std::vector<OverlapComponent> overlaps;
  std::vector<TripleComponent> triples;

  /// S¹ = two arcs whose overlap has two components.
  static CoverGraph two_arc_circle() {
    return CoverGraph{"circle2", 2, {{0, 1, "left"}, {0, 1, "right"}}, {}};
  }
  /// S¹ = three arcs, pairwise overlapping in one component each.
  static CoverGraph three_arc_circle() {
    return CoverGraph{"circle3", 3, {{0, 1, "01"}, {1, 2, "12"}, {0, 2, "02"}}, {}};
  }
  static CoverGraph interval() { return CoverGraph{"interval", 1, {}, {}}; }
  /// n disjoint contractible components.
  static CoverGraph disjoint(int n) { return CoverGraph{"disjoint" + std::to_string(n), n, {}, {}}; }
};

/// Transition functions, one group element per overlap component (direction
/// i → j with i < j).
struct Cocycle {
  CoverGraph graph;
  GroupModel group;
  std::vector<GroupElement> transitions;

  Verdict validate() const {
    if (!group.is_finite()) return Verdict::unknown("cocycles need a finite group");
    if (transitions.size() != graph.overlaps.size())
      return Verdict::refuted("one transition per overlap component is required");
    for (const auto& o : graph.overlaps)
      if (!(0 <= o.i && o.i < o.j && o.j < graph.pieces))
        return Verdict::refuted("overlap component " + o.label + " is not between pieces i < j");
    for (std::size_t t = 0; t < graph.triples.size(); ++t) {
      const auto& tc = graph.triples[t];
      const auto lhs = group.multiply(transitions.at(tc.ij), transitions.at(tc.jk));
      if (!group.equal(lhs, transitions.at(tc.ik)))
        return Verdict::refuted("cocycle condition fails on triple component " + std::to_string(t));
    }
    return Verdict::pass();
  }

  std::string describe() const {
    std::string s = "(";
    for (std::size_t k = 0; k < transitions.size(); ++k) {
      if (k) s += ",";
      s += std::to_string(transitions[k].index);
    }
    return s + ")";
  }
};

struct CocycleClass {
  Cocycle representative;
  std::size_t count = 0;
  std::vector<Cocycle> members;
};

namespace detail {

inline std::vector<int> digits(std::uint64_t code, int base, std::size_t n) {
  std::vector<int> d(n);
  for (std::size_t k = 0; k < n; ++k) {
    d[k] = static_cast<int>(code % static_cast<std::uint64_t>(base));
    code /= static_cast<std::uint64_t>(base);
  }
  return d;
}

inline std::uint64_t encode(const std::vector<int>& d, int base) {
  std::uint64_t code = 0;
  for (std::size_t k = d.size(); k-- > 0;) code = code * static_cast<std::uint64_t>(base) + d[k];
  return code;
}

inline std::uint64_t checked_power(int base, std::size_t n) {
  std::uint64_t r = 1;
  for (std::size_t k = 0; k < n; ++k) {
    r *= static_cast<std::uint64_t>(base);
    if (r > 1'000'000) throw Error(ErrorKind::SearchTooLarge, "cocycle enumeration exceeds 1e6 candidates");
  }
  return r;
}

}  // namespace detail

/// All cocycles of a finite group over a cover graph.
inline std::vector<Cocycle> enumerate_cocycles(const GroupModel& group, const CoverGraph& graph) {
  if (!group.is_finite()) throw Error(ErrorKind::InvalidArgument, "cocycle classes need a finite group");
  const int n = group.order();
  const std::uint64_t total = detail::checked_power(n, graph.overlaps.size());
  std::vector<Cocycle> out;
  for (std::uint64_t code = 0; code < total; ++code) {
    Cocycle c{graph, group, {}};
    for (int d : detail::digits(code, n, graph.overlaps.size())) c.transitions.push_back(GroupElement{d, 0.0});
    if (c.validate().passed()) out.push_back(std::move(c));
  }
  return out;
}

/// g'_ij = h_i·g_ij·h_j⁻¹ for a relabeling h of the pieces.
inline Cocycle apply_coboundary(const Cocycle& c, const std::vector<GroupElement>& h) {
  Cocycle out = c;
  for (std::size_t k = 0; k < c.graph.overlaps.size(); ++k) {
    const auto& o = c.graph.overlaps[k];
    out.transitions[k] =
        c.group.multiply(c.group.multiply(h.at(o.i), c.transitions[k]), c.group.inverse(h.at(o.j)));
  }
  return out;
}

/// Brute-force Čech H¹: every cocycle, quotiented by every coboundary.
/// Classes are ordered by their first member in enumeration order.
inline std::vector<CocycleClass> cocycle_classes(const GroupModel& group, const CoverGraph& graph) {
  const auto cocycles = enumerate_cocycles(group, graph);
  const int n = group.order();
  std::map<std::uint64_t, std::size_t> index;
  auto code_of = [n](const Cocycle& c) {
    std::vector<int> d;
    for (const auto& t : c.transitions) d.push_back(t.index);
    return detail::encode(d, n);
  };
  for (std::size_t k = 0; k < cocycles.size(); ++k) index[code_of(cocycles[k])] = k;

  std::vector<std::size_t> parent(cocycles.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  const std::uint64_t relabelings = detail::checked_power(n, static_cast<std::size_t>(graph.pieces));
  for (std::size_t k = 0; k < cocycles.size(); ++k) {
    for (std::uint64_t code = 0; code < relabelings; ++code) {
      std::vector<GroupElement> h;
      for (int d : detail::digits(code, n, static_cast<std::size_t>(graph.pieces))) h.push_back(GroupElement{d, 0.0});
      const auto it = index.find(code_of(apply_coboundary(cocycles[k], h)));
      if (it == index.end()) throw Error(ErrorKind::InvalidArgument, "coboundary left the cocycle set");
      const std::size_t a = find(k), b = find(it->second);
      if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
  }
  std::vector<CocycleClass> classes;
  std::map<std::size_t, std::size_t> slot;
  for (std::size_t k = 0; k < cocycles.size(); ++k) {
    const std::size_t r = find(k);
    auto [it, inserted] = slot.try_emplace(r, classes.size());
    if (inserted) classes.push_back(CocycleClass{cocycles[r], 0, {}});
    classes[it->second].count++;
    classes[it->second].members.push_back(cocycles[k]);
  }
  return classes;
}

inline bool cohomologous(const Cocycle& a, const Cocycle& b) {
  if (a.group.name() != b.group.name() || a.graph.name != b.graph.name) return false;
  const int n = a.group.order();
  const std::uint64_t relabelings = detail::checked_power(n, static_cast<std::size_t>(a.graph.pieces));
  for (std::uint64_t code = 0; code < relabelings; ++code) {
    std::vector<GroupElement> h;
    for (int d : detail::digits(code, n, static_cast<std::size_t>(a.graph.pieces))) h.push_back(GroupElement{d, 0.0});
    const Cocycle c = apply_coboundary(a, h);
    bool same = true;
    for (std::size_t k = 0; k < c.transitions.size() && same; ++k)
      same = a.group.equal(c.transitions[k], b.transitions[k]);
    if (same) return true;
  }
  return false;
}

/// A Γ-bundle over a space presented by a cover graph (BΓ: Γ acting on a point).
struct CocycleBundle {
  std::string name;
  Cocycle cocycle;
};

using AnyBundle = std::variant<PrincipalBundle, CocycleBundle>;

inline const std::string& bundle_name(const AnyBundle& b) {
  return std::visit(
      [](const auto& x) -> const std::string& {
        if constexpr (std::is_same_v<std::decay_t<decltype(x)>, PrincipalBundle>) {
          return x.name();
        } else {
          return x.name;
        }
      },
      b);
}

// ---------------------------------------------------------------------------
// Fibers

/// Brute-force search for a Γ-equivariant, anchor-preserving bijection
/// between two finite fibers. Returns the image index of every point of `a`.
inline std::optional<std::vector<std::size_t>> equivariant_fiber_iso(const FiberDescriptor& a,
                                                                     const FiberDescriptor& b,
                                                                     const ActionGroupoid& g,
                                                                     double eq_tol = Tolerances{}.eq_tol) {
  if (!a.finite || !b.finite) throw Error(ErrorKind::InvalidArgument, "Γ-set search needs finite fibers");
  if (a.points.size() != b.points.size()) return std::nullopt;
  const std::size_t n = a.points.size();
  const auto& G = g.group();
  auto find_in = [&](const FiberDescriptor& f, const TotalPoint& p) -> std::optional<std::size_t> {
    for (std::size_t k = 0; k < f.points.size(); ++k)
      if (G.equal(f.points[k].g, p.g) && max_abs(Vector(f.points[k].x - p.x)) <= eq_tol) return k;
    return std::nullopt;
  };
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  do {
    bool ok = true;
    for (std::size_t k = 0; k < n && ok; ++k)
      ok = max_abs(Vector(a.points[k].x - b.points[perm[k]].x)) <= eq_tol;
    for (std::size_t k = 0; k < n && ok; ++k) {
      for (const auto& d : G.elements()) {
        const TotalPoint pa{a.base, G.multiply(a.points[k].g, d), g.act(G.inverse(d), a.points[k].x)};
        const TotalPoint pb{b.base, G.multiply(b.points[perm[k]].g, d),
                            g.act(G.inverse(d), b.points[perm[k]].x)};
        const auto ia = find_in(a, pa);
        const auto ib = find_in(b, pb);
        if (!ia || !ib || perm[*ia] != *ib) {
          ok = false;
          break;
        }
      }
    }
    if (ok) return perm;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return std::nullopt;
}

enum class FiberRoute {
  AnchorOrbit,  // orbit equality of anchors
  GammaSet,     // explicit equivariant bijection search (finite groups)
};

namespace detail {
inline bool same_base(const Domain& a, const Domain& b) {
  if (a.same_as(b)) return true;
  if (a.dim() != b.dim() || a.samples().size() != b.samples().size()) return false;
  for (std::size_t i = 0; i < a.samples().size(); ++i)
    if (a.samples()[i] != b.samples()[i]) return false;
  return true;
}
}  // namespace detail

/// Fibers over every base sample are Γ-equivariantly isomorphic.
inline Verdict fiberwise_isomorphic(const PrincipalBundle& P, const PrincipalBundle& Q,
                                    const ActionGroupoid& g, FiberRoute route = FiberRoute::AnchorOrbit,
                                    double eq_tol = Tolerances{}.eq_tol) {
  if (!detail::same_base(P.base(), Q.base()))
    throw Error(ErrorKind::InvalidArgument, P.name() + " and " + Q.name() + " have different bases");
  const auto& samples = P.base().samples();
  double worst = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const Vector& b = samples[i];
    if (route == FiberRoute::GammaSet && g.group().is_finite()) {
      if (!equivariant_fiber_iso(fiber(P, g, b, eq_tol), fiber(Q, g, b, eq_tol), g, eq_tol))
        return Verdict::refuted("no equivariant bijection between fibers").at(b).at_sample(i);
      continue;
    }
    const double d = g.orbit_distance(P.classifying()(b), Q.classifying()(b), eq_tol);
    if (!(d <= eq_tol))
      return Verdict::refuted("anchors lie in different orbits").at(b).at_sample(i).with_deviation(d);
    worst = std::max(worst, d);
  }
  return Verdict::pass().with_deviation(worst);
}

/// Fibers of bundles over a point-action are Γ-torsors, all isomorphic.
inline Verdict fiberwise_isomorphic(const CocycleBundle& P, const CocycleBundle& Q) {
  if (P.cocycle.group.name() != Q.cocycle.group.name() || P.cocycle.graph.name != Q.cocycle.graph.name)
    throw Error(ErrorKind::InvalidArgument, "cocycle bundles over different groups or covers");
  return Verdict::pass();
}

// ---------------------------------------------------------------------------
// Local and global isomorphism of pullback bundles

/// On [lo, hi] of one base component, fibers are matched by (γ,x) ↦ (δγ, x).
struct MatchingPiece {
  double lo = 0.0;
  double hi = 0.0;
  GroupElement label;
};

struct LocalIsoResult {
  Verdict verdict;
  std::vector<MatchingPiece> matching;
};

namespace detail {

using LabelMask = std::uint64_t;

struct ScanPoint {
  double t = 0.0;
  LabelMask allowed = 0;
  bool declared_special = false;
};

inline LabelMask label_mask(const ActionGroupoid& g, const Vector& x, const Vector& y, double eq_tol) {
  LabelMask m = 0;
  for (const auto& d : g.matching_labels(x, y, eq_tol)) m |= LabelMask{1} << d.index;
  return m;
}

inline int lowest_label(LabelMask m) {
  for (int k = 0; k < 64; ++k)
    if (m & (LabelMask{1} << k)) return k;
  return -1;
}

inline bool single(LabelMask m) { return m != 0 && (m & (m - 1)) == 0; }

/// Scan points of one component of a 1-d domain, sorted.
inline std::vector<ScanPoint> scan_points(const PrincipalBundle& P, const PrincipalBundle& Q,
                                          const ActionGroupoid& g, const Domain& piece,
                                          const Domain& base, int box, double eq_tol) {
  std::vector<std::pair<double, bool>> ts;
  auto add = [&](const Vector& u, bool special) {
    if (piece.contains(u) && base.contains(u) && piece.component_of(u) == box) ts.emplace_back(u(0), special);
  };
  for (const auto& u : piece.samples()) add(u, false);
  for (const auto& u : base.samples()) add(u, false);
  for (const auto& u : P.special_points()) add(u, true);
  for (const auto& u : Q.special_points()) add(u, true);
  std::sort(ts.begin(), ts.end());
  std::vector<ScanPoint> out;
  for (const auto& [t, special] : ts) {
    if (!out.empty() && out.back().t == t) {
      out.back().declared_special = out.back().declared_special || special;
      continue;
    }
    const Vector u = vec({t});
    out.push_back(ScanPoint{t, label_mask(g, P.classifying()(u), Q.classifying()(u), eq_tol), special});
  }
  return out;
}

/// Locates a label jump between two free points by bisection; returns the
/// first non-free point found (or the final midpoint).
inline ScanPoint bisect_jump(const PrincipalBundle& P, const PrincipalBundle& Q, const ActionGroupoid& g,
                             ScanPoint left, ScanPoint right, double eq_tol) {
  for (int it = 0; it < 80; ++it) {
    const double mid = 0.5 * (left.t + right.t);
    const Vector u = vec({mid});
    ScanPoint m{mid, label_mask(g, P.classifying()(u), Q.classifying()(u), eq_tol), false};
    if (!single(m.allowed)) return m;
    if (m.allowed != left.allowed) {
      right = m;
    } else {
      left = m;
    }
  }
  return ScanPoint{0.5 * (left.t + right.t), left.allowed | right.allowed, false};
}

/// Walks one sorted component. `local` = true tests the local criterion
/// (a label valid on a neighborhood of every point); otherwise one label
/// must serve the whole component (global isomorphism).
inline LocalIsoResult scan_component(const PrincipalBundle& P, const PrincipalBundle& Q,
                                     const ActionGroupoid& g, const std::vector<ScanPoint>& pts,
                                     bool local, double eq_tol) {
  LocalIsoResult r{Verdict::pass(), {}};
  if (pts.empty()) return r;
  for (const auto& p : pts)
    if (p.allowed == 0)
      return {Verdict::refuted("fibers are not isomorphic, so no local isomorphism exists").at(vec({p.t})), {}};

  if (!local) {
    LabelMask all = ~LabelMask{0};
    for (const auto& p : pts) all &= p.allowed;
    if (all == 0) {
      // The obstruction sits where the running intersection first empties.
      LabelMask run = ~LabelMask{0};
      double where = pts.front().t;
      for (const auto& p : pts) {
        if ((run & p.allowed) == 0) {
          where = p.t;
          break;
        }
        run &= p.allowed;
      }
      return {Verdict::refuted("no global equivariant matching of fibers").at(vec({where})), {}};
    }
    const GroupElement d{lowest_label(all), 0.0};
    r.matching.push_back(MatchingPiece{pts.front().t, pts.back().t, d});
    return r;
  }

  // Expand label jumps between adjacent free points into explicit non-free
  // points found by bisection, then test every non-free run together with its
  // free neighbors.
  std::vector<ScanPoint> seq;
  for (std::size_t k = 0; k < pts.size(); ++k) {
    if (k > 0 && single(pts[k - 1].allowed) && single(pts[k].allowed) && pts[k - 1].allowed != pts[k].allowed)
      seq.push_back(bisect_jump(P, Q, g, pts[k - 1], pts[k], eq_tol));
    seq.push_back(pts[k]);
  }

  std::size_t k = 0;
  LabelMask current = 0;
  double piece_lo = seq.front().t;
  while (k < seq.size()) {
    if (single(seq[k].allowed)) {
      if (current != 0 && current != seq[k].allowed) {
        r.matching.push_back(MatchingPiece{piece_lo, seq[k].t, GroupElement{lowest_label(current), 0.0}});
        piece_lo = seq[k].t;
      }
      current = seq[k].allowed;
      ++k;
      continue;
    }
    std::size_t end = k;
    LabelMask run = ~LabelMask{0};
    std::optional<double> declared;
    while (end < seq.size() && !single(seq[end].allowed)) {
      run &= seq[end].allowed;
      if (seq[end].declared_special && !declared) declared = seq[end].t;
      ++end;
    }
    LabelMask neighborhood = run;
    if (k > 0) neighborhood &= seq[k - 1].allowed;
    if (end < seq.size()) neighborhood &= seq[end].allowed;
    if (neighborhood == 0) {
      const double where = declared.value_or(0.5 * (seq[k].t + seq[end - 1].t));
      return {Verdict::refuted("anchor-forced matching has no continuous extension").at(vec({where})), {}};
    }
    if (current == 0) current = neighborhood & (~neighborhood + 1);
    k = end;
  }
  if (current == 0) current = seq.front().allowed & (~seq.front().allowed + 1);
  r.matching.push_back(MatchingPiece{piece_lo, seq.back().t, GroupElement{lowest_label(current), 0.0}});
  return r;
}

inline std::optional<Verdict> outside_class(const PrincipalBundle& P, const PrincipalBundle& Q,
                                            const ActionGroupoid& g) {
  if (!g.group().is_finite() || P.base().dim() != 1 || g.group().order() > 64)
    return Verdict::unknown("OutsideDecidableClass: needs a finite group and a 1-d base");
  if (!same_base(P.base(), Q.base()))
    throw Error(ErrorKind::InvalidArgument, P.name() + " and " + Q.name() + " have different bases");
  return std::nullopt;
}

}  // namespace detail

/// Locally isomorphic pullback bundles over a 1-d base for a finite group.
/// Where Γ acts freely on the anchor orbit the anchor-compatible matching
/// label δ is unique; it must be locally constant, and every run of non-free
/// points must admit one label shared with its free neighbors. Each piece of
/// `working` (default: the base itself) is scanned on its own.
inline LocalIsoResult locally_isomorphic(const PrincipalBundle& P, const PrincipalBundle& Q,
                                         const ActionGroupoid& g,
                                         const std::optional<OpenCover>& working = std::nullopt,
                                         double eq_tol = Tolerances{}.eq_tol) {
  if (auto u = detail::outside_class(P, Q, g)) return {*u, {}};
  const OpenCover cover = working.value_or(OpenCover::trivial(P.base()));
  if (Verdict c = check_cover(OpenCover{P.base(), cover.pieces}); !c.passed())
    throw Error(ErrorKind::InvalidArgument, "working cover does not cover the base");
  LocalIsoResult out{Verdict::pass(), {}};
  for (std::size_t i = 0; i < cover.pieces.size(); ++i) {
    const Domain& piece = cover.pieces[i];
    for (std::size_t box = 0; box < piece.boxes().size(); ++box) {
      const auto pts = detail::scan_points(P, Q, g, piece, P.base(), static_cast<int>(box), eq_tol);
      LocalIsoResult r = detail::scan_component(P, Q, g, pts, true, eq_tol);
      if (!r.verdict.passed()) {
        r.verdict.in_piece(i);
        return r;
      }
      out.matching.insert(out.matching.end(), r.matching.begin(), r.matching.end());
    }
  }
  return out;
}

/// Globally isomorphic: one label per connected component of the base.
inline LocalIsoResult globally_isomorphic(const PrincipalBundle& P, const PrincipalBundle& Q,
                                          const ActionGroupoid& g, double eq_tol = Tolerances{}.eq_tol) {
  if (auto u = detail::outside_class(P, Q, g)) return {*u, {}};
  LocalIsoResult out{Verdict::pass(), {}};
  for (std::size_t box = 0; box < P.base().boxes().size(); ++box) {
    const auto pts = detail::scan_points(P, Q, g, P.base(), P.base(), static_cast<int>(box), eq_tol);
    LocalIsoResult r = detail::scan_component(P, Q, g, pts, false, eq_tol);
    if (!r.verdict.passed()) return r;
    out.matching.insert(out.matching.end(), r.matching.begin(), r.matching.end());
  }
  return out;
}

/// Bundles given by cocycles over the same cover are trivial on every piece.
inline LocalIsoResult locally_isomorphic(const CocycleBundle& P, const CocycleBundle& Q) {
  if (P.cocycle.group.name() != Q.cocycle.group.name() || P.cocycle.graph.name != Q.cocycle.graph.name)
    throw Error(ErrorKind::InvalidArgument, "cocycle bundles over different groups or covers");
  LocalIsoResult r{Verdict::pass("both bundles are trivial on every cover piece"), {}};
  for (int i = 0; i < P.cocycle.graph.pieces; ++i)
    r.matching.push_back(MatchingPiece{static_cast<double>(i), static_cast<double>(i), P.cocycle.group.identity()});
  return r;
}

// ---------------------------------------------------------------------------
// Partitions

/// Classes of bundle indices. Bundles whose comparisons came back Unknown
/// sit in singleton classes flagged in `unknown`.
struct Partition {
  std::vector<std::vector<std::size_t>> classes;
  std::vector<bool> unknown;

  std::size_t count() const { return classes.size(); }

  std::size_t class_of(std::size_t item) const {
    for (std::size_t c = 0; c < classes.size(); ++c)
      if (std::find(classes[c].begin(), classes[c].end(), item) != classes[c].end()) return c;
    throw Error(ErrorKind::InvalidArgument, "item not in partition");
  }
};

/// First-fit partition under an equivalence relation given as verdicts.
template <class Relation>
Partition partition_by(std::size_t n, Relation&& related) {
  Partition p;
  for (std::size_t i = 0; i < n; ++i) {
    bool placed = false, unknown = false;
    for (std::size_t c = 0; c < p.classes.size() && !placed && !unknown; ++c) {
      if (p.unknown[c]) continue;
      const Status s = related(p.classes[c].front(), i);
      if (s == Status::Pass) {
        p.classes[c].push_back(i);
        placed = true;
      } else if (s == Status::Unknown) {
        unknown = true;
      }
    }
    if (!placed) {
      p.classes.push_back({i});
      p.unknown.push_back(unknown);
    }
  }
  return p;
}

/// Every class of `fine` lies inside one class of `coarse`.
inline bool refines(const Partition& fine, const Partition& coarse) {
  for (const auto& cls : fine.classes) {
    const std::size_t target = coarse.class_of(cls.front());
    for (auto i : cls)
      if (coarse.class_of(i) != target) return false;
  }
  return true;
}

enum class BundleRelation { Isomorphic, LocallyIsomorphic, FiberwiseIsomorphic };

inline std::string_view to_string(BundleRelation r) {
  switch (r) {
    case BundleRelation::Isomorphic: return "isomorphism";
    case BundleRelation::LocallyIsomorphic: return "discretization";
    case BundleRelation::FiberwiseIsomorphic: return "coarse";
  }
  return "?";
}

inline Verdict compare_bundles(const AnyBundle& a, const AnyBundle& b, const ActionGroupoid& g,
                               BundleRelation rel, double eq_tol = Tolerances{}.eq_tol) {
  const auto* pa = std::get_if<PrincipalBundle>(&a);
  const auto* pb = std::get_if<PrincipalBundle>(&b);
  if (pa && pb) {
    switch (rel) {
      case BundleRelation::Isomorphic: return globally_isomorphic(*pa, *pb, g, eq_tol).verdict;
      case BundleRelation::LocallyIsomorphic: return locally_isomorphic(*pa, *pb, g, std::nullopt, eq_tol).verdict;
      case BundleRelation::FiberwiseIsomorphic:
        return fiberwise_isomorphic(*pa, *pb, g, FiberRoute::AnchorOrbit, eq_tol);
    }
  }
  const auto* ca = std::get_if<CocycleBundle>(&a);
  const auto* cb = std::get_if<CocycleBundle>(&b);
  if (ca && cb) {
    switch (rel) {
      case BundleRelation::Isomorphic:
        return cohomologous(ca->cocycle, cb->cocycle) ? Verdict::pass() : Verdict::refuted("not cohomologous");
      case BundleRelation::LocallyIsomorphic: return locally_isomorphic(*ca, *cb).verdict;
      case BundleRelation::FiberwiseIsomorphic: return fiberwise_isomorphic(*ca, *cb);
    }
  }
  return Verdict::unknown("OutsideDecidableClass: mixed bundle presentations");
}

inline Partition classify_bundles(const std::vector<AnyBundle>& bundles, const ActionGroupoid& g,
                                  BundleRelation rel, double eq_tol = Tolerances{}.eq_tol) {
  return partition_by(bundles.size(), [&](std::size_t i, std::size_t j) {
    return compare_bundles(bundles[i], bundles[j], g, rel, eq_tol).status;
  });
}

inline Partition isomorphism_classes(const std::vector<AnyBundle>& bundles, const ActionGroupoid& g,
                                     double eq_tol = Tolerances{}.eq_tol) {
  return classify_bundles(bundles, g, BundleRelation::Isomorphic, eq_tol);
}

/// Classes in the discretized stack Dπ₀(BG)(B), via local isomorphism.
inline Partition discretization_classes(const std::vector<AnyBundle>& bundles, const ActionGroupoid& g,
                                        double eq_tol = Tolerances{}.eq_tol) {
  return classify_bundles(bundles, g, BundleRelation::LocallyIsomorphic, eq_tol);
}

/// Classes in the coarse moduli space, via fiberwise isomorphism (computed in
/// κ(Dπ₀(BG))(B), which injects into its sheafification).
inline Partition coarse_classes(const std::vector<AnyBundle>& bundles, const ActionGroupoid& g,
                                double eq_tol = Tolerances{}.eq_tol) {
  return classify_bundles(bundles, g, BundleRelation::FiberwiseIsomorphic, eq_tol);
}

}  // namespace diffeo
