// Action groupoids Γ×G₀ ⇉ G₀ for finite groups and the circle, their orbit
// spaces, pullbacks of the unit bundle t: G₁ → G₀, and the plots those
// bundles induce on the orbit space.
#pragma once

#include "diffeo/diffeology.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace diffeo {

/// Finite groups carry `index` into their table; circle elements carry `angle`.
struct GroupElement {
  int index = 0;
  double angle = 0.0;
};

class GroupModel {
 public:
  enum class Kind { Finite, Circle };

  /// Finite group from its multiplication table, table[a][b] = a·b.
  static GroupModel finite(std::string name, std::vector<std::vector<int>> table) {
    const int n = static_cast<int>(table.size());
    if (n == 0) throw Error(ErrorKind::InvalidArgument, "empty multiplication table for " + name);
    for (const auto& row : table) {
      if (static_cast<int>(row.size()) != n)
        throw Error(ErrorKind::InvalidArgument, "multiplication table of " + name + " is not square");
      for (int v : row)
        if (v < 0 || v >= n)
          throw Error(ErrorKind::InvalidArgument, "table entry out of range in " + name);
    }
    GroupModel g;
    g.kind_ = Kind::Finite;
    g.name_ = std::move(name);
    g.table_ = std::move(table);
    g.identity_ = -1;
    for (int e = 0; e < n && g.identity_ < 0; ++e) {
      bool ok = true;
      for (int x = 0; x < n && ok; ++x) ok = g.table_[e][x] == x && g.table_[x][e] == x;
      if (ok) g.identity_ = e;
    }
    if (g.identity_ < 0) throw Error(ErrorKind::InvalidArgument, "no identity in " + g.name_);
    g.inverse_.assign(n, -1);
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) {
        if (g.table_[a][b] == g.identity_ && g.table_[b][a] == g.identity_) g.inverse_[a] = b;
      }
      if (g.inverse_[a] < 0) throw Error(ErrorKind::InvalidArgument, "element without inverse in " + g.name_);
    }
    return g;
  }

  /// Z_n with index k standing for k mod n.
  static GroupModel cyclic(int n) {
    if (n < 1) throw Error(ErrorKind::InvalidArgument, "cyclic group order must be positive");
    std::vector<std::vector<int>> table(n, std::vector<int>(n));
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) table[a][b] = (a + b) % n;
    return finite("Z" + std::to_string(n), std::move(table));
  }

  /// SO(2) with composition of angles mod 2π; `grid` elements are tested.
  static GroupModel circle(int grid = 32) {
    GroupModel g;
    g.kind_ = Kind::Circle;
    g.name_ = "SO2";
    g.grid_ = grid;
    return g;
  }

  Kind kind() const { return kind_; }
  bool is_finite() const { return kind_ == Kind::Finite; }
  const std::string& name() const { return name_; }
  int order() const { return is_finite() ? static_cast<int>(table_.size()) : 0; }

  GroupElement identity() const { return is_finite() ? GroupElement{identity_, 0.0} : GroupElement{}; }

  GroupElement multiply(const GroupElement& a, const GroupElement& b) const {
    if (is_finite()) return GroupElement{table_.at(a.index).at(b.index), 0.0};
    return GroupElement{0, wrap(a.angle + b.angle)};
  }

  GroupElement inverse(const GroupElement& a) const {
    if (is_finite()) return GroupElement{inverse_.at(a.index), 0.0};
    return GroupElement{0, wrap(-a.angle)};
  }

  bool equal(const GroupElement& a, const GroupElement& b, double tol = 1e-12) const {
    if (is_finite()) return a.index == b.index;
    const double d = std::abs(wrap(a.angle - b.angle));
    return std::min(d, 2.0 * std::numbers::pi - d) <= tol;
  }

  /// All elements (finite) or the tested angle grid (circle).
  std::vector<GroupElement> elements() const {
    std::vector<GroupElement> out;
    if (is_finite()) {
      for (int i = 0; i < order(); ++i) out.push_back(GroupElement{i, 0.0});
    } else {
      for (int i = 0; i < grid_; ++i) out.push_back(GroupElement{0, 2.0 * std::numbers::pi * i / grid_});
    }
    return out;
  }

  std::string label(const GroupElement& a) const {
    if (is_finite()) return name_ + "[" + std::to_string(a.index) + "]";
    return name_ + "(" + std::to_string(a.angle) + ")";
  }

  /// Group axioms on the whole table, or on sampled triples for the circle.
  Verdict validate(double tol = 1e-12) const {
    const auto els = elements();
    for (const auto& a : els) {
      if (!equal(multiply(a, identity()), a, tol) || !equal(multiply(identity(), a), a, tol))
        return Verdict::refuted("identity law fails for " + label(a));
      if (!equal(multiply(a, inverse(a)), identity(), tol))
        return Verdict::refuted("inverse law fails for " + label(a));
      for (const auto& b : els)
        for (const auto& c : els)
          if (!equal(multiply(multiply(a, b), c), multiply(a, multiply(b, c)), tol))
            return Verdict::refuted("associativity fails at " + label(a) + "," + label(b) + "," + label(c));
    }
    return Verdict::pass();
  }

  static double wrap(double angle) {
    const double two_pi = 2.0 * std::numbers::pi;
    double r = std::fmod(angle, two_pi);
    if (r < 0) r += two_pi;
    return r;
  }

 private:
  GroupModel() = default;

  Kind kind_ = Kind::Finite;
  std::string name_;
  std::vector<std::vector<int>> table_;
  std::vector<int> inverse_;
  int identity_ = 0;
  int grid_ = 32;
};

/// The action groupoid G₁ = Γ×G₀ ⇉ G₀ with s(γ,x) = x and t(γ,x) = γ·x.
class ActionGroupoid {
 public:
  using Act = std::function<Vector(const GroupElement&, const Vector&)>;
  using ActJacobian = std::function<Matrix(const GroupElement&, const Vector&)>;
  using Invariant = std::function<Vector(const Vector&)>;

  struct Arrow {
    GroupElement g;
    Vector x;
  };

  ActionGroupoid(std::string name, GroupModel group, Domain space, Act act, ActJacobian jac = {},
                 Invariant invariant = {})
      : name_(std::move(name)), group_(std::move(group)), space_(std::move(space)),
        act_(std::move(act)), jac_(std::move(jac)), invariant_(std::move(invariant)) {}

  const std::string& name() const { return name_; }
  const GroupModel& group() const { return group_; }
  const Domain& space() const { return space_; }
  bool has_invariant() const { return static_cast<bool>(invariant_); }

  Vector act(const GroupElement& g, const Vector& x) const { return act_(g, x); }

  /// x ↦ γ·x as a smooth self-map of G₀, with analytic jacobian when known.
  SmoothEuclMap translation(const GroupElement& g) const {
    SmoothEuclMap::Jac jac;
    if (jac_) jac = [j = jac_, g](const Vector& x) { return j(g, x); };
    return SmoothEuclMap(name_ + "·" + group_.label(g), space_, space_.dim(),
                         [a = act_, g](const Vector& x) { return a(g, x); }, std::move(jac));
  }

  Vector source(const Arrow& a) const { return a.x; }
  Vector target(const Arrow& a) const { return act(a.g, a.x); }
  Arrow unit(const Vector& x) const { return Arrow{group_.identity(), x}; }
  Arrow inverse(const Arrow& a) const { return Arrow{group_.inverse(a.g), target(a)}; }

  /// second∘first, defined when s(second) = t(first).
  Arrow compose(const Arrow& second, const Arrow& first, double tol = Tolerances{}.eq_tol) const {
    if (max_abs(Vector(second.x - target(first))) > tol)
      throw Error(ErrorKind::InvalidArgument, "arrows are not composable");
    return Arrow{group_.multiply(second.g, first.g), first.x};
  }

  /// Distance from y to the orbit of x. Finite groups: exact minimum over Γ.
  /// Circle: the declared invariant when present, otherwise an angle-grid
  /// search refined by golden-section; ambiguous results raise
  /// OrbitEqUndecided.
  double orbit_distance(const Vector& x, const Vector& y, double eq_tol = Tolerances{}.eq_tol) const {
    if (x.size() != y.size()) return std::numeric_limits<double>::infinity();
    if (group_.is_finite()) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& g : group_.elements()) best = std::min(best, max_abs(Vector(act(g, x) - y)));
      return best;
    }
    if (invariant_) return max_abs(Vector(invariant_(x) - invariant_(y)));
    const auto grid = group_.elements();
    auto dist = [&](double th) { return max_abs(Vector(act(GroupElement{0, th}, x) - y)); };
    double best_angle = 0.0, best = std::numeric_limits<double>::infinity();
    for (const auto& g : grid) {
      const double d = dist(g.angle);
      if (d < best) best = d, best_angle = g.angle;
    }
    const double step = 2.0 * std::numbers::pi / static_cast<double>(grid.size());
    double lo = best_angle - step, hi = best_angle + step;
    const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = hi - phi * (hi - lo), d = lo + phi * (hi - lo);
    for (int it = 0; it < 200 && hi - lo > 1e-14; ++it) {
      if (dist(c) < dist(d)) {
        hi = d;
      } else {
        lo = c;
      }
      c = hi - phi * (hi - lo);
      d = lo + phi * (hi - lo);
    }
    best = std::min(best, dist(0.5 * (lo + hi)));
    if (best > eq_tol && best <= 1e3 * eq_tol)
      throw Error(ErrorKind::OrbitEqUndecided, "angle search inconclusive in " + name_);
    return best;
  }

  bool same_orbit(const Vector& x, const Vector& y, double eq_tol = Tolerances{}.eq_tol) const {
    return orbit_distance(x, y, eq_tol) <= eq_tol;
  }

  /// Group elements δ minimizing |δ·x − y|, provided that minimum is within
  /// eq_tol; ties are resolved at rounding resolution relative to |x|,|y|.
  /// More than one label means x is a non-free point (or y is off-orbit when
  /// empty). Finite groups only.
  std::vector<GroupElement> matching_labels(const Vector& x, const Vector& y,
                                            double eq_tol = Tolerances{}.eq_tol) const {
    if (!group_.is_finite()) throw Error(ErrorKind::InvalidArgument, "matching labels need a finite group");
    std::vector<std::pair<double, GroupElement>> d;
    double best = std::numeric_limits<double>::infinity();
    for (const auto& g : group_.elements()) {
      const double dev = max_abs(Vector(act(g, x) - y));
      d.emplace_back(dev, g);
      best = std::min(best, dev);
    }
    std::vector<GroupElement> out;
    if (best > eq_tol) return out;
    const double scale = std::max(max_abs(x), max_abs(y));
    const double tie = 64.0 * std::numeric_limits<double>::epsilon() * scale;
    for (const auto& [dev, g] : d)
      if (dev <= best + tie) out.push_back(g);
    return out;
  }

  /// Action laws and s∘u = t∘u = id at the space's samples.
  Verdict validate(double eq_tol = Tolerances{}.eq_tol) const {
    if (Verdict v = group_.validate(); !v.passed()) return v;
    const auto els = group_.elements();
    const auto& samples = space_.samples();
    for (std::size_t i = 0; i < samples.size(); ++i) {
      const Vector& x = samples[i];
      const Arrow u = unit(x);
      if (max_abs(Vector(source(u) - x)) > eq_tol || max_abs(Vector(target(u) - x)) > eq_tol)
        return Verdict::refuted("unit is not a section of s and t").at(x).at_sample(i);
      for (const auto& a : els) {
        for (const auto& b : els) {
          const double dev = max_abs(Vector(act(a, act(b, x)) - act(group_.multiply(a, b), x)));
          if (dev > eq_tol)
            return Verdict::refuted("action is not compatible with multiplication")
                .at(x)
                .at_sample(i)
                .with_deviation(dev);
        }
      }
    }
    return Verdict::pass();
  }

 private:
  std::string name_;
  GroupModel group_;
  Domain space_;
  Act act_;
  ActJacobian jac_;
  Invariant invariant_;
};

/// Z₂ acting on G₀ by x ↦ ±x (index 1 is the reflection).
inline ActionGroupoid reflection_action(const Domain& space) {
  const int n = space.dim();
  return ActionGroupoid(
      "reflection", GroupModel::cyclic(2), space,
      [](const GroupElement& g, const Vector& x) { return Vector(g.index == 1 ? Vector(-x) : x); },
      [n](const GroupElement& g, const Vector&) {
        return Matrix((g.index == 1 ? -1.0 : 1.0) * Matrix::Identity(n, n));
      });
}

namespace detail {
inline Matrix rotation_matrix(double angle) {
  Matrix r(2, 2);
  r << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
  return r;
}
}  // namespace detail

/// SO(2) rotating the plane, with the norm declared as orbit invariant.
inline ActionGroupoid rotation_action(const Domain& plane, bool declare_norm_invariant = true) {
  if (plane.dim() != 2) throw Error(ErrorKind::DimensionMismatch, "rotation acts on a 2-d domain");
  ActionGroupoid::Invariant inv;
  if (declare_norm_invariant) inv = [](const Vector& x) { return vec({x.norm()}); };
  return ActionGroupoid(
      "rotation", GroupModel::circle(), plane,
      [](const GroupElement& g, const Vector& x) { return Vector(detail::rotation_matrix(g.angle) * x); },
      [](const GroupElement& g, const Vector&) { return detail::rotation_matrix(g.angle); },
      std::move(inv));
}

/// Z_n acting on the plane by multiplication with the n-th roots of unity.
inline ActionGroupoid scaling_action(int n, const Domain& plane) {
  if (plane.dim() != 2) throw Error(ErrorKind::DimensionMismatch, "scaling acts on a 2-d domain");
  auto angle = [n](const GroupElement& g) { return 2.0 * std::numbers::pi * g.index / n; };
  return ActionGroupoid(
      "scaling", GroupModel::cyclic(n), plane,
      [angle](const GroupElement& g, const Vector& x) { return Vector(detail::rotation_matrix(angle(g)) * x); },
      [angle](const GroupElement& g, const Vector&) { return detail::rotation_matrix(angle(g)); });
}

/// Any group acting trivially; on the one-point space this is BΓ.
inline ActionGroupoid trivial_action(GroupModel group, const Domain& space) {
  const int n = space.dim();
  return ActionGroupoid(
      "trivial", std::move(group), space, [](const GroupElement&, const Vector& x) { return x; },
      [n](const GroupElement&, const Vector&) { return Matrix(Matrix::Identity(n, n)); });
}

inline std::string orbit_label(const ActionGroupoid& g) { return g.name(); }

/// G₀/G₁ with the quotient diffeology of the manifold space G₀.
inline DiffeologicalSpace orbit_space(const ActionGroupoid& g, double eq_tol = Tolerances{}.eq_tol) {
  DiffeologicalSpace base = manifold_space(g.space(), eq_tol);
  std::vector<Element> tests;
  const auto& samples = g.space().samples();
  const auto els = g.group().elements();
  for (std::size_t i = 0; i < samples.size() && i < 6; ++i) {
    for (std::size_t k = 0; k < els.size(); k += std::max<std::size_t>(1, els.size() / 4)) {
      const Vector y = g.act(els[k], samples[i]);
      if (g.space().contains(y)) tests.push_back(Element{y, 0});
    }
  }
  return quotient_by_distance(
      base,
      [g, eq_tol](const Element& a, const Element& b) {
        if (a.tag != b.tag) return std::numeric_limits<double>::infinity();
        return g.orbit_distance(a.value, b.value, eq_tol);
      },
      orbit_label(g), tests);
}

/// Point (b, γ, x) of a pullback of the unit bundle: q(b) = γ·x.
struct TotalPoint {
  Vector base;
  GroupElement g;
  Vector x;
};

/// A section b ↦ (γ(b), x(b)) of a pullback bundle. `anchor_map`, when
/// present, is b ↦ x(b) as a smooth map (used for lifts with jacobians).
struct BundleSection {
  std::string name;
  std::function<GroupElement(const Vector&)> label;
  std::function<Vector(const Vector&)> anchor;
  std::optional<SmoothEuclMap> anchor_map;
};

/// Pullback q*(t: G₁ → G₀) of the unit bundle along a classifying map
/// q: B → G₀. ρ(b,γ,x) = b, α(b,γ,x) = x, and Γ acts on the right by
/// (b,γ,x)·δ = (b, γδ, δ⁻¹x).
class PrincipalBundle {
 public:
  PrincipalBundle(std::string name, SmoothEuclMap classifying, std::vector<Vector> special_points = {})
      : name_(std::move(name)), q_(std::move(classifying)), special_(std::move(special_points)) {}

  const std::string& name() const { return name_; }
  const Domain& base() const { return q_.domain(); }
  const SmoothEuclMap& classifying() const { return q_; }
  const std::vector<Vector>& special_points() const { return special_; }

  Vector rho(const TotalPoint& p) const { return p.base; }
  Vector anchor(const TotalPoint& p) const { return p.x; }

  bool contains(const ActionGroupoid& g, const TotalPoint& p, double eq_tol = Tolerances{}.eq_tol) const {
    return base().contains(p.base) && g.space().contains(p.x) &&
           max_abs(Vector(q_(p.base) - g.act(p.g, p.x))) <= eq_tol;
  }

  TotalPoint act_right(const ActionGroupoid& g, const TotalPoint& p, const GroupElement& d) const {
    return TotalPoint{p.base, g.group().multiply(p.g, d), g.act(g.group().inverse(d), p.x)};
  }

  /// σ(b) = (b, e, q(b)).
  BundleSection canonical_section() const {
    auto qe = q_.evaluator();
    return BundleSection{"canonical", [](const Vector&) { return GroupElement{}; }, qe, q_};
  }

 private:
  std::string name_;
  SmoothEuclMap q_;
  std::vector<Vector> special_;
};

/// Finite Γ-set (or circle descriptor) sitting over one base point.
struct FiberDescriptor {
  Vector base;
  bool finite = true;
  std::vector<TotalPoint> points;  // finite groups
  Vector orbit_point;              // circle: anchor at the identity label
  bool full_stabilizer = false;    // circle: the anchor orbit is a fixed point
};

/// Fiber of a pullback bundle over b. Finite groups enumerate
/// {(γ, γ⁻¹q(b))}; circle fibers are described by q(b) and its stabilizer.
inline FiberDescriptor fiber(const PrincipalBundle& P, const ActionGroupoid& g, const Vector& b,
                             double eq_tol = Tolerances{}.eq_tol) {
  FiberDescriptor f;
  f.base = b;
  const Vector qb = P.classifying()(b);
  if (!g.space().contains(qb))
    throw Error(ErrorKind::EmptyFiber, P.name() + " has an empty fiber: q(b) leaves " + g.space().name());
  if (g.group().is_finite()) {
    for (const auto& gamma : g.group().elements()) {
      const Vector x = g.act(g.group().inverse(gamma), qb);
      TotalPoint p{b, gamma, x};
      if (P.contains(g, p, eq_tol)) f.points.push_back(std::move(p));
    }
    if (f.points.empty()) throw Error(ErrorKind::EmptyFiber, P.name() + " has an empty fiber");
  } else {
    f.finite = false;
    f.orbit_point = qb;
    f.full_stabilizer = true;
    for (const auto& gamma : g.group().elements()) {
      if (max_abs(Vector(g.act(gamma, qb) - qb)) > eq_tol) {
        f.full_stabilizer = false;
        break;
      }
    }
  }
  return f;
}

/// q*(t) for q: B → G₀. Every base sample must have a nonempty fiber; finite
/// fibers must have |Γ| points.
inline PrincipalBundle pullback_unit_bundle(const ActionGroupoid& g, const SmoothEuclMap& q,
                                            std::string name = {},
                                            std::vector<Vector> special_points = {},
                                            double eq_tol = Tolerances{}.eq_tol) {
  if (q.codim() != g.space().dim())
    throw Error(ErrorKind::DimensionMismatch, q.name() + " does not map into " + g.space().name());
  PrincipalBundle P(name.empty() ? q.name() + "*t" : std::move(name), q, std::move(special_points));
  for (const auto& b : q.domain().samples()) {
    const FiberDescriptor f = fiber(P, g, b, eq_tol);
    if (f.finite && static_cast<int>(f.points.size()) != g.group().order())
      throw Error(ErrorKind::EmptyFiber, P.name() + " fiber has " + std::to_string(f.points.size()) +
                                             " points instead of |Γ|; is G₀ invariant?");
  }
  return P;
}

/// The section b ↦ σ(b)·δ of a pullback bundle.
inline BundleSection translated_section(const PrincipalBundle& P, const ActionGroupoid& g,
                                        const GroupElement& d) {
  auto qe = P.classifying().evaluator();
  const GroupElement dinv = g.group().inverse(d);
  std::optional<SmoothEuclMap> anchor_map = compose(g.translation(dinv), P.classifying());
  return BundleSection{"canonical·" + g.group().label(d), [d](const Vector&) { return d; },
                       [qe, g, dinv](const Vector& b) { return g.act(dinv, qe(b)); },
                       std::move(anchor_map)};
}

/// The plot b ↦ π_G(α(σ(b))) on the orbit space, witnessed by the lift
/// α∘σ through π_G. Sections that leave the total space raise NoSection.
inline WitnessedPlot plot_from_bundle(const PrincipalBundle& P, const ActionGroupoid& g,
                                      const std::optional<BundleSection>& section = std::nullopt,
                                      double eq_tol = Tolerances{}.eq_tol) {
  const BundleSection sigma = section.value_or(P.canonical_section());
  for (const auto& b : P.base().samples()) {
    if (!P.contains(g, TotalPoint{b, sigma.label(b), sigma.anchor(b)}, eq_tol))
      throw Error(ErrorKind::NoSection, "section " + sigma.name + " of " + P.name() +
                                            " leaves the total space");
  }
  SmoothEuclMap lift = sigma.anchor_map
                           ? sigma.anchor_map->renamed("α∘" + sigma.name)
                           : SmoothEuclMap("α∘" + sigma.name, P.base(), g.space().dim(), sigma.anchor);
  const std::string target = manifold_space(g.space(), eq_tol).carrier.name + "/" + orbit_label(g);
  Plot plot{"π∘α∘" + sigma.name + "(" + P.name() + ")", P.base(), target,
            [a = sigma.anchor](const Vector& b) { return Element{a(b), 0}; }};
  const std::string base_target = manifold_space(g.space(), eq_tol).carrier.name;
  return {std::move(plot), lift_witness(lift, base_target)};
}

/// π_G∘α∘σ₁ = π_G∘α∘σ₂ at every base sample. Sections are not validated, so
/// a malformed σ₂ shows up as a refutation.
inline Verdict section_independence(const PrincipalBundle& P, const ActionGroupoid& g,
                                    const BundleSection& s1, const BundleSection& s2,
                                    double eq_tol = Tolerances{}.eq_tol) {
  const auto& samples = P.base().samples();
  double worst = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double d = g.orbit_distance(s1.anchor(samples[i]), s2.anchor(samples[i]), eq_tol);
    if (!(d <= eq_tol))
      return Verdict::refuted("sections " + s1.name + " and " + s2.name + " induce different orbits")
          .at(samples[i])
          .at_sample(i)
          .with_deviation(d);
    worst = std::max(worst, d);
  }
  return Verdict::pass().with_deviation(worst);
}

/// Every generator π∘g of the orbit space is recovered, sample by sample, by
/// pulling back the unit bundle along g and taking the induced plot.
inline Verdict generator_roundtrip(const ActionGroupoid& g, double eq_tol = Tolerances{}.eq_tol) {
  const DiffeologicalSpace X = orbit_space(g, eq_tol);
  for (std::size_t k = 0; k < X.generators.size(); ++k) {
    const Plot& gen = X.generators[k];
    const PrincipalBundle P = pullback_unit_bundle(g, identity_map(gen.domain), "unit*", {}, eq_tol);
    const auto [plot, witness] = plot_from_bundle(P, g, std::nullopt, eq_tol);
    if (Verdict v = verify_plot(X, plot, witness); !v.passed()) return v.in_piece(k);
    const auto& samples = gen.domain.samples();
    for (std::size_t i = 0; i < samples.size(); ++i) {
      const double d = X.carrier.distance(plot(samples[i]), gen(samples[i]));
      if (!(d <= eq_tol))
        return Verdict::refuted("bundle-induced plot differs from generator " + gen.name)
            .in_piece(k)
            .at_sample(i)
            .at(samples[i])
            .with_deviation(d);
    }
  }
  return Verdict::pass();
}

}  // namespace diffeo
