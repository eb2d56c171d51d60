// Diffeological spaces given by finite generating families of plots, with
// witness-based plot membership, quotients, smooth maps and the D-topology.
#pragma once

#include "diffeo/euclid.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

namespace diffeo {

/// Carrier element: a continuous part plus a discrete tag.
struct Element {
  Vector value;
  int tag = 0;
};

/// Sup-distance on continuous parts; infinite when tags or shapes differ.
inline double element_distance(const Element& a, const Element& b) {
  if (a.tag != b.tag || a.value.size() != b.value.size())
    return std::numeric_limits<double>::infinity();
  return max_abs(Vector(a.value - b.value));
}

/// Underlying set of a space, identified by name, with its equality.
struct Carrier {
  using Distance = std::function<double(const Element&, const Element&)>;

  std::string name;
  Distance distance = element_distance;
  double eq_tol = Tolerances{}.eq_tol;

  bool eq(const Element& a, const Element& b) const { return distance(a, b) <= eq_tol; }
};

/// A parametrization of a carrier by an open Euclidean domain.
struct Plot {
  std::string name;
  Domain domain;
  std::string target;
  std::function<Element(const Vector&)> eval;

  Element operator()(const Vector& u) const { return eval(u); }
};

/// The plot u ↦ f(u) of a space whose elements are points of Euclidean space.
inline Plot plot_of(const SmoothEuclMap& f, std::string target) {
  auto fe = f.evaluator();
  return Plot{f.name(), f.domain(), std::move(target),
              [fe](const Vector& u) { return Element{fe(u), 0}; }};
}

inline Plot constant_plot(const Domain& d, Element value, std::string target) {
  return Plot{"const", d, std::move(target), [value](const Vector&) { return value; }};
}

/// p∘f for a smooth map f into p's domain.
inline Plot precompose(const Plot& p, const SmoothEuclMap& f) {
  auto pe = p.eval;
  auto fe = f.evaluator();
  return Plot{p.name + "∘" + f.name(), f.domain(), p.target,
              [pe, fe](const Vector& v) { return pe(fe(v)); }};
}

struct PlotWitness;

/// Witness piece kinds: the plot is constant on the piece, factors through a
/// generator via a smooth map, or (quotient spaces only) lifts through the
/// projection to a witnessed plot of the base space.
struct ConstantAt {
  Element value;
};
struct Factor {
  std::size_t generator;
  SmoothEuclMap map;
};
struct Lift {
  std::shared_ptr<const Plot> base_plot;
  std::shared_ptr<const PlotWitness> base_witness;
};
using WitnessPiece = std::variant<ConstantAt, Factor, Lift>;

/// Certificate that a parametrization belongs to a generated diffeology.
struct PlotWitness {
  OpenCover cover;
  std::vector<WitnessPiece> pieces;

  static PlotWitness single(const Domain& d, WitnessPiece piece) {
    return PlotWitness{OpenCover::trivial(d), {std::move(piece)}};
  }
};

/// A space together with a finite generating family of plots. Quotient
/// spaces keep their base so Lift witnesses can be checked there.
struct DiffeologicalSpace {
  std::string name;
  Carrier carrier;
  std::vector<Plot> generators;
  std::shared_ptr<const DiffeologicalSpace> base;
  std::string projection;

  bool is_quotient() const { return static_cast<bool>(base); }
};

/// Standard diffeology of an open domain, generated by its identity plot.
inline DiffeologicalSpace manifold_space(const Domain& d, double eq_tol = Tolerances{}.eq_tol) {
  Carrier carrier{"pts(" + d.name() + ")", element_distance, eq_tol};
  Plot id{"id_" + d.name(), d, carrier.name, [](const Vector& u) { return Element{u, 0}; }};
  return DiffeologicalSpace{d.name(), std::move(carrier), {std::move(id)}, nullptr, {}};
}

/// Witness for a smooth map into `manifold_space(d)`: a single Factor piece
/// through the identity generator.
inline PlotWitness identity_factor_witness(const SmoothEuclMap& p) {
  return PlotWitness::single(p.domain(), Factor{0, p});
}

/// Lift of `q` (a smooth map into the base's single domain generator) as a
/// witness for π∘q in a quotient of a manifold space.
inline PlotWitness lift_witness(const SmoothEuclMap& q, std::string base_target) {
  auto plot = std::make_shared<const Plot>(plot_of(q, std::move(base_target)));
  auto wit = std::make_shared<const PlotWitness>(identity_factor_witness(q));
  return PlotWitness::single(q.domain(), Lift{std::move(plot), std::move(wit)});
}

namespace detail {

/// Points at which a witness piece is checked: the piece's own samples plus
/// the parent samples falling inside it, restricted to the plot domain.
inline std::vector<Vector> piece_test_points(const Domain& piece, const Domain& parent) {
  std::vector<Vector> pts;
  for (const auto& u : piece.samples())
    if (parent.contains(u)) pts.push_back(u);
  for (const auto& u : parent.samples())
    if (piece.contains(u)) pts.push_back(u);
  return pts;
}

}  // namespace detail

/// Verifies a witness for `plot` in `space`: the cover must cover the plot's
/// domain and every piece must reproduce the plot within the carrier's eq_tol
/// at its test points.
inline Verdict verify_plot(const DiffeologicalSpace& space, const Plot& plot,
                           const PlotWitness& witness) {
  if (plot.target != space.carrier.name)
    throw Error(ErrorKind::InvalidArgument,
                "plot " + plot.name + " targets " + plot.target + ", not " + space.carrier.name);
  if (witness.cover.pieces.size() != witness.pieces.size())
    throw Error(ErrorKind::InvalidArgument, "witness has " + std::to_string(witness.pieces.size()) +
                                                " pieces for a cover of " +
                                                std::to_string(witness.cover.pieces.size()));
  const OpenCover cover{plot.domain, witness.cover.pieces};
  if (Verdict c = check_cover(cover); !c.passed()) {
    c.reason = "witness cover misses the domain of " + plot.name;
    return c;
  }

  double worst = 0.0;
  for (std::size_t i = 0; i < witness.pieces.size(); ++i) {
    const Domain& piece = cover.pieces[i];
    const WitnessPiece& wp = witness.pieces[i];
    if (const auto* lift = std::get_if<Lift>(&wp)) {
      if (!space.is_quotient())
        throw Error(ErrorKind::InvalidArgument, "lift witness on non-quotient space " + space.name);
      Verdict base = verify_plot(*space.base, *lift->base_plot, *lift->base_witness);
      if (!base.passed()) {
        base.reason = "lift does not verify in " + space.base->name + ": " + base.reason;
        return base.in_piece(i);
      }
    }
    if (const auto* f = std::get_if<Factor>(&wp)) {
      if (f->generator >= space.generators.size())
        throw Error(ErrorKind::InvalidArgument, "factor through unknown generator");
      if (f->map.codim() != space.generators[f->generator].domain.dim())
        throw Error(ErrorKind::DimensionMismatch,
                    "factor map " + f->map.name() + " does not land in the generator's dimension");
    }

    const auto pts = detail::piece_test_points(piece, plot.domain);
    for (std::size_t k = 0; k < pts.size(); ++k) {
      const Vector& u = pts[k];
      Element claimed;
      if (const auto* c = std::get_if<ConstantAt>(&wp)) {
        claimed = c->value;
      } else if (const auto* f = std::get_if<Factor>(&wp)) {
        if (!f->map.domain().contains(u))
          return Verdict::refuted("factor map undefined at test point").in_piece(i).at_sample(k).at(u);
        const Plot& gen = space.generators[f->generator];
        const Vector y = f->map(u);
        if (!gen.domain.contains(y))
          return Verdict::refuted("factor map leaves the domain of " + gen.name)
              .in_piece(i)
              .at_sample(k)
              .at(u);
        claimed = gen(y);
      } else {
        const auto& lift = std::get<Lift>(wp);
        if (!lift.base_plot->domain.contains(u))
          return Verdict::refuted("lift undefined at test point").in_piece(i).at_sample(k).at(u);
        claimed = (*lift.base_plot)(u);
      }
      const double dev = space.carrier.distance(plot(u), claimed);
      if (!(dev <= space.carrier.eq_tol))
        return Verdict::refuted("witness does not reproduce " + plot.name)
            .in_piece(i)
            .at_sample(k)
            .at(u)
            .with_deviation(dev);
      worst = std::max(worst, dev);
    }
  }
  return Verdict::pass().with_deviation(worst);
}

/// Witness obtained by restricting each piece of `w` to the pieces of a
/// refining cover; `parent_piece[j]` names the piece of `w` containing
/// refined piece j.
inline PlotWitness restrict_witness(const PlotWitness& w, const OpenCover& refining,
                                    const std::vector<std::size_t>& parent_piece) {
  if (parent_piece.size() != refining.pieces.size())
    throw Error(ErrorKind::InvalidArgument, "refinement map has wrong length");
  PlotWitness out{refining, {}};
  for (auto j : parent_piece) out.pieces.push_back(w.pieces.at(j));
  return out;
}

/// Witness for p∘f obtained by pulling every piece of a witness for p back
/// along f.
inline PlotWitness precompose(const PlotWitness& w, const SmoothEuclMap& f) {
  PlotWitness out{OpenCover{f.domain(), {}}, {}};
  for (std::size_t i = 0; i < w.pieces.size(); ++i) {
    const Domain piece = w.cover.pieces[i];
    auto fe = f.evaluator();
    out.cover.pieces.push_back(f.domain().restricted(
        f.domain().name() + "∩" + f.name() + "⁻¹(" + piece.name() + ")",
        [piece, fe](const Vector& v) { return piece.contains(fe(v)); }));
    std::visit(
        [&](const auto& wp) {
          using T = std::decay_t<decltype(wp)>;
          if constexpr (std::is_same_v<T, ConstantAt>) {
            out.pieces.emplace_back(wp);
          } else if constexpr (std::is_same_v<T, Factor>) {
            out.pieces.emplace_back(Factor{wp.generator, compose(wp.map, f)});
          } else {
            auto plot = std::make_shared<const Plot>(precompose(*wp.base_plot, f));
            auto wit = std::make_shared<const PlotWitness>(precompose(*wp.base_witness, f));
            out.pieces.emplace_back(Lift{std::move(plot), std::move(wit)});
          }
        },
        w.pieces[i]);
  }
  return out;
}

/// Quotient diffeology: same element representations, equality replaced by
/// the orbit relation, generators π∘g. `orbit_distance` must vanish (up to the
/// base eq_tol) exactly on related pairs. Sampled reflexivity, symmetry and
/// transitivity failures raise NotEquivalence.
inline DiffeologicalSpace quotient_by_distance(const DiffeologicalSpace& base,
                                               Carrier::Distance orbit_distance,
                                   const std::string& label,
                                   const std::vector<Element>& extra_test_elements = {}) {
  auto base_ptr = std::make_shared<const DiffeologicalSpace>(base);
  Carrier carrier{base.carrier.name + "/" + label, std::move(orbit_distance), base.carrier.eq_tol};

  std::vector<Element> tests = extra_test_elements;
  for (const auto& g : base.generators) {
    const auto& s = g.domain.samples();
    for (std::size_t i = 0; i < s.size() && i < 16; ++i) tests.push_back(g(s[i]));
  }
  if (tests.size() > 48) tests.resize(48);
  const std::size_t n = tests.size();
  std::vector<char> rel(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) rel[i * n + j] = carrier.eq(tests[i], tests[j]);
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!rel[i * n + i]) throw Error(ErrorKind::NotEquivalence, label + " is not reflexive");
    for (std::size_t j = 0; j < n; ++j) {
      if (rel[i * n + j] != rel[j * n + i])
        throw Error(ErrorKind::NotEquivalence, label + " is not symmetric");
      if (!rel[i * n + j]) continue;
      for (std::size_t k = 0; k < n; ++k) {
        if (rel[j * n + k] && !rel[i * n + k])
          throw Error(ErrorKind::NotEquivalence, label + " is not transitive");
      }
    }
  }

  DiffeologicalSpace q{base.name + "/" + label, carrier, {}, base_ptr, "π_" + label};
  for (const auto& g : base.generators) {
    q.generators.push_back(Plot{"π∘" + g.name, g.domain, carrier.name, g.eval});
  }
  return q;
}

inline DiffeologicalSpace quotient(const DiffeologicalSpace& base,
                                   std::function<bool(const Element&, const Element&)> orbit_eq,
                                   const std::string& label,
                                   const std::vector<Element>& extra_test_elements = {}) {
  return quotient_by_distance(
      base,
      [orbit_eq = std::move(orbit_eq)](const Element& a, const Element& b) {
        return orbit_eq(a, b) ? 0.0 : std::numeric_limits<double>::infinity();
      },
      label, extra_test_elements);
}

/// A plot of a space paired with its membership witness.
using WitnessedPlot = std::pair<Plot, PlotWitness>;

/// F is smooth if F∘p is a plot of Y for every probe p of X; each F∘p must be
/// certified by the matching entry of `witnesses_out`.
inline Verdict check_smooth_map(const std::function<Element(const Element&)>& F,
                                const DiffeologicalSpace& X, const DiffeologicalSpace& Y,
                                const std::vector<WitnessedPlot>& probes,
                                const std::vector<PlotWitness>& witnesses_out) {
  if (witnesses_out.size() < probes.size())
    throw Error(ErrorKind::MissingWitness, std::to_string(probes.size()) + " probes but " +
                                               std::to_string(witnesses_out.size()) + " witnesses");
  for (std::size_t k = 0; k < probes.size(); ++k) {
    const auto& [p, w] = probes[k];
    if (Verdict v = verify_plot(X, p, w); !v.passed()) {
      v.reason = "probe " + std::to_string(k) + " is not a plot of " + X.name + ": " + v.reason;
      return v;
    }
    auto pe = p.eval;
    Plot image{"F∘" + p.name, p.domain, Y.carrier.name,
               [pe, F](const Vector& u) { return F(pe(u)); }};
    if (Verdict v = verify_plot(Y, image, witnesses_out[k]); !v.passed()) {
      v.reason = "F∘probe " + std::to_string(k) + " is not a plot of " + Y.name + ": " + v.reason;
      return v;
    }
  }
  return Verdict::pass();
}

/// Semi-decides whether the set {indicator = true} is D-open: each probe's
/// preimage must contain a ladder radius of axis neighbors around every
/// domain sample it contains. Pass means "not refuted at radius 1e-4".
inline Verdict d_open(const DiffeologicalSpace& space,
                      const std::function<bool(const Element&)>& indicator,
                      const std::vector<WitnessedPlot>& probes) {
  for (std::size_t k = 0; k < probes.size(); ++k) {
    const auto& [p, w] = probes[k];
    if (Verdict v = verify_plot(space, p, w); !v.passed()) {
      v.reason = "probe " + std::to_string(k) + " does not verify: " + v.reason;
      return v;
    }
    const auto& samples = p.domain.samples();
    for (std::size_t i = 0; i < samples.size(); ++i) {
      const Vector& u = samples[i];
      if (!indicator(p(u))) continue;
      bool open = p.domain.dim() == 0;
      for (double r : kOpennessLadder) {
        if (open) break;
        bool all_in = true;
        for (int a = 0; a < p.domain.dim() && all_in; ++a) {
          for (double sgn : {-1.0, 1.0}) {
            Vector v = u;
            v(a) += sgn * r;
            if (!p.domain.contains(v) || !indicator(p(v))) {
              all_in = false;
              break;
            }
          }
        }
        open = all_in;
      }
      if (!open)
        return Verdict::refuted("preimage under probe " + p.name + " is not open at sample")
            .in_piece(k)
            .at_sample(i)
            .at(u);
    }
  }
  return Verdict::pass("not refuted at radius 1e-4");
}

}  // namespace diffeo
