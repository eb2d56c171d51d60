// Open Euclidean domains, smooth maps between them, central-difference
// jacobians and finite open covers.
#pragma once

#include "diffeo/core.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <random>
#include <string>
#include <vector>

namespace diffeo {

struct SampleConfig {
  std::size_t count = 64;
  std::uint64_t seed = 0;
};

/// Closed bounding box; domains live in the open interior.
struct Box {
  Vector lo;
  Vector hi;

  int dim() const { return static_cast<int>(lo.size()); }
  bool strictly_contains(const Vector& x) const {
    return ((x.array() > lo.array()) && (x.array() < hi.array())).all();
  }
  Vector center() const { return 0.5 * (lo + hi); }
  double min_extent() const { return dim() == 0 ? 0.0 : (hi - lo).minCoeff(); }
  double volume() const { return dim() == 0 ? 1.0 : (hi - lo).prod(); }
};

using Predicate = std::function<bool(const Vector&)>;

namespace detail {

inline double radical_inverse(std::uint64_t k, unsigned base) {
  double inv = 1.0 / base, f = inv, r = 0.0;
  while (k > 0) {
    r += f * static_cast<double>(k % base);
    k /= base;
    f *= inv;
  }
  return r;
}

inline constexpr std::array<unsigned, 8> kHaltonBases = {2, 3, 5, 7, 11, 13, 17, 19};

}  // namespace detail

/// A finite disjoint union of open boxes, optionally cut down by a membership
/// predicate, with a deterministic list of interior sample points.
///
/// Samples: the center of every box first, then a seeded, jittered Halton
/// sequence scaled into the box with a relative margin of 1e-3 so that
/// central-difference stencils stay inside. Dimension 0 is the one-point
/// space with the single sample `Vector(0)`.
class Domain {
 public:
  Domain() : Domain(point()) {}

  static Domain point(std::string name = "*") {
    return Domain(std::move(name), 0, {Box{Vector(0), Vector(0)}}, {}, {});
  }

  static Domain box(std::string name, Vector lo, Vector hi, Predicate pred = {},
                    SampleConfig cfg = {}) {
    const int dim = static_cast<int>(lo.size());
    return Domain(std::move(name), dim, {Box{std::move(lo), std::move(hi)}}, std::move(pred), cfg);
  }

  static Domain interval(std::string name, double lo, double hi, SampleConfig cfg = {}) {
    return box(std::move(name), vec({lo}), vec({hi}), {}, cfg);
  }

  static Domain disjoint_union(std::string name, std::vector<Box> boxes, Predicate pred = {},
                               SampleConfig cfg = {}) {
    if (boxes.empty()) throw Error(ErrorKind::InvalidArgument, "domain needs at least one box");
    const int dim = boxes.front().dim();
    return Domain(std::move(name), dim, std::move(boxes), std::move(pred), cfg);
  }

  const std::string& name() const { return state_->name; }
  int dim() const { return state_->dim; }
  const std::vector<Box>& boxes() const { return state_->boxes; }
  const std::vector<Vector>& samples() const { return state_->samples; }
  const SampleConfig& sample_config() const { return state_->config; }
  bool has_predicate() const { return static_cast<bool>(state_->pred); }

  bool contains(const Vector& x) const {
    if (x.size() != dim()) return false;
    if (dim() == 0) return true;
    if (!x.allFinite()) return false;
    for (const auto& b : state_->boxes) {
      if (b.strictly_contains(x)) return !state_->pred || state_->pred(x);
    }
    return false;
  }

  /// Index of the box containing x, or -1.
  int component_of(const Vector& x) const {
    for (std::size_t i = 0; i < state_->boxes.size(); ++i) {
      if (state_->boxes[i].strictly_contains(x)) return static_cast<int>(i);
    }
    return -1;
  }

  double min_extent() const {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& b : state_->boxes) m = std::min(m, b.min_extent());
    return m;
  }

  /// Same ambient boxes, membership additionally restricted by `extra`.
  Domain restricted(std::string name, Predicate extra) const {
    Predicate base = state_->pred;
    Predicate both = [base, extra = std::move(extra)](const Vector& x) {
      return (!base || base(x)) && extra(x);
    };
    return Domain(std::move(name), dim(), state_->boxes, std::move(both), state_->config);
  }

  Domain with_samples(SampleConfig cfg) const {
    return Domain(name(), dim(), state_->boxes, state_->pred, cfg);
  }

  /// Two domains are the same object when they share state.
  bool same_as(const Domain& other) const { return state_ == other.state_; }

 private:
  struct State {
    std::string name;
    int dim = 0;
    std::vector<Box> boxes;
    Predicate pred;
    SampleConfig config;
    std::vector<Vector> samples;
  };

  Domain(std::string name, int dim, std::vector<Box> boxes, Predicate pred, SampleConfig cfg) {
    auto s = std::make_shared<State>();
    s->name = std::move(name);
    s->dim = dim;
    s->boxes = std::move(boxes);
    s->pred = std::move(pred);
    s->config = cfg;
    for (const auto& b : s->boxes) {
      if (b.dim() != dim || b.hi.size() != dim)
        throw Error(ErrorKind::DimensionMismatch, "box dimension differs in domain " + s->name);
      if (dim > 0 && !((b.lo.array() < b.hi.array()).all() && b.lo.allFinite() && b.hi.allFinite()))
        throw Error(ErrorKind::InvalidArgument, "degenerate or non-finite box in domain " + s->name);
    }
    if (dim > static_cast<int>(detail::kHaltonBases.size()))
      throw Error(ErrorKind::InvalidArgument, "domains above dimension 8 are not supported");
    generate_samples(*s);
    state_ = std::move(s);
  }

  static void generate_samples(State& s) {
    if (s.dim == 0) {
      s.samples = {Vector(0)};
      return;
    }
    double total = 0.0;
    for (const auto& b : s.boxes) total += b.volume();
    const std::size_t count = std::max<std::size_t>(s.config.count, s.boxes.size());
    std::vector<std::size_t> quota(s.boxes.size(), 1);
    std::size_t assigned = 0;
    for (std::size_t i = 0; i < s.boxes.size(); ++i) {
      const double share = static_cast<double>(count) * s.boxes[i].volume() / total;
      quota[i] = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(share)));
      assigned += quota[i];
    }
    for (std::size_t i = 0; assigned < count; i = (i + 1) % quota.size(), ++assigned) ++quota[i];

    std::mt19937_64 rng(s.config.seed);
    auto member = [&s](const Vector& x) { return !s.pred || s.pred(x); };
    constexpr double kMargin = 1e-3;
    for (std::size_t bi = 0; bi < s.boxes.size(); ++bi) {
      const Box& b = s.boxes[bi];
      const Vector extent = b.hi - b.lo;
      const double n = static_cast<double>(quota[bi]);
      std::size_t taken = 0;
      if (member(b.center())) {
        s.samples.push_back(b.center());
        ++taken;
      }
      const std::size_t max_attempts = 64 * quota[bi] + 1024;
      for (std::uint64_t k = 1; taken < quota[bi] && k <= max_attempts; ++k) {
        Vector x(s.dim);
        for (int a = 0; a < s.dim; ++a) {
          const double h = detail::radical_inverse(k, detail::kHaltonBases[a]);
          const double jitter = (unit_uniform(rng) - 0.5) * 0.5 / n;
          const double t = std::clamp(h + jitter, kMargin, 1.0 - kMargin);
          x(a) = b.lo(a) + t * extent(a);
        }
        if (!b.strictly_contains(x) || !member(x)) continue;
        s.samples.push_back(std::move(x));
        ++taken;
      }
    }
  }

  std::shared_ptr<const State> state_;
};

/// Semi-decided openness at x: some radius of the ladder has all 2*dim axis
/// neighbors inside the domain.
inline bool open_at(const Domain& d, const Vector& x) {
  if (d.dim() == 0) return true;
  for (double r : kOpennessLadder) {
    bool all_in = true;
    for (int a = 0; a < d.dim() && all_in; ++a) {
      for (double sgn : {-1.0, 1.0}) {
        Vector y = x;
        y(a) += sgn * r;
        if (!d.contains(y)) {
          all_in = false;
          break;
        }
      }
    }
    if (all_in) return true;
  }
  return false;
}

/// Checks the domain's own invariants: samples are members and membership is
/// open at every sample at the tested resolution.
inline Verdict check_domain(const Domain& d) {
  for (std::size_t i = 0; i < d.samples().size(); ++i) {
    const Vector& x = d.samples()[i];
    if (!d.contains(x)) return Verdict::refuted("sample outside domain").at(x).at_sample(i);
    if (!open_at(d, x)) return Verdict::refuted("membership not open at sample").at(x).at_sample(i);
  }
  return Verdict::pass();
}

/// A smooth map from an open domain into R^codim, with an optional analytic
/// jacobian (codim x dim).
class SmoothEuclMap {
 public:
  using Eval = std::function<Vector(const Vector&)>;
  using Jac = std::function<Matrix(const Vector&)>;

  SmoothEuclMap(std::string name, Domain domain, int codim, Eval eval, Jac jac = {})
      : name_(std::move(name)), domain_(std::move(domain)), codim_(codim), eval_(std::move(eval)),
        jac_(std::move(jac)) {
    if (codim_ < 0) throw Error(ErrorKind::InvalidArgument, "negative codimension for " + name_);
  }

  const std::string& name() const { return name_; }
  const Domain& domain() const { return domain_; }
  int dim() const { return domain_.dim(); }
  int codim() const { return codim_; }
  bool has_jacobian() const { return static_cast<bool>(jac_); }

  Vector operator()(const Vector& x) const { return eval_(x); }

  Matrix jacobian(const Vector& x) const {
    if (!jac_) throw Error(ErrorKind::InvalidArgument, "no analytic jacobian for " + name_);
    return jac_(x);
  }

  const Eval& evaluator() const { return eval_; }
  const Jac& jacobian_evaluator() const { return jac_; }

  SmoothEuclMap restricted_to(Domain sub) const {
    return SmoothEuclMap(name_ + "|" + sub.name(), std::move(sub), codim_, eval_, jac_);
  }

  SmoothEuclMap renamed(std::string name) const {
    SmoothEuclMap m = *this;
    m.name_ = std::move(name);
    return m;
  }

  SmoothEuclMap without_jacobian() const {
    return SmoothEuclMap(name_, domain_, codim_, eval_, {});
  }

 private:
  std::string name_;
  Domain domain_;
  int codim_;
  Eval eval_;
  Jac jac_;
};

/// Central-difference jacobian of f at x with step h.
inline Matrix fd_jacobian(const SmoothEuclMap& f, const Vector& x, double h) {
  const Domain& d = f.domain();
  if (d.dim() > 0 && !(h > 0.0 && h < d.min_extent() / 4.0))
    throw Error(ErrorKind::InvalidArgument, "fd step must lie in (0, min extent / 4)");
  if (!d.contains(x)) throw Error(ErrorKind::PointOutsideDomain, "fd base point outside " + d.name());
  Matrix jac(f.codim(), d.dim());
  for (int j = 0; j < d.dim(); ++j) {
    Vector xp = x, xm = x;
    xp(j) += h;
    xm(j) -= h;
    if (!d.contains(xp) || !d.contains(xm))
      throw Error(ErrorKind::PointOutsideDomain, "fd stencil leaves " + d.name() + "; shrink h");
    const Vector fp = f(xp), fm = f(xm);
    if (!fp.allFinite() || !fm.allFinite())
      throw Error(ErrorKind::NonFiniteValue, "non-finite value of " + f.name());
    jac.col(j) = (fp - fm) / (2.0 * h);
  }
  return jac;
}

/// Analytic jacobian when available, central differences otherwise.
inline Matrix jacobian(const SmoothEuclMap& f, const Vector& x, const Tolerances& tol = {}) {
  if (f.has_jacobian()) return f.jacobian(x);
  return fd_jacobian(f, x, tol.fd_step);
}

/// Compares the analytic jacobian with central differences at every sample.
inline Verdict check_jacobian(const SmoothEuclMap& f, const Tolerances& tol = {}) {
  if (!f.has_jacobian()) return Verdict::unknown("no analytic jacobian for " + f.name());
  const auto& samples = f.domain().samples();
  double worst = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double dev = max_abs(Matrix(fd_jacobian(f, samples[i], tol.fd_step) - f.jacobian(samples[i])));
    worst = std::max(worst, dev);
    if (dev > tol.fd_tol)
      return Verdict::refuted("fd jacobian deviates from analytic jacobian of " + f.name())
          .at(samples[i])
          .at_sample(i)
          .with_deviation(dev);
  }
  return Verdict::pass().with_deviation(worst);
}

inline SmoothEuclMap identity_map(const Domain& d) {
  const int n = d.dim();
  return SmoothEuclMap("id_" + d.name(), d, n, [](const Vector& x) { return x; },
                       [n](const Vector&) { return Matrix(Matrix::Identity(n, n)); });
}

inline SmoothEuclMap constant_map(const Domain& d, Vector value, std::string name = "const") {
  const int n = d.dim();
  const int m = static_cast<int>(value.size());
  return SmoothEuclMap(std::move(name), d, m, [value](const Vector&) { return value; },
                       [n, m](const Vector&) { return Matrix(Matrix::Zero(m, n)); });
}

/// Inclusion of `sub` into an ambient space of the same dimension.
inline SmoothEuclMap inclusion_map(const Domain& sub, const Domain& parent) {
  if (sub.dim() != parent.dim())
    throw Error(ErrorKind::DimensionMismatch, "inclusion between different dimensions");
  return identity_map(sub).renamed("incl_" + sub.name() + "_" + parent.name());
}

/// g∘f; the analytic jacobian follows the chain rule when both factors have one.
inline SmoothEuclMap compose(const SmoothEuclMap& g, const SmoothEuclMap& f) {
  if (f.codim() != g.dim())
    throw Error(ErrorKind::DimensionMismatch, "cannot compose " + g.name() + " after " + f.name());
  auto ge = g.evaluator();
  auto fe = f.evaluator();
  SmoothEuclMap::Jac jac;
  if (f.has_jacobian() && g.has_jacobian()) {
    jac = [ge, fe, gj = g.jacobian_evaluator(), fj = f.jacobian_evaluator()](const Vector& x) {
      return Matrix(gj(fe(x)) * fj(x));
    };
  }
  return SmoothEuclMap(g.name() + "∘" + f.name(), f.domain(), g.codim(),
                       [ge, fe](const Vector& x) { return ge(fe(x)); }, std::move(jac));
}

/// a·f + b·g over f's domain.
inline SmoothEuclMap linear_combination(double a, const SmoothEuclMap& f, double b,
                                        const SmoothEuclMap& g) {
  if (f.codim() != g.codim() || f.dim() != g.dim())
    throw Error(ErrorKind::DimensionMismatch, "linear combination of incompatible maps");
  SmoothEuclMap::Jac jac;
  if (f.has_jacobian() && g.has_jacobian()) {
    jac = [a, b, fj = f.jacobian_evaluator(), gj = g.jacobian_evaluator()](const Vector& x) {
      return Matrix(a * fj(x) + b * gj(x));
    };
  }
  return SmoothEuclMap(
      "lincomb(" + f.name() + "," + g.name() + ")", f.domain(), f.codim(),
      [a, b, fe = f.evaluator(), ge = g.evaluator()](const Vector& x) {
        return Vector(a * fe(x) + b * ge(x));
      },
      std::move(jac));
}

/// Whether f sends every sample of its domain into `target`.
inline Verdict maps_into(const SmoothEuclMap& f, const Domain& target) {
  if (f.codim() != target.dim())
    throw Error(ErrorKind::DimensionMismatch, f.name() + " does not land in dimension of " + target.name());
  const auto& samples = f.domain().samples();
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (!target.contains(f(samples[i])))
      return Verdict::refuted(f.name() + " leaves " + target.name()).at(samples[i]).at_sample(i);
  }
  return Verdict::pass();
}

/// Finite open cover of a parent domain by subdomains of the same ambient
/// space; the inclusion of each piece is the identity on coordinates.
struct OpenCover {
  Domain parent;
  std::vector<Domain> pieces;

  SmoothEuclMap inclusion(std::size_t i) const { return inclusion_map(pieces.at(i), parent); }

  /// Cover by the parent itself.
  static OpenCover trivial(const Domain& d) { return OpenCover{d, {d}}; }
};

/// Pass if every parent sample lies in some piece. A refutation reports the
/// uncovered sample closest to the centroid of all uncovered samples, which
/// sits in the middle of the largest gap for interval covers.
inline Verdict check_cover(const OpenCover& cover) {
  for (const auto& p : cover.pieces) {
    if (p.dim() != cover.parent.dim())
      throw Error(ErrorKind::DimensionMismatch, "cover piece " + p.name() + " has wrong dimension");
  }
  std::vector<std::size_t> uncovered;
  const auto& samples = cover.parent.samples();
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const bool hit = std::any_of(cover.pieces.begin(), cover.pieces.end(),
                                 [&](const Domain& p) { return p.contains(samples[i]); });
    if (!hit) uncovered.push_back(i);
  }
  if (uncovered.empty()) return Verdict::pass();
  Vector centroid = Vector::Zero(cover.parent.dim());
  for (auto i : uncovered) centroid += samples[i];
  centroid /= static_cast<double>(uncovered.size());
  std::size_t best = uncovered.front();
  for (auto i : uncovered) {
    if ((samples[i] - centroid).norm() < (samples[best] - centroid).norm()) best = i;
  }
  return Verdict::refuted("sample not covered by any piece").at(samples[best]).at_sample(best);
}

}  // namespace diffeo
