// Euclidean k-forms, pullback, diffeological forms assembled along plot
// witnesses, and basic forms on action groupoids.
#pragma once

#include "diffeo/groupoid.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <memory>
#include <numbers>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

namespace diffeo {

inline int binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return static_cast<int>(r);
}

/// Increasing multi-indices of length k in {0..n-1}, lexicographic.
inline std::vector<std::vector<int>> multi_indices(int n, int k) {
  std::vector<std::vector<int>> out;
  if (k < 0 || k > n) return out;
  std::vector<int> idx(static_cast<std::size_t>(k));
  std::iota(idx.begin(), idx.end(), 0);
  while (true) {
    out.push_back(idx);
    int i = k - 1;
    while (i >= 0 && idx[i] == n - k + i) --i;
    if (i < 0) break;
    ++idx[i];
    for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
  return out;
}

/// ω = Σ_I ω_I dx_I over increasing multi-indices I, coefficients in
/// multi_indices order.
class EuclForm {
 public:
  using Coeffs = std::function<Vector(const Vector&)>;

  EuclForm(std::string name, Domain domain, int degree, Coeffs coeffs)
      : name_(std::move(name)), domain_(std::move(domain)), degree_(degree), coeffs_(std::move(coeffs)) {
    if (degree_ < 0) throw Error(ErrorKind::InvalidArgument, "form degree must be non-negative");
  }

  static EuclForm zero(const Domain& d, int degree) {
    const int n = binomial(d.dim(), degree);
    return EuclForm("0", d, degree, [n](const Vector&) { return Vector(Vector::Zero(n)); });
  }

  const std::string& name() const { return name_; }
  const Domain& domain() const { return domain_; }
  int dim() const { return domain_.dim(); }
  int degree() const { return degree_; }
  int count() const { return binomial(dim(), degree_); }
  const Coeffs& evaluator() const { return coeffs_; }

  Vector operator()(const Vector& x) const {
    Vector c = coeffs_(x);
    if (c.size() != count())
      throw Error(ErrorKind::DimensionMismatch, name_ + " returned " + std::to_string(c.size()) +
                                                    " coefficients instead of " + std::to_string(count()));
    if (!c.allFinite()) throw Error(ErrorKind::NonFiniteValue, name_ + " has a non-finite coefficient");
    return c;
  }

  EuclForm renamed(std::string name) const {
    EuclForm f = *this;
    f.name_ = std::move(name);
    return f;
  }

  EuclForm restricted_to(Domain sub) const {
    EuclForm f = *this;
    f.domain_ = std::move(sub);
    return f;
  }

 private:
  std::string name_;
  Domain domain_;
  int degree_;
  Coeffs coeffs_;
};

/// Coefficients of f*ω at u: (f*ω)_I = Σ_J ω_J(f(u)) det(Df(u)[J, I]).
inline Vector pullback_at(const SmoothEuclMap& f, const EuclForm& w, const Vector& u, const Tolerances& tol = {}) {
  const int k = w.degree();
  const int n = f.dim();
  const Vector c = w(f(u));
  if (k == 0) return c;
  const auto src = multi_indices(n, k);
  Vector out = Vector::Zero(static_cast<Eigen::Index>(src.size()));
  if (src.empty()) return out;
  const Matrix J = jacobian(f, u, tol);
  const auto tgt = multi_indices(w.dim(), k);
  Matrix minor(k, k);
  for (std::size_t a = 0; a < src.size(); ++a) {
    double s = 0.0;
    for (std::size_t b = 0; b < tgt.size(); ++b) {
      if (c(static_cast<Eigen::Index>(b)) == 0.0) continue;
      for (int r = 0; r < k; ++r)
        for (int q = 0; q < k; ++q) minor(r, q) = J(tgt[b][r], src[a][q]);
      s += c(static_cast<Eigen::Index>(b)) * minor.determinant();
    }
    out(static_cast<Eigen::Index>(a)) = s;
  }
  return out;
}

/// f*ω; a degree above dim(source) gives the zero form (no coefficients).
inline EuclForm pullback(const SmoothEuclMap& f, const EuclForm& w, const Tolerances& tol = {}) {
  if (f.codim() != w.dim())
    throw Error(ErrorKind::DimensionMismatch, f.name() + " does not land in the domain of " + w.name());
  if (Verdict v = maps_into(f, w.domain()); !v.passed())
    throw Error(ErrorKind::PointOutsideDomain, f.name() + " leaves " + w.domain().name());
  return EuclForm(f.name() + "*" + w.name(), f.domain(), w.degree(),
                  [f, w, tol](const Vector& u) { return pullback_at(f, w, u, tol); });
}

inline EuclForm linear_combination(double a, const EuclForm& w, double b, const EuclForm& v) {
  if (w.degree() != v.degree() || w.dim() != v.dim())
    throw Error(ErrorKind::DimensionMismatch, "linear combination of forms of different shapes");
  return EuclForm("lin(" + w.name() + "," + v.name() + ")", w.domain(), w.degree(),
                  [a, b, w, v](const Vector& x) { return Vector(a * w(x) + b * v(x)); });
}

/// Largest coefficient difference at the given points.
inline double form_distance(const EuclForm& a, const EuclForm& b, const std::vector<Vector>& points) {
  if (a.degree() != b.degree() || a.dim() != b.dim()) return std::numeric_limits<double>::infinity();
  double worst = 0.0;
  for (const auto& x : points) worst = std::max(worst, max_abs(Vector(a(x) - b(x))));
  return worst;
}

inline Verdict compare_forms(const EuclForm& a, const EuclForm& b, double tol) {
  if (a.degree() != b.degree() || a.dim() != b.dim()) return Verdict::refuted("forms have different shapes");
  const auto& samples = a.domain().samples();
  double worst = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double d = max_abs(Vector(a(samples[i]) - b(samples[i])));
    if (!(d <= tol))
      return Verdict::refuted(a.name() + " and " + b.name() + " differ").at(samples[i]).at_sample(i).with_deviation(d);
    worst = std::max(worst, d);
  }
  return Verdict::pass().with_deviation(worst);
}

namespace detail {
/// Sign of sorting `seq` (distinct entries) into increasing order.
inline int permutation_sign(std::vector<int> seq) {
  int sign = 1;
  for (std::size_t i = 0; i < seq.size(); ++i)
    for (std::size_t j = i + 1; j < seq.size(); ++j)
      if (seq[i] > seq[j]) sign = -sign;
  return sign;
}

inline std::size_t index_of(const std::vector<std::vector<int>>& list, const std::vector<int>& idx) {
  return static_cast<std::size_t>(std::find(list.begin(), list.end(), idx) - list.begin());
}
}  // namespace detail

/// dω by central differences of the coefficients.
inline EuclForm exterior_derivative(const EuclForm& w, const Tolerances& tol = {}) {
  const int n = w.dim(), k = w.degree();
  const double h = tol.fd_step;
  return EuclForm("d" + w.name(), w.domain(), k + 1, [w, n, k, h](const Vector& x) {
    const auto in = multi_indices(n, k);
    const auto outi = multi_indices(n, k + 1);
    Vector out = Vector::Zero(static_cast<Eigen::Index>(outi.size()));
    for (int j = 0; j < n; ++j) {
      Vector xp = x, xm = x;
      xp(j) += h;
      xm(j) -= h;
      const Vector dc = (w(xp) - w(xm)) / (2.0 * h);
      for (std::size_t a = 0; a < in.size(); ++a) {
        if (std::find(in[a].begin(), in[a].end(), j) != in[a].end()) continue;
        std::vector<int> seq{j};
        seq.insert(seq.end(), in[a].begin(), in[a].end());
        const int sign = detail::permutation_sign(seq);
        std::sort(seq.begin(), seq.end());
        out(static_cast<Eigen::Index>(detail::index_of(outi, seq))) += sign * dc(static_cast<Eigen::Index>(a));
      }
    }
    return out;
  });
}

inline EuclForm wedge(const EuclForm& a, const EuclForm& b) {
  if (a.dim() != b.dim()) throw Error(ErrorKind::DimensionMismatch, "wedge of forms on different domains");
  const int n = a.dim(), p = a.degree(), q = b.degree();
  return EuclForm(a.name() + "∧" + b.name(), a.domain(), p + q, [a, b, n, p, q](const Vector& x) {
    const auto ia = multi_indices(n, p), ib = multi_indices(n, q), out = multi_indices(n, p + q);
    const Vector ca = a(x), cb = b(x);
    Vector r = Vector::Zero(static_cast<Eigen::Index>(out.size()));
    for (std::size_t i = 0; i < ia.size(); ++i) {
      for (std::size_t j = 0; j < ib.size(); ++j) {
        std::vector<int> seq = ia[i];
        seq.insert(seq.end(), ib[j].begin(), ib[j].end());
        std::vector<int> sorted = seq;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) continue;
        r(static_cast<Eigen::Index>(detail::index_of(out, sorted))) +=
            detail::permutation_sign(seq) * ca(static_cast<Eigen::Index>(i)) * cb(static_cast<Eigen::Index>(j));
      }
    }
    return r;
  });
}

// ---------------------------------------------------------------------------
// Diffeological forms

/// A k-form on a diffeological space, given by its values on the generating
/// plots; values on other plots are assembled along their witnesses.
struct DiffeologicalForm {
  std::string name;
  DiffeologicalSpace space;
  int degree = 0;
  std::vector<EuclForm> rule;  // rule[k] lives on generators[k].domain
};

namespace detail {

inline Vector assemble_at(const DiffeologicalSpace& space, const std::vector<EuclForm>& rule, int degree,
                          const PlotWitness& w, const Vector& u, const Tolerances& tol) {
  for (std::size_t i = 0; i < w.pieces.size(); ++i) {
    if (!w.cover.pieces[i].contains(u)) continue;
    const WitnessPiece& piece = w.pieces[i];
    if (const auto* c = std::get_if<ConstantAt>(&piece)) {
      if (degree > 0) return Vector::Zero(binomial(static_cast<int>(u.size()), degree));
      for (std::size_t g = 0; g < space.generators.size(); ++g) {
        const Plot& gen = space.generators[g];
        if (gen.domain.contains(c->value.value) &&
            space.carrier.eq(gen(c->value.value), c->value))
          return rule.at(g)(c->value.value);
      }
      throw Error(ErrorKind::MissingWitness, "no generator reaches the constant value of a 0-form");
    }
    if (const auto* f = std::get_if<Factor>(&piece)) {
      if (f->generator >= rule.size()) throw Error(ErrorKind::MissingWitness, "factor names an unknown generator");
      return pullback_at(f->map, rule[f->generator], u, tol);
    }
    const auto& l = std::get<Lift>(piece);
    if (!space.base) throw Error(ErrorKind::MissingWitness, "lift witness in a space that is not a quotient");
    return assemble_at(*space.base, rule, degree, *l.base_witness, u, tol);
  }
  throw Error(ErrorKind::PointOutsideDomain, "no witness piece contains the evaluation point");
}

}  // namespace detail

/// α(p) for a witnessed plot p.
inline EuclForm form_on_plot(const DiffeologicalForm& a, const Plot& p, const PlotWitness& w,
                             const Tolerances& tol = {}) {
  return EuclForm(a.name + "(" + p.name + ")", p.domain, a.degree,
                  [sp = a.space, rule = a.rule, k = a.degree, w, tol](const Vector& u) {
                    return detail::assemble_at(sp, rule, k, w, u, tol);
                  });
}

/// Pieces of one witness agree on their overlaps.
inline Verdict check_overlap_agreement(const DiffeologicalForm& a, const PlotWitness& w, const Tolerances& tol = {}) {
  for (std::size_t i = 0; i < w.pieces.size(); ++i) {
    for (std::size_t j = i + 1; j < w.pieces.size(); ++j) {
      PlotWitness wi{w.cover, {}}, wj{w.cover, {}};
      wi.cover.pieces = {w.cover.pieces[i]};
      wi.pieces = {w.pieces[i]};
      wj.cover.pieces = {w.cover.pieces[j]};
      wj.pieces = {w.pieces[j]};
      for (const auto& u : w.cover.pieces[i].samples()) {
        if (!w.cover.pieces[j].contains(u)) continue;
        const double d = max_abs(Vector(detail::assemble_at(a.space, a.rule, a.degree, wi, u, tol) -
                                        detail::assemble_at(a.space, a.rule, a.degree, wj, u, tol)));
        if (!(d <= tol.form_tol))
          return Verdict::refuted("witness pieces disagree on their overlap").at(u).in_piece(i).with_deviation(d);
      }
    }
  }
  return Verdict::pass();
}

/// The form on a manifold space whose value on the identity plot is ω.
inline DiffeologicalForm manifold_form(const EuclForm& w, double eq_tol = Tolerances{}.eq_tol) {
  return DiffeologicalForm{w.name(), manifold_space(w.domain(), eq_tol), w.degree(), {w}};
}

/// α(p∘f) = f*α(p) at the samples of f's domain. The witness for p∘f
/// defaults to the precomposed witness of p.
inline Verdict check_compatibility(const DiffeologicalForm& a, const Plot& p, const PlotWitness& w,
                                   const SmoothEuclMap& f, const std::optional<PlotWitness>& w_pf = std::nullopt,
                                   const Tolerances& tol = {}) {
  if (Verdict v = verify_plot(a.space, p, w); !v.passed()) return v;
  const Plot pf = precompose(p, f);
  const PlotWitness wpf = w_pf.value_or(precompose(w, f));
  if (Verdict v = verify_plot(a.space, pf, wpf); !v.passed()) return v;
  const EuclForm lhs = form_on_plot(a, pf, wpf, tol);
  const EuclForm rhs = pullback(f, form_on_plot(a, p, w, tol), tol);
  return compare_forms(lhs, rhs, tol.form_tol);
}

// ---------------------------------------------------------------------------
// Basic forms

namespace detail {
inline void require_on_space(const EuclForm& mu, const ActionGroupoid& g) {
  if (!(mu.domain().same_as(g.space()) || (mu.domain().name() == g.space().name() && mu.dim() == g.space().dim())))
    throw Error(ErrorKind::InvalidArgument, mu.name() + " is not a form on " + g.space().name());
}

inline std::optional<Verdict> invariance_at(const EuclForm& mu, const SmoothEuclMap& t, const std::string& what,
                                            double tol_value, const Tolerances& tol) {
  const auto& samples = mu.domain().samples();
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double d = max_abs(Vector(pullback_at(t, mu, samples[i], tol) - mu(samples[i])));
    if (!(d <= tol_value))
      return Verdict::refuted("s*μ ≠ t*μ at " + what).at(samples[i]).at_sample(i).with_deviation(d);
  }
  return std::nullopt;
}

/// Coefficients of ι_ξ μ at x, in multi_indices(n, k−1) order.
inline Vector contract(const EuclForm& mu, const Vector& x, const Vector& xi) {
  const int n = mu.dim(), k = mu.degree();
  if (k == 0) return Vector::Zero(0);
  const auto outer = multi_indices(n, k);
  const auto inner = multi_indices(n, k - 1);
  const Vector c = mu(x);
  Vector out = Vector::Zero(static_cast<Eigen::Index>(inner.size()));
  for (std::size_t a = 0; a < outer.size(); ++a) {
    const auto& I = outer[a];
    for (std::size_t pos = 0; pos < I.size(); ++pos) {
      std::vector<int> J = I;
      J.erase(J.begin() + static_cast<std::ptrdiff_t>(pos));
      const auto b = std::find(inner.begin(), inner.end(), J) - inner.begin();
      const double sign = pos % 2 == 0 ? 1.0 : -1.0;
      out(b) += sign * c(static_cast<Eigen::Index>(a)) * xi(I[pos]);
    }
  }
  return out;
}
}  // namespace detail

/// s*μ = t*μ on G₁ = Γ×G₀, checked as (γ·)*μ = μ for every tested γ. For
/// the circle: a 32-angle grid, |R_h*μ − R_{−h}*μ| ≤ form_tol at h = 1e-3,
/// and ι_ξμ = 0 for the generator ξ, since t*μ sees the Γ direction of G₁
/// and s*μ does not.
inline Verdict basic_check(const EuclForm& mu, const ActionGroupoid& g, const Tolerances& tol = {}) {
  detail::require_on_space(mu, g);
  for (const auto& gamma : g.group().elements())
    if (auto v = detail::invariance_at(mu, g.translation(gamma), g.group().label(gamma), tol.form_tol, tol)) return *v;
  if (!g.group().is_finite()) {
    constexpr double h = 1e-3;
    const SmoothEuclMap plus = g.translation(GroupElement{0, h});
    const SmoothEuclMap minus = g.translation(GroupElement{0, -h});
    const auto& samples = mu.domain().samples();
    for (std::size_t i = 0; i < samples.size(); ++i) {
      const double d = max_abs(Vector(pullback_at(plus, mu, samples[i], tol) - pullback_at(minus, mu, samples[i], tol)));
      if (!(d <= tol.form_tol))
        return Verdict::refuted("μ is not infinitesimally invariant").at(samples[i]).at_sample(i).with_deviation(d);
    }
    for (std::size_t i = 0; i < samples.size(); ++i) {
      const Vector xi = (g.act(GroupElement{0, h}, samples[i]) - g.act(GroupElement{0, -h}, samples[i])) / (2 * h);
      const double d = max_abs(detail::contract(mu, samples[i], xi));
      if (!(d <= tol.form_tol))
        return Verdict::refuted("μ does not vanish along orbits").at(samples[i]).at_sample(i).with_deviation(d);
    }
  }
  return Verdict::pass();
}

/// The orbit-space form induced by a basic μ: on a lift q, α = q*μ.
inline DiffeologicalForm basic_to_orbit_form(const EuclForm& mu, const ActionGroupoid& g, const Tolerances& tol = {}) {
  if (Verdict v = basic_check(mu, g, tol); !v.passed()) throw Error(ErrorKind::NotBasic, mu.name() + ": " + v.reason);
  DiffeologicalSpace X = orbit_space(g, tol.eq_tol);
  std::vector<EuclForm> rule(X.generators.size(), mu);
  return DiffeologicalForm{"[" + mu.name() + "]", std::move(X), mu.degree(), std::move(rule)};
}

/// The quotient-of-identity plot π∘id on G₀, witnessed by the identity lift.
inline WitnessedPlot quotient_of_identity(const ActionGroupoid& g, double eq_tol = Tolerances{}.eq_tol) {
  const SmoothEuclMap id = identity_map(g.space());
  const std::string base = manifold_space(g.space(), eq_tol).carrier.name;
  Plot p{"π∘id", g.space(), base + "/" + orbit_label(g), [](const Vector& u) { return Element{u, 0}; }};
  return {std::move(p), lift_witness(id, base)};
}

/// μ = α(π∘id).
inline EuclForm orbit_form_to_basic(const DiffeologicalForm& a, const ActionGroupoid& g, const Tolerances& tol = {}) {
  const auto [p, w] = quotient_of_identity(g, tol.eq_tol);
  if (Verdict v = verify_plot(a.space, p, w); !v.passed())
    throw Error(ErrorKind::MissingWitness, "π∘id is not a plot of " + a.space.name + ": " + v.reason);
  return form_on_plot(a, p, w, tol).renamed("μ(" + a.name + ")");
}

/// Two orbit forms agree rule by rule at generator samples.
inline Verdict compare_orbit_forms(const DiffeologicalForm& a, const DiffeologicalForm& b, double tol) {
  if (a.rule.size() != b.rule.size() || a.degree != b.degree) return Verdict::refuted("forms have different shapes");
  for (std::size_t k = 0; k < a.rule.size(); ++k)
    if (Verdict v = compare_forms(a.rule[k], b.rule[k], tol); !v.passed()) return v.in_piece(k);
  return Verdict::pass();
}

/// q₁*μ = q₂*μ for two lifts of one quotient plot (π∘q₁ = π∘q₂ is checked
/// first).
inline Verdict lift_independence(const EuclForm& mu, const ActionGroupoid& g, const SmoothEuclMap& q1,
                                 const SmoothEuclMap& q2, const Tolerances& tol = {}) {
  if (!q1.domain().same_as(q2.domain()) && q1.domain().name() != q2.domain().name())
    throw Error(ErrorKind::InvalidArgument, "lifts live on different domains");
  const auto& samples = q1.domain().samples();
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double d = g.orbit_distance(q1(samples[i]), q2(samples[i]), tol.eq_tol);
    if (!(d <= tol.eq_tol))
      return Verdict::refuted(q1.name() + " and " + q2.name() + " are not lifts of one plot")
          .at(samples[i])
          .at_sample(i)
          .with_deviation(d);
  }
  return compare_forms(pullback(q1, mu, tol), pullback(q2, mu, tol), tol.eq_tol);
}

}  // namespace diffeo
