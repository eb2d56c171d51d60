// Closed catalog of named maps, forms, indicators and actions. Scenario
// files refer to these by name; every map carries an analytic jacobian.
#pragma once

#include "diffeo/forms.hpp"

#include <cmath>
#include <map>
#include <string>
#include <vector>

namespace diffeo::catalog {

/// e^{−1/τ²} for τ ≠ 0 and 0 at 0.
inline double exp_profile(double t) {
  if (t == 0.0) return 0.0;
  return std::exp(-1.0 / (t * t));
}

/// d/dτ e^{−1/τ²} = 2τ⁻³e^{−1/τ²}; the exponential is taken first so the
/// value is exactly 0 wherever it underflows.
inline double exp_profile_derivative(double t) {
  const double e = exp_profile(t);
  if (e == 0.0) return 0.0;
  return 2.0 * e / (t * t * t);
}

/// p₁(τ) = sign(τ)·e^{−1/τ²}.
inline double p1(double t) { return t < 0 ? -exp_profile(t) : exp_profile(t); }
inline double p1_derivative(double t) { return std::abs(exp_profile_derivative(t)); }

/// p₂(τ) = −e^{−1/τ²}.
inline double p2(double t) { return -exp_profile(t); }
inline double p2_derivative(double t) { return -exp_profile_derivative(t); }

namespace detail {

inline void need_dim(const Domain& d, int n, const std::string& expr) {
  if (d.dim() != n)
    throw Error(ErrorKind::DimensionMismatch, expr + " needs a " + std::to_string(n) + "-d domain, got " + d.name());
}

inline void need_params(const std::vector<double>& p, std::size_t n, const std::string& expr) {
  if (p.size() != n)
    throw Error(ErrorKind::InvalidArgument, expr + " takes " + std::to_string(n) + " parameters");
}

inline SmoothEuclMap scalar(std::string name, const Domain& d, double (*f)(double), double (*df)(double)) {
  need_dim(d, 1, name);
  return SmoothEuclMap(
      name, d, 1, [f](const Vector& x) { return vec({f(x(0))}); },
      [df](const Vector& x) {
        Matrix j(1, 1);
        j(0, 0) = df(x(0));
        return j;
      });
}

}  // namespace detail

inline const std::vector<std::string>& map_names() {
  static const std::vector<std::string> names = {
      "identity", "constant", "affine",     "p1",        "p2",        "exp_profile", "square",
      "cube",     "sin",      "cos",        "tanh",      "line",      "circle",      "rotate",
      "swap",     "polar",    "norm_squared", "project_x", "project_y", "reflect"};
  return names;
}

/// Named smooth map on `d`.
///   identity; constant(c…); affine(a, b): x ↦ a·x + b;
///   p1, p2, exp_profile, square, cube, sin, cos, tanh (1-d);
///   line(c): x ↦ (x, c); circle(r): θ ↦ (r cos θ, r sin θ);
///   rotate(θ), swap, polar, norm_squared, project_x, project_y (2-d);
///   reflect: x ↦ −x.
inline SmoothEuclMap make_map(const std::string& expr, const Domain& d, const std::vector<double>& params = {}) {
  using detail::need_dim;
  using detail::need_params;
  if (expr == "identity") return identity_map(d);
  if (expr == "constant") {
    if (params.empty()) throw Error(ErrorKind::InvalidArgument, "constant needs a value");
    return constant_map(d, vec(params), "constant");
  }
  if (expr == "affine") {
    need_params(params, 2, expr);
    const double a = params[0], b = params[1];
    const int n = d.dim();
    return SmoothEuclMap(
        "affine", d, n, [a, b](const Vector& x) { return Vector((a * x).array() + b); },
        [a, n](const Vector&) { return Matrix(a * Matrix::Identity(n, n)); });
  }
  if (expr == "reflect") {
    const int n = d.dim();
    return SmoothEuclMap(
        "reflect", d, n, [](const Vector& x) { return Vector(-x); },
        [n](const Vector&) { return Matrix(-Matrix::Identity(n, n)); });
  }
  if (expr == "p1") return detail::scalar("p1", d, p1, p1_derivative);
  if (expr == "p2") return detail::scalar("p2", d, p2, p2_derivative);
  if (expr == "exp_profile") return detail::scalar("exp_profile", d, exp_profile, exp_profile_derivative);
  if (expr == "square")
    return detail::scalar("square", d, [](double t) { return t * t; }, [](double t) { return 2.0 * t; });
  if (expr == "cube")
    return detail::scalar("cube", d, [](double t) { return t * t * t; }, [](double t) { return 3.0 * t * t; });
  if (expr == "sin")
    return detail::scalar("sin", d, [](double t) { return std::sin(t); }, [](double t) { return std::cos(t); });
  if (expr == "cos")
    return detail::scalar("cos", d, [](double t) { return std::cos(t); }, [](double t) { return -std::sin(t); });
  if (expr == "tanh")
    return detail::scalar("tanh", d, [](double t) { return std::tanh(t); },
                          [](double t) { return 1.0 / (std::cosh(t) * std::cosh(t)); });
  if (expr == "line") {
    need_dim(d, 1, expr);
    need_params(params, 1, expr);
    const double c = params[0];
    return SmoothEuclMap(
        "line", d, 2, [c](const Vector& x) { return vec({x(0), c}); },
        [](const Vector&) { return Matrix(Matrix::Identity(2, 1)); });
  }
  if (expr == "circle") {
    need_dim(d, 1, expr);
    need_params(params, 1, expr);
    const double r = params[0];
    return SmoothEuclMap(
        "circle", d, 2, [r](const Vector& x) { return vec({r * std::cos(x(0)), r * std::sin(x(0))}); },
        [r](const Vector& x) {
          Matrix j(2, 1);
          j << -r * std::sin(x(0)), r * std::cos(x(0));
          return j;
        });
  }
  if (expr == "rotate") {
    need_dim(d, 2, expr);
    need_params(params, 1, expr);
    const Matrix R = diffeo::detail::rotation_matrix(params[0]);
    return SmoothEuclMap(
        "rotate", d, 2, [R](const Vector& x) { return Vector(R * x); }, [R](const Vector&) { return R; });
  }
  if (expr == "swap") {
    need_dim(d, 2, expr);
    Matrix S(2, 2);
    S << 0, 1, 1, 0;
    return SmoothEuclMap(
        "swap", d, 2, [S](const Vector& x) { return Vector(S * x); }, [S](const Vector&) { return S; });
  }
  if (expr == "polar") {
    need_dim(d, 2, expr);
    return SmoothEuclMap(
        "polar", d, 2,
        [](const Vector& x) { return vec({x(0) * std::cos(x(1)), x(0) * std::sin(x(1))}); },
        [](const Vector& x) {
          Matrix j(2, 2);
          j << std::cos(x(1)), -x(0) * std::sin(x(1)), std::sin(x(1)), x(0) * std::cos(x(1));
          return j;
        });
  }
  if (expr == "norm_squared") {
    const int n = d.dim();
    return SmoothEuclMap(
        "norm_squared", d, 1, [](const Vector& x) { return vec({x.squaredNorm()}); },
        [n](const Vector& x) {
          Matrix j(1, n);
          j.row(0) = 2.0 * x.transpose();
          return j;
        });
  }
  if (expr == "project_x" || expr == "project_y") {
    need_dim(d, 2, expr);
    const int k = expr == "project_x" ? 0 : 1;
    return SmoothEuclMap(
        expr, d, 1, [k](const Vector& x) { return vec({x(k)}); },
        [k](const Vector&) {
          Matrix j = Matrix::Zero(1, 2);
          j(0, k) = 1.0;
          return j;
        });
  }
  throw Error(ErrorKind::UnresolvedName, "no catalog map named " + expr);
}

inline const std::vector<std::string>& form_names() {
  static const std::vector<std::string> names = {
      "zero", "one",   "x",   "x_squared", "radius_squared", "dx",       "dy",
      "x_dx", "y_dx",  "x_dy", "x_dx_plus_y_dy", "x_dy_minus_y_dx", "dx_dy", "profile_dx"};
  return names;
}

/// Named form on `d`. `degree` is only consulted for "zero".
inline EuclForm make_form(const std::string& expr, const Domain& d, int degree = 1) {
  using detail::need_dim;
  const int n = d.dim();
  auto one_form = [&](std::string name, std::function<Vector(const Vector&)> c) {
    return EuclForm(std::move(name), d, 1, std::move(c));
  };
  if (expr == "zero") return EuclForm::zero(d, degree).renamed("zero");
  if (expr == "one") return EuclForm("one", d, 0, [](const Vector&) { return vec({1.0}); });
  if (expr == "x") return EuclForm("x", d, 0, [](const Vector& x) { return vec({x(0)}); });
  if (expr == "x_squared") return EuclForm("x_squared", d, 0, [](const Vector& x) { return vec({x(0) * x(0)}); });
  if (expr == "radius_squared")
    return EuclForm("radius_squared", d, 0, [](const Vector& x) { return vec({x.squaredNorm()}); });
  if (expr == "dx") {
    return one_form("dx", [n](const Vector&) {
      Vector c = Vector::Zero(n);
      c(0) = 1.0;
      return c;
    });
  }
  if (expr == "x_dx") {
    return one_form("x_dx", [n](const Vector& x) {
      Vector c = Vector::Zero(n);
      c(0) = x(0);
      return c;
    });
  }
  if (expr == "profile_dx") {
    need_dim(d, 1, expr);
    return one_form("profile_dx", [](const Vector& x) { return vec({exp_profile(x(0))}); });
  }
  if (expr == "dy") {
    need_dim(d, 2, expr);
    return one_form("dy", [](const Vector&) { return vec({0.0, 1.0}); });
  }
  if (expr == "y_dx") {
    need_dim(d, 2, expr);
    return one_form("y_dx", [](const Vector& x) { return vec({x(1), 0.0}); });
  }
  if (expr == "x_dy") {
    need_dim(d, 2, expr);
    return one_form("x_dy", [](const Vector& x) { return vec({0.0, x(0)}); });
  }
  if (expr == "x_dx_plus_y_dy") {
    need_dim(d, 2, expr);
    return one_form("x_dx_plus_y_dy", [](const Vector& x) { return vec({x(0), x(1)}); });
  }
  if (expr == "x_dy_minus_y_dx") {
    need_dim(d, 2, expr);
    return one_form("x_dy_minus_y_dx", [](const Vector& x) { return vec({-x(1), x(0)}); });
  }
  if (expr == "dx_dy") {
    need_dim(d, 2, expr);
    return EuclForm("dx_dy", d, 2, [](const Vector&) { return vec({1.0}); });
  }
  throw Error(ErrorKind::UnresolvedName, "no catalog form named " + expr);
}

using Indicator = std::function<bool(const Element&)>;

/// Subsets of orbit spaces for D-topology checks.
///   orbit_of(x…): the orbit class of one point; abs_between(lo, hi): classes
///   with lo < |x| < hi; all; none.
inline Indicator make_indicator(const std::string& expr, const ActionGroupoid& g, const std::vector<double>& params,
                                double eq_tol = Tolerances{}.eq_tol) {
  if (expr == "orbit_of") {
    if (static_cast<int>(params.size()) != g.space().dim())
      throw Error(ErrorKind::InvalidArgument, "orbit_of needs one coordinate per dimension");
    const Vector x = vec(params);
    return [g, x, eq_tol](const Element& e) { return g.same_orbit(e.value, x, eq_tol); };
  }
  if (expr == "abs_between") {
    detail::need_params(params, 2, expr);
    const double lo = params[0], hi = params[1];
    return [lo, hi](const Element& e) {
      const double r = e.value.norm();
      return lo < r && r < hi;
    };
  }
  if (expr == "all") return [](const Element&) { return true; };
  if (expr == "none") return [](const Element&) { return false; };
  throw Error(ErrorKind::UnresolvedName, "no catalog indicator named " + expr);
}

/// Named action on `space`: reflection, rotation, scaling(n), trivial(n).
inline ActionGroupoid make_action(const std::string& expr, const Domain& space, const std::vector<double>& params = {},
                                  std::optional<GroupModel> group = std::nullopt) {
  if (expr == "reflection") return reflection_action(space);
  if (expr == "rotation") return rotation_action(space, params.empty() || params[0] != 0.0);
  if (expr == "scaling") {
    detail::need_params(params, 1, expr);
    return scaling_action(static_cast<int>(params[0]), space);
  }
  if (expr == "trivial") {
    if (group) return trivial_action(*group, space);
    detail::need_params(params, 1, expr);
    return trivial_action(GroupModel::cyclic(static_cast<int>(params[0])), space);
  }
  throw Error(ErrorKind::UnresolvedName, "no catalog action named " + expr);
}

/// The open disk of radius r as a box with a predicate.
inline Domain disk(std::string name, double r, SampleConfig cfg = {}) {
  return Domain::box(std::move(name), vec({-r, -r}), vec({r, r}), [r](const Vector& x) { return x.norm() < r; }, cfg);
}

/// Every catalog map on a standard domain with its parameters, for fd
/// sweeps. The e^{−1/τ²} profiles are taken away from τ = 0.
struct CatalogEntry {
  std::string expr;
  Domain domain;
  std::vector<double> params;
};

inline std::vector<CatalogEntry> sweep_entries(SampleConfig cfg = {}) {
  const Domain I = Domain::interval("I", -2.0, 2.0, cfg);
  const Domain away = Domain::disjoint_union("I∖0", {Box{vec({-2.0}), vec({-0.1})}, Box{vec({0.1}), vec({2.0})}}, {}, cfg);
  const Domain Q = Domain::box("Q", vec({-2.0, -2.0}), vec({2.0, 2.0}), {}, cfg);
  const Domain half = Domain::box("H", vec({0.1, -3.0}), vec({2.0, 3.0}), {}, cfg);
  return {
      {"identity", I, {}},     {"identity", Q, {}},      {"constant", I, {1.0, 2.0}},
      {"affine", I, {0.5, 0.25}}, {"affine", Q, {-1.5, 1.0}}, {"reflect", I, {}},
      {"p1", away, {}},        {"p2", away, {}},         {"exp_profile", away, {}},
      {"square", I, {}},       {"cube", I, {}},          {"sin", I, {}},
      {"cos", I, {}},          {"tanh", I, {}},          {"line", I, {0.5}},
      {"circle", I, {1.5}},    {"rotate", Q, {0.7}},     {"swap", Q, {}},
      {"polar", half, {}},     {"norm_squared", Q, {}},  {"project_x", Q, {}},
      {"project_y", Q, {}},
  };
}

/// Maps from (−2.5, 2.5) into itself (1-d) or from the 2-d box (−2.5, 2.5)²
/// into itself, for random chain-rule pairs.
inline std::vector<SmoothEuclMap> self_maps(const Domain& d) {
  std::vector<SmoothEuclMap> out;
  if (d.dim() == 1) {
    for (const char* e : {"identity", "p1", "p2", "exp_profile", "sin", "cos", "tanh", "reflect"})
      out.push_back(make_map(e, d));
    out.push_back(make_map("affine", d, {0.5, 0.25}));
    out.push_back(SmoothEuclMap(
        "square/3", d, 1, [](const Vector& x) { return vec({x(0) * x(0) / 3.0}); },
        [](const Vector& x) { return Matrix(Matrix::Constant(1, 1, 2.0 * x(0) / 3.0)); }));
    out.push_back(SmoothEuclMap(
        "cube/10", d, 1, [](const Vector& x) { return vec({0.1 * x(0) * x(0) * x(0)}); },
        [](const Vector& x) { return Matrix(Matrix::Constant(1, 1, 0.3 * x(0) * x(0))); }));
  } else if (d.dim() == 2) {
    for (const char* e : {"identity", "swap", "reflect"}) out.push_back(make_map(e, d));
    out.push_back(make_map("affine", d, {0.5, -0.5}));
    const Matrix R = 0.5 * diffeo::detail::rotation_matrix(0.7);
    out.push_back(SmoothEuclMap(
        "half_rotate", d, 2, [R](const Vector& x) { return Vector(R * x); }, [R](const Vector&) { return R; }));
    out.push_back(SmoothEuclMap(
        "shear_sin", d, 2, [](const Vector& x) { return vec({std::sin(x(1)), 0.5 * x(0)}); },
        [](const Vector& x) {
          Matrix j(2, 2);
          j << 0.0, std::cos(x(1)), 0.5, 0.0;
          return j;
        }));
  }
  return out;
}

}  // namespace diffeo::catalog
