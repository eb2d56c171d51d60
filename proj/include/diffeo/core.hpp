// Shared vocabulary: vectors, errors, tolerances and verification verdicts.
#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace diffeo {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

enum class ErrorKind {
  InvalidArgument,
  PointOutsideDomain,
  NonFiniteValue,
  DimensionMismatch,
  NotEquivalence,
  MissingWitness,
  OrbitEqUndecided,
  EmptyFiber,
  NoSection,
  NoPoints,
  DescentFailure,
  NonTermination,
  SearchTooLarge,
  NotBasic,
  MalformedSite,
  ParseError,
  UnresolvedName,
  ToleranceOutOfRange,
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::PointOutsideDomain: return "PointOutsideDomain";
    case ErrorKind::NonFiniteValue: return "NonFiniteValue";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::NotEquivalence: return "NotEquivalence";
    case ErrorKind::MissingWitness: return "MissingWitness";
    case ErrorKind::OrbitEqUndecided: return "OrbitEqUndecided";
    case ErrorKind::EmptyFiber: return "EmptyFiber";
    case ErrorKind::NoSection: return "NoSection";
    case ErrorKind::NoPoints: return "NoPoints";
    case ErrorKind::DescentFailure: return "DescentFailure";
    case ErrorKind::NonTermination: return "NonTermination";
    case ErrorKind::SearchTooLarge: return "SearchTooLarge";
    case ErrorKind::NotBasic: return "NotBasic";
    case ErrorKind::MalformedSite: return "MalformedSite";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::UnresolvedName: return "UnresolvedName";
    case ErrorKind::ToleranceOutOfRange: return "ToleranceOutOfRange";
  }
  return "Unknown";
}

/// Every failure raised by the library carries a machine-checkable kind.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Numerical tolerances shared by every check.
struct Tolerances {
  double eq_tol = 1e-9;     // continuous parts of carrier elements
  double fd_tol = 1e-6;     // finite-difference vs analytic jacobians
  double fd_step = 1e-5;    // central-difference step
  double form_tol = 1e-6;   // form comparisons that may involve fd jacobians
  double exact_tol = 1e-12; // comparisons that only use analytic jacobians
};

/// Radius ladder for the semi-decided openness test.
inline constexpr double kOpennessLadder[] = {1e-2, 1e-3, 1e-4};

enum class Status { Pass, Refuted, Unknown };

inline std::string_view to_string(Status s) {
  switch (s) {
    case Status::Pass: return "pass";
    case Status::Refuted: return "refuted";
    case Status::Unknown: return "unknown";
  }
  return "unknown";
}

/// Outcome of a semi-decision. Refuted verdicts carry enough witness data
/// (piece, sample, point, deviation) to reproduce the failure in isolation.
struct Verdict {
  Status status = Status::Pass;
  std::string reason;
  std::optional<Vector> point;
  std::optional<std::size_t> piece;
  std::optional<std::size_t> sample;
  std::optional<double> deviation;

  static Verdict pass(std::string reason = {}) {
    Verdict v;
    v.reason = std::move(reason);
    return v;
  }
  static Verdict refuted(std::string reason) {
    Verdict v;
    v.status = Status::Refuted;
    v.reason = std::move(reason);
    return v;
  }
  static Verdict unknown(std::string reason) {
    Verdict v;
    v.status = Status::Unknown;
    v.reason = std::move(reason);
    return v;
  }

  Verdict& at(Vector p) {
    point = std::move(p);
    return *this;
  }
  Verdict& in_piece(std::size_t i) {
    piece = i;
    return *this;
  }
  Verdict& at_sample(std::size_t i) {
    sample = i;
    return *this;
  }
  Verdict& with_deviation(double d) {
    deviation = d;
    return *this;
  }

  bool passed() const noexcept { return status == Status::Pass; }
  bool refuted() const noexcept { return status == Status::Refuted; }
};

inline Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

inline Vector vec(const std::vector<double>& xs) {
  return Eigen::Map<const Vector>(xs.data(), static_cast<Eigen::Index>(xs.size()));
}

inline std::vector<double> to_std(const Vector& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

inline double max_abs(const Vector& v) {
  return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff();
}

inline double max_abs(const Matrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

/// Uniform double in [0, 1) from a 64-bit engine; portable across standard
/// libraries, unlike std::uniform_real_distribution.
template <class Engine>
double unit_uniform(Engine& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace diffeo
