#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "phaserelax/common.h"

namespace phaserelax {

// ---------------------------------------------------------------------------
// HermitianMatrix

/// Dense Hermitian matrix. Construction symmetrizes the input,
/// (A + A^H) / 2, and zeroes diagonal imaginary parts; inputs whose asymmetry
/// exceeds kMaxAsymmetry are rejected.
class HermitianMatrix {
 public:
  static constexpr double kMaxAsymmetry = 1e-8;

  HermitianMatrix() = default;
  explicit HermitianMatrix(const MatrixXcd& m);
  HermitianMatrix(const MatrixXd& re, const MatrixXd& im);

  static HermitianMatrix zero(int n);
  static HermitianMatrix identity(int n);

  int n() const { return static_cast<int>(m_.rows()); }
  const MatrixXcd& matrix() const { return m_; }
  Complex operator()(int i, int j) const { return m_(i, j); }
  MatrixXd re() const { return m_.real(); }
  MatrixXd im() const { return m_.imag(); }

  /// Quadratic form x^H M x (real for Hermitian M).
  double quad(const VectorXcd& x) const;

  /// Inner product M . X = Re trace(M^H X).
  double inner(const MatrixXcd& x) const;

  bool is_identity(double tol = 1e-12) const;

  friend bool operator==(const HermitianMatrix& a, const HermitianMatrix& b) {
    return a.m_.rows() == b.m_.rows() && a.m_.cols() == b.m_.cols() && a.m_ == b.m_;
  }

 private:
  MatrixXcd m_;
};

// ---------------------------------------------------------------------------
// PhaseSet

/// Allowed arguments of a complex entry: a closed interval, an explicit
/// finite list, or the uniform grid {0, 2pi/M, ..., (M-1) 2pi/M}.
///
/// Canonical form (see normalize_phase_set): discrete angles sorted in
/// [0, 2pi) and separated by more than kAngleTol; interval shifted so its
/// midpoint lies in (-pi, pi] (hence lo in [-2pi, pi)). An interval of span
/// >= 2pi is full_circle.
class PhaseSet {
 public:
  enum class Kind { kInterval, kDiscrete, kUniform };

  static PhaseSet interval(double lo, double hi);
  static PhaseSet discrete(std::vector<double> angles);
  static PhaseSet uniform(int m);

  Kind kind() const { return kind_; }
  bool is_interval() const { return kind_ == Kind::kInterval; }
  /// True for both explicit lists and uniform grids.
  bool is_finite() const { return kind_ != Kind::kInterval; }

  double lo() const;
  double hi() const;
  double span() const { return hi() - lo(); }
  bool full_circle() const { return is_interval() && span() >= kTwoPi - kAngleTol; }

  /// Grid size of a uniform set.
  int uniform_m() const;

  /// Number of points of a finite set (0 for intervals).
  int size() const;

  /// Points of a finite set, expanding uniform grids on demand.
  std::vector<double> angles() const;

  /// Membership with kAngleTol slack and wrap-around semantics.
  bool contains(double theta) const;

  std::string describe() const;

  friend bool operator==(const PhaseSet&, const PhaseSet&) = default;

 private:
  PhaseSet() = default;

  Kind kind_ = Kind::kInterval;
  double lo_ = 0.0;
  double hi_ = 0.0;
  std::vector<double> angles_;
  int m_ = 0;
};

/// Canonical form of a phase set. Throws Error("empty phase set") for an empty
/// list and Error for a reversed interval. Zero-span intervals collapse to a
/// singleton discrete set.
PhaseSet normalize_phase_set(const PhaseSet& raw);

/// Phase set of X_ij given the set stated for X_ji: theta -> -theta.
PhaseSet conjugate_edge_view(const PhaseSet& phase);

// ---------------------------------------------------------------------------
// Instance

enum class Sense { kMinimize, kMaximize };
enum class Relation { kLessEqual, kGreaterEqual, kEqual };

struct QuadConstraint {
  HermitianMatrix q;
  double b = 0.0;
  Relation rel = Relation::kLessEqual;

  friend bool operator==(const QuadConstraint&, const QuadConstraint&) = default;
};

struct ModulusBound {
  double l = 0.0;
  double u = 0.0;

  friend bool operator==(const ModulusBound&, const ModulusBound&) = default;
};

/// Phase restriction arg(x_i conj(x_j)) in `phase`, 0-based with i < j.
struct Edge {
  int i = 0;
  int j = 0;
  PhaseSet phase = PhaseSet::interval(0.0, kTwoPi);

  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Term of a max-min objective: the objective is min_k x^H Q_k x / weight_k,
/// realized in relaxations through an epigraph variable t.
struct RatioTerm {
  HermitianMatrix q;
  double weight = 1.0;

  friend bool operator==(const RatioTerm&, const RatioTerm&) = default;
};

/// Complex quadratic program
///
///   min/max  scale * x^H Q0 x
///   s.t.     x^H Q_i x  (<=, >=, =)  b_i
///            l_i <= |x_i| <= u_i
///            arg(x_i conj(x_j)) in A_ij  for {i,j} in edges
///
/// Indices are 0-based in memory and 1-based in files and messages.
///
/// Per-variable restrictions (`variable_phases`, `modulus_levels`) are known
/// to generators and used by rounding and enumeration; relaxations see only
/// the modulus bounds and the edge set. When `ratio_terms` is non-empty the
/// objective is replaced by the max-min ratio and Q0 is ignored.
struct Instance {
  int n = 0;
  Sense sense = Sense::kMinimize;
  HermitianMatrix q0;
  double objective_scale = 1.0;
  std::vector<QuadConstraint> constraints;
  std::vector<ModulusBound> bounds;
  std::vector<Edge> edges;

  std::vector<std::optional<PhaseSet>> variable_phases;  // empty or size n
  std::vector<std::vector<double>> modulus_levels;       // empty or size n
  std::vector<RatioTerm> ratio_terms;

  /// Original variable count when the last variable was appended by
  /// homogenization (x_{n} == 1).
  std::optional<int> homogenized_from;

  bool has_ratio_objective() const { return !ratio_terms.empty(); }

  /// Index of the constraint x^H x (rel) b, if present.
  std::optional<int> power_constraint(Relation rel) const;

  friend bool operator==(const Instance&, const Instance&) = default;
};

struct Violation {
  std::string code;     // stable identifier, e.g. "modulus_bound_order"
  std::string message;  // human readable, 1-based indices
};

/// Every violated invariant of `inst`; empty when the instance is well formed.
std::vector<Violation> validate_instance(const Instance& inst);

/// Objective at x in the instance's own sense (ratio or quadratic).
double evaluate_objective(const Instance& inst, const VectorXcd& x);

/// Violated constraints of candidate x, tolerance `tol` (absolute for phases,
/// relative to 1 + |b| for quadratic constraints).
std::vector<Violation> check_feasibility(const Instance& inst, const VectorXcd& x,
                                         double tol = 1e-8);

inline bool is_feasible(const Instance& inst, const VectorXcd& x, double tol = 1e-8) {
  return check_feasibility(inst, x, tol).empty();
}

// ---------------------------------------------------------------------------
// Beamforming specialization

/// Discrete transmit beamforming: maximize t subject to
/// x^H h_k h_k^H x >= t gamma_k sigma_k^2, x^H x <= P_tot,
/// |x_i| in {D, 2D, ..., 2^m D}, arg(x_i) in A^(2^b), with D = sqrt(P_max)/2^m.
struct BeamformingInstance {
  std::vector<VectorXcd> channels;
  std::vector<double> sinr_targets;
  std::vector<double> noise_powers;
  double p_tot = 0.0;
  double p_max = 0.0;
  int amplitude_bits = 0;
  int phase_bits = 0;

  int n() const { return channels.empty() ? 0 : static_cast<int>(channels.front().size()); }
  int k() const { return static_cast<int>(channels.size()); }
  double delta() const;
  int phase_count() const { return 1 << phase_bits; }
  std::vector<double> amplitude_levels() const;

  /// Lowers to the generic model: ratio objective, power constraint, modulus
  /// bounds [D, 2^m D] with discrete levels, uniform phases on every variable
  /// and on every pair.
  Instance to_instance() const;
};

}  // namespace phaserelax
