#pragma once

#include <complex>
#include <utility>
#include <vector>

#include "phaserelax/model.h"

namespace phaserelax {

enum class CutSense { kGreaterEqual, kLessEqual, kEqual };

/// a Re(X_ij) + b Im(X_ij)  (>=, <=, =)  c R_ij
struct AngularCut {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  CutSense direction = CutSense::kGreaterEqual;

  /// Signed slack: positive when satisfied strictly, for the >= and <= forms.
  double slack(Complex x, double r) const;
};

/// alpha R_ij >= beta R_ii + gamma R_jj + delta
struct BilinearCut {
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
  double delta = 0.0;

  double slack(double r_ii, double r_jj, double r_ij) const {
    return alpha * r_ij - beta * r_ii - gamma * r_jj - delta;
  }
};

/// pi3 W_ij + pi4 T_ij >= beta W_ii + gamma W_jj + delta, valid together with
/// L W_ij <= T_ij <= U W_ij.
struct ChenCut {
  double pi3 = 0.0;
  double pi4 = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
  double delta = 0.0;
  double lower_tan = 0.0;
  double upper_tan = 0.0;

  double slack(double w_ii, double w_jj, double w_ij, double t_ij) const {
    return pi3 * w_ij + pi4 * t_ij - beta * w_ii - gamma * w_jj - delta;
  }
};

struct IntervalCut {
  AngularCut cut;
  bool norm_bound = true;  // |X_ij| <= R_ij must accompany the cut
};

/// Cut of the chord-bounded disk sector for an interval phase set.
/// Throws for a full circle.
IntervalCut interval_cut(const PhaseSet& phase);

/// One <= cut per consecutive pair of a finite set with at least two points.
std::vector<AngularCut> discrete_cuts(const PhaseSet& phase);

/// The two linear cuts bounding Conv(H_ij) from below.
std::pair<BilinearCut, BilinearCut> h_cuts(double l_i, double u_i, double l_j, double u_j);

/// (sqrt(1 + t^2) - 1) / t, and 0 at t = 0.
double chen_f(double t);

/// Rotated cuts for an interval strictly inside (-pi/2, pi/2) after shifting
/// by a multiple of 2pi. Throws otherwise.
std::pair<ChenCut, ChenCut> chen_cuts(double l_i, double u_i, double l_j, double u_j, double lo,
                                      double hi);

/// Interval endpoints shifted by a multiple of 2pi so the midpoint is in (-pi, pi].
std::pair<double, double> centered_interval(const PhaseSet& phase);

/// True when 0 lies in the closed convex hull of {e^{i theta} : theta in phase}.
bool contains_zero(const PhaseSet& phase);

/// Everything the relaxations impose on X_ij for a phase set: the angular
/// cuts (singletons and antipodal pairs reduced to their tight form) and
/// whether the norm bound |X_ij| <= R_ij is needed explicitly.
struct PhaseCuts {
  std::vector<AngularCut> cuts;
  bool norm_bound = true;
};
PhaseCuts phase_cuts(const PhaseSet& phase);

struct HullPoint {
  double x_ii = 0.0;
  double x_jj = 0.0;
  double r_ij = 0.0;
  Complex x_ij;
};

/// Membership of a lifted edge point in the hull description: boxes, both
/// bilinear cuts, R_ij^2 <= X_ii X_jj, the angular cuts and |X_ij| <= R_ij.
bool hull_membership(const HullPoint& p, const ModulusBound& bi, const ModulusBound& bj,
                     const PhaseSet& phase, double tol = 1e-8);

}  // namespace phaserelax
