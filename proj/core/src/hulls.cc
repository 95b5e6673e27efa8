#include "phaserelax/hulls.h"

#include <algorithm>
#include <cmath>

namespace phaserelax {

double AngularCut::slack(Complex x, double r) const {
  const double lhs = a * x.real() + b * x.imag() - c * r;
  switch (direction) {
    case CutSense::kGreaterEqual:
      return lhs;
    case CutSense::kLessEqual:
      return -lhs;
    case CutSense::kEqual:
      return -std::abs(lhs);
  }
  return lhs;
}

IntervalCut interval_cut(const PhaseSet& phase) {
  if (!phase.is_interval()) throw Error("interval_cut needs an interval phase set");
  if (phase.full_circle()) throw Error("no angular cut; impose only |X_ij| <= R_ij");
  const double mid = 0.5 * (phase.lo() + phase.hi());
  const double half = 0.5 * phase.span();
  IntervalCut out;
  out.cut = {std::cos(mid), std::sin(mid), std::cos(half), CutSense::kGreaterEqual};
  out.norm_bound = true;
  return out;
}

std::vector<AngularCut> discrete_cuts(const PhaseSet& phase) {
  if (!phase.is_finite()) throw Error("discrete_cuts needs a finite phase set");
  const auto th = phase.angles();
  const size_t m = th.size();
  if (m < 2) throw Error("discrete_cuts needs at least two angles");
  std::vector<AngularCut> cuts;
  cuts.reserve(m);
  for (size_t t = 0; t < m; ++t) {
    const double a0 = th[t];
    const double a1 = (t + 1 < m) ? th[t + 1] : th[0] + kTwoPi;
    const double mid = 0.5 * (a0 + a1);
    cuts.push_back({std::cos(mid), std::sin(mid), std::cos(0.5 * (a1 - a0)), CutSense::kLessEqual});
  }
  return cuts;
}

std::pair<BilinearCut, BilinearCut> h_cuts(double l_i, double u_i, double l_j, double u_j) {
  const double alpha = (l_i + u_i) * (l_j + u_j);
  BilinearCut lower{alpha, l_j * l_j + l_j * u_j, l_i * l_i + l_i * u_i,
                    l_i * l_j * u_i * u_j - l_i * l_i * l_j * l_j};
  BilinearCut upper{alpha, u_j * u_j + l_j * u_j, u_i * u_i + l_i * u_i,
                    l_i * l_j * u_i * u_j - u_i * u_i * u_j * u_j};
  return {lower, upper};
}

double chen_f(double t) {
  if (t == 0.0) return 0.0;
  return (std::sqrt(1.0 + t * t) - 1.0) / t;
}

std::pair<double, double> centered_interval(const PhaseSet& phase) {
  double lo = phase.lo();
  double hi = phase.hi();
  const double shift = kTwoPi * std::floor((0.5 * (lo + hi) + kPi) / kTwoPi);
  lo -= shift;
  hi -= shift;
  if (0.5 * (lo + hi) <= -kPi) {
    lo += kTwoPi;
    hi += kTwoPi;
  }
  return {lo, hi};
}

std::pair<ChenCut, ChenCut> chen_cuts(double l_i, double u_i, double l_j, double u_j, double lo,
                                      double hi) {
  if (!(lo < hi) || lo <= -0.5 * kPi || hi >= 0.5 * kPi) throw Error("Chen cuts undefined");
  const double lt = std::tan(lo);
  const double ut = std::tan(hi);
  const double fl = chen_f(lt);
  const double fu = chen_f(ut);
  const double scale = (l_i + u_i) * (l_j + u_j);
  const double den = 1.0 + fl * fu;
  const double pi3 = scale * (1.0 - fl * fu) / den;
  const double pi4 = scale * (fl + fu) / den;
  const auto [h1, h2] = h_cuts(l_i, u_i, l_j, u_j);
  ChenCut c1{pi3, pi4, h1.beta, h1.gamma, h1.delta, lt, ut};
  ChenCut c2{pi3, pi4, h2.beta, h2.gamma, h2.delta, lt, ut};
  return {c1, c2};
}

bool contains_zero(const PhaseSet& phase) {
  if (phase.is_interval()) return phase.span() >= kPi - kAngleTol;
  const auto th = phase.angles();
  if (th.size() < 2) return false;
  double max_gap = th.front() + kTwoPi - th.back();
  for (size_t t = 0; t + 1 < th.size(); ++t) max_gap = std::max(max_gap, th[t + 1] - th[t]);
  return max_gap <= kPi + kAngleTol;
}

PhaseCuts phase_cuts(const PhaseSet& phase) {
  PhaseCuts out;
  if (phase.is_interval()) {
    if (phase.full_circle()) return out;
    out.cuts.push_back(interval_cut(phase).cut);
    return out;
  }
  const auto th = phase.angles();
  if (th.size() == 1) {
    // X_ij on the ray at theta: projection onto the ray reaches R_ij while
    // |X_ij| <= R_ij holds.
    out.cuts.push_back({std::cos(th[0]), std::sin(th[0]), 1.0, CutSense::kGreaterEqual});
    return out;
  }
  if (th.size() == 2 && std::abs(th[1] - th[0] - kPi) <= kAngleTol) {
    // The two polygon cuts are opposite half-planes through the origin.
    const double mid = th[0] + 0.5 * kPi;
    out.cuts.push_back({std::cos(mid), std::sin(mid), 0.0, CutSense::kEqual});
    return out;
  }
  out.cuts = discrete_cuts(phase);
  out.norm_bound = th.size() <= 2;
  return out;
}

bool hull_membership(const HullPoint& p, const ModulusBound& bi, const ModulusBound& bj,
                     const PhaseSet& phase, double tol) {
  if (p.x_ii < bi.l * bi.l - tol || p.x_ii > bi.u * bi.u + tol) return false;
  if (p.x_jj < bj.l * bj.l - tol || p.x_jj > bj.u * bj.u + tol) return false;
  const auto [c1, c2] = h_cuts(bi.l, bi.u, bj.l, bj.u);
  if (c1.slack(p.x_ii, p.x_jj, p.r_ij) < -tol) return false;
  if (c2.slack(p.x_ii, p.x_jj, p.r_ij) < -tol) return false;
  // (2 R_ij^2 + R_ii^2 + R_jj^2)^{1/2} <= R_ii + R_jj
  const double lhs =
      std::sqrt(2.0 * p.r_ij * p.r_ij + p.x_ii * p.x_ii + p.x_jj * p.x_jj);
  if (lhs > p.x_ii + p.x_jj + tol) return false;
  if (std::abs(p.x_ij) > p.r_ij + tol) return false;
  for (const auto& cut : phase_cuts(phase).cuts) {
    if (cut.slack(p.x_ij, p.r_ij) < -tol) return false;
  }
  return true;
}

}  // namespace phaserelax
