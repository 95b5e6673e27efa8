#include "phaserelax/rounding.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

#include "phaserelax/rng.h"

namespace phaserelax {

const char* repair_name(RepairKind r) {
  switch (r) {
    case RepairKind::kAuto:
      return "auto";
    case RepairKind::kNone:
      return "none";
    case RepairKind::kPowerNormalize:
      return "power";
    case RepairKind::kBeamforming:
      return "beam";
  }
  return "?";
}

RepairKind parse_repair(const std::string& s) {
  for (auto r : {RepairKind::kAuto, RepairKind::kNone, RepairKind::kPowerNormalize,
                 RepairKind::kBeamforming}) {
    if (s == repair_name(r)) return r;
  }
  throw Error("unknown repair '" + s + "'");
}

RepairKind resolve_repair(const Instance& inst, RepairKind requested) {
  if (requested != RepairKind::kAuto) return requested;
  if (inst.has_ratio_objective()) return RepairKind::kBeamforming;
  if (inst.power_constraint(Relation::kEqual)) return RepairKind::kPowerNormalize;
  return RepairKind::kNone;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double nearest_phase(double theta, const std::optional<PhaseSet>& phase) {
  if (!phase || phase->full_circle()) return theta;
  if (phase->contains(theta)) return theta;
  if (phase->is_interval()) {
    const double dl = angular_distance(theta, phase->lo());
    const double dh = angular_distance(theta, phase->hi());
    return dh < dl ? phase->hi() : phase->lo();
  }
  double best = 0.0, best_d = kInf;
  for (double a : phase->angles()) {
    const double d = angular_distance(theta, a);
    if (d < best_d - 1e-15) {
      best_d = d;
      best = a;
    }
  }
  return best;
}

double smallest_phase(const std::optional<PhaseSet>& phase) {
  if (!phase || phase->full_circle()) return 0.0;
  if (phase->is_interval()) return phase->lo();
  return phase->angles().front();
}

}  // namespace

Complex project_coordinate(Complex z, const ModulusBound& bound, const std::vector<double>& levels,
                           const std::optional<PhaseSet>& phase) {
  const double r0 = std::abs(z);
  if (r0 == 0.0) {
    const double r = levels.empty() ? bound.l : *std::min_element(levels.begin(), levels.end());
    return std::polar(r, smallest_phase(phase));
  }
  double r = std::clamp(r0, bound.l, bound.u);
  if (!levels.empty()) {
    double best = levels.front(), best_d = kInf;
    for (double lv : levels) {
      const double d = std::abs(lv - r0);
      if (d < best_d || (d == best_d && lv < best)) {
        best_d = d;
        best = lv;
      }
    }
    r = best;
  }
  return std::polar(r, nearest_phase(std::arg(z), phase));
}

VectorXcd project_point(const Instance& inst, const VectorXcd& z) {
  VectorXcd out(inst.n);
  static const std::vector<double> kNoLevels;
  for (int i = 0; i < inst.n; ++i) {
    const auto& lv = inst.modulus_levels.empty() ? kNoLevels : inst.modulus_levels[i];
    const std::optional<PhaseSet> ph =
        inst.variable_phases.empty() ? std::nullopt : inst.variable_phases[i];
    out(i) = project_coordinate(z(i), inst.bounds[i], lv, ph);
  }
  return out;
}

VectorXcd repair_edge_phases(const Instance& inst, const VectorXcd& z) {
  const int n = inst.n;
  // Edges grouped by their later endpoint, oriented as arg(x_i conj(x_j)).
  std::vector<std::vector<const Edge*>> back(n);
  for (const auto& e : inst.edges) {
    if (!e.phase.full_circle()) back[std::max(e.i, e.j)].push_back(&e);
  }
  VectorXcd x = z;
  auto ok_at = [&](int i, double theta) {
    for (const Edge* e : back[i]) {
      const int j = e->i == i ? e->j : e->i;
      if (std::abs(x(j)) == 0.0) continue;
      const double tj = std::arg(x(j));
      const double d = e->i == i ? theta - tj : tj - theta;
      if (!e->phase.contains(d)) return false;
    }
    return true;
  };
  for (int i = 1; i < n; ++i) {
    const double r = std::abs(x(i));
    if (back[i].empty() || r == 0.0) continue;
    const double t0 = std::arg(x(i));
    if (ok_at(i, t0)) continue;
    std::vector<double> cands;
    for (const Edge* e : back[i]) {
      const int j = e->i == i ? e->j : e->i;
      const double tj = std::arg(x(j));
      cands.push_back(tj);
      if (!e->phase.is_interval()) {
        for (double a : e->phase.angles()) cands.push_back(e->i == i ? tj + a : tj - a);
      } else {
        for (double a : {e->phase.lo(), e->phase.hi()}) cands.push_back(e->i == i ? tj + a : tj - a);
      }
    }
    double best = t0, best_d = kInf;
    for (double c : cands) {
      const double d = angular_distance(c, t0);
      if (d < best_d && ok_at(i, c)) {
        best_d = d;
        best = c;
      }
    }
    x(i) = std::polar(r, best);
  }
  return x;
}

RepairResult repair_power_normalize(const VectorXcd& x, const Instance& inst) {
  const auto idx = inst.power_constraint(Relation::kEqual);
  if (!idx) return {x, false};
  const double target = inst.constraints[*idx].b;
  const int n = inst.n;
  RepairResult out{x, false};
  double cap_total = 0.0;
  for (int i = 0; i < n; ++i) cap_total += inst.bounds[i].u * inst.bounds[i].u;
  if (cap_total < target * (1.0 - 1e-12)) return out;

  std::vector<char> clamped(n, 0);
  for (int pass = 0; pass <= n; ++pass) {
    double fixed = 0.0, free_power = 0.0;
    for (int i = 0; i < n; ++i) {
      if (clamped[i]) {
        fixed += std::norm(out.x(i));
      } else {
        free_power += std::norm(out.x(i));
      }
    }
    const double rest = target - fixed;
    if (free_power <= 0.0 || rest < 0.0) return out;
    const double s = std::sqrt(rest / free_power);
    bool any = false;
    for (int i = 0; i < n; ++i) {
      if (clamped[i]) continue;
      out.x(i) *= s;
      const double u = inst.bounds[i].u;
      if (std::abs(out.x(i)) > u) {
        out.x(i) = std::polar(u, std::arg(out.x(i)));
        clamped[i] = 1;
        any = true;
      }
    }
    if (!any) break;
  }
  out.ok = std::abs(out.x.squaredNorm() - target) <= 1e-9 * std::max(1.0, target);
  return out;
}

BeamRepair repair_beamforming(const VectorXcd& x, const Instance& inst) {
  BeamRepair out{x, 0.0};
  const auto idx = inst.power_constraint(Relation::kLessEqual);
  if (idx && !inst.modulus_levels.empty()) {
    const double cap = inst.constraints[*idx].b;
    // Level index of every coordinate.
    std::vector<int> level(inst.n);
    for (int i = 0; i < inst.n; ++i) {
      const auto& lv = inst.modulus_levels[i];
      const double r = std::abs(out.x(i));
      int best = 0;
      for (int t = 1; t < static_cast<int>(lv.size()); ++t) {
        if (std::abs(lv[t] - r) < std::abs(lv[best] - r)) best = t;
      }
      level[i] = best;
    }
    while (out.x.squaredNorm() > cap * (1.0 + 1e-12)) {
      int pick = -1;
      double pick_t = -kInf;
      for (int i = 0; i < inst.n; ++i) {
        if (level[i] == 0) continue;
        VectorXcd trial = out.x;
        trial(i) = std::polar(inst.modulus_levels[i][level[i] - 1], std::arg(out.x(i)));
        const double t = evaluate_objective(inst, trial);
        if (t > pick_t) {
          pick_t = t;
          pick = i;
        }
      }
      if (pick < 0) break;
      --level[pick];
      out.x(pick) = std::polar(inst.modulus_levels[pick][level[pick]], std::arg(out.x(pick)));
    }
  }
  out.t = evaluate_objective(inst, out.x);
  return out;
}

RoundingResult sample_round(const HermitianMatrix& xm, const Instance& inst,
                            const RoundingOptions& opts) {
  if (opts.trials < 1) throw Error("trials must be at least 1");
  if (xm.n() != inst.n) throw Error("relaxation matrix has wrong dimension");
  const int n = inst.n;
  const RepairKind repair = resolve_repair(inst, opts.repair);
  const bool maximize = inst.sense == Sense::kMaximize;

  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(xm.matrix());
  const VectorXd ev = es.eigenvalues().cwiseMax(0.0);
  const MatrixXcd factor = es.eigenvectors() * ev.cwiseSqrt().asDiagonal();

  RoundingResult best;
  best.x = VectorXcd::Zero(n);
  best.value = maximize ? -kInf : kInf;
  double fallback_viol = kInf;

  auto consider = [&](VectorXcd z, int trial) {
    if (inst.homogenized_from) {
      // Fix the gauge so that the appended coordinate is real and positive.
      const Complex last = z(n - 1);
      if (std::abs(last) > 0.0) z *= std::conj(last) / std::abs(last);
    }
    VectorXcd cand = repair_edge_phases(inst, project_point(inst, z));
    if (repair == RepairKind::kPowerNormalize) {
      cand = repair_power_normalize(cand, inst).x;
    } else if (repair == RepairKind::kBeamforming) {
      cand = repair_beamforming(cand, inst).x;
    }
    const auto viol = check_feasibility(inst, cand);
    const double val = evaluate_objective(inst, cand);
    if (!viol.empty()) {
      if (!best.feasible && static_cast<double>(viol.size()) < fallback_viol) {
        fallback_viol = static_cast<double>(viol.size());
        best.x = cand;
        best.value = val;
        best.best_trial = trial;
      }
      return;
    }
    ++best.feasible_count;
    const bool better = !best.feasible || (maximize ? val > best.value : val < best.value);
    if (better) {
      best.feasible = true;
      best.x = cand;
      best.value = val;
      best.best_trial = trial;
    }
  };

  const MatrixXcd& xmat = xm.matrix();
  for (int k = 0; k < n; ++k) {
    const double d = xmat(k, k).real();
    if (d <= 0.0) continue;
    consider(xmat.col(k) / std::sqrt(d), -(k + 1));
  }
  for (int t = 0; t < opts.trials; ++t) {
    CounterRng rng(opts.seed, static_cast<uint64_t>(t));
    VectorXcd g(n);
    const double s = std::sqrt(0.5);
    for (int i = 0; i < n; ++i) {
      const double re = rng.normal();
      const double im = rng.normal();
      g(i) = Complex(s * re, s * im);
    }
    consider(factor * g, t);
  }
  return best;
}

}  // namespace phaserelax
