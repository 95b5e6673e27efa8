#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "phaserelax/model.h"

namespace phaserelax {

enum class RepairKind { kAuto, kNone, kPowerNormalize, kBeamforming };

const char* repair_name(RepairKind r);  // "auto", "none", "power", "beam"
RepairKind parse_repair(const std::string& s);

/// The repair hook implied by an instance: beamforming for ratio objectives,
/// power normalization when an x^H x = P constraint is present, else none.
RepairKind resolve_repair(const Instance& inst, RepairKind requested);

struct RoundingOptions {
  int trials = 1000;
  uint64_t seed = 0;
  RepairKind repair = RepairKind::kAuto;
};

struct RoundingResult {
  VectorXcd x;
  double value = 0.0;
  bool feasible = false;
  int feasible_count = 0;
  int best_trial = -1;  // -1 .. -n for the column candidates
};

/// Nearest point of {r e^{i theta}}: theta nearest in `phase` (ties to the
/// smaller canonical angle), r = |z| clamped to [l, u] or rounded to the
/// nearest level (ties to the smaller level). z = 0 maps to the smallest
/// modulus at the smallest feasible phase.
Complex project_coordinate(Complex z, const ModulusBound& bound, const std::vector<double>& levels,
                           const std::optional<PhaseSet>& phase);

/// Projection of every coordinate with the instance's per-variable sets.
VectorXcd project_point(const Instance& inst, const VectorXcd& z);

/// Greedy pass over coordinates 2..n: a coordinate whose phase breaks an
/// edge shared with an earlier coordinate is rotated to the nearest angle
/// satisfying all such edges (candidates: set endpoints relative to the
/// earlier coordinates). Moduli are unchanged; the result is not guaranteed
/// feasible.
VectorXcd repair_edge_phases(const Instance& inst, const VectorXcd& x);

struct RepairResult {
  VectorXcd x;
  bool ok = false;
};

/// Rescales moduli so that x^H x = P for the instance's x^H x = P constraint,
/// clamping at the upper modulus bounds and spreading the remainder.
RepairResult repair_power_normalize(const VectorXcd& x, const Instance& inst);

struct BeamRepair {
  VectorXcd x;
  double t = 0.0;
};

/// Lowers amplitude levels greedily until x^H x <= P_tot, each time choosing
/// the coordinate whose decrement keeps the min ratio largest.
BeamRepair repair_beamforming(const VectorXcd& x, const Instance& inst);

/// Gaussian randomization from a relaxation's X: n column candidates
/// X[:,k]/sqrt(X_kk), then `trials` draws from CN(0, X), each projected,
/// repaired and checked. Keeps the best feasible candidate.
RoundingResult sample_round(const HermitianMatrix& x, const Instance& inst,
                            const RoundingOptions& opts = {});

}  // namespace phaserelax
