#pragma once

#include <string>

#include "phaserelax/conic_ir.h"

namespace phaserelax {

struct SolverOptions {
  double eps_primal = 1e-7;
  double eps_dual = 1e-7;
  double eps_gap = 1e-7;
  int max_iters = 500;
  bool scaling = true;
  bool verbose = false;
};

enum class SolveStatus { kOptimal, kInfeasible, kUnbounded, kMaxIters };

const char* status_name(SolveStatus s);

struct Solution {
  SolveStatus status = SolveStatus::kMaxIters;
  VectorXd x;  // primal variables
  VectorXd y;  // dual multipliers, one per row
  VectorXd s;  // primal slack b - A x
  double objective = 0.0;       // reported scale, primal
  double dual_objective = 0.0;  // reported scale
  double residual_primal = 0.0;
  double residual_dual = 0.0;
  double residual_gap = 0.0;
  int iterations = 0;
  double wallclock = 0.0;
  std::string note;

  bool optimal() const { return status == SolveStatus::kOptimal; }
};

nlohmann::json to_json(const Solution& sol);

/// Interior-point solve of  min c'x  s.t.  A x + s = b, s in K.
/// Deterministic for identical inputs. Throws Error for malformed programs.
Solution solve(const ConicProgram& prog, const SolverOptions& opts = {});

/// Euclidean projection onto one cone block.
VectorXd project_cone(const VectorXd& v, const ConeBlock& block);

/// Euclidean projection onto the dual cone of a block (the zero cone's dual
/// is the whole space; the others are self-dual).
VectorXd project_dual_cone(const VectorXd& v, const ConeBlock& block);

}  // namespace phaserelax
