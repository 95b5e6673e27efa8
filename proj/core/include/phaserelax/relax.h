#pragma once

#include <string>
#include <utility>
#include <vector>

#include "phaserelax/conic_ir.h"
#include "phaserelax/model.h"
#include "phaserelax/solver.h"

namespace phaserelax {

enum class RelaxationKind { kCsdp, kE1, kChen, kE2, kLuHom };
enum class SimplifyMode { kOff, kAuto, kOn };

const char* relaxation_name(RelaxationKind k);  // "csdp", "e1", "chen", "e2", "lu-hom"
RelaxationKind parse_relaxation(const std::string& s);
const char* simplify_name(SimplifyMode m);
SimplifyMode parse_simplify(const std::string& s);

/// Classical relaxation: X >= 0, boxes on X_ii, lifted quadratic constraints.
ConicProgram build_csdp(const Instance& inst);

/// CSDP plus per-edge hull descriptions with R entries on the diagonal and
/// the edges only.
ConicProgram build_e1(const Instance& inst);

/// E1 with a full symmetric R >= 0 in place of the per-edge R_ij^2 <= R_ii R_jj.
/// With simplification, edges whose hulls contain 0 drop the bilinear cuts and
/// wide intervals also drop |X_ij| <= R_ij. kAuto applies it only when every
/// edge qualifies; kOn throws when some edge does not.
ConicProgram build_e2(const Instance& inst, SimplifyMode simplify = SimplifyMode::kAuto);

/// Relaxation with the rotated cuts on (W, T); intervals strictly inside
/// (-pi/2, pi/2) only.
ConicProgram build_chen(const Instance& inst);

/// E1 on a homogenized instance.
ConicProgram build_lu_hom(const Instance& inst);

ConicProgram build_relaxation(RelaxationKind kind, const Instance& inst,
                              SimplifyMode simplify = SimplifyMode::kAuto);

/// True when E2 simplification applies to every edge.
bool simplification_applies(const Instance& inst);

/// Variable values of the lift x -> (X = x x^H, R = |x||x|^T, t) in the
/// column order of `prog`.
VectorXd lift_point(const ConicProgram& prog, const Instance& inst, const VectorXcd& x);

// ---------------------------------------------------------------------------
// Homogenization

/// min/max  (1/2) x^H Q0 x + Re(c^H x) over `base` (base.q0 holds Q0),
/// with arg(x_i) in variable_phases[i].
struct NonhomogeneousProblem {
  Instance base;
  VectorXcd c;
  std::vector<PhaseSet> variable_phases;
};

enum class EdgeSelection { kStar, kFull, kList };

/// Appends x_{n+1} = 1. Star edges {i, n+1} carry the variable phase sets;
/// kFull also adds every pair {i, j} with the difference set of the two
/// variable sets, kList the given 0-based pairs.
Instance homogenize(const NonhomogeneousProblem& problem, EdgeSelection edges = EdgeSelection::kStar,
                    const std::vector<std::pair<int, int>>& list = {});

/// Phase set of arg(x_i conj(x_j)) implied by arg(x_i) in a and arg(x_j) in b.
PhaseSet difference_set(const PhaseSet& a, const PhaseSet& b);

// ---------------------------------------------------------------------------
// Bounds

struct RelaxOptions {
  SimplifyMode simplify = SimplifyMode::kAuto;
  SolverOptions solver;
};

struct BoundResult {
  RelaxationKind kind = RelaxationKind::kCsdp;
  double value = 0.0;  // LB for minimize, UB for maximize
  Solution solution;
  HermitianMatrix x;
  double solve_seconds = 0.0;
  double wallclock = 0.0;  // build + solve
  int rows = 0;
  int cols = 0;
};

/// Thrown when the solver does not reach an optimal status.
class SolveFailure : public Error {
 public:
  SolveFailure(const std::string& what, Solution sol) : Error(what), solution(std::move(sol)) {}
  Solution solution;
};

BoundResult bound_of(RelaxationKind kind, const Instance& inst, const RelaxOptions& opts = {});

}  // namespace phaserelax
