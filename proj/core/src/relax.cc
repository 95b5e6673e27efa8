#include "phaserelax/relax.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <set>
#include <sstream>

#include "phaserelax/hulls.h"

namespace phaserelax {

namespace {

const double kSqrt2 = std::sqrt(2.0);

std::string pair_label(const char* what, int i, int j) {
  return std::string(what) + "{" + std::to_string(i + 1) + "," + std::to_string(j + 1) + "}";
}

// Common part of every relaxation: lifted objective, quadratic constraints,
// boxes on the diagonal and X >= 0.
struct Base {
  ProgramBuilder pb;
  HermitianVar x;
};

void add_relation(ProgramBuilder& pb, const LinearExpr& lhs, Relation rel, double rhs,
                  const std::string& label) {
  switch (rel) {
    case Relation::kLessEqual:
      pb.add_nonneg(LinearExpr(rhs) - lhs, label);
      break;
    case Relation::kGreaterEqual:
      pb.add_nonneg(lhs - LinearExpr(rhs), label);
      break;
    case Relation::kEqual:
      pb.add_zero(lhs - LinearExpr(rhs), label);
      break;
  }
}

Base make_base(const Instance& inst) {
  const auto violations = validate_instance(inst);
  if (!violations.empty()) throw Error("invalid instance: " + violations.front().message);
  Base base;
  auto& pb = base.pb;
  base.x = pb.add_hermitian("X", inst.n);
  const auto& x = base.x;

  if (inst.has_ratio_objective()) {
    const int t = pb.add_variable({"t", -1, -1});
    for (size_t k = 0; k < inst.ratio_terms.size(); ++k) {
      const auto& term = inst.ratio_terms[k];
      pb.add_nonneg(x.inner(term.q) - LinearExpr::var(t, term.weight),
                    "ratio" + std::to_string(k + 1));
    }
    const double sign = inst.sense == Sense::kMaximize ? -1.0 : 1.0;
    pb.set_objective(LinearExpr::var(t, sign), sign);
  } else {
    const double sign = inst.sense == Sense::kMaximize ? -1.0 : 1.0;
    pb.set_objective(sign * inst.objective_scale * x.inner(inst.q0), sign);
  }

  for (size_t k = 0; k < inst.constraints.size(); ++k) {
    const auto& con = inst.constraints[k];
    add_relation(pb, x.inner(con.q), con.rel, con.b, "quad" + std::to_string(k + 1));
  }
  for (int i = 0; i < inst.n; ++i) {
    const auto& bd = inst.bounds[i];
    const std::string idx = std::to_string(i + 1);
    if (bd.l == bd.u) {
      pb.add_zero(x.re(i, i) - LinearExpr(bd.l * bd.l), "modulus" + idx);
      continue;
    }
    if (bd.l > 0.0) pb.add_nonneg(x.re(i, i) - LinearExpr(bd.l * bd.l), "modulus_lo" + idx);
    pb.add_nonneg(LinearExpr(bd.u * bd.u) - x.re(i, i), "modulus_hi" + idx);
  }
  pb.add_psd(x, "X");
  return base;
}

void add_angular_cuts(ProgramBuilder& pb, const HermitianVar& x, int i, int j,
                      const LinearExpr& r, const std::vector<AngularCut>& cuts) {
  for (size_t k = 0; k < cuts.size(); ++k) {
    const auto& cut = cuts[k];
    const LinearExpr e = cut.a * x.re(i, j) + cut.b * x.im(i, j) - cut.c * r;
    const std::string label = pair_label("angle", i, j) + "#" + std::to_string(k + 1);
    switch (cut.direction) {
      case CutSense::kGreaterEqual:
        pb.add_nonneg(e, label);
        break;
      case CutSense::kLessEqual:
        pb.add_nonneg(-1.0 * e, label);
        break;
      case CutSense::kEqual:
        pb.add_zero(e, label);
        break;
    }
  }
}

void add_h_cuts(ProgramBuilder& pb, const HermitianVar& x, const Instance& inst, int i, int j,
                const LinearExpr& r) {
  const auto& bi = inst.bounds[i];
  const auto& bj = inst.bounds[j];
  const auto [c1, c2] = h_cuts(bi.l, bi.u, bj.l, bj.u);
  int k = 1;
  for (const auto& c : {c1, c2}) {
    pb.add_nonneg(c.alpha * r - c.beta * x.re(i, i) - c.gamma * x.re(j, j) - LinearExpr(c.delta),
                  pair_label("bilinear", i, j) + "#" + std::to_string(k++));
  }
}

enum class RMode { kEdges, kFull };

ConicProgram build_extended(const Instance& inst, RMode rmode, bool simplify) {
  Base base = make_base(inst);
  auto& pb = base.pb;
  const auto& x = base.x;
  const int n = inst.n;

  auto r_of = [&](int i, int j) -> LinearExpr {
    if (i == j) return x.re(i, i);
    return pb.ref({"R", std::min(i, j), std::max(i, j)});
  };

  if (rmode == RMode::kFull) {
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) pb.add_variable({"R", i, j});
    }
  } else {
    for (const auto& e : inst.edges) pb.add_variable({"R", e.i, e.j});
  }

  for (const auto& e : inst.edges) {
    const int i = e.i, j = e.j;
    const LinearExpr r = r_of(i, j);
    const PhaseCuts pc = phase_cuts(e.phase);
    add_angular_cuts(pb, x, i, j, r, pc.cuts);
    const bool wide_interval = e.phase.is_interval() && e.phase.span() >= kPi - kAngleTol;
    if (pc.norm_bound && !(simplify && wide_interval)) {
      pb.add_soc({r, x.re(i, j), x.im(i, j)}, pair_label("norm", i, j));
    }
    if (!simplify) add_h_cuts(pb, x, inst, i, j, r);
    if (rmode == RMode::kEdges) {
      // (2 R_ij^2 + R_ii^2 + R_jj^2)^{1/2} <= R_ii + R_jj
      pb.add_soc({x.re(i, i) + x.re(j, j), kSqrt2 * r, x.re(i, i), x.re(j, j)},
                 pair_label("rmodulus", i, j));
    }
  }

  if (rmode == RMode::kFull) {
    std::vector<LinearExpr> lower;
    for (int c = 0; c < n; ++c) {
      for (int rr = c; rr < n; ++rr) lower.push_back(r_of(rr, c));
    }
    pb.add_psd(n, lower, "R");
  }
  return pb.assemble();
}

}  // namespace

const char* relaxation_name(RelaxationKind k) {
  switch (k) {
    case RelaxationKind::kCsdp:
      return "csdp";
    case RelaxationKind::kE1:
      return "e1";
    case RelaxationKind::kChen:
      return "chen";
    case RelaxationKind::kE2:
      return "e2";
    case RelaxationKind::kLuHom:
      return "lu-hom";
  }
  return "?";
}

RelaxationKind parse_relaxation(const std::string& s) {
  for (auto k : {RelaxationKind::kCsdp, RelaxationKind::kE1, RelaxationKind::kChen,
                 RelaxationKind::kE2, RelaxationKind::kLuHom}) {
    if (s == relaxation_name(k)) return k;
  }
  throw Error("unknown relaxation '" + s + "'");
}

const char* simplify_name(SimplifyMode m) {
  switch (m) {
    case SimplifyMode::kOff:
      return "off";
    case SimplifyMode::kAuto:
      return "auto";
    case SimplifyMode::kOn:
      return "on";
  }
  return "?";
}

SimplifyMode parse_simplify(const std::string& s) {
  for (auto m : {SimplifyMode::kOff, SimplifyMode::kAuto, SimplifyMode::kOn}) {
    if (s == simplify_name(m)) return m;
  }
  throw Error("unknown simplify mode '" + s + "'");
}

bool simplification_applies(const Instance& inst) {
  return std::all_of(inst.edges.begin(), inst.edges.end(),
                     [](const Edge& e) { return contains_zero(e.phase); });
}

ConicProgram build_csdp(const Instance& inst) { return make_base(inst).pb.assemble(); }

ConicProgram build_e1(const Instance& inst) { return build_extended(inst, RMode::kEdges, false); }

ConicProgram build_e2(const Instance& inst, SimplifyMode simplify) {
  const bool applies = simplification_applies(inst);
  if (simplify == SimplifyMode::kOn && !applies) {
    throw Error("simplification requires 0 in the phase hull of every edge");
  }
  return build_extended(inst, RMode::kFull, simplify != SimplifyMode::kOff && applies);
}

ConicProgram build_chen(const Instance& inst) {
  for (const auto& e : inst.edges) {
    bool ok = e.phase.is_interval() && !e.phase.full_circle();
    if (ok) {
      const auto [lo, hi] = centered_interval(e.phase);
      ok = lo > -0.5 * kPi && hi < 0.5 * kPi && lo < hi;
    }
    if (!ok) throw Error("Chen relaxation undefined for this instance");
  }
  Base base = make_base(inst);
  auto& pb = base.pb;
  const auto& x = base.x;
  for (const auto& e : inst.edges) {
    const int i = e.i, j = e.j;
    const auto [lo, hi] = centered_interval(e.phase);
    const auto& bi = inst.bounds[i];
    const auto& bj = inst.bounds[j];
    const auto [c1, c2] = chen_cuts(bi.l, bi.u, bj.l, bj.u, lo, hi);
    pb.add_nonneg(x.im(i, j) - c1.lower_tan * x.re(i, j), pair_label("tan_lo", i, j));
    pb.add_nonneg(c1.upper_tan * x.re(i, j) - x.im(i, j), pair_label("tan_hi", i, j));
    int k = 1;
    for (const auto& c : {c1, c2}) {
      pb.add_nonneg(c.pi3 * x.re(i, j) + c.pi4 * x.im(i, j) - c.beta * x.re(i, i) -
                        c.gamma * x.re(j, j) - LinearExpr(c.delta),
                    pair_label("chen", i, j) + "#" + std::to_string(k++));
    }
  }
  return pb.assemble();
}

ConicProgram build_lu_hom(const Instance& inst) {
  if (!inst.homogenized_from) throw Error("lu-hom relaxation needs a homogenized instance");
  return build_e1(inst);
}

ConicProgram build_relaxation(RelaxationKind kind, const Instance& inst, SimplifyMode simplify) {
  switch (kind) {
    case RelaxationKind::kCsdp:
      return build_csdp(inst);
    case RelaxationKind::kE1:
      return build_e1(inst);
    case RelaxationKind::kChen:
      return build_chen(inst);
    case RelaxationKind::kE2:
      return build_e2(inst, simplify);
    case RelaxationKind::kLuHom:
      return build_lu_hom(inst);
  }
  throw Error("unknown relaxation kind");
}

VectorXd lift_point(const ConicProgram& prog, const Instance& inst, const VectorXcd& xv) {
  if (xv.size() != inst.n) throw Error("point has wrong dimension");
  VectorXd v = VectorXd::Zero(prog.num_vars());
  for (int k = 0; k < prog.num_vars(); ++k) {
    const Symbol& s = prog.varmap[k];
    if (s.name == "X.re") {
      v(k) = (xv(s.i) * std::conj(xv(s.j))).real();
    } else if (s.name == "X.im") {
      v(k) = (xv(s.i) * std::conj(xv(s.j))).imag();
    } else if (s.name == "R") {
      v(k) = std::abs(xv(s.i)) * std::abs(xv(s.j));
    } else if (s.name == "t") {
      v(k) = evaluate_objective(inst, xv);
    } else {
      throw Error("cannot lift symbol " + s.str());
    }
  }
  return v;
}

// ---------------------------------------------------------------------------
// Homogenization

PhaseSet difference_set(const PhaseSet& a, const PhaseSet& b) {
  if (a.is_finite() && b.is_finite()) {
    if (a.kind() == PhaseSet::Kind::kUniform && b.kind() == PhaseSet::Kind::kUniform &&
        a.uniform_m() == b.uniform_m()) {
      return a;
    }
    std::vector<double> out;
    for (double p : a.angles()) {
      for (double q : b.angles()) out.push_back(p - q);
    }
    return normalize_phase_set(PhaseSet::discrete(out));
  }
  if (a.is_interval() && b.is_interval()) {
    const double lo = a.lo() - b.hi();
    const double hi = a.hi() - b.lo();
    if (hi - lo >= kTwoPi) return normalize_phase_set(PhaseSet::interval(0.0, kTwoPi));
    return normalize_phase_set(PhaseSet::interval(lo, hi));
  }
  // Mixed finite and interval sets: the covering circle is a valid outer set.
  return normalize_phase_set(PhaseSet::interval(0.0, kTwoPi));
}

Instance homogenize(const NonhomogeneousProblem& problem, EdgeSelection selection,
                    const std::vector<std::pair<int, int>>& list) {
  const Instance& base = problem.base;
  const int n = base.n;
  if (problem.c.size() != n) throw Error("linear term has wrong dimension");
  if (static_cast<int>(problem.variable_phases.size()) != n) {
    throw Error("one phase set per variable is required");
  }
  if (base.has_ratio_objective()) throw Error("cannot homogenize a ratio objective");

  auto pad = [n](const HermitianMatrix& q) {
    MatrixXcd m = MatrixXcd::Zero(n + 1, n + 1);
    m.topLeftCorner(n, n) = q.matrix();
    return m;
  };

  Instance out;
  out.n = n + 1;
  out.sense = base.sense;
  MatrixXcd q0 = pad(base.q0);
  q0.block(0, n, n, 1) = problem.c;
  q0.block(n, 0, 1, n) = problem.c.adjoint();
  out.q0 = HermitianMatrix(q0);
  out.objective_scale = 0.5 * base.objective_scale;
  for (const auto& con : base.constraints) out.constraints.push_back({HermitianMatrix(pad(con.q)), con.b, con.rel});
  out.bounds = base.bounds;
  out.bounds.push_back({1.0, 1.0});
  out.homogenized_from = n;

  std::set<std::pair<int, int>> present;
  for (const auto& e : base.edges) {
    out.edges.push_back(e);
    present.insert({e.i, e.j});
  }
  for (int i = 0; i < n; ++i) {
    const PhaseSet p = normalize_phase_set(problem.variable_phases[i]);
    if (p.full_circle()) continue;
    out.edges.push_back({i, n, p});
  }
  auto add_pair = [&](int i, int j) {
    if (i == j || i < 0 || j < 0 || i >= n || j >= n) throw Error("invalid edge in list");
    if (i > j) std::swap(i, j);
    if (present.count({i, j})) return;
    const PhaseSet d = difference_set(problem.variable_phases[i], problem.variable_phases[j]);
    if (d.full_circle()) return;
    out.edges.push_back({i, j, d});
    present.insert({i, j});
  };
  if (selection == EdgeSelection::kFull) {
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) add_pair(i, j);
    }
  } else if (selection == EdgeSelection::kList) {
    for (const auto& [i, j] : list) add_pair(i, j);
  }
  std::sort(out.edges.begin(), out.edges.end(),
            [](const Edge& a, const Edge& b) { return std::tie(a.i, a.j) < std::tie(b.i, b.j); });

  out.variable_phases.assign(n + 1, std::nullopt);
  for (int i = 0; i < n; ++i) out.variable_phases[i] = normalize_phase_set(problem.variable_phases[i]);
  out.variable_phases[n] = PhaseSet::discrete({0.0});
  if (!base.modulus_levels.empty()) {
    out.modulus_levels = base.modulus_levels;
    out.modulus_levels.push_back({1.0});
  }
  return out;
}

// ---------------------------------------------------------------------------
// bound_of

BoundResult bound_of(RelaxationKind kind, const Instance& inst, const RelaxOptions& opts) {
  const auto t0 = std::chrono::steady_clock::now();
  const ConicProgram prog = build_relaxation(kind, inst, opts.simplify);
  BoundResult out;
  out.kind = kind;
  out.rows = prog.num_rows();
  out.cols = prog.num_vars();
  out.solution = solve(prog, opts.solver);
  out.solve_seconds = out.solution.wallclock;
  if (!out.solution.optimal()) {
    std::ostringstream os;
    os << relaxation_name(kind) << " relaxation not solved: " << status_name(out.solution.status);
    if (!out.solution.note.empty()) os << " (" << out.solution.note << ")";
    os << ", residuals primal " << out.solution.residual_primal << " dual "
       << out.solution.residual_dual << " gap " << out.solution.residual_gap;
    throw SolveFailure(os.str(), out.solution);
  }
  out.value = out.solution.objective;
  out.x = recover_complex(prog, out.solution.x, "X", inst.n);
  out.wallclock = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

}  // namespace phaserelax
