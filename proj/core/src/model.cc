#include "phaserelax/model.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>
#include <utility>

namespace phaserelax {

double wrap_angle(double theta) {
  double t = std::fmod(theta, kTwoPi);
  if (t < 0.0) t += kTwoPi;
  if (t >= kTwoPi) t = 0.0;
  return t;
}

double angular_distance(double a, double b) {
  const double d = wrap_angle(a - b);
  return std::min(d, kTwoPi - d);
}

// ---------------------------------------------------------------------------
// HermitianMatrix

HermitianMatrix::HermitianMatrix(const MatrixXcd& m) {
  if (m.rows() != m.cols()) {
    throw Error("Hermitian matrix must be square");
  }
  const double asym = m.size() == 0 ? 0.0 : (m - m.adjoint()).cwiseAbs().maxCoeff();
  if (asym > kMaxAsymmetry) {
    std::ostringstream os;
    os << "matrix is not Hermitian (asymmetry " << asym << ")";
    throw Error(os.str());
  }
  m_ = (m + m.adjoint()) / 2.0;
  for (int i = 0; i < m_.rows(); ++i) m_(i, i) = Complex(m_(i, i).real(), 0.0);
}

HermitianMatrix::HermitianMatrix(const MatrixXd& re, const MatrixXd& im) {
  if (re.rows() != im.rows() || re.cols() != im.cols()) {
    throw Error("real and imaginary parts differ in shape");
  }
  MatrixXcd m(re.rows(), re.cols());
  m.real() = re;
  m.imag() = im;
  *this = HermitianMatrix(m);
}

HermitianMatrix HermitianMatrix::zero(int n) {
  return HermitianMatrix(MatrixXcd::Zero(n, n));
}

HermitianMatrix HermitianMatrix::identity(int n) {
  return HermitianMatrix(MatrixXcd::Identity(n, n));
}

double HermitianMatrix::quad(const VectorXcd& x) const {
  return (x.adjoint() * m_ * x)(0).real();
}

double HermitianMatrix::inner(const MatrixXcd& x) const {
  return m_.conjugate().cwiseProduct(x).sum().real();
}

bool HermitianMatrix::is_identity(double tol) const {
  if (m_.size() == 0) return false;
  return (m_ - MatrixXcd::Identity(n(), n())).cwiseAbs().maxCoeff() <= tol;
}

// ---------------------------------------------------------------------------
// PhaseSet

PhaseSet PhaseSet::interval(double lo, double hi) {
  PhaseSet p;
  p.kind_ = Kind::kInterval;
  p.lo_ = lo;
  p.hi_ = hi;
  return p;
}

PhaseSet PhaseSet::discrete(std::vector<double> angles) {
  PhaseSet p;
  p.kind_ = Kind::kDiscrete;
  p.angles_ = std::move(angles);
  return p;
}

PhaseSet PhaseSet::uniform(int m) {
  PhaseSet p;
  p.kind_ = Kind::kUniform;
  p.m_ = m;
  return p;
}

double PhaseSet::lo() const {
  if (!is_interval()) throw Error("lo() requires an interval phase set");
  return lo_;
}

double PhaseSet::hi() const {
  if (!is_interval()) throw Error("hi() requires an interval phase set");
  return hi_;
}

int PhaseSet::uniform_m() const {
  if (kind_ != Kind::kUniform) throw Error("uniform_m() requires a uniform phase set");
  return m_;
}

int PhaseSet::size() const {
  switch (kind_) {
    case Kind::kInterval:
      return 0;
    case Kind::kDiscrete:
      return static_cast<int>(angles_.size());
    case Kind::kUniform:
      return m_;
  }
  return 0;
}

std::vector<double> PhaseSet::angles() const {
  switch (kind_) {
    case Kind::kInterval:
      throw Error("angles() requires a finite phase set");
    case Kind::kDiscrete:
      return angles_;
    case Kind::kUniform: {
      std::vector<double> out(m_);
      for (int t = 0; t < m_; ++t) out[t] = kTwoPi * t / m_;
      return out;
    }
  }
  return {};
}

bool PhaseSet::contains(double theta) const {
  switch (kind_) {
    case Kind::kInterval: {
      if (full_circle()) return true;
      const double offset = wrap_angle(theta - lo_);
      return offset <= (hi_ - lo_) + kAngleTol || offset >= kTwoPi - kAngleTol;
    }
    case Kind::kDiscrete:
      return std::any_of(angles_.begin(), angles_.end(), [&](double a) {
        return angular_distance(a, theta) <= kAngleTol;
      });
    case Kind::kUniform: {
      const double step = kTwoPi / m_;
      const double k = std::round(wrap_angle(theta) / step);
      return angular_distance(k * step, theta) <= kAngleTol;
    }
  }
  return false;
}

std::string PhaseSet::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case Kind::kInterval:
      os << "interval[" << lo_ << ", " << hi_ << "]";
      break;
    case Kind::kDiscrete:
      os << "discrete{";
      for (size_t t = 0; t < angles_.size(); ++t) os << (t ? ", " : "") << angles_[t];
      os << "}";
      break;
    case Kind::kUniform:
      os << "uniform(" << m_ << ")";
      break;
  }
  return os.str();
}

PhaseSet normalize_phase_set(const PhaseSet& raw) {
  switch (raw.kind()) {
    case PhaseSet::Kind::kInterval: {
      double lo = raw.lo();
      double hi = raw.hi();
      if (!std::isfinite(lo) || !std::isfinite(hi)) throw Error("non-finite phase interval");
      if (hi - lo < -kAngleTol) throw Error("reversed phase interval");
      if (hi - lo <= kAngleTol) return PhaseSet::discrete({wrap_angle(lo)});
      // Midpoint in (-pi, pi]: one representative per set, lo in [-2pi, pi).
      const double shift = kTwoPi * std::ceil((0.5 * (lo + hi) - kPi) / kTwoPi);
      return PhaseSet::interval(lo - shift, hi - shift);
    }
    case PhaseSet::Kind::kDiscrete: {
      std::vector<double> a = raw.angles();
      if (a.empty()) throw Error("empty phase set");
      for (double& t : a) {
        if (!std::isfinite(t)) throw Error("non-finite phase angle");
        t = wrap_angle(t);
      }
      std::sort(a.begin(), a.end());
      std::vector<double> out;
      for (double t : a) {
        if (out.empty() || t - out.back() > kAngleTol) out.push_back(t);
      }
      while (out.size() > 1 && out.front() + kTwoPi - out.back() <= kAngleTol) out.pop_back();
      return PhaseSet::discrete(std::move(out));
    }
    case PhaseSet::Kind::kUniform:
      if (raw.uniform_m() < 2) throw Error("uniform phase set needs M >= 2");
      return raw;
  }
  return raw;
}

PhaseSet conjugate_edge_view(const PhaseSet& phase) {
  switch (phase.kind()) {
    case PhaseSet::Kind::kInterval:
      return normalize_phase_set(PhaseSet::interval(-phase.hi(), -phase.lo()));
    case PhaseSet::Kind::kDiscrete: {
      std::vector<double> a = phase.angles();
      for (double& t : a) t = -t;
      return normalize_phase_set(PhaseSet::discrete(std::move(a)));
    }
    case PhaseSet::Kind::kUniform:
      return phase;
  }
  return phase;
}

// ---------------------------------------------------------------------------
// Instance

std::optional<int> Instance::power_constraint(Relation rel) const {
  for (size_t k = 0; k < constraints.size(); ++k) {
    if (constraints[k].rel == rel && constraints[k].q.n() == n && constraints[k].q.is_identity()) {
      return static_cast<int>(k);
    }
  }
  return std::nullopt;
}

namespace {

std::string edge_name(int i, int j) {
  std::ostringstream os;
  os << "{" << i + 1 << "," << j + 1 << "}";
  return os.str();
}

void add(std::vector<Violation>& out, std::string code, std::string message) {
  out.push_back({std::move(code), std::move(message)});
}

}  // namespace

std::vector<Violation> validate_instance(const Instance& inst) {
  std::vector<Violation> v;
  const int n = inst.n;
  if (n < 1) {
    add(v, "dimension", "variable count must be positive");
    return v;
  }
  if (inst.q0.n() != n) add(v, "dimension", "Q0 has wrong dimension");
  if (!std::isfinite(inst.objective_scale) || inst.objective_scale <= 0.0) {
    add(v, "objective_scale", "objective scale must be positive and finite");
  }

  for (size_t k = 0; k < inst.constraints.size(); ++k) {
    const auto& c = inst.constraints[k];
    if (c.q.n() != n) add(v, "dimension", "constraint " + std::to_string(k + 1) + " has wrong dimension");
    if (!std::isfinite(c.b)) add(v, "rhs_finite", "constraint " + std::to_string(k + 1) + " has non-finite b");
  }

  if (static_cast<int>(inst.bounds.size()) != n) {
    add(v, "dimension", "bounds must list one entry per variable");
  } else {
    for (int i = 0; i < n; ++i) {
      const auto& b = inst.bounds[i];
      const std::string at = "i=" + std::to_string(i + 1);
      if (!std::isfinite(b.l) || !std::isfinite(b.u)) add(v, "modulus_bound_finite", "non-finite modulus bound at " + at);
      if (b.l < 0.0) add(v, "modulus_bound_sign", "negative modulus bound at " + at);
      if (b.l > b.u) add(v, "modulus_bound_order", "modulus bound order at " + at);
    }
  }

  std::set<std::pair<int, int>> seen;
  for (const auto& e : inst.edges) {
    if (e.i < 0 || e.j >= n || e.i >= e.j) {
      add(v, "edge_index", "edge " + edge_name(e.i, e.j) + " must satisfy 1 <= i < j <= n");
      continue;
    }
    if (!seen.insert({e.i, e.j}).second) add(v, "duplicate_edge", "duplicate edge " + edge_name(e.i, e.j));
    try {
      if (!(normalize_phase_set(e.phase) == e.phase)) {
        add(v, "phase_canonical", "phase set of edge " + edge_name(e.i, e.j) + " is not canonical");
      }
    } catch (const Error& err) {
      add(v, "phase_invalid", "edge " + edge_name(e.i, e.j) + ": " + err.what());
    }
  }

  if (!inst.variable_phases.empty() && static_cast<int>(inst.variable_phases.size()) != n) {
    add(v, "dimension", "variable_phases must be empty or list one entry per variable");
  }
  if (!inst.modulus_levels.empty()) {
    if (static_cast<int>(inst.modulus_levels.size()) != n) {
      add(v, "dimension", "modulus_levels must be empty or list one entry per variable");
    } else if (static_cast<int>(inst.bounds.size()) == n) {
      for (int i = 0; i < n; ++i) {
        const auto& lv = inst.modulus_levels[i];
        const auto& b = inst.bounds[i];
        const bool sorted = std::is_sorted(lv.begin(), lv.end());
        const bool inside = std::all_of(lv.begin(), lv.end(), [&](double r) {
          return r >= b.l - 1e-12 && r <= b.u + 1e-12;
        });
        if (lv.empty() || !sorted || !inside) {
          add(v, "modulus_levels", "modulus levels at i=" + std::to_string(i + 1) + " must be sorted within [l, u]");
        }
      }
    }
  }

  if (inst.has_ratio_objective()) {
    if (inst.sense != Sense::kMaximize) add(v, "ratio_sense", "ratio objective requires maximize");
    for (size_t k = 0; k < inst.ratio_terms.size(); ++k) {
      const auto& t = inst.ratio_terms[k];
      if (t.q.n() != n) add(v, "dimension", "ratio term " + std::to_string(k + 1) + " has wrong dimension");
      if (!(t.weight > 0.0)) add(v, "ratio_weight", "ratio term " + std::to_string(k + 1) + " needs a positive weight");
    }
  }

  if (inst.homogenized_from) {
    const bool unit_last = static_cast<int>(inst.bounds.size()) == n && inst.bounds[n - 1].l == 1.0 &&
                           inst.bounds[n - 1].u == 1.0;
    if (*inst.homogenized_from != n - 1 || !unit_last) {
      add(v, "homogenized", "homogenized instance must end with a unit-modulus variable");
    }
  }
  return v;
}

double evaluate_objective(const Instance& inst, const VectorXcd& x) {
  if (inst.has_ratio_objective()) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& t : inst.ratio_terms) best = std::min(best, t.q.quad(x) / t.weight);
    return best;
  }
  return inst.objective_scale * inst.q0.quad(x);
}

std::vector<Violation> check_feasibility(const Instance& inst, const VectorXcd& x, double tol) {
  std::vector<Violation> v;
  if (x.size() != inst.n) {
    add(v, "dimension", "candidate has wrong length");
    return v;
  }
  for (int i = 0; i < inst.n; ++i) {
    const double r = std::abs(x(i));
    const auto& b = inst.bounds[i];
    const std::string at = "i=" + std::to_string(i + 1);
    const double slack = tol * (1.0 + b.u);
    if (r < b.l - slack || r > b.u + slack) add(v, "modulus", "modulus out of bounds at " + at);
    if (!inst.modulus_levels.empty()) {
      const auto& lv = inst.modulus_levels[i];
      const bool on_grid = std::any_of(lv.begin(), lv.end(), [&](double l) { return std::abs(l - r) <= slack; });
      if (!on_grid) add(v, "modulus_level", "modulus not on the amplitude grid at " + at);
    }
    if (!inst.variable_phases.empty() && inst.variable_phases[i] && r > tol) {
      if (!inst.variable_phases[i]->contains(std::arg(x(i)))) {
        add(v, "variable_phase", "phase outside its set at " + at);
      }
    }
  }
  for (const auto& e : inst.edges) {
    const Complex xij = x(e.i) * std::conj(x(e.j));
    if (std::abs(xij) <= tol) continue;
    if (!e.phase.contains(std::arg(xij))) {
      add(v, "edge_phase", "phase difference outside its set on edge " + edge_name(e.i, e.j));
    }
  }
  for (size_t k = 0; k < inst.constraints.size(); ++k) {
    const auto& c = inst.constraints[k];
    const double val = c.q.quad(x);
    const double slack = tol * (1.0 + std::abs(c.b));
    bool ok = true;
    switch (c.rel) {
      case Relation::kLessEqual:
        ok = val <= c.b + slack;
        break;
      case Relation::kGreaterEqual:
        ok = val >= c.b - slack;
        break;
      case Relation::kEqual:
        ok = std::abs(val - c.b) <= slack;
        break;
    }
    if (!ok) add(v, "quad_constraint", "quadratic constraint " + std::to_string(k + 1) + " violated");
  }
  return v;
}

// ---------------------------------------------------------------------------
// BeamformingInstance

double BeamformingInstance::delta() const {
  return std::sqrt(p_max) / static_cast<double>(1 << amplitude_bits);
}

std::vector<double> BeamformingInstance::amplitude_levels() const {
  const int count = 1 << amplitude_bits;
  std::vector<double> lv(count);
  for (int t = 0; t < count; ++t) lv[t] = (t + 1) * delta();
  return lv;
}

Instance BeamformingInstance::to_instance() const {
  Instance inst;
  inst.n = n();
  inst.sense = Sense::kMaximize;
  inst.q0 = HermitianMatrix::zero(inst.n);
  for (int k = 0; k < this->k(); ++k) {
    const MatrixXcd q = channels[k] * channels[k].adjoint();
    inst.ratio_terms.push_back({HermitianMatrix(q), sinr_targets[k] * noise_powers[k]});
  }
  inst.constraints.push_back({HermitianMatrix::identity(inst.n), p_tot, Relation::kLessEqual});
  const auto levels = amplitude_levels();
  const PhaseSet grid = PhaseSet::uniform(phase_count());
  for (int i = 0; i < inst.n; ++i) {
    inst.bounds.push_back({levels.front(), levels.back()});
    inst.modulus_levels.push_back(levels);
    inst.variable_phases.push_back(grid);
  }
  for (int i = 0; i < inst.n; ++i) {
    for (int j = i + 1; j < inst.n; ++j) inst.edges.push_back({i, j, grid});
  }
  return inst;
}

}  // namespace phaserelax
