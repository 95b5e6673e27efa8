#include "phaserelax/oracle.h"

#include <cmath>
#include <limits>

namespace phaserelax {

namespace {

struct Grid {
  std::vector<std::vector<Complex>> choices;  // per coordinate, digit order
};

// Digit order per coordinate: amplitude-major, phase-minor.
std::optional<Grid> build_grid(const Instance& inst) {
  Grid g;
  g.choices.resize(inst.n);
  for (int i = 0; i < inst.n; ++i) {
    std::vector<double> amps;
    if (!inst.modulus_levels.empty() && !inst.modulus_levels[i].empty()) {
      amps = inst.modulus_levels[i];
    } else if (inst.bounds[i].l == inst.bounds[i].u) {
      amps = {inst.bounds[i].l};
    } else {
      return std::nullopt;
    }
    if (inst.variable_phases.empty() || !inst.variable_phases[i] ||
        !inst.variable_phases[i]->is_finite()) {
      return std::nullopt;
    }
    const auto phases = inst.variable_phases[i]->angles();
    for (double a : amps) {
      for (double p : phases) g.choices[i].push_back(std::polar(a, p));
    }
  }
  return g;
}

// Dense row-major Hermitian form evaluated without allocation.
struct Form {
  std::vector<Complex> q;
  int n = 0;

  explicit Form(const HermitianMatrix& m) : n(m.n()) {
    q.resize(static_cast<size_t>(n) * n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) q[static_cast<size_t>(i) * n + j] = m(i, j);
    }
  }

  double operator()(const Complex* x) const {
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
      const Complex* row = &q[static_cast<size_t>(i) * n];
      acc += row[i].real() * std::norm(x[i]);
      Complex s = 0.0;
      for (int j = i + 1; j < n; ++j) s += row[j] * x[j];
      acc += 2.0 * (std::conj(x[i]) * s).real();
    }
    return acc;
  }
};

}  // namespace

std::optional<uint64_t> search_space_size(const Instance& inst) {
  const auto grid = build_grid(inst);
  if (!grid) return std::nullopt;
  uint64_t total = 1;
  for (const auto& c : grid->choices) {
    const uint64_t k = c.size();
    if (k != 0 && total > std::numeric_limits<uint64_t>::max() / k) {
      return std::numeric_limits<uint64_t>::max();
    }
    total *= k;
  }
  return total;
}

OracleResult enumerate_opt(const Instance& inst, uint64_t limit) {
  if (const auto bad = validate_instance(inst); !bad.empty()) {
    throw Error("invalid instance: " + bad.front().message);
  }
  const auto grid = build_grid(inst);
  if (!grid) throw Error("search space is infinite");
  const auto size = search_space_size(inst);
  if (*size > limit) {
    throw Error("search space has " + std::to_string(*size) + " candidates, above limit " +
                std::to_string(limit));
  }
  const int n = inst.n;
  const auto& ch = grid->choices;
  constexpr double kTol = 1e-8;

  // Edge admissibility depends on two coordinates only; tabulate it.
  struct EdgeTable {
    int i, j;
    std::vector<char> ok;  // ok[ci * size_j + cj]
  };
  std::vector<EdgeTable> edges;
  for (const auto& e : inst.edges) {
    EdgeTable t{e.i, e.j, {}};
    const size_t si = ch[e.i].size(), sj = ch[e.j].size();
    t.ok.resize(si * sj);
    for (size_t a = 0; a < si; ++a) {
      for (size_t b = 0; b < sj; ++b) {
        const Complex xij = ch[e.i][a] * std::conj(ch[e.j][b]);
        t.ok[a * sj + b] = std::abs(xij) <= kTol || e.phase.contains(std::arg(xij));
      }
    }
    edges.push_back(std::move(t));
  }

  struct Con {
    Form f;
    double b;
    Relation rel;
    bool identity;
  };
  std::vector<Con> cons;
  for (const auto& c : inst.constraints) {
    cons.push_back({Form(c.q), c.b, c.rel, c.q.is_identity()});
  }
  std::vector<Form> ratio;
  std::vector<double> weights;
  for (const auto& t : inst.ratio_terms) {
    ratio.emplace_back(t.q);
    weights.push_back(t.weight);
  }
  const Form objective(inst.q0);
  const bool maximize = inst.sense == Sense::kMaximize;

  auto admissible = [](double val, const Con& c) {
    const double slack = kTol * (1.0 + std::abs(c.b));
    switch (c.rel) {
      case Relation::kLessEqual:
        return val <= c.b + slack;
      case Relation::kGreaterEqual:
        return val >= c.b - slack;
      case Relation::kEqual:
        return std::abs(val - c.b) <= slack;
    }
    return false;
  };

  OracleResult out;
  std::vector<int> digit(n, 0);
  std::vector<Complex> x(n);
  std::vector<int> best_digit;
  bool found = false;
  double best = 0.0;

  for (uint64_t idx = 0; idx < *size; ++idx) {
    ++out.candidates;
    for (int i = 0; i < n; ++i) x[i] = ch[i][digit[i]];

    bool ok = true;
    for (const auto& t : edges) {
      if (!t.ok[static_cast<size_t>(digit[t.i]) * ch[t.j].size() + digit[t.j]]) {
        ok = false;
        break;
      }
    }
    if (ok) {
      for (const auto& c : cons) {
        double val;
        if (c.identity) {
          val = 0.0;
          for (int i = 0; i < n; ++i) val += std::norm(x[i]);
        } else {
          val = c.f(x.data());
        }
        if (!admissible(val, c)) {
          ok = false;
          break;
        }
      }
    }
    if (ok) {
      ++out.feasible;
      double val;
      if (!ratio.empty()) {
        val = std::numeric_limits<double>::infinity();
        for (size_t k = 0; k < ratio.size(); ++k) val = std::min(val, ratio[k](x.data()) / weights[k]);
      } else {
        val = inst.objective_scale * objective(x.data());
      }
      if (!found || (maximize ? val > best : val < best)) {
        found = true;
        best = val;
        best_digit = digit;
      }
    }

    for (int i = n - 1; i >= 0; --i) {
      if (++digit[i] < static_cast<int>(ch[i].size())) break;
      digit[i] = 0;
    }
  }

  if (!found) throw Error("no feasible candidate in the search space");
  out.value = best;
  out.x.resize(n);
  for (int i = 0; i < n; ++i) out.x(i) = ch[i][best_digit[i]];
  return out;
}

}  // namespace phaserelax
