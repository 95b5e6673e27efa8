#include <cmath>

#include "phaserelax/bench.h"
#include "phaserelax/rng.h"

namespace phaserelax {

namespace {

// Stream ids keep the families independent under a shared seed.
constexpr uint64_t kWaveformStream = 0x5741;
constexpr uint64_t kBeamStream = 0x4246;
constexpr uint64_t kContinuousStream = 0x434f;

std::vector<Edge> all_pairs(int n, const PhaseSet& phase) {
  std::vector<Edge> edges;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) edges.push_back({i, j, phase});
  }
  return edges;
}

}  // namespace

Instance gen_waveform(int n, int m, double gamma, uint64_t seed) {
  if (n < 1 || m < 2 || gamma < 1.0) throw Error("gen_waveform: need n >= 1, M >= 2, gamma >= 1");
  CounterRng rng(seed, kWaveformStream);
  MatrixXcd q = MatrixXcd::Zero(n, n);
  for (int k = 0; k < n; ++k) {
    VectorXcd u(n);
    for (int i = 0; i < n; ++i) {
      const double re = rng.normal();
      const double im = rng.normal();
      u(i) = Complex(re, im);
    }
    q += u * u.adjoint();
  }
  Instance inst;
  inst.n = n;
  inst.sense = Sense::kMaximize;
  inst.q0 = HermitianMatrix(q);
  inst.constraints.push_back({HermitianMatrix::identity(n), static_cast<double>(n), Relation::kEqual});
  // sum |x_i|^2 = n with |x_i|^2 <= gamma bounds every modulus from below.
  const double lo = std::sqrt(std::max(0.0, n - (n - 1) * gamma));
  const double hi = std::sqrt(gamma);
  inst.bounds.assign(n, {lo, hi});
  const PhaseSet grid = PhaseSet::uniform(m);
  inst.variable_phases.assign(n, grid);
  inst.edges = all_pairs(n, grid);
  return inst;
}

BeamformingInstance gen_beamforming(int n, int k, int m, int b, double p_tot, double p_max,
                                    uint64_t seed) {
  if (n < 1 || k < 1 || m < 1 || b < 1 || p_tot <= 0.0 || p_max <= 0.0) {
    throw Error("gen_beamforming: parameters must be positive");
  }
  CounterRng rng(seed, kBeamStream);
  BeamformingInstance bf;
  const double s = std::sqrt(0.5);
  for (int c = 0; c < k; ++c) {
    VectorXcd h(n);
    for (int i = 0; i < n; ++i) {
      const double re = rng.normal();
      const double im = rng.normal();
      h(i) = Complex(s * re, s * im);
    }
    bf.channels.push_back(h);
  }
  for (int c = 0; c < k; ++c) bf.sinr_targets.push_back(static_cast<double>(1 + rng.below(4)));
  bf.noise_powers.assign(k, 1.0);
  bf.p_tot = p_tot;
  bf.p_max = p_max;
  bf.amplitude_bits = m;
  bf.phase_bits = b;
  return bf;
}

const char* angle_mode_name(AngleMode m) { return m == AngleMode::kNarrow ? "narrow" : "wide"; }

AngleMode parse_angle_mode(const std::string& s) {
  if (s == "narrow") return AngleMode::kNarrow;
  if (s == "wide") return AngleMode::kWide;
  throw Error("unknown angle mode '" + s + "'");
}

Instance gen_continuous(int n, AngleMode mode, uint64_t seed) {
  if (n < 1) throw Error("gen_continuous: need n >= 1");
  CounterRng rng(seed, kContinuousStream);
  MatrixXcd q = MatrixXcd::Zero(n, n);
  for (int i = 0; i < n; ++i) q(i, i) = rng.normal();
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double re = rng.normal();
      const double im = rng.normal();
      q(i, j) = Complex(re, im);
      q(j, i) = std::conj(q(i, j));
    }
  }
  Instance inst;
  inst.n = n;
  inst.sense = Sense::kMinimize;
  inst.q0 = HermitianMatrix(q);
  inst.bounds.assign(n, {1.0, 4.0});
  if (mode == AngleMode::kNarrow) {
    inst.edges = all_pairs(n, PhaseSet::interval(-kPi / 6, kPi / 6));
  } else {
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        const double lo = rng.uniform(-kPi, -kPi / 2);
        const double span = rng.uniform(kPi, kTwoPi);
        inst.edges.push_back({i, j, normalize_phase_set(PhaseSet::interval(lo, lo + span))});
      }
    }
  }
  return inst;
}

}  // namespace phaserelax
