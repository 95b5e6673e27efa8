#pragma once

#include <vector>

#include "phaserelax/model.h"
#include "phaserelax/rng.h"

namespace phaserelax::testing {

/// Three variables, 1 <= |x_i| <= 4, every pair in [-pi/6, pi/6], minimize.
inline Instance three_var_example() {
  MatrixXd re(3, 3), im(3, 3);
  re << -2, -4, 0, -4, 2, -2, 0, -2, 6;
  im << 0, -8, 1, 8, 0, -10, -1, 10, 0;
  Instance inst;
  inst.n = 3;
  inst.q0 = HermitianMatrix(re, im);
  inst.bounds.assign(3, {1.0, 4.0});
  for (int i = 0; i < 3; ++i) {
    for (int j = i + 1; j < 3; ++j) inst.edges.push_back({i, j, PhaseSet::interval(-kPi / 6, kPi / 6)});
  }
  return inst;
}

inline HermitianMatrix random_hermitian(CounterRng& rng, int n) {
  MatrixXcd m(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double re = rng.normal();
      const double im = rng.normal();
      m(i, j) = Complex(re, im);
    }
  }
  return HermitianMatrix(MatrixXcd((m + m.adjoint()) / 2.0));
}

inline MatrixXcd random_psd(CounterRng& rng, int n, int rank) {
  MatrixXcd g(n, rank);
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < rank; ++k) {
      const double re = rng.normal();
      const double im = rng.normal();
      g(i, k) = Complex(re, im);
    }
  }
  return g * g.adjoint();
}

/// Unit-modulus instance with A^m on every variable and every pair.
inline Instance unit_modulus_instance(const HermitianMatrix& q, int m, Sense sense) {
  Instance inst;
  inst.n = q.n();
  inst.sense = sense;
  inst.q0 = q;
  inst.bounds.assign(inst.n, {1.0, 1.0});
  inst.variable_phases.assign(inst.n, PhaseSet::uniform(m));
  for (int i = 0; i < inst.n; ++i) {
    for (int j = i + 1; j < inst.n; ++j) inst.edges.push_back({i, j, PhaseSet::uniform(m)});
  }
  return inst;
}

}  // namespace phaserelax::testing
