#include <cmath>

#include <gtest/gtest.h>

#include "fixtures.h"
#include "phaserelax/conic_ir.h"
#include "phaserelax/json_io.h"
#include "phaserelax/relax.h"

using namespace phaserelax;
using namespace phaserelax::testing;

TEST(Svec, IndexAndRoundTrip) {
  EXPECT_EQ(svec_index(3, 0, 0), 0);
  EXPECT_EQ(svec_index(3, 2, 0), 2);
  EXPECT_EQ(svec_index(3, 1, 1), 3);
  EXPECT_EQ(svec_index(3, 2, 2), 5);
  MatrixXd m(3, 3);
  m << 1, 2, 3, 2, 4, 5, 3, 5, 6;
  const VectorXd v = svec(m);
  EXPECT_NEAR(v(1), 2 * std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(v.squaredNorm(), m.squaredNorm(), 1e-12);
  EXPECT_TRUE(smat(v, 3).isApprox(m, 1e-15));
}

TEST(Assemble, NonnegScalar) {
  ProgramBuilder pb;
  const int x = pb.add_variable({"x"});
  pb.add_nonneg(LinearExpr::var(x), "x>=0");
  const auto p = pb.assemble();
  ASSERT_EQ(p.cones.size(), 1u);
  EXPECT_EQ(p.cones[0], (ConeBlock{ConeKind::kNonNeg, 1}));
  EXPECT_EQ(p.a(0, 0), -1.0);
  EXPECT_EQ(p.b(0), 0.0);
}

TEST(Assemble, SocRows) {
  ProgramBuilder pb;
  const auto x = pb.add_hermitian("X", 2);
  const int r = pb.add_variable({"R", 0, 1});
  pb.add_soc({LinearExpr::var(r), x.re(0, 1), x.im(0, 1)}, "norm");
  const auto p = pb.assemble();
  ASSERT_EQ(p.cones.size(), 1u);
  EXPECT_EQ(p.cones[0], (ConeBlock{ConeKind::kSoc, 3}));
  EXPECT_EQ(p.a(0, p.column({"R", 0, 1})), -1.0);
}

TEST(Assemble, UnknownSymbolThrows) {
  ProgramBuilder pb;
  EXPECT_THROW(pb.index_of({"nope"}), Error);
  const auto p = pb.assemble();
  EXPECT_THROW(p.column({"nope"}), Error);
}

TEST(Assemble, Deterministic) {
  const auto inst = three_var_example();
  for (auto kind : {RelaxationKind::kCsdp, RelaxationKind::kE1, RelaxationKind::kChen, RelaxationKind::kE2}) {
    const auto a = build_relaxation(kind, inst), b = build_relaxation(kind, inst);
    EXPECT_EQ(a.a, b.a);
    EXPECT_EQ(a.b, b.b);
    EXPECT_EQ(a.c, b.c);
    EXPECT_EQ(dump_canonical(to_json(a)), dump_canonical(to_json(b)));
  }
}

TEST(Assemble, VarmapCoversColumnsOnce) {
  const auto p = build_e2(three_var_example());
  EXPECT_EQ(static_cast<int>(p.varmap.size()), p.num_vars());
  for (int k = 0; k < p.num_vars(); ++k) EXPECT_EQ(p.column(p.varmap[k]), k);
  p.check_dimensions();
}

TEST(Assemble, DumpShape) {
  const auto p = build_csdp(three_var_example());
  const auto j = to_json(p);
  ASSERT_TRUE(j.contains("A"));
  ASSERT_TRUE(j.contains("b"));
  ASSERT_TRUE(j.contains("c"));
  ASSERT_TRUE(j.contains("cones"));
}

namespace {

// Value of the Hermitian variable's columns for a given X.
VectorXd columns_for(const ConicProgram& p, const MatrixXcd& x) {
  VectorXd v = VectorXd::Zero(p.num_vars());
  for (int k = 0; k < p.num_vars(); ++k) {
    const auto& s = p.varmap[k];
    if (s.name == "X.re") v(k) = x(s.i, s.j).real();
    if (s.name == "X.im") v(k) = x(s.i, s.j).imag();
  }
  return v;
}

}  // namespace

TEST(HermitianLowering, InnerProductMatchesComplexTrace) {
  CounterRng rng(3, 0);
  for (int t = 0; t < 20; ++t) {
    const auto q = random_hermitian(rng, 3);
    const MatrixXcd x = random_psd(rng, 3, 2);
    ProgramBuilder pb;
    const auto xv = pb.add_hermitian("X", 3);
    pb.add_psd(xv, "X");
    pb.set_objective(xv.inner(q));
    const auto p = pb.assemble();
    const double direct = (q.matrix().adjoint() * x).trace().real();
    EXPECT_NEAR(p.c.dot(columns_for(p, x)), direct, 1e-12 * (1 + std::abs(direct)));
  }
}

TEST(HermitianLowering, IdentityIsTrace) {
  ProgramBuilder pb;
  const auto xv = pb.add_hermitian("X", 2);
  pb.set_objective(xv.inner(HermitianMatrix(MatrixXd::Identity(2, 2), MatrixXd::Zero(2, 2))));
  const auto p = pb.assemble();
  MatrixXcd x(2, 2);
  x << 2.0, Complex(0.3, 0.4), Complex(0.3, -0.4), 5.0;
  EXPECT_NEAR(p.c.dot(columns_for(p, x)), 7.0, 1e-15);
}

TEST(HermitianLowering, ScalarCase) {
  ProgramBuilder pb;
  const auto xv = pb.add_hermitian("X", 1);
  pb.add_psd(xv, "X");
  MatrixXd q(1, 1);
  q << 2.5;
  pb.set_objective(xv.inner(HermitianMatrix(q, MatrixXd::Zero(1, 1))));
  const auto p = pb.assemble();
  ASSERT_EQ(p.num_vars(), 1);
  EXPECT_EQ(p.c(0), 2.5);
  EXPECT_EQ(p.cones.back(), (ConeBlock{ConeKind::kPsd, 2}));
}

TEST(RealEmbedding, EigenvaluesDoubled) {
  CounterRng rng(7, 0);
  for (int t = 0; t < 100; ++t) {
    const auto h = random_hermitian(rng, 4);
    const VectorXd ev = Eigen::SelfAdjointEigenSolver<MatrixXcd>(h.matrix()).eigenvalues();
    VectorXd er = Eigen::SelfAdjointEigenSolver<MatrixXd>(real_embedding(h.matrix())).eigenvalues();
    for (int k = 0; k < 4; ++k) {
      EXPECT_NEAR(er(2 * k), ev(k), 1e-10);
      EXPECT_NEAR(er(2 * k + 1), ev(k), 1e-10);
    }
    EXPECT_EQ(ev.minCoeff() >= 0, er.minCoeff() >= 0);
  }
}

TEST(RecoverComplex, Examples) {
  EXPECT_TRUE(recover_complex(MatrixXd::Identity(4, 4)).matrix().isApprox(MatrixXcd::Identity(2, 2)));
  VectorXcd x(2);
  x << 1.0, Complex(0, 1);
  const MatrixXcd lift = x * x.adjoint();
  const auto back = recover_complex(real_embedding(lift));
  EXPECT_NEAR(std::abs(back(0, 1) - Complex(0, -1)), 0.0, 1e-15);
}

TEST(RecoverComplex, NoisyEmbeddingStaysHermitianPsd) {
  CounterRng rng(9, 0);
  for (int t = 0; t < 20; ++t) {
    MatrixXd y = real_embedding(random_psd(rng, 3, 3));
    for (int r = 0; r < 6; ++r) {
      for (int c = 0; c < 6; ++c) y(r, c) += 1e-7 * rng.normal();
    }
    const auto h = recover_complex(y);
    EXPECT_TRUE(h.matrix().isApprox(h.matrix().adjoint(), 1e-15));
    EXPECT_GE(Eigen::SelfAdjointEigenSolver<MatrixXcd>(h.matrix()).eigenvalues().minCoeff(), -1e-6);
  }
}
