#include <cmath>

#include <gtest/gtest.h>

#include "fixtures.h"
#include "phaserelax/bench.h"
#include "phaserelax/oracle.h"
#include "phaserelax/relax.h"
#include "phaserelax/rounding.h"

using namespace phaserelax;
using namespace phaserelax::testing;

TEST(ProjectCoordinate, Examples) {
  const ModulusBound box{1, 4};
  const auto a3 = std::optional<PhaseSet>(PhaseSet::uniform(3));
  auto z = project_coordinate(std::polar(1.2, 0.4), box, {}, a3);
  EXPECT_NEAR(std::abs(z - Complex(1.2, 0)), 0.0, 1e-15);

  const auto narrow = std::optional<PhaseSet>(normalize_phase_set(PhaseSet::interval(-kPi / 6, kPi / 6)));
  z = project_coordinate(std::polar(5.0, kPi), box, {}, narrow);
  EXPECT_NEAR(std::abs(z), 4.0, 1e-12);
  EXPECT_NEAR(std::arg(z), -kPi / 6, 1e-12);

  z = project_coordinate(0.0, {1, 1}, {}, std::optional<PhaseSet>(PhaseSet::uniform(4)));
  EXPECT_NEAR(std::abs(z - Complex(1, 0)), 0.0, 1e-15);

  z = project_coordinate(std::polar(0.3, 2.0), box, {}, std::nullopt);
  EXPECT_NEAR(std::abs(z), 1.0, 1e-15);
  EXPECT_NEAR(std::arg(z), 2.0, 1e-12);
}

TEST(ProjectCoordinate, LevelsRoundToNearest) {
  const std::vector<double> levels = {1, 2, 3, 4};
  const auto z = project_coordinate(std::polar(2.4, 0.0), {1, 4}, levels, std::nullopt);
  EXPECT_NEAR(std::abs(z), 2.0, 1e-15);
  // Tie goes to the smaller level.
  EXPECT_NEAR(std::abs(project_coordinate(2.5, {1, 4}, levels, std::nullopt)), 2.0, 1e-15);
}

TEST(RepairNames, RoundTrip) {
  for (auto r : {RepairKind::kAuto, RepairKind::kNone, RepairKind::kPowerNormalize, RepairKind::kBeamforming}) {
    EXPECT_EQ(parse_repair(repair_name(r)), r);
  }
  EXPECT_EQ(resolve_repair(gen_waveform(4, 3, 1.2, 1), RepairKind::kAuto), RepairKind::kPowerNormalize);
  EXPECT_EQ(resolve_repair(gen_beamforming(2, 2, 1, 1, 40, 20, 1).to_instance(), RepairKind::kAuto),
            RepairKind::kBeamforming);
  EXPECT_EQ(resolve_repair(three_var_example(), RepairKind::kAuto), RepairKind::kNone);
}

TEST(PowerNormalize, EqualModuliScale) {
  const auto inst = gen_waveform(4, 3, 1.2, 1);
  VectorXcd x = VectorXcd::Constant(4, Complex(0.5, 0));
  const auto r = repair_power_normalize(x, inst);
  ASSERT_TRUE(r.ok);
  EXPECT_NEAR(r.x.squaredNorm(), 4.0, 1e-9);
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(std::abs(r.x(i)), 1.0, 1e-12);
}

TEST(PowerNormalize, CapsAndRedistributes) {
  const auto inst = gen_waveform(5, 3, 1.2, 1);
  VectorXcd x(5);
  x << 3.0, 1.0, 1.0, Complex(0, 1), 0.5;
  const auto r = repair_power_normalize(x, inst);
  ASSERT_TRUE(r.ok);
  EXPECT_NEAR(r.x.squaredNorm(), 5.0, 1e-9);
  for (int i = 0; i < 5; ++i) {
    EXPECT_LE(std::norm(r.x(i)), 1.2 + 1e-12);
    EXPECT_NEAR(std::arg(r.x(i)), std::arg(x(i)), 1e-12);
  }
  EXPECT_NEAR(std::norm(r.x(0)), 1.2, 1e-12);
}

TEST(PowerNormalize, GammaOneForcesUnitModuli) {
  const auto inst = gen_waveform(4, 3, 1.0, 1);
  VectorXcd x(4);
  x << 2.0, 1.0, 0.5, 0.1;
  const auto r = repair_power_normalize(x, inst);
  ASSERT_TRUE(r.ok);
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(std::abs(r.x(i)), 1.0, 1e-9);
}

TEST(BeamRepair, WithinCapUnchanged) {
  const auto bf = gen_beamforming(3, 2, 2, 2, 40, 20, 3);
  const auto inst = bf.to_instance();
  VectorXcd x = VectorXcd::Constant(3, Complex(bf.delta(), 0));
  const auto r = repair_beamforming(x, inst);
  EXPECT_EQ(r.x, x);
  EXPECT_NEAR(r.t, evaluate_objective(inst, x), 1e-12);
}

TEST(BeamRepair, LowersLevelsUntilCapHolds) {
  const auto bf = gen_beamforming(4, 2, 3, 2, 10, 20, 3);
  const auto inst = bf.to_instance();
  const double top = bf.amplitude_levels().back();
  const VectorXcd x = VectorXcd::Constant(4, Complex(top, 0));
  const auto r = repair_beamforming(x, inst);
  EXPECT_LE(r.x.squaredNorm(), 10.0 + 1e-9);
  EXPECT_TRUE(is_feasible(inst, r.x));
  EXPECT_NEAR(r.t, evaluate_objective(inst, r.x), 1e-12);
}

TEST(SampleRound, MaxcutPairReachesOptimum) {
  MatrixXd re(2, 2);
  re << 0, 1, 1, 0;
  const auto inst = unit_modulus_instance(HermitianMatrix(re, MatrixXd::Zero(2, 2)), 2, Sense::kMaximize);
  const auto b = bound_of(RelaxationKind::kE2, inst);
  RoundingOptions o;
  o.trials = 50;
  const auto r = sample_round(b.x, inst, o);
  ASSERT_TRUE(r.feasible);
  EXPECT_NEAR(r.value, 2.0, 1e-9);
}

TEST(SampleRound, RankOneCovarianceRecoversDirection) {
  const auto inst = gen_continuous(5, AngleMode::kNarrow, 2);
  VectorXcd v(5);
  for (int i = 0; i < 5; ++i) v(i) = std::polar(1.0 + 0.4 * i, 0.02 * i);
  ASSERT_TRUE(is_feasible(inst, v));
  const auto r = sample_round(HermitianMatrix(MatrixXcd(v * v.adjoint())), inst, {10, 1, RepairKind::kAuto});
  ASSERT_TRUE(r.feasible);
  EXPECT_LE(r.value, evaluate_objective(inst, project_point(inst, v)) + 1e-9);
}

TEST(SampleRound, WaveformCandidatesAreFeasible) {
  const auto inst = gen_waveform(8, 3, 1.2, 5);
  const auto b = bound_of(RelaxationKind::kE2, inst);
  const auto r = sample_round(b.x, inst, {200, 3, RepairKind::kAuto});
  ASSERT_TRUE(r.feasible);
  EXPECT_TRUE(is_feasible(inst, r.x));
  EXPECT_NEAR(r.x.squaredNorm(), 8.0, 1e-8);
  EXPECT_LE(r.value, b.value + 1e-6 * (1 + std::abs(b.value)));
  EXPECT_NEAR(r.value, evaluate_objective(inst, r.x), 1e-9 * (1 + std::abs(r.value)));
}

TEST(SampleRound, DeterministicAndMonotoneInTrials) {
  const auto inst = gen_waveform(6, 3, 1.2, 7);
  const auto b = bound_of(RelaxationKind::kCsdp, inst);
  const auto a1 = sample_round(b.x, inst, {100, 9, RepairKind::kAuto});
  const auto a2 = sample_round(b.x, inst, {100, 9, RepairKind::kAuto});
  EXPECT_EQ(a1.value, a2.value);
  EXPECT_EQ(a1.x, a2.x);
  const auto more = sample_round(b.x, inst, {200, 9, RepairKind::kAuto});
  EXPECT_GE(more.value, a1.value);
}

TEST(SampleRound, BeamformingBelowOracle) {
  const auto inst = gen_beamforming(3, 2, 1, 2, 40, 20, 4).to_instance();
  const auto b = bound_of(RelaxationKind::kE2, inst);
  const auto r = sample_round(b.x, inst, {300, 0, RepairKind::kAuto});
  ASSERT_TRUE(r.feasible);
  const auto opt = enumerate_opt(inst);
  EXPECT_LE(r.value, opt.value + 1e-9);
  EXPECT_LE(opt.value, b.value + 1e-6 * (1 + std::abs(b.value)));
}

TEST(RepairEdgePhases, FixesBrokenPairs) {
  const auto inst = gen_continuous(4, AngleMode::kNarrow, 1);
  VectorXcd x(4);
  x << 1.0, std::polar(1.0, 1.0), std::polar(2.0, -0.9), std::polar(3.0, 3.0);
  const auto y = repair_edge_phases(inst, x);
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(std::abs(y(i)), std::abs(x(i)), 1e-12);
  EXPECT_TRUE(is_feasible(inst, y));
}
