#include <cmath>
#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "phaserelax/bench.h"
#include "phaserelax/json_io.h"

using namespace phaserelax;

TEST(GapClosed, Examples) {
  EXPECT_NEAR(*gap_closed(10, 6, 8, 7), 0.75, 1e-15);
  EXPECT_NEAR(*gap_closed(10, 6, 10, 6), 0.0, 1e-15);
  EXPECT_FALSE(gap_closed(5, 5, 5, 5).has_value());
  EXPECT_NEAR(*gap_closed_vs_opt(39.8886, 38.7921, 36.3148), 0.3068, 1e-4);
  EXPECT_FALSE(gap_closed_vs_opt(3, 3, 3).has_value());
  EXPECT_NEAR(*gap_closed_vs_opt(5, 3, 3), 1.0, 1e-15);
}

TEST(Generators, WaveformShape) {
  const auto inst = gen_waveform(20, 3, 1.2, 1);
  EXPECT_TRUE(validate_instance(inst).empty());
  EXPECT_EQ(inst.sense, Sense::kMaximize);
  EXPECT_EQ(inst.edges.size(), 190u);
  EXPECT_NEAR(inst.bounds[0].u, std::sqrt(1.2), 1e-15);
  EXPECT_NEAR(inst.bounds[0].l, 0.0, 1e-15);
  ASSERT_TRUE(inst.power_constraint(Relation::kEqual).has_value());
  EXPECT_EQ(inst.constraints[*inst.power_constraint(Relation::kEqual)].b, 20.0);
  const Eigen::SelfAdjointEigenSolver<MatrixXcd> es(inst.q0.matrix());
  EXPECT_GE(es.eigenvalues().minCoeff(), -1e-9);
}

TEST(Generators, WaveformTraceConcentration) {
  const int n = 8;
  double mean = 0.0;
  for (uint64_t s = 0; s < 100; ++s) mean += gen_waveform(n, 3, 1.2, s).q0.matrix().trace().real();
  mean /= 100.0;
  EXPECT_NEAR(mean / (2.0 * n * n), 1.0, 0.05);
}

TEST(Generators, BeamformingShape) {
  const auto bf = gen_beamforming(4, 4, 3, 3, 40, 20, 1);
  EXPECT_NEAR(bf.delta(), std::sqrt(20.0) / 8, 1e-15);
  EXPECT_NEAR(bf.delta(), 0.5590, 1e-4);
  EXPECT_EQ(bf.k(), 4);
  for (double g : bf.sinr_targets) {
    EXPECT_GE(g, 1.0);
    EXPECT_LE(g, 4.0);
    EXPECT_EQ(g, std::round(g));
  }
  const auto inst = bf.to_instance();
  EXPECT_TRUE(validate_instance(inst).empty());
  for (const auto& t : inst.ratio_terms) {
    const Eigen::SelfAdjointEigenSolver<MatrixXcd> es(t.q.matrix());
    EXPECT_LE(std::abs(es.eigenvalues()(2)), 1e-9 * es.eigenvalues()(3));
  }
  // Channels depend on the seed only.
  EXPECT_EQ(gen_beamforming(4, 4, 4, 4, 40, 20, 1).channels, bf.channels);
}

TEST(Generators, ContinuousShape) {
  const auto narrow = gen_continuous(20, AngleMode::kNarrow, 1);
  EXPECT_TRUE(validate_instance(narrow).empty());
  EXPECT_EQ(narrow.sense, Sense::kMinimize);
  EXPECT_EQ(narrow.edges.size(), 190u);
  EXPECT_NO_THROW(build_chen(narrow));
  const auto wide = gen_continuous(20, AngleMode::kWide, 1);
  EXPECT_THROW(build_chen(wide), Error);
  EXPECT_TRUE(simplification_applies(wide));
  for (const auto& e : wide.edges) {
    EXPECT_GE(e.phase.span(), kPi);
    EXPECT_LT(e.phase.span(), kTwoPi);
  }
}

TEST(Generators, PureFunctionsOfSeed) {
  EXPECT_EQ(gen_continuous(6, AngleMode::kWide, 3), gen_continuous(6, AngleMode::kWide, 3));
  EXPECT_FALSE(gen_continuous(6, AngleMode::kWide, 3) == gen_continuous(6, AngleMode::kWide, 4));
  EXPECT_EQ(dump_canonical(to_json(gen_waveform(5, 3, 1.2, 8))),
            dump_canonical(to_json(gen_waveform(5, 3, 1.2, 8))));
}

TEST(Config, ParsesCartesianProduct) {
  const auto cfg = config_from_json(nlohmann::json::parse(R"({
    "family": "beamforming", "params": {"n": 4, "k": [4, 8], "m": 3, "b": [3, 4]},
    "seeds": [1, 2], "relaxations": ["csdp", "e2"], "oracle": true, "trials": 50,
    "solver": {"eps": 1e-6, "max_iters": 80}, "threads": 2})"));
  EXPECT_EQ(cfg.family, Family::kBeamforming);
  EXPECT_EQ(cfg.cells.size(), 4u);
  EXPECT_EQ(cfg.seeds.size(), 2u);
  EXPECT_TRUE(cfg.oracle);
  EXPECT_EQ(cfg.trials, 50);
  EXPECT_EQ(cfg.relax.solver.eps_gap, 1e-6);
  EXPECT_EQ(cfg.relax.solver.max_iters, 80);
}

TEST(Config, Rejects) {
  EXPECT_THROW(config_from_json(nlohmann::json::parse(R"({"family": "radar", "seeds": [1], "relaxations": ["e2"]})")),
               Error);
  EXPECT_THROW(config_from_json(nlohmann::json::parse(R"({"family": "waveform", "seeds": [], "relaxations": ["e2"]})")),
               Error);
  EXPECT_THROW(config_from_json(nlohmann::json::parse(R"({"family": "waveform", "seeds": [1]})")), Error);
  EXPECT_THROW(
      config_from_json(nlohmann::json::parse(R"({"family": "waveform", "seeds": [1], "relaxations": ["lu-hom"]})")),
      Error);
}

TEST(Invariants, FlagsDominanceAndSandwich) {
  InstanceRecord rec;
  rec.sense = Sense::kMaximize;
  RelaxationRecord c, e;
  c.ok = e.ok = true;
  c.bound = 10.0;
  e.kind = RelaxationKind::kE2;
  e.bound = 9.0;
  e.rounded = 8.0;
  rec.relaxations = {c, e};
  rec.oracle = 8.5;
  check_invariants(rec);
  EXPECT_TRUE(rec.violations.empty());

  rec.relaxations[1].bound = 10.5;
  check_invariants(rec);
  EXPECT_EQ(rec.violations.size(), 1u);

  rec.relaxations[1].bound = 9.0;
  rec.oracle = 9.5;
  check_invariants(rec);
  EXPECT_FALSE(rec.violations.empty());

  rec.sense = Sense::kMinimize;
  rec.oracle.reset();
  rec.relaxations[0].bound = 5.0;
  rec.relaxations[1].bound = 6.0;
  rec.relaxations[1].rounded = 7.0;
  check_invariants(rec);
  EXPECT_TRUE(rec.violations.empty());
  rec.relaxations[1].rounded = 5.5;
  check_invariants(rec);
  EXPECT_EQ(rec.violations.size(), 1u);
}

TEST(Experiment, SmallRunIsOrderedAndClean) {
  auto cfg = config_from_json(nlohmann::json::parse(R"({
    "family": "waveform", "params": {"n": 5, "M": [3, 4], "gamma": 1.0},
    "seeds": [1, 2], "relaxations": ["csdp", "e1", "e2"], "oracle": true, "trials": 100, "threads": 2})"));
  const auto report = run_experiment(cfg);
  ASSERT_EQ(report.instances.size(), 4u);
  EXPECT_EQ(report.instances[0].id, "waveform_n5_M3_s1");
  EXPECT_EQ(report.instances[1].id, "waveform_n5_M3_s2");
  EXPECT_EQ(report.instances[2].id, "waveform_n5_M4_s1");
  EXPECT_EQ(report.violation_count(), 0);
  for (const auto& rec : report.instances) {
    ASSERT_TRUE(rec.oracle.has_value());
    for (const auto& r : rec.relaxations) EXPECT_TRUE(r.ok) << r.error;
    if (rec.gap_closed_vs_opt) {
      EXPECT_LE(*rec.gap_closed_vs_opt, 1.0 + 1e-6);
    }
  }

  cfg.threads = 1;
  const auto serial = run_experiment(cfg);
  EXPECT_EQ(report_csv(serial).size() > 0, true);
  for (size_t k = 0; k < serial.instances.size(); ++k) {
    for (size_t r = 0; r < serial.instances[k].relaxations.size(); ++r) {
      EXPECT_EQ(serial.instances[k].relaxations[r].bound, report.instances[k].relaxations[r].bound);
    }
  }
}

TEST(Experiment, FailuresAreRecorded) {
  auto cfg = config_from_json(nlohmann::json::parse(R"({
    "family": "continuous", "params": {"n": 4, "mode": "wide"},
    "seeds": [1], "relaxations": ["csdp", "chen", "e2"], "trials": 20})"));
  const auto report = run_experiment(cfg);
  ASSERT_EQ(report.instances.size(), 1u);
  const auto& rec = report.instances[0];
  ASSERT_EQ(rec.relaxations.size(), 3u);
  EXPECT_FALSE(rec.relaxations[1].ok);
  EXPECT_FALSE(rec.relaxations[1].error.empty());
  EXPECT_TRUE(rec.relaxations[2].ok);
  EXPECT_EQ(report.violation_count(), 0);
}

TEST(Experiment, WritesReports) {
  const auto dir = std::filesystem::temp_directory_path() / "phaserelax_bench_test";
  std::filesystem::remove_all(dir);
  auto cfg = config_from_json(nlohmann::json::parse(R"({
    "family": "continuous", "params": {"n": 4, "mode": "narrow"},
    "seeds": [1], "relaxations": ["csdp", "chen", "e2"], "trials": 20})"));
  cfg.output_dir = dir;
  const auto report = run_experiment(cfg);
  write_report(cfg, report);
  EXPECT_TRUE(std::filesystem::exists(dir / "report.csv"));
  EXPECT_TRUE(std::filesystem::exists(dir / "report.md"));
  const auto j = read_json_file((dir / "instances" / "continuous_n4_narrow_s1.json").string());
  EXPECT_TRUE(j.contains("instance"));
  std::ifstream csv(dir / "report.csv");
  std::string header;
  std::getline(csv, header);
  EXPECT_NE(header.find("bound"), std::string::npos);
  std::filesystem::remove_all(dir);
}
