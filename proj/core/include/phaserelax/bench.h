#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "phaserelax/model.h"
#include "phaserelax/relax.h"
#include "phaserelax/rounding.h"

namespace phaserelax {

// ---------------------------------------------------------------------------
// Generators (pure functions of parameters and seed)

/// Radar waveform design: maximize x^H Q x, Q = sum_k u_k u_k^H with standard
/// Gaussian real and imaginary parts, x^H x = n, |x_i|^2 <= gamma,
/// arg(x_i) in A^M, all pairs carrying A^M.
Instance gen_waveform(int n, int m, double gamma, uint64_t seed);

/// Discrete transmit beamforming with h_k ~ CN(0, I), gamma_k uniform on
/// {1, 2, 3, 4} and unit noise powers.
BeamformingInstance gen_beamforming(int n, int k, int m, int b, double p_tot, double p_max,
                                    uint64_t seed);

enum class AngleMode { kNarrow, kWide };
const char* angle_mode_name(AngleMode m);
AngleMode parse_angle_mode(const std::string& s);

/// minimize x^H Q0 x with 1 <= |x_i| <= 4 and an interval on every pair:
/// [-pi/6, pi/6] (narrow) or [lo, lo + phi], lo ~ U(-pi, -pi/2),
/// phi ~ U(pi, 2pi) (wide).
Instance gen_continuous(int n, AngleMode mode, uint64_t seed);

// ---------------------------------------------------------------------------
// Gap closed

/// 1 - (ub_e - lb_e) / (ub_c - lb_c); nullopt when the classical gap is
/// at most 1e-12.
std::optional<double> gap_closed(double ub_c, double lb_c, double ub_e, double lb_e);

/// 1 - (ub_e - v) / (ub_c - v); nullopt when ub_c - v is at most 1e-12.
std::optional<double> gap_closed_vs_opt(double ub_c, double ub_e, double v_star);

// ---------------------------------------------------------------------------
// Experiments

enum class Family { kWaveform, kBeamforming, kContinuous };
const char* family_name(Family f);
Family parse_family(const std::string& s);

/// One parameter cell. Unused fields keep their defaults.
struct Cell {
  int n = 0;
  int m = 0;  // phase count M (waveform) or amplitude bits (beamforming)
  int k = 0;
  int b = 0;
  double gamma = 1.2;
  double p_tot = 40.0;
  double p_max = 20.0;
  AngleMode mode = AngleMode::kNarrow;

  std::string label(Family f) const;
};

/// JSON form:
///
///   {"family": "waveform",
///    "params": {"n": 20, "M": [3, 6], "gamma": 1.2},
///    "seeds": [1, 2, 3], "relaxations": ["csdp", "e2"],
///    "enhanced": "e2", "trials": 1000, "rounding_seed": 0,
///    "repair": "auto", "oracle": false, "oracle_limit": 50000000,
///    "simplify": "auto", "solver": {"eps": 1e-7, "max_iters": 500},
///    "threads": 0, "output_dir": "out"}
///
/// Integer parameters accept a number or a list; cells are the Cartesian
/// product. Beamforming params: n, k, m, b, p_tot, p_max. Continuous: n, mode.
struct ExperimentConfig {
  Family family = Family::kWaveform;
  std::vector<Cell> cells;
  std::vector<uint64_t> seeds;
  std::vector<RelaxationKind> relaxations;
  RelaxationKind enhanced = RelaxationKind::kE2;
  int trials = 1000;
  uint64_t rounding_seed = 0;
  RepairKind repair = RepairKind::kAuto;
  bool oracle = false;
  uint64_t oracle_limit = 50'000'000;
  RelaxOptions relax;
  int threads = 0;  // 0: hardware concurrency
  std::filesystem::path output_dir = "bench_out";
};

ExperimentConfig config_from_json(const nlohmann::json& j);

/// Instance of a cell and seed.
Instance generate(Family family, const Cell& cell, uint64_t seed);

struct RelaxationRecord {
  RelaxationKind kind = RelaxationKind::kCsdp;
  bool ok = false;
  std::string error;
  std::string status;
  double bound = 0.0;         // UB (maximize) or LB (minimize)
  double solve_seconds = 0.0;
  int iterations = 0;
  int rows = 0;
  int cols = 0;
  std::optional<double> rounded;  // best feasible rounding value
  int rounding_feasible = 0;
};

struct InstanceRecord {
  std::string id;
  std::string cell;
  Cell params;
  uint64_t seed = 0;
  Sense sense = Sense::kMinimize;
  std::vector<RelaxationRecord> relaxations;
  std::optional<double> oracle;
  std::string oracle_error;
  std::optional<double> gap_closed;
  std::optional<double> gap_closed_vs_opt;
  std::vector<std::string> violations;

  const RelaxationRecord* find(RelaxationKind k) const;
};

struct BoundsReport {
  Family family = Family::kWaveform;
  RelaxationKind enhanced = RelaxationKind::kE2;
  std::vector<RelaxationKind> relaxations;
  std::vector<InstanceRecord> instances;

  int violation_count() const;
};

/// Dominance and sandwich checks on a finished record (fills `violations`).
void check_invariants(InstanceRecord& rec);

/// Solves, rounds and optionally enumerates one instance.
InstanceRecord run_instance(const ExperimentConfig& cfg, const Cell& cell, uint64_t seed);

/// Runs every cell x seed; the report is ordered by cell then seed regardless
/// of thread scheduling. Does not write files.
BoundsReport run_experiment(const ExperimentConfig& cfg);

std::string report_csv(const BoundsReport& report);
std::string report_markdown(const BoundsReport& report);
nlohmann::json to_json(const InstanceRecord& rec);

/// report.csv, report.md and instances/<id>.json under cfg.output_dir.
void write_report(const ExperimentConfig& cfg, const BoundsReport& report);

}  // namespace phaserelax
