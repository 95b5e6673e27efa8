#include "phaserelax/bench.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <thread>

#include "phaserelax/json_io.h"
#include "phaserelax/oracle.h"

namespace phaserelax {

namespace {

constexpr double kDegenerate = 1e-12;
constexpr double kDominanceTol = 1e-5;
constexpr double kSandwichTol = 1e-6;

std::string fmt(double v, const char* format = "%.6f") {
  char buf[64];
  std::snprintf(buf, sizeof buf, format, v);
  return buf;
}

std::string fmt_opt(const std::optional<double>& v, const char* format = "%.6f") {
  return v ? fmt(*v, format) : "n/a";
}

std::string pct(const std::optional<double>& v) { return v ? fmt(100.0 * *v, "%.2f%%") : "n/a"; }

std::vector<int> int_list(const nlohmann::json& params, const char* key, std::vector<int> dflt) {
  if (!params.contains(key)) return dflt;
  const auto& v = params.at(key);
  if (v.is_array()) return v.get<std::vector<int>>();
  return {v.get<int>()};
}

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

std::optional<double> median(std::vector<double> v) {
  if (v.empty()) return std::nullopt;
  std::sort(v.begin(), v.end());
  const size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

// Solver bound and rounding value mapped to (upper, lower) estimates.
std::pair<double, double> ub_lb(Sense sense, double bound, double rounded) {
  return sense == Sense::kMaximize ? std::pair{bound, rounded} : std::pair{rounded, bound};
}

}  // namespace

// ---------------------------------------------------------------------------
// Gap closed

std::optional<double> gap_closed(double ub_c, double lb_c, double ub_e, double lb_e) {
  const double den = ub_c - lb_c;
  if (den <= kDegenerate) return std::nullopt;
  return 1.0 - (ub_e - lb_e) / den;
}

std::optional<double> gap_closed_vs_opt(double ub_c, double ub_e, double v_star) {
  const double den = ub_c - v_star;
  if (den <= kDegenerate) return std::nullopt;
  return 1.0 - (ub_e - v_star) / den;
}

// ---------------------------------------------------------------------------
// Config

const char* family_name(Family f) {
  switch (f) {
    case Family::kWaveform:
      return "waveform";
    case Family::kBeamforming:
      return "beamforming";
    case Family::kContinuous:
      return "continuous";
  }
  return "?";
}

Family parse_family(const std::string& s) {
  for (auto f : {Family::kWaveform, Family::kBeamforming, Family::kContinuous}) {
    if (s == family_name(f)) return f;
  }
  throw Error("unknown family '" + s + "'");
}

std::string Cell::label(Family f) const {
  switch (f) {
    case Family::kWaveform:
      return "(" + std::to_string(n) + "," + std::to_string(m) + ")";
    case Family::kBeamforming:
      return "(" + std::to_string(n) + "," + std::to_string(k) + "," + std::to_string(m) + "," +
             std::to_string(b) + ")";
    case Family::kContinuous:
      return "(" + std::to_string(n) + "," + angle_mode_name(mode) + ")";
  }
  return "?";
}

ExperimentConfig config_from_json(const nlohmann::json& j) {
  ExperimentConfig cfg;
  try {
    cfg.family = parse_family(j.at("family").get<std::string>());
    const nlohmann::json params = j.value("params", nlohmann::json::object());
    switch (cfg.family) {
      case Family::kWaveform: {
        const double gamma = params.value("gamma", 1.2);
        for (int n : int_list(params, "n", {20})) {
          for (int m : int_list(params, "M", {3})) {
            Cell c;
            c.n = n;
            c.m = m;
            c.gamma = gamma;
            cfg.cells.push_back(c);
          }
        }
        break;
      }
      case Family::kBeamforming: {
        const double p_tot = params.value("p_tot", 40.0);
        const double p_max = params.value("p_max", 20.0);
        for (int n : int_list(params, "n", {4})) {
          for (int k : int_list(params, "k", {4})) {
            for (int m : int_list(params, "m", {3})) {
              for (int b : int_list(params, "b", {3})) {
                Cell c;
                c.n = n;
                c.k = k;
                c.m = m;
                c.b = b;
                c.p_tot = p_tot;
                c.p_max = p_max;
                cfg.cells.push_back(c);
              }
            }
          }
        }
        break;
      }
      case Family::kContinuous: {
        std::vector<std::string> modes;
        const auto mv = params.value("mode", nlohmann::json("narrow"));
        if (mv.is_array()) {
          modes = mv.get<std::vector<std::string>>();
        } else {
          modes = {mv.get<std::string>()};
        }
        for (int n : int_list(params, "n", {20})) {
          for (const auto& mode : modes) {
            Cell c;
            c.n = n;
            c.mode = parse_angle_mode(mode);
            cfg.cells.push_back(c);
          }
        }
        break;
      }
    }
    cfg.seeds = j.at("seeds").get<std::vector<uint64_t>>();
    for (const auto& r : j.at("relaxations")) cfg.relaxations.push_back(parse_relaxation(r.get<std::string>()));
    cfg.enhanced = parse_relaxation(j.value("enhanced", std::string("e2")));
    cfg.trials = j.value("trials", cfg.trials);
    cfg.rounding_seed = j.value("rounding_seed", cfg.rounding_seed);
    cfg.repair = parse_repair(j.value("repair", std::string("auto")));
    cfg.oracle = j.value("oracle", false);
    cfg.oracle_limit = j.value("oracle_limit", cfg.oracle_limit);
    cfg.relax.simplify = parse_simplify(j.value("simplify", std::string("auto")));
    if (j.contains("solver")) {
      const auto& s = j.at("solver");
      const double eps = s.value("eps", cfg.relax.solver.eps_primal);
      cfg.relax.solver.eps_primal = cfg.relax.solver.eps_dual = cfg.relax.solver.eps_gap = eps;
      cfg.relax.solver.max_iters = s.value("max_iters", cfg.relax.solver.max_iters);
    }
    cfg.threads = j.value("threads", 0);
    cfg.output_dir = j.value("output_dir", cfg.output_dir.string());
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("bad experiment config: ") + e.what());
  }
  if (cfg.seeds.empty()) throw Error("bad experiment config: seeds must be non-empty");
  if (cfg.relaxations.empty()) throw Error("bad experiment config: relaxations must be non-empty");
  if (cfg.trials < 1) throw Error("bad experiment config: trials must be at least 1");
  for (auto r : cfg.relaxations) {
    if (r == RelaxationKind::kLuHom) {
      throw Error("bad experiment config: lu-hom needs a homogenized instance");
    }
  }
  return cfg;
}

Instance generate(Family family, const Cell& cell, uint64_t seed) {
  switch (family) {
    case Family::kWaveform:
      return gen_waveform(cell.n, cell.m, cell.gamma, seed);
    case Family::kBeamforming:
      return gen_beamforming(cell.n, cell.k, cell.m, cell.b, cell.p_tot, cell.p_max, seed)
          .to_instance();
    case Family::kContinuous:
      return gen_continuous(cell.n, cell.mode, seed);
  }
  throw Error("unknown family");
}

// ---------------------------------------------------------------------------
// Running

const RelaxationRecord* InstanceRecord::find(RelaxationKind k) const {
  for (const auto& r : relaxations) {
    if (r.kind == k && r.ok) return &r;
  }
  return nullptr;
}

int BoundsReport::violation_count() const {
  int n = 0;
  for (const auto& r : instances) n += static_cast<int>(r.violations.size());
  return n;
}

void check_invariants(InstanceRecord& rec) {
  rec.violations.clear();
  // +1: larger bound is weaker (maximize); -1 for minimize.
  const double s = rec.sense == Sense::kMaximize ? 1.0 : -1.0;
  auto dominance = [&](RelaxationKind weak, RelaxationKind strong, double mult) {
    const auto* w = rec.find(weak);
    const auto* t = rec.find(strong);
    if (!w || !t) return;
    const double tau = mult * kDominanceTol * (1.0 + std::abs(w->bound));
    if (s * (t->bound - w->bound) > tau) {
      rec.violations.push_back(std::string("dominance: ") + relaxation_name(strong) + " " +
                               fmt(t->bound, "%.9g") + " weaker than " + relaxation_name(weak) +
                               " " + fmt(w->bound, "%.9g"));
    }
  };
  dominance(RelaxationKind::kCsdp, RelaxationKind::kE1, 1.0);
  dominance(RelaxationKind::kCsdp, RelaxationKind::kChen, 1.0);
  dominance(RelaxationKind::kE1, RelaxationKind::kE2, 1.0);
  dominance(RelaxationKind::kCsdp, RelaxationKind::kE2, 2.0);

  for (const auto& r : rec.relaxations) {
    if (!r.ok) continue;
    const std::string name = relaxation_name(r.kind);
    const double ref = rec.oracle ? *rec.oracle : r.bound;
    const double tol = kSandwichTol * std::max(1.0, std::abs(ref));
    if (r.rounded && s * (*r.rounded - r.bound) > tol) {
      rec.violations.push_back("sandwich: rounding beats the " + name + " bound");
    }
    if (rec.oracle) {
      if (s * (*rec.oracle - r.bound) > tol) {
        rec.violations.push_back("sandwich: optimum beyond the " + name + " bound");
      }
      if (r.rounded && s * (*r.rounded - *rec.oracle) > tol) {
        rec.violations.push_back("sandwich: " + name + " rounding beats the optimum");
      }
    }
  }
}

InstanceRecord run_instance(const ExperimentConfig& cfg, const Cell& cell, uint64_t seed) {
  InstanceRecord rec;
  rec.cell = cell.label(cfg.family);
  rec.params = cell;
  rec.seed = seed;
  {
    std::string id = std::string(family_name(cfg.family)) + "_n" + std::to_string(cell.n);
    switch (cfg.family) {
      case Family::kWaveform:
        id += "_M" + std::to_string(cell.m);
        break;
      case Family::kBeamforming:
        id += "_k" + std::to_string(cell.k) + "_m" + std::to_string(cell.m) + "_b" +
              std::to_string(cell.b);
        break;
      case Family::kContinuous:
        id += std::string("_") + angle_mode_name(cell.mode);
        break;
    }
    rec.id = id + "_s" + std::to_string(seed);
  }
  const Instance inst = generate(cfg.family, cell, seed);
  rec.sense = inst.sense;

  RoundingOptions ropts;
  ropts.trials = cfg.trials;
  ropts.seed = cfg.rounding_seed;
  ropts.repair = cfg.repair;

  for (auto kind : cfg.relaxations) {
    RelaxationRecord r;
    r.kind = kind;
    try {
      const BoundResult br = bound_of(kind, inst, cfg.relax);
      r.ok = true;
      r.status = status_name(br.solution.status);
      r.bound = br.value;
      r.solve_seconds = br.solve_seconds;
      r.iterations = br.solution.iterations;
      r.rows = br.rows;
      r.cols = br.cols;
      const RoundingResult rr = sample_round(br.x, inst, ropts);
      r.rounding_feasible = rr.feasible_count;
      if (rr.feasible) r.rounded = rr.value;
    } catch (const SolveFailure& e) {
      r.status = status_name(e.solution.status);
      r.error = e.what();
    } catch (const Error& e) {
      r.status = "error";
      r.error = e.what();
    }
    rec.relaxations.push_back(std::move(r));
  }

  if (cfg.oracle) {
    try {
      rec.oracle = enumerate_opt(inst, cfg.oracle_limit).value;
    } catch (const Error& e) {
      rec.oracle_error = e.what();
    }
  }

  const auto* c = rec.find(RelaxationKind::kCsdp);
  const auto* e = rec.find(cfg.enhanced);
  if (c && e && cfg.enhanced != RelaxationKind::kCsdp) {
    if (c->rounded && e->rounded) {
      const auto [ub_c, lb_c] = ub_lb(rec.sense, c->bound, *c->rounded);
      const auto [ub_e, lb_e] = ub_lb(rec.sense, e->bound, *e->rounded);
      rec.gap_closed = gap_closed(ub_c, lb_c, ub_e, lb_e);
    }
    if (rec.oracle) {
      rec.gap_closed_vs_opt = rec.sense == Sense::kMaximize
                                  ? gap_closed_vs_opt(c->bound, e->bound, *rec.oracle)
                                  : gap_closed_vs_opt(-c->bound, -e->bound, -*rec.oracle);
    }
  }
  check_invariants(rec);
  return rec;
}

BoundsReport run_experiment(const ExperimentConfig& cfg) {
  struct Job {
    const Cell* cell;
    uint64_t seed;
  };
  std::vector<Job> jobs;
  for (const auto& c : cfg.cells) {
    for (uint64_t s : cfg.seeds) jobs.push_back({&c, s});
  }
  BoundsReport report;
  report.family = cfg.family;
  report.enhanced = cfg.enhanced;
  report.relaxations = cfg.relaxations;
  report.instances.resize(jobs.size());

  int threads = cfg.threads > 0 ? cfg.threads : static_cast<int>(std::thread::hardware_concurrency());
  threads = std::clamp(threads, 1, static_cast<int>(std::max<size_t>(1, jobs.size())));
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (size_t i = next++; i < jobs.size(); i = next++) {
      report.instances[i] = run_instance(cfg, *jobs[i].cell, jobs[i].seed);
    }
  };
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  return report;
}

// ---------------------------------------------------------------------------
// Output

nlohmann::json to_json(const InstanceRecord& rec) {
  nlohmann::json j;
  j["id"] = rec.id;
  j["cell"] = rec.cell;
  j["seed"] = rec.seed;
  j["sense"] = rec.sense == Sense::kMaximize ? "maximize" : "minimize";
  auto opt = [](const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(); };
  nlohmann::json rel = nlohmann::json::array();
  for (const auto& r : rec.relaxations) {
    nlohmann::json x;
    x["relaxation"] = relaxation_name(r.kind);
    x["ok"] = r.ok;
    x["status"] = r.status;
    if (!r.error.empty()) x["error"] = r.error;
    if (r.ok) {
      x["bound"] = r.bound;
      x["solve_seconds"] = r.solve_seconds;
      x["iterations"] = r.iterations;
      x["rows"] = r.rows;
      x["cols"] = r.cols;
      x["rounding_value"] = opt(r.rounded);
      x["rounding_feasible_candidates"] = r.rounding_feasible;
    }
    rel.push_back(x);
  }
  j["relaxations"] = rel;
  j["oracle"] = opt(rec.oracle);
  if (!rec.oracle_error.empty()) j["oracle_error"] = rec.oracle_error;
  j["gap_closed"] = opt(rec.gap_closed);
  j["gap_closed_vs_opt"] = opt(rec.gap_closed_vs_opt);
  j["violations"] = rec.violations;
  return j;
}

std::string report_csv(const BoundsReport& report) {
  std::ostringstream os;
  os << "id,cell,seed,sense";
  for (auto k : report.relaxations) {
    const std::string n = relaxation_name(k);
    os << "," << n << "_status," << n << "_bound," << n << "_rounding," << n << "_seconds";
  }
  os << ",oracle,gap_closed,gap_closed_vs_opt,violations\n";
  auto cell = [](const std::optional<double>& v) { return v ? fmt(*v, "%.10g") : std::string(); };
  for (const auto& rec : report.instances) {
    os << rec.id << ",\"" << rec.cell << "\"," << rec.seed << ","
       << (rec.sense == Sense::kMaximize ? "max" : "min");
    for (const auto& r : rec.relaxations) {
      os << "," << r.status << ",";
      if (r.ok) os << fmt(r.bound, "%.10g");
      os << "," << cell(r.rounded) << ",";
      if (r.ok) os << fmt(r.solve_seconds, "%.4f");
    }
    os << "," << cell(rec.oracle) << "," << cell(rec.gap_closed) << "," << cell(rec.gap_closed_vs_opt)
       << ",\"";
    for (size_t i = 0; i < rec.violations.size(); ++i) os << (i ? "; " : "") << rec.violations[i];
    os << "\"\n";
  }
  return os.str();
}

std::string report_markdown(const BoundsReport& report) {
  const bool any_oracle = std::any_of(report.instances.begin(), report.instances.end(),
                                      [](const InstanceRecord& r) { return r.oracle.has_value(); });
  const bool maximize = !report.instances.empty() && report.instances.front().sense == Sense::kMaximize;
  const char* bound_name = maximize ? "UB" : "LB";
  const char* round_name = maximize ? "LB" : "UB";
  const std::string enh = relaxation_name(report.enhanced);

  std::ostringstream os;
  os << "# " << family_name(report.family) << " experiment\n\n";
  os << "Bounds are relaxation optima; " << round_name
     << " columns come from Gaussian randomization of each relaxation's solution. "
        "Times are solver wallclock seconds. Gap closed compares "
     << enh << " against csdp.\n\n";

  os << "## Instances\n\n| ID | cell | seed |";
  for (auto k : report.relaxations) {
    const std::string n = relaxation_name(k);
    os << " " << n << " " << bound_name << " | " << n << " " << round_name << " | " << n << " time |";
  }
  if (any_oracle) os << " optimal value |";
  os << " gap closed |";
  if (any_oracle) os << " gap closed vs opt |";
  os << "\n|---|---|---|";
  for (size_t i = 0; i < report.relaxations.size(); ++i) os << "---:|---:|---:|";
  if (any_oracle) os << "---:|";
  os << "---:|";
  if (any_oracle) os << "---:|";
  os << "\n";
  int idx = 1;
  for (const auto& rec : report.instances) {
    os << "| " << idx++ << " | " << rec.cell << " | " << rec.seed << " |";
    for (const auto& r : rec.relaxations) {
      if (r.ok) {
        os << " " << fmt(r.bound, "%.4f") << " | " << fmt_opt(r.rounded, "%.4f") << " | "
           << fmt(r.solve_seconds, "%.2f") << " |";
      } else {
        os << " " << r.status << " | - | - |";
      }
    }
    if (any_oracle) os << " " << fmt_opt(rec.oracle, "%.4f") << " |";
    os << " " << pct(rec.gap_closed) << " |";
    if (any_oracle) os << " " << pct(rec.gap_closed_vs_opt) << " |";
    os << "\n";
  }

  // Cell averages. "ratio of averages" recomputes the gap from averaged bounds.
  os << "\n## Cell averages\n\n| cell | instances |";
  for (auto k : report.relaxations) {
    const std::string n = relaxation_name(k);
    os << " " << n << " " << bound_name << " | " << n << " time |";
  }
  if (any_oracle) os << " optimal value |";
  os << " gap closed (mean) | gap closed (median) | gap closed (ratio of averages) |\n|---|---:|";
  for (size_t i = 0; i < report.relaxations.size(); ++i) os << "---:|---:|";
  if (any_oracle) os << "---:|";
  os << "---:|---:|---:|\n";

  std::vector<std::string> order;
  std::map<std::string, std::vector<const InstanceRecord*>> groups;
  for (const auto& rec : report.instances) {
    if (!groups.count(rec.cell)) order.push_back(rec.cell);
    groups[rec.cell].push_back(&rec);
  }
  const double s = maximize ? 1.0 : -1.0;
  for (const auto& label : order) {
    const auto& g = groups[label];
    os << "| " << label << " | " << g.size() << " |";
    for (auto k : report.relaxations) {
      std::vector<double> b, t;
      for (const auto* rec : g) {
        if (const auto* r = rec->find(k)) {
          b.push_back(r->bound);
          t.push_back(r->solve_seconds);
        }
      }
      if (b.empty()) {
        os << " - | - |";
      } else {
        os << " " << fmt(mean(b), "%.4f") << " | " << fmt(mean(t), "%.2f") << " |";
      }
    }
    std::vector<double> opt, gaps;
    for (const auto* rec : g) {
      if (rec->oracle) opt.push_back(*rec->oracle);
      const auto gc = any_oracle ? rec->gap_closed_vs_opt : rec->gap_closed;
      if (gc) gaps.push_back(*gc);
    }
    if (any_oracle) os << " " << (opt.empty() ? "n/a" : fmt(mean(opt), "%.4f")) << " |";

    // Ratio of averages over instances where all inputs exist.
    std::vector<double> uc, ue, lc, le;
    for (const auto* rec : g) {
      const auto* c = rec->find(RelaxationKind::kCsdp);
      const auto* e = rec->find(report.enhanced);
      if (!c || !e) continue;
      if (any_oracle) {
        if (!rec->oracle) continue;
        uc.push_back(c->bound);
        ue.push_back(e->bound);
        lc.push_back(*rec->oracle);
        le.push_back(*rec->oracle);
      } else {
        if (!c->rounded || !e->rounded) continue;
        uc.push_back(c->bound);
        ue.push_back(e->bound);
        lc.push_back(*c->rounded);
        le.push_back(*e->rounded);
      }
    }
    std::optional<double> ratio_avg;
    if (!uc.empty()) {
      // Gap widths are oriented so that both senses share one formula.
      ratio_avg = gap_closed(s * mean(uc), s * mean(lc), s * mean(ue), s * mean(le));
    }
    os << " " << (gaps.empty() ? "n/a" : pct(mean(gaps))) << " | " << pct(median(gaps)) << " | "
       << pct(ratio_avg) << " |\n";
  }

  const int viol = report.violation_count();
  os << "\n## Invariants\n\n";
  if (viol == 0) {
    os << "No dominance or sandwich violations.\n";
  } else {
    os << viol << " violation(s):\n\n";
    for (const auto& rec : report.instances) {
      for (const auto& v : rec.violations) os << "- " << rec.id << ": " << v << "\n";
    }
  }
  bool failures = false;
  for (const auto& rec : report.instances) {
    for (const auto& r : rec.relaxations) {
      if (r.ok) continue;
      if (!failures) os << "\n## Failed solves\n\n";
      failures = true;
      os << "- " << rec.id << " " << relaxation_name(r.kind) << ": " << r.error << "\n";
    }
  }
  return os.str();
}

void write_report(const ExperimentConfig& cfg, const BoundsReport& report) {
  write_text_file(cfg.output_dir / "report.csv", report_csv(report));
  write_text_file(cfg.output_dir / "report.md", report_markdown(report));
  for (const auto& rec : report.instances) {
    nlohmann::json j = to_json(rec);
    j["instance"] = to_json(generate(report.family, rec.params, rec.seed));
    write_text_file(cfg.output_dir / "instances" / (rec.id + ".json"), dump_canonical(j));
  }
}

}  // namespace phaserelax
