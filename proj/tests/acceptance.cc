// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 on any
// failure.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "fixtures.h"
#include "hull_checks.h"
#include "phaserelax/bench.h"
#include "phaserelax/relax.h"
#include "solver_suite.h"

using namespace phaserelax;
using namespace phaserelax::testing;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

double median(std::vector<double> v) {
  if (v.empty()) return std::nan("");
  std::sort(v.begin(), v.end());
  const size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

double rel_tol(double scale, double v) { return scale * (1.0 + std::abs(v)); }

ExperimentConfig base_config(Family f, std::vector<RelaxationKind> kinds, std::vector<uint64_t> seeds) {
  ExperimentConfig cfg;
  cfg.family = f;
  cfg.relaxations = std::move(kinds);
  cfg.seeds = std::move(seeds);
  cfg.trials = 1000;
  return cfg;
}

std::vector<uint64_t> seeds(uint64_t n) {
  std::vector<uint64_t> s;
  for (uint64_t k = 1; k <= n; ++k) s.push_back(k);
  return s;
}

int count_prefix(const std::vector<BoundsReport>& reports, const std::string& prefix) {
  int n = 0;
  for (const auto& r : reports) {
    for (const auto& rec : r.instances) {
      for (const auto& v : rec.violations) n += v.rfind(prefix, 0) == 0;
    }
  }
  return n;
}

int failed_solves(const BoundsReport& r, RelaxationKind k) {
  int n = 0;
  for (const auto& rec : r.instances) {
    const bool ran = std::any_of(rec.relaxations.begin(), rec.relaxations.end(),
                                 [&](const auto& x) { return x.kind == k; });
    n += ran && !rec.find(k);
  }
  return n;
}

// 1
Outcome worked_example() {
  const auto t0 = Clock::now();
  const auto inst = three_var_example();
  const double e1 = bound_of(RelaxationKind::kE1, inst).value;
  const double chen = bound_of(RelaxationKind::kChen, inst).value;
  const double e2 = bound_of(RelaxationKind::kE2, inst).value;
  const double t = seconds_since(t0);
  const bool ok = std::abs(e1 + 248.39) <= 0.05 && std::abs(chen + 248.39) <= 0.05 &&
                  std::abs(e2 + 248.15) <= 0.05 && std::abs(e2 - e1 - 0.24) <= 0.05 && t < 5.0;
  return {ok, fmt("e1 %.4f, chen %.4f, e2 %.4f, e2-e1 %.4f, %.2fs", e1, chen, e2, e2 - e1, t)};
}

// 2
Outcome chen_equivalence() {
  const auto t0 = Clock::now();
  double worst = 0.0;
  int bad = 0, total = 0;
  for (int n : {5, 10}) {
    for (uint64_t s = 1; s <= 10; ++s) {
      const auto inst = gen_continuous(n, AngleMode::kNarrow, 1000 + s);
      const double e1 = bound_of(RelaxationKind::kE1, inst).value;
      const double chen = bound_of(RelaxationKind::kChen, inst).value;
      const double r = std::abs(e1 - chen) / (1.0 + std::abs(e1));
      worst = std::max(worst, r);
      bad += r > 1e-4;
      ++total;
    }
  }
  const double t = seconds_since(t0);
  return {bad == 0 && t < 120.0,
          fmt("%d/%d within 1e-4, worst relative gap %.2e, %.1fs", total - bad, total, worst, t)};
}

// 3
Outcome homogenized_collapse() {
  const auto t0 = Clock::now();
  double worst = 0.0;
  int bad = 0;
  for (uint64_t s = 1; s <= 20; ++s) {
    CounterRng rng(s, 0x4c55);
    const int n = 3 + static_cast<int>(s % 4);
    NonhomogeneousProblem prob;
    prob.base.n = n;
    prob.base.sense = s % 2 ? Sense::kMinimize : Sense::kMaximize;
    prob.base.q0 = random_hermitian(rng, n);
    if (s % 3 == 0) {
      prob.base.bounds.assign(n, {1.0, 1.0});
    } else {
      prob.base.bounds.assign(n, {0.5, 2.0});
    }
    prob.c = VectorXcd::Zero(n);
    prob.variable_phases.assign(n, PhaseSet::uniform(3 + static_cast<int>(s % 5)));
    const auto inst = homogenize(prob);
    const double lu = bound_of(RelaxationKind::kLuHom, inst).value;
    const double csdp = bound_of(RelaxationKind::kCsdp, inst).value;
    const double r = std::abs(lu - csdp) / (1.0 + std::abs(csdp));
    worst = std::max(worst, r);
    bad += r > 1e-4;
  }
  const double t = seconds_since(t0);
  return {bad == 0 && t < 120.0, fmt("%d/20 within 1e-4, worst relative gap %.2e, %.1fs", 20 - bad, worst, t)};
}

// 6
Outcome waveform_trend(const BoundsReport& m3, const BoundsReport& m6) {
  int strict = 0;
  std::vector<double> g3, g6;
  for (const auto& rec : m3.instances) {
    const auto* c = rec.find(RelaxationKind::kCsdp);
    const auto* e = rec.find(RelaxationKind::kE2);
    if (c && e && e->bound < c->bound - rel_tol(1e-6, c->bound)) ++strict;
    if (rec.gap_closed) g3.push_back(*rec.gap_closed);
  }
  for (const auto& rec : m6.instances) {
    if (rec.gap_closed) g6.push_back(*rec.gap_closed);
  }
  const double med3 = median(g3), med6 = median(g6);
  const bool ok = strict >= 9 && g3.size() == m3.instances.size() && med3 > 0.25 &&
                  g6.size() == m6.instances.size() && med6 > 0.05;
  return {ok, fmt("M=3: e2 below csdp on %d/%zu, median gap closed %.1f%%; M=6: median %.1f%%", strict,
                  m3.instances.size(), 100 * med3, 100 * med6)};
}

// 7
Outcome beamforming_trend(const BoundsReport& r) {
  int ok_dom = 0, with_opt = 0;
  double sum = 0.0;
  double sum_c = 0.0, sum_e = 0.0, sum_v = 0.0;
  for (const auto& rec : r.instances) {
    const auto* c = rec.find(RelaxationKind::kCsdp);
    const auto* e = rec.find(RelaxationKind::kE2);
    if (c && e && e->bound <= c->bound + rel_tol(1e-5, c->bound)) ++ok_dom;
    if (rec.gap_closed_vs_opt) {
      sum += *rec.gap_closed_vs_opt;
      ++with_opt;
    }
    if (c && e && rec.oracle) {
      sum_c += c->bound;
      sum_e += e->bound;
      sum_v += *rec.oracle;
    }
  }
  const size_t total = r.instances.size();
  const double avg = with_opt ? sum / with_opt : std::nan("");
  const double ratio = 1.0 - (sum_e - sum_v) / (sum_c - sum_v);
  const bool ok = ok_dom == static_cast<int>(total) && with_opt == static_cast<int>(total) && avg > 0.05;
  return {ok, fmt("e2 <= csdp on %d/%zu, mean gap closed vs optimum %.1f%% (ratio of means %.1f%%)", ok_dom,
                  total, 100 * avg, 100 * ratio)};
}

// 8
Outcome wide_applicability(const BoundsReport& r) {
  int chen_errors = 0, e2_ok = 0, strict = 0;
  for (const auto& rec : r.instances) {
    for (const auto& x : rec.relaxations) {
      if (x.kind == RelaxationKind::kChen && !x.ok && x.error.find("undefined") != std::string::npos) {
        ++chen_errors;
      }
    }
    const auto* c = rec.find(RelaxationKind::kCsdp);
    const auto* e = rec.find(RelaxationKind::kE2);
    if (e) ++e2_ok;
    if (c && e && e->bound > c->bound + rel_tol(1e-6, c->bound)) ++strict;
  }
  const int total = static_cast<int>(r.instances.size());
  return {chen_errors == total && e2_ok == total && strict >= 8,
          fmt("chen rejected %d/%d, e2 solved %d/%d, e2 above csdp on %d/%d", chen_errors, total, e2_ok, total,
              strict, total)};
}

// 9
Outcome hull_suites() {
  int violations = 0;
  double disc = 0.0, cont = 0.0;
  uint64_t seed = 1;
  for (const auto& v : hull_variants()) {
    violations += validity_violations(v, 10000, seed++);
    const double e = support_error(v.phase, 1000, 10000, seed++);
    if (v.phase.is_finite()) {
      disc = std::max(disc, e);
    } else {
      cont = std::max(cont, e);
    }
  }
  return {violations == 0 && disc <= 1e-6 && cont <= 1e-3,
          fmt("%zu variants: %d validity violations, support error %.1e (finite), %.1e (intervals)",
              hull_variants().size(), violations, disc, cont)};
}

// 10
Outcome solver_suite() {
  int solved = 0;
  double worst = 0.0;
  const auto suite = closed_form_suite();
  for (const auto& p : suite) {
    const Solution s = solve(p.prog);
    const double err = std::abs(s.objective - p.optimum) / (1.0 + std::abs(p.optimum));
    if (s.optimal() && err <= 1e-5) ++solved;
    worst = std::max(worst, err);
  }
  int certs = 0;
  const auto cs = certificate_suite();
  for (const auto& [prog, status] : cs) certs += solve(prog).status == status;
  const auto pe = projection_errors(1000, 97);
  const bool ok = solved == static_cast<int>(suite.size()) && suite.size() == 12 &&
                  certs == static_cast<int>(cs.size()) && pe.idempotence <= 1e-12 && pe.expansion <= 1e-12 &&
                  pe.moreau <= 1e-10;
  return {ok, fmt("%d/%zu closed forms (worst %.1e), %d/%zu certificates, projections: idempotence %.1e, "
                  "expansion %.1e, Moreau %.1e",
                  solved, suite.size(), worst, certs, cs.size(), pe.idempotence, pe.expansion, pe.moreau)};
}

}  // namespace

int main() {
  std::vector<std::pair<std::string, Outcome>> lines;
  auto timed = [&](const std::string& name, const std::function<Outcome()>& f) {
    const auto t0 = Clock::now();
    Outcome o = f();
    std::fprintf(stderr, "  (%s finished in %.1fs)\n", name.c_str(), seconds_since(t0));
    lines.emplace_back(name, std::move(o));
  };

  timed("1 worked example", worked_example);
  timed("2 interval equivalence", chen_equivalence);
  timed("3 homogenized collapse", homogenized_collapse);

  using K = RelaxationKind;
  const auto t_runs = Clock::now();

  // Enumerable instances: unit-modulus waveform and tiny beamforming.
  auto wave_small = base_config(Family::kWaveform, {K::kCsdp, K::kE1, K::kE2}, {1, 2});
  for (int n = 4; n <= 8; ++n) {
    Cell c;
    c.n = n;
    c.m = 3;
    c.gamma = 1.0;
    wave_small.cells.push_back(c);
  }
  wave_small.oracle = true;
  auto beam_small = base_config(Family::kBeamforming, {K::kCsdp, K::kE1, K::kE2}, seeds(10));
  {
    Cell c;
    c.n = 2;
    c.k = 2;
    c.m = 1;
    c.b = 1;
    beam_small.cells.push_back(c);
  }
  beam_small.oracle = true;
  const auto t5 = Clock::now();
  const BoundsReport r_wave_small = run_experiment(wave_small);
  const BoundsReport r_beam_small = run_experiment(beam_small);
  const double sandwich_seconds = seconds_since(t5);

  auto wave = [&](int m) {
    auto cfg = base_config(Family::kWaveform, {K::kCsdp, K::kE1, K::kE2}, seeds(10));
    Cell c;
    c.n = 20;
    c.m = m;
    c.gamma = 1.2;
    cfg.cells.push_back(c);
    return run_experiment(cfg);
  };
  const BoundsReport r_m3 = wave(3);
  const BoundsReport r_m6 = wave(6);

  auto beam = base_config(Family::kBeamforming, {K::kCsdp, K::kE1, K::kE2}, seeds(10));
  for (int k : {4, 8}) {
    Cell c;
    c.n = 4;
    c.k = k;
    c.m = 3;
    c.b = 3;
    beam.cells.push_back(c);
  }
  beam.oracle = true;
  const BoundsReport r_beam = run_experiment(beam);

  auto cont = [&](AngleMode mode, std::vector<K> kinds) {
    auto cfg = base_config(Family::kContinuous, std::move(kinds), seeds(10));
    Cell c;
    c.n = 20;
    c.mode = mode;
    cfg.cells.push_back(c);
    return run_experiment(cfg);
  };
  const BoundsReport r_wide = cont(AngleMode::kWide, {K::kCsdp, K::kE1, K::kChen, K::kE2});
  const BoundsReport r_narrow = cont(AngleMode::kNarrow, {K::kCsdp, K::kE1, K::kChen, K::kE2});
  std::fprintf(stderr, "  (experiment runs finished in %.1fs)\n", seconds_since(t_runs));

  {
    const std::vector<BoundsReport> all = {r_wave_small, r_beam_small, r_m3, r_m6, r_beam, r_wide, r_narrow};
    int instances = 0, failures = 0;
    for (const auto& r : all) {
      instances += static_cast<int>(r.instances.size());
      for (auto k : r.relaxations) {
        if (k != K::kChen) failures += failed_solves(r, k);
      }
    }
    failures += failed_solves(r_narrow, K::kChen);
    const int dom = count_prefix(all, "dominance");
    lines.emplace_back("4 dominance chain",
                       Outcome{dom == 0 && failures == 0,
                               fmt("%d instances over three families, %d violations, %d failed solves", instances,
                                   dom, failures)});
  }
  {
    const std::vector<BoundsReport> small = {r_wave_small, r_beam_small};
    int with_opt = 0, total = 0;
    for (const auto& r : small) {
      for (const auto& rec : r.instances) {
        ++total;
        with_opt += rec.oracle.has_value();
      }
    }
    const int sw = count_prefix(small, "sandwich");
    lines.emplace_back("5 oracle sandwich",
                       Outcome{sw == 0 && with_opt == total && total == 20 && sandwich_seconds < 300.0,
                               fmt("%d/%d enumerated, %d violations, %.1fs", with_opt, total, sw, sandwich_seconds)});
  }
  lines.emplace_back("6 waveform trend", waveform_trend(r_m3, r_m6));
  lines.emplace_back("7 beamforming trend", beamforming_trend(r_beam));
  lines.emplace_back("8 wide intervals", wide_applicability(r_wide));
  timed("9 hull properties", hull_suites);
  timed("10 solver suite", solver_suite);

  std::sort(lines.begin(), lines.end(), [](const auto& a, const auto& b) {
    return std::stoi(a.first) < std::stoi(b.first);
  });
  int failed = 0;
  for (const auto& [name, o] : lines) {
    std::printf("%s  %-24s %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
    failed += !o.pass;
  }
  std::fflush(stdout);
  return failed == 0 ? 0 : 1;
}
