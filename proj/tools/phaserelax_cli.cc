// phaserelax command line: gen | solve | round | oracle | bench
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "phaserelax/bench.h"
#include "phaserelax/conic_ir.h"
#include "phaserelax/json_io.h"
#include "phaserelax/oracle.h"
#include "phaserelax/relax.h"
#include "phaserelax/rounding.h"

using namespace phaserelax;

namespace {

struct SolveArgs {
  std::string instance;
  std::string relaxation = "e2";
  std::string simplify = "auto";
  double eps = 1e-7;
  int max_iters = 500;
  std::string dump;
  std::string output;
  bool verbose = false;
};

void add_solve_flags(CLI::App* cmd, SolveArgs& a) {
  cmd->add_option("instance", a.instance, "Instance JSON file")->required()->check(CLI::ExistingFile);
  cmd->add_option("--relaxation", a.relaxation, "csdp, e1, chen, e2 or lu-hom")
      ->check(CLI::IsMember({"csdp", "e1", "chen", "e2", "lu-hom"}));
  cmd->add_option("--simplify", a.simplify, "Hull simplification for e2")
      ->check(CLI::IsMember({"on", "off", "auto"}));
  cmd->add_option("--solver-eps", a.eps, "Relative residual and gap tolerance");
  cmd->add_option("--solver-max-iters", a.max_iters, "Iteration cap");
  cmd->add_option("--dump", a.dump, "Write the conic program (A, b, c, K) as JSON");
  cmd->add_option("-o,--output", a.output, "Write the result as JSON");
  cmd->add_flag("-v,--verbose", a.verbose, "Print solver iterations");
}

RelaxOptions relax_options(const SolveArgs& a) {
  RelaxOptions o;
  o.simplify = parse_simplify(a.simplify);
  o.solver.eps_primal = o.solver.eps_dual = o.solver.eps_gap = a.eps;
  o.solver.max_iters = a.max_iters;
  o.solver.verbose = a.verbose;
  return o;
}

nlohmann::json vector_json(const VectorXcd& x) {
  nlohmann::json re = nlohmann::json::array(), im = nlohmann::json::array();
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    re.push_back(x(i).real());
    im.push_back(x(i).imag());
  }
  return {{"re", re}, {"im", im}};
}

void emit(const std::string& path, const nlohmann::json& j) {
  if (path.empty() || path == "-") {
    std::cout << dump_canonical(j);
  } else {
    write_text_file(path, dump_canonical(j));
  }
}

BoundResult run_solve(const SolveArgs& a, const Instance& inst) {
  const auto kind = parse_relaxation(a.relaxation);
  const auto opts = relax_options(a);
  if (!a.dump.empty()) {
    write_text_file(a.dump, dump_canonical(to_json(build_relaxation(kind, inst, opts.simplify))));
  }
  return bound_of(kind, inst, opts);
}

nlohmann::json bound_json(const BoundResult& r) {
  return {{"relaxation", relaxation_name(r.kind)},
          {"bound", r.value},
          {"solve_seconds", r.solve_seconds},
          {"wallclock", r.wallclock},
          {"rows", r.rows},
          {"cols", r.cols},
          {"solution", to_json(r.solution)}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Semidefinite relaxations for complex quadratic programs with phase constraints"};
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "Generate a random instance");
  std::string family = "waveform", mode = "narrow", gen_out;
  int n = 20, big_m = 3, k = 4, m = 3, b = 3;
  double gamma = 1.2, p_tot = 40.0, p_max = 20.0;
  uint64_t gen_seed = 0;
  gen->add_option("--family", family)->check(CLI::IsMember({"waveform", "beamforming", "continuous"}));
  gen->add_option("-n", n, "Number of variables");
  gen->add_option("-M", big_m, "Phase count (waveform)");
  gen->add_option("--gamma", gamma, "Peak-to-average bound (waveform)");
  gen->add_option("-k", k, "Users (beamforming)");
  gen->add_option("-m", m, "Amplitude bits (beamforming)");
  gen->add_option("-b", b, "Phase bits (beamforming)");
  gen->add_option("--p-tot", p_tot);
  gen->add_option("--p-max", p_max);
  gen->add_option("--mode", mode, "narrow or wide (continuous)")->check(CLI::IsMember({"narrow", "wide"}));
  gen->add_option("--seed", gen_seed);
  gen->add_option("-o,--output", gen_out, "Output file (default stdout)");

  // solve
  auto* solve_cmd = app.add_subcommand("solve", "Solve a relaxation and report its bound");
  SolveArgs solve_args;
  add_solve_flags(solve_cmd, solve_args);

  // round
  auto* round_cmd = app.add_subcommand("round", "Solve a relaxation, then randomize");
  SolveArgs round_args;
  int trials = 1000;
  uint64_t round_seed = 0;
  std::string repair = "auto";
  add_solve_flags(round_cmd, round_args);
  round_cmd->add_option("--trials", trials, "Gaussian draws")->check(CLI::PositiveNumber);
  round_cmd->add_option("--seed", round_seed, "Randomization seed");
  round_cmd->add_option("--repair", repair, "Feasibility repair hook")->check(CLI::IsMember({"auto", "none", "power", "beam"}));

  // oracle
  auto* oracle_cmd = app.add_subcommand("oracle", "Exact optimum by enumeration");
  std::string oracle_instance, oracle_out;
  uint64_t limit = kDefaultOracleLimit;
  oracle_cmd->add_option("instance", oracle_instance)->required()->check(CLI::ExistingFile);
  oracle_cmd->add_option("--limit", limit, "Maximum number of candidates");
  oracle_cmd->add_option("-o,--output", oracle_out);

  // bench
  auto* bench_cmd = app.add_subcommand("bench", "Run an experiment described by a JSON config");
  std::string config_path, output_dir;
  bench_cmd->add_option("config", config_path)->required()->check(CLI::ExistingFile);
  bench_cmd->add_option("--output-dir", output_dir, "Overrides output_dir from the config");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) {
      Instance inst;
      if (family == "waveform") {
        inst = gen_waveform(n, big_m, gamma, gen_seed);
      } else if (family == "beamforming") {
        inst = gen_beamforming(n, k, m, b, p_tot, p_max, gen_seed).to_instance();
      } else {
        inst = gen_continuous(n, parse_angle_mode(mode), gen_seed);
      }
      emit(gen_out, to_json(inst));
      return 0;
    }

    if (*solve_cmd) {
      const Instance inst = load_instance(solve_args.instance);
      const BoundResult r = run_solve(solve_args, inst);
      std::fprintf(stderr, "%s %s bound %.10g (%s, %d iterations, %.3fs)\n",
                   relaxation_name(r.kind), inst.sense == Sense::kMaximize ? "upper" : "lower",
                   r.value, status_name(r.solution.status), r.solution.iterations, r.solve_seconds);
      if (!solve_args.output.empty()) emit(solve_args.output, bound_json(r));
      return 0;
    }

    if (*round_cmd) {
      const Instance inst = load_instance(round_args.instance);
      const BoundResult r = run_solve(round_args, inst);
      RoundingOptions ro;
      ro.trials = trials;
      ro.seed = round_seed;
      ro.repair = parse_repair(repair);
      const RoundingResult rr = sample_round(r.x, inst, ro);
      std::fprintf(stderr, "%s bound %.10g, rounded %.10g (%s, %d feasible candidates)\n",
                   relaxation_name(r.kind), r.value, rr.value, rr.feasible ? "feasible" : "infeasible",
                   rr.feasible_count);
      nlohmann::json j = bound_json(r);
      j["rounding"] = {{"value", rr.value},
                       {"feasible", rr.feasible},
                       {"feasible_candidates", rr.feasible_count},
                       {"best_trial", rr.best_trial},
                       {"x", vector_json(rr.x)}};
      if (!round_args.output.empty()) emit(round_args.output, j);
      return rr.feasible ? 0 : 3;
    }

    if (*oracle_cmd) {
      const Instance inst = load_instance(oracle_instance);
      const auto size = search_space_size(inst);
      if (!size) throw Error("search space is infinite");
      const OracleResult r = enumerate_opt(inst, limit);
      std::fprintf(stderr, "optimum %.10g over %llu candidates (%llu feasible)\n", r.value,
                   static_cast<unsigned long long>(r.candidates),
                   static_cast<unsigned long long>(r.feasible));
      emit(oracle_out, {{"value", r.value},
                        {"candidates", r.candidates},
                        {"feasible", r.feasible},
                        {"x", vector_json(r.x)}});
      return 0;
    }

    if (*bench_cmd) {
      ExperimentConfig cfg = config_from_json(read_json_file(config_path));
      if (!output_dir.empty()) cfg.output_dir = output_dir;
      const BoundsReport report = run_experiment(cfg);
      write_report(cfg, report);
      const int viol = report.violation_count();
      std::fprintf(stderr, "%zu instances, %d invariant violation(s); report in %s\n",
                   report.instances.size(), viol, cfg.output_dir.c_str());
      return viol == 0 ? 0 : 1;
    }
  } catch (const SolveFailure& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
