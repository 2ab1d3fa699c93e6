#include "cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>

#include "pmsched/generator.hpp"
#include "pmsched/harness.hpp"
#include "pmsched/io.hpp"
#include "pmsched/lta.hpp"
#include "pmsched/sa.hpp"

namespace pmsched::cli {
namespace {

struct Failure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Usage : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

void write_text(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream f(path);
  if (!f) throw Failure("cannot write " + path);
  f << text;
}

std::string dump(const nlohmann::json& doc) { return doc.dump(1) + "\n"; }

Instance read_instance(const std::string& path) {
  try {
    return load_instance(path);
  } catch (const FormatError& e) {
    throw Failure(path + ": " + e.what());
  } catch (const std::runtime_error& e) {
    throw Failure(e.what());
  }
}

struct GenerateOpts {
  GenConfig cfg;
  std::string out;
};

struct SolveOpts {
  std::string instance;
  std::string out;
  std::string trace;
  std::string algorithm = "lta";
  std::string rule = "atcoee";
  double k1 = 10, k2 = 1, k3 = 10;
  std::string machine_policy = "auto";
  std::uint64_t seed = 0;
  std::string structure = "op_pa";
  double cooling = 0.95;
  std::size_t max_iters = 15000;
};

struct ValidateOpts {
  std::string instance;
  std::string schedule;
};

struct ExperimentOpts {
  std::string loads = "70";
  int cells = 16;
  int seeds = 10;
  std::string algorithms = "random,edd,atc,atcs.10.1,lfm_lfo,atcoee.10.1,atcoeef.10.1.10";
  std::uint64_t master_seed = 1;
  std::size_t parallel = 1;
  std::string out;
  bool omit_runtime = false;
  bool validate = false;
  bool unchecked = false;
};

struct ReportOpts {
  std::string input;
  std::string factors = "algorithm,nRoutings,setupRatio,flexMean";
  std::string load;
  std::string algorithms;
  double alpha = 0.05;
  std::string out;
};

RuleParams rule_params(const SolveOpts& o) {
  RuleParams p;
  auto rule = parse_rule(o.rule);
  if (!rule) throw Usage("unknown rule '" + o.rule + "'");
  p.rule = *rule;
  p.k1 = o.k1;
  p.k2 = o.k2;
  p.k3 = o.k3;
  if (o.machine_policy == "auto") {
    p.machine_policy = p.rule == Rule::kLfo ? MachinePolicy::kLfm : MachinePolicy::kFfm;
  } else if (auto mp = parse_machine_policy(o.machine_policy)) {
    p.machine_policy = *mp;
  } else {
    throw Usage("unknown machine policy '" + o.machine_policy + "'");
  }
  try {
    p.check();
  } catch (const std::invalid_argument& e) {
    throw Usage(e.what());
  }
  return p;
}

std::string metrics_line(const ScheduleMetrics& m) {
  std::ostringstream s;
  s << "total_tardiness=" << m.total_tardiness << " late_jobs=" << m.late_jobs << " setups=" << m.setups
    << " makespan=" << m.makespan << "\n";
  return s.str();
}

int do_generate(const GenerateOpts& o, std::ostream& out) {
  try {
    o.cfg.check();
  } catch (const std::invalid_argument& e) {
    throw Usage(e.what());
  }
  const Instance inst = generate_instance(o.cfg);
  write_text(o.out, dump(instance_to_json(inst)), out);
  return kExitOk;
}

int do_solve(const SolveOpts& o, std::ostream& out, std::ostream& err) {
  if (o.algorithm != "lta" && o.algorithm != "sa") throw Usage("--algorithm must be lta or sa");
  const RuleParams rp = rule_params(o);
  SaParams sp;
  if (o.algorithm == "sa") {
    auto st = parse_structure(o.structure);
    if (!st) throw Usage("unknown structure '" + o.structure + "'");
    sp.structure = *st;
    sp.cooling = o.cooling;
    sp.max_iterations = o.max_iters;
    sp.record_trace = !o.trace.empty();
    try {
      sp.check();
    } catch (const std::invalid_argument& e) {
      throw Usage(e.what());
    }
  }
  const Instance inst = read_instance(o.instance);

  Schedule schedule;
  std::optional<SaResult> sa;
  try {
    const LtaResult lta = run_lta_detailed(inst, rp, o.seed);
    schedule = lta.schedule;
    if (lta.dropped_candidates > 0) {
      err << "warning: " << lta.dropped_candidates
          << " candidate placements found no slot in the search horizon (operator windows may end too early)\n";
    }
    if (o.algorithm == "sa") {
      sa = run_sa(inst, schedule, sp, o.seed);
      schedule = sa->schedule;
    }
  } catch (const std::exception& e) {
    throw Failure(std::string("solver failed: ") + e.what());
  }

  auto violations = validate_schedule(inst, schedule);
  if (!violations.empty()) throw Failure("solver produced an infeasible schedule: " + violations.front().message);

  if (!o.out.empty()) write_text(o.out, dump(schedule_to_json(schedule, inst)), out);
  out << metrics_line(compute_metrics(schedule, inst));
  if (sa) {
    const SaStats& s = sa->stats;
    out << "sa_stop=" << to_string(s.stop) << " iterations=" << s.iterations << " levels=" << s.levels
        << " accepted=" << s.accepted << " improvements=" << s.improvements
        << " proposal_failures=" << s.proposal_failures << " decode_failures=" << s.decode_failures
        << " initial_tardiness=" << s.initial_tardiness << " best_tardiness=" << s.best_tardiness
        << " initial_temperature=" << s.initial_temperature << "\n";
    if (!o.trace.empty()) {
      std::ostringstream csv;
      csv << "iteration,temperature,current,best\n";
      for (const SaTracePoint& p : sa->trace) {
        csv << p.iteration << ',' << p.temperature << ',' << p.current << ',' << p.best << '\n';
      }
      write_text(o.trace, csv.str(), out);
    }
  }
  return kExitOk;
}

int do_validate(const ValidateOpts& o, std::ostream& out) {
  const Instance inst = read_instance(o.instance);
  Schedule schedule;
  try {
    schedule = schedule_from_json(read_json_file(o.schedule), inst);
  } catch (const std::exception& e) {
    throw Failure(o.schedule + ": " + e.what());
  }
  auto violations = validate_schedule(inst, schedule);
  if (!violations.empty()) {
    for (const Violation& v : violations) out << to_string(v.kind) << ": " << v.message << "\n";
    out << violations.size() << " violation(s)\n";
    return kExitFailure;
  }
  out << "feasible\n" << metrics_line(compute_metrics(schedule, inst));
  return kExitOk;
}

int do_experiment(const ExperimentOpts& o, std::ostream& out, std::ostream& err) {
  if (o.cells < 1 || o.cells > 16) throw Usage("--cells must be in 1..16");
  if (o.seeds < 1) throw Usage("--seeds must be >= 1");
  std::vector<int> loads;
  for (const auto& l : split_list(o.loads)) {
    try {
      loads.push_back(std::stoi(l));
    } catch (const std::exception&) {
      throw Usage("bad load '" + l + "'");
    }
  }
  if (loads.empty()) throw Usage("--loads is empty");
  std::vector<AlgorithmSpec> algorithms;
  for (const auto& label : split_list(o.algorithms)) {
    try {
      algorithms.push_back(parse_algorithm(label));
    } catch (const std::invalid_argument& e) {
      throw Usage(e.what());
    }
  }
  if (algorithms.empty()) throw Usage("--algorithms is empty");

  std::vector<GenConfig> full;
  try {
    full = generate_design(loads, o.seeds, o.master_seed, o.unchecked);
  } catch (const std::invalid_argument& e) {
    throw Usage(e.what());
  }
  // keep `cells` evenly spaced cells out of the 16 per load
  std::vector<GenConfig> design;
  const std::size_t per_load = 16 * static_cast<std::size_t>(o.seeds);
  for (std::size_t l = 0; l < loads.size(); ++l) {
    for (int c = 0; c < o.cells; ++c) {
      const std::size_t cell = static_cast<std::size_t>(c) * 16 / static_cast<std::size_t>(o.cells);
      for (int r = 0; r < o.seeds; ++r) {
        design.push_back(full[l * per_load + cell * static_cast<std::size_t>(o.seeds) + static_cast<std::size_t>(r)]);
      }
    }
  }

  ExperimentOptions opts;
  opts.parallel = std::max<std::size_t>(1, o.parallel);
  opts.measure_runtime = !o.omit_runtime;
  opts.validate = o.validate;
  const auto rows = run_experiment(design, algorithms, opts);

  std::ostringstream csv;
  write_observations_csv(csv, rows);
  write_text(o.out, csv.str(), out);
  std::size_t failed = 0;
  for (const auto& r : rows) {
    if (!r.tardiness) {
      ++failed;
      err << "failed run: load=" << r.load << " seed=" << r.seed << " algorithm=" << r.algorithm << ": " << r.error
          << "\n";
    }
  }
  return failed == 0 ? kExitOk : kExitFailure;
}

int do_report(const ReportOpts& o, std::ostream& out) {
  std::ifstream in(o.input);
  if (!in) throw Failure("cannot open " + o.input);
  std::vector<Observation> rows;
  try {
    rows = read_observations_csv(in);
  } catch (const std::invalid_argument& e) {
    throw Failure(e.what());
  }
  if (!o.load.empty()) {
    const int load = std::stoi(o.load);
    std::erase_if(rows, [&](const Observation& r) { return r.load != load; });
  }
  if (!o.algorithms.empty()) {
    const auto keep = split_list(o.algorithms);
    std::erase_if(rows, [&](const Observation& r) {
      return std::find(keep.begin(), keep.end(), r.algorithm) == keep.end();
    });
  }
  EffectReport report;
  try {
    report = anova_effects(factorial_data(rows, split_list(o.factors)), o.alpha);
  } catch (const std::invalid_argument& e) {
    throw Usage(e.what());
  } catch (const DesignError& e) {
    throw Failure(e.what());
  }
  out << format_report(report);
  if (!o.out.empty()) {
    std::ostringstream csv;
    write_report_csv(csv, report);
    write_text(o.out, csv.str(), out);
  }
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Total tardiness scheduling on flexible parallel machines with setups, operator windows and columns",
               "pmsched"};
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);

  GenerateOpts gen;
  auto* g = app.add_subcommand("generate", "Write a random instance as JSON");
  g->add_option("--jobs", gen.cfg.jobs, "Number of jobs");
  g->add_option("--routings", gen.cfg.routings, "Number of routing templates");
  g->add_option("--setup-ratio", gen.cfg.setup_ratio, "Setup share of the total operation duration");
  g->add_option("--flex-mean", gen.cfg.flex_mean, "Mean number of eligible machines");
  g->add_option("--machines", gen.cfg.machines, "Number of machines");
  g->add_option("--column-types", gen.cfg.column_types, "Number of column types (families)");
  g->add_option("--seed", gen.cfg.seed, "Random seed");
  g->add_flag("--unchecked", gen.cfg.unchecked, "Allow values outside the experimental domains");
  g->add_option("--out", gen.out, "Output file (stdout when empty)");

  SolveOpts sol;
  auto* s = app.add_subcommand("solve", "Schedule an instance with a list rule or simulated annealing");
  s->add_option("--instance", sol.instance, "Instance JSON")->required();
  s->add_option("--out", sol.out, "Schedule JSON output");
  s->add_option("--algorithm", sol.algorithm, "lta or sa");
  s->add_option("--rule", sol.rule, "random, edd, atc, atcs, atcoee, atcoeef, lfo (also the SA start rule)");
  s->add_option("--k1", sol.k1, "Slack scaling parameter");
  s->add_option("--k2", sol.k2, "Setup / OEE scaling parameter");
  s->add_option("--k3", sol.k3, "Flexibility scaling parameter");
  s->add_option("--machine-policy", sol.machine_policy, "auto, ffm, lfm or law (auto: lfm for lfo, else ffm)");
  s->add_option("--seed", sol.seed, "Random seed");
  s->add_option("--structure", sol.structure, "SA neighborhood: simple, op, op_pa");
  s->add_option("--cooling", sol.cooling, "SA geometric cooling factor");
  s->add_option("--max-iters", sol.max_iters, "SA iteration cap, 0 for none");
  s->add_option("--trace", sol.trace, "SA trace CSV output");

  ValidateOpts val;
  auto* v = app.add_subcommand("validate", "Check a schedule against an instance");
  v->add_option("--instance", val.instance, "Instance JSON")->required();
  v->add_option("--schedule", val.schedule, "Schedule JSON")->required();

  ExperimentOpts ex;
  auto* e = app.add_subcommand("experiment", "Run algorithms over the factorial design and write a CSV");
  e->add_option("--loads", ex.loads, "Comma-separated job counts");
  e->add_option("--cells", ex.cells, "Design cells per load (1-16, evenly spaced)");
  e->add_option("--seeds", ex.seeds, "Replicates per cell");
  e->add_option("--algorithms", ex.algorithms, "Comma-separated algorithm labels");
  e->add_option("--master-seed", ex.master_seed, "Seed the per-instance seeds derive from");
  e->add_option("--parallel", ex.parallel, "Worker threads");
  e->add_option("--out", ex.out, "CSV output (stdout when empty)");
  e->add_flag("--omit-runtime", ex.omit_runtime, "Write runtimeMs as 0 for byte-identical reruns");
  e->add_flag("--validate", ex.validate, "Re-check every schedule");
  e->add_flag("--unchecked", ex.unchecked, "Allow loads outside 70 and 140");

  ReportOpts rep;
  auto* r = app.add_subcommand("report", "Analysis of variance of an experiment CSV");
  r->add_option("--input", rep.input, "Experiment CSV")->required();
  r->add_option("--factors", rep.factors, "Comma-separated factors");
  r->add_option("--load", rep.load, "Keep only this load");
  r->add_option("--algorithms", rep.algorithms, "Keep only these algorithms");
  r->add_option("--alpha", rep.alpha, "Significance level");
  r->add_option("--out", rep.out, "Effect report CSV output");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& pe) {
    const int code = app.exit(pe, out, err);
    if (code == 0) return kExitOk;
    for (auto* sub : app.get_subcommands()) err << sub->help();
    if (app.get_subcommands().empty()) err << app.help();
    return kExitUsage;
  }

  try {
    if (g->parsed()) return do_generate(gen, out);
    if (s->parsed()) return do_solve(sol, out, err);
    if (v->parsed()) return do_validate(val, out);
    if (e->parsed()) return do_experiment(ex, out, err);
    if (r->parsed()) return do_report(rep, out);
  } catch (const Usage& u) {
    err << "error: " << u.what() << "\n";
    return kExitUsage;
  } catch (const Failure& f) {
    err << "error: " << f.what() << "\n";
    return kExitFailure;
  } catch (const std::exception& x) {
    err << "error: " << x.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace pmsched::cli
