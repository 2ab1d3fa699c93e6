#include "pmsched/harness.hpp"

#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <thread>

#include "pmsched/lta.hpp"

namespace pmsched {
namespace {

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (true) {
    const std::size_t next = text.find(sep, pos);
    out.push_back(text.substr(pos, next - pos));
    if (next == std::string::npos) break;
    pos = next + 1;
  }
  return out;
}

double parse_number(const std::string& text, const std::string& context) {
  double v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw std::invalid_argument(context + ": '" + text + "' is not a number");
  }
  return v;
}

std::string shortest(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

}  // namespace

AlgorithmSpec parse_algorithm(const std::string& label) {
  AlgorithmSpec spec;
  spec.label = label;
  const std::size_t dot = label.find('.');
  const std::string head = label.substr(0, dot);
  const std::string tail = dot == std::string::npos ? "" : label.substr(dot + 1);

  for (auto [name, structure] : {std::pair{"simple_sa", Structure::kSimple}, std::pair{"op_sa", Structure::kOperation},
                                 std::pair{"op_pa_sa", Structure::kOperationPack}}) {
    if (head != name) continue;
    spec.kind = AlgorithmSpec::Kind::kSa;
    spec.sa.structure = structure;
    spec.rule = RuleParams{};  // ATCOEE(10, 1) start
    if (!tail.empty()) {
      spec.sa.cooling = parse_number(tail, label);
      // the long schedule runs until frozen
      if (spec.sa.cooling != 0.95) spec.sa.max_iterations = 0;
    }
    spec.sa.check();
    return spec;
  }

  spec.kind = AlgorithmSpec::Kind::kLta;
  const std::vector<std::string> args = tail.empty() ? std::vector<std::string>{} : split(tail, '.');
  auto take = [&](std::size_t max_args) {
    if (args.size() > max_args) throw std::invalid_argument("too many parameters in algorithm '" + label + "'");
    double* slots[] = {&spec.rule.k1, &spec.rule.k2, &spec.rule.k3};
    for (std::size_t k = 0; k < args.size(); ++k) *slots[k] = parse_number(args[k], label);
  };
  if (head == "lfm_lfo" || head == "lfo") {
    take(0);
    spec.rule.rule = Rule::kLfo;
    spec.rule.machine_policy = MachinePolicy::kLfm;
  } else if (head == "law_lfo") {
    take(0);
    spec.rule.rule = Rule::kLfo;
    spec.rule.machine_policy = MachinePolicy::kLaw;
  } else if (auto rule = parse_rule(head)) {
    spec.rule.rule = *rule;
    switch (*rule) {
      case Rule::kAtc: take(1); break;
      case Rule::kAtcs:
      case Rule::kAtcoee: take(2); break;
      case Rule::kAtcoeef: take(3); break;
      default: take(0); break;
    }
  } else {
    throw std::invalid_argument("unknown algorithm '" + label + "'");
  }
  spec.rule.check();
  return spec;
}

SolveResult solve(const Instance& instance, const AlgorithmSpec& algorithm, std::uint64_t seed) {
  SolveResult result;
  result.schedule = run_lta(instance, algorithm.rule, seed);
  if (algorithm.kind == AlgorithmSpec::Kind::kSa) {
    SaParams params = algorithm.sa;
    params.record_trace = false;
    result.annealing = run_sa(instance, result.schedule, params, seed);
    result.schedule = result.annealing->schedule;
  }
  return result;
}

double log_tardiness(Duration tardiness) {
  return std::log10(static_cast<double>(std::max<Duration>(tardiness, 1)));
}

std::vector<Observation> run_experiment(const std::vector<GenConfig>& design,
                                        const std::vector<AlgorithmSpec>& algorithms,
                                        const ExperimentOptions& options) {
  if (design.empty()) throw std::invalid_argument("experiment design is empty");
  std::vector<Observation> rows(design.size() * algorithms.size());

  auto run_point = [&](std::size_t d) {
    const GenConfig& cfg = design[d];
    std::optional<Instance> instance;
    std::string gen_error;
    try {
      instance.emplace(generate_instance(cfg));
    } catch (const std::exception& e) {
      gen_error = e.what();
    }
    for (std::size_t a = 0; a < algorithms.size(); ++a) {
      Observation& obs = rows[d * algorithms.size() + a];
      obs.load = cfg.jobs;
      obs.routings = cfg.routings;
      obs.setup_ratio = cfg.setup_ratio;
      obs.flex_mean = cfg.flex_mean;
      obs.algorithm = algorithms[a].label;
      obs.seed = cfg.seed;
      if (!instance) {
        obs.error = "generation failed: " + gen_error;
        continue;
      }
      try {
        const auto t0 = std::chrono::steady_clock::now();
        SolveResult solved = solve(*instance, algorithms[a], cfg.seed);
        const auto t1 = std::chrono::steady_clock::now();
        if (options.measure_runtime) {
          obs.runtime_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
        }
        if (options.validate) {
          auto violations = validate_schedule(*instance, solved.schedule);
          if (!violations.empty()) {
            obs.error = "infeasible schedule: " + violations.front().message;
            continue;
          }
        }
        const Duration t = total_tardiness(solved.schedule, *instance);
        obs.tardiness = t;
        obs.log_tardiness = log_tardiness(t);
      } catch (const std::exception& e) {
        obs.error = e.what();
      }
    }
  };

  const std::size_t workers = std::max<std::size_t>(1, std::min(options.parallel, design.size()));
  if (workers == 1) {
    for (std::size_t d = 0; d < design.size(); ++d) run_point(d);
    return rows;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t d = next++; d < design.size(); d = next++) run_point(d);
    });
  }
  for (auto& t : pool) t.join();
  return rows;
}

void write_observations_csv(std::ostream& out, const std::vector<Observation>& rows) {
  out << "load,nRoutings,setupRatio,flexMean,algorithm,seed,tardiness,logTardiness,runtimeMs\n";
  for (const Observation& o : rows) {
    out << o.load << ',' << o.routings << ',' << shortest(o.setup_ratio) << ',' << shortest(o.flex_mean) << ','
        << o.algorithm << ',' << o.seed << ',';
    if (o.tardiness) out << *o.tardiness << ',' << shortest(o.log_tardiness);
    else out << ',';
    out << ',' << shortest(o.runtime_ms) << '\n';
  }
}

std::vector<Observation> read_observations_csv(std::istream& in) {
  std::vector<Observation> rows;
  std::string line;
  if (!std::getline(in, line)) return rows;
  if (line.rfind("load,", 0) != 0) throw std::invalid_argument("observation CSV: missing header");
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split(line, ',');
    const std::string where = "observation CSV line " + std::to_string(line_no);
    if (f.size() != 9) throw std::invalid_argument(where + ": expected 9 fields");
    Observation o;
    o.load = static_cast<int>(parse_number(f[0], where));
    o.routings = static_cast<int>(parse_number(f[1], where));
    o.setup_ratio = parse_number(f[2], where);
    o.flex_mean = parse_number(f[3], where);
    o.algorithm = f[4];
    {
      auto [ptr, ec] = std::from_chars(f[5].data(), f[5].data() + f[5].size(), o.seed);
      if (ec != std::errc()) throw std::invalid_argument(where + ": bad seed");
    }
    if (f[6].empty()) {
      o.error = "failed run";
    } else {
      o.tardiness = static_cast<Duration>(parse_number(f[6], where));
      o.log_tardiness = parse_number(f[7], where);
    }
    o.runtime_ms = parse_number(f[8], where);
    rows.push_back(std::move(o));
  }
  return rows;
}

}  // namespace pmsched
