#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "pmsched/generator.hpp"
#include "pmsched/model.hpp"
#include "pmsched/rules.hpp"
#include "pmsched/sa.hpp"

namespace pmsched {

/// A solver configuration named by its label:
///   random | edd | atc | lfm_lfo | law_lfo | atcs.K1.K2 | atcoee.K1.K2 | atcoeef.K1.K2.K3
///   simple_sa | op_sa | op_pa_sa, optionally suffixed with the cooling
///   factor (op_pa_sa.0.98 runs without an iteration limit).
struct AlgorithmSpec {
  enum class Kind { kLta, kSa };
  std::string label;
  Kind kind = Kind::kLta;
  RuleParams rule;  // LTA rule, or the rule building the SA start
  SaParams sa;
};

/// Throws std::invalid_argument on an unknown label.
AlgorithmSpec parse_algorithm(const std::string& label);

struct SolveResult {
  Schedule schedule;
  std::optional<SaResult> annealing;
};

/// Runs one algorithm. SA variants start from the ATCOEE(10,1) list schedule.
SolveResult solve(const Instance& instance, const AlgorithmSpec& algorithm, std::uint64_t seed);

struct Observation {
  int load = 0;
  int routings = 0;
  double setup_ratio = 0;
  double flex_mean = 0;
  std::string algorithm;
  std::uint64_t seed = 0;
  std::optional<Duration> tardiness;  // empty on a failed run
  double log_tardiness = 0;
  double runtime_ms = 0;
  std::string error;

  friend bool operator==(const Observation&, const Observation&) = default;
};

/// log10(max(T, 1)).
double log_tardiness(Duration tardiness);

struct ExperimentOptions {
  std::size_t parallel = 1;
  bool measure_runtime = true;
  bool validate = false;  // re-check every schedule; violations become error rows
};

/// One observation per (design point, algorithm), ordered like the design.
std::vector<Observation> run_experiment(const std::vector<GenConfig>& design,
                                        const std::vector<AlgorithmSpec>& algorithms,
                                        const ExperimentOptions& options = {});

void write_observations_csv(std::ostream& out, const std::vector<Observation>& rows);
std::vector<Observation> read_observations_csv(std::istream& in);

// ---------------------------------------------------------------------------
// Factorial analysis of variance

/// Balanced factorial data set: one level index per factor per row.
struct FactorialData {
  std::vector<std::string> factors;
  std::vector<std::vector<std::string>> levels;  // level names per factor
  std::vector<std::vector<std::size_t>> rows;
  std::vector<double> response;
};

/// Groups observations by the named factors (load, algorithm, nRoutings,
/// setupRatio, flexMean). Failed runs are left out.
FactorialData factorial_data(const std::vector<Observation>& rows, const std::vector<std::string>& factors);

struct FactorEffect {
  std::string name;
  std::vector<std::string> levels;
  std::vector<double> effects;  // level mean - grand mean
  double max_abs_effect = 0;
  double sum_squares = 0;
  double df = 0;
  double f_value = 0;
  double f_critical = 0;
  bool significant = false;
};

struct InteractionEffect {
  std::string first;
  std::string second;
  std::vector<std::vector<double>> table;  // [level of first][level of second]
  double max_abs_interaction = 0;
  double sum_squares = 0;
  double df = 0;
  double f_value = 0;
  double f_critical = 0;
  bool significant = false;
};

struct EffectReport {
  double grand_mean = 0;
  std::size_t observations = 0;
  std::size_t replicates = 0;
  std::vector<FactorEffect> factors;
  std::vector<InteractionEffect> interactions;
  double residual_sum_squares = 0;
  double residual_df = 0;
};

class DesignError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Main effects and two-way interactions with F tests against the pooled
/// residual. Throws DesignError on an unbalanced design.
EffectReport anova_effects(const FactorialData& data, double alpha = 0.05);

/// Upper `alpha` quantile of the F(df1, df2) distribution.
double f_critical(double df1, double df2, double alpha = 0.05);

/// Relative tardiness change for an effect on log10(tardiness).
double effect_to_ratio(double effect);

void write_report_csv(std::ostream& out, const EffectReport& report);
std::string format_report(const EffectReport& report);

}  // namespace pmsched
