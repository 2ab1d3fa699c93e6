#pragma once

#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "pmsched/model.hpp"

namespace pmsched {

using Rng = std::mt19937_64;

enum class Rule { kRandom, kEdd, kAtc, kAtcs, kAtcoee, kAtcoeef, kLfo };
// FFM: earliest machine clock. LFM: fewest schedulable operations |L_m|.
// LAW: smallest average potential load t_m + sum(p / card(ME)) over L_m.
enum class MachinePolicy { kFfm, kLfm, kLaw };

const char* to_string(Rule rule);
const char* to_string(MachinePolicy policy);
std::optional<Rule> parse_rule(const std::string& name);
std::optional<MachinePolicy> parse_machine_policy(const std::string& name);

struct RuleParams {
  double k1 = 10.0;
  double k2 = 1.0;
  double k3 = 10.0;
  Rule rule = Rule::kAtcoee;
  MachinePolicy machine_policy = MachinePolicy::kFfm;
  // Reads the ATCS setup exponent with the sign as printed (+s/(k2*sBar)).
  // Off by default; kept for experiments only.
  bool atcs_positive_setup_exponent = false;

  /// Throws std::invalid_argument unless k1, k2, k3 > 0.
  void check() const;
};

/// One admissible (machine, operation) assignment with its earliest timing.
/// Carries the operation data the rules need so scoring is self-contained.
struct Candidate {
  OpIndex operation = 0;
  MachineIndex machine = 0;
  TimePoint start = 0;
  TimePoint completion = 0;
  bool setup_required = false;
  TimePoint machine_clock = 0;

  Duration processing = 0;
  Duration setup = 0;
  TimePoint due = 0;
  std::size_t eligible_count = 1;

  // tie-break keys (external ids)
  int machine_id = 0;
  int job_id = 0;
  int operation_id = 0;
};

/// Shop-state statistics used by the rules at one decision point.
struct RuleContext {
  double mean_processing = 1.0;  // over unscheduled operations
  double mean_setup = 0.0;       // over unscheduled operations
  std::size_t machine_count = 1;
  // |L_m| per machine index; only read by the LFM policy
  std::span<const std::size_t> remaining_per_machine;
  // LAW_m per machine index; only read by the LAW policy
  std::span<const double> potential_load_per_machine;
};

double atc_priority(const Candidate& c, double mean_processing, const RuleParams& params);
double atcs_priority(const Candidate& c, double mean_processing, double mean_setup,
                     const RuleParams& params);
/// Throws std::invalid_argument when completion <= machine clock.
double atcoee_priority(const Candidate& c, double mean_processing, const RuleParams& params);
double atcoeef_priority(const Candidate& c, double mean_processing, std::size_t machine_count,
                        const RuleParams& params);

/// Applies the machine policy, then the rule. Ties go to the smallest
/// (machine id, job id, operation id).
const Candidate& select_assignment(std::span<const Candidate> candidates, const RuleParams& params,
                                   const RuleContext& context, Rng& rng);

}  // namespace pmsched
