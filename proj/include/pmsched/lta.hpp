#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "pmsched/model.hpp"
#include "pmsched/rules.hpp"

namespace pmsched {

class LtaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Mutable state of one list-treatment run: per-machine schedulable lists,
/// clocks, mounted families, potential loads, and the column profiles.
/// Owned by a single run.
class LtaState {
 public:
  explicit LtaState(const Instance& instance);

  const Instance& instance() const { return *instance_; }

  /// L_m: unscheduled operations eligible on machine m.
  std::span<const OpIndex> schedulable(MachineIndex m) const { return lists_[m]; }
  TimePoint clock(MachineIndex m) const { return clocks_[m]; }
  std::optional<FamilyIndex> last_family(MachineIndex m) const { return families_[m]; }
  /// LAW_m = t_m + sum of p / card(ME) over L_m.
  double potential_load(MachineIndex m) const { return loads_[m]; }
  const CapacityProfile& column(FamilyIndex f) const { return columns_[f]; }

  std::size_t remaining() const { return remaining_; }
  bool done() const { return remaining_ == 0; }
  bool scheduled(OpIndex i) const { return scheduled_[i]; }
  double mean_processing() const;
  double mean_setup() const;
  RuleContext context() const;

  /// Placements committed so far, in commit order.
  const Schedule& schedule() const { return schedule_; }

  /// Computes a candidate for (m, op) or nullopt if no slot exists within
  /// the search horizon.
  std::optional<Candidate> evaluate(MachineIndex m, OpIndex op) const;

  void commit(const Candidate& chosen);

 private:
  double recompute_load(MachineIndex m) const;

  const Instance* instance_;
  std::vector<std::vector<OpIndex>> lists_;
  std::vector<TimePoint> clocks_;
  std::vector<std::optional<FamilyIndex>> families_;
  std::vector<double> loads_;
  std::vector<CapacityProfile> columns_;
  std::vector<std::size_t> list_sizes_;
  std::vector<bool> scheduled_;
  std::size_t remaining_ = 0;
  double sum_processing_ = 0;
  double sum_setup_ = 0;
  Schedule schedule_;
};

/// One candidate per machine m and operation in L_m. Operations without a
/// slot inside the horizon are skipped and counted in `dropped`.
std::vector<Candidate> candidate_times(const LtaState& state, std::size_t* dropped = nullptr);
/// Same, restricted to the given machines.
std::vector<Candidate> candidate_times(const LtaState& state, std::span<const MachineIndex> machines,
                                       std::size_t* dropped = nullptr);

/// Commits `chosen`; throws LtaError if the column reservation fails.
void commit_assignment(LtaState& state, const Candidate& chosen);

struct LtaResult {
  Schedule schedule;
  std::size_t iterations = 0;
  std::size_t dropped_candidates = 0;
};

/// Runs the list treatment loop to completion. Throws LtaError if at some
/// iteration no candidate has a feasible slot.
LtaResult run_lta_detailed(const Instance& instance, const RuleParams& params, std::uint64_t seed);
Schedule run_lta(const Instance& instance, const RuleParams& params, std::uint64_t seed);

}  // namespace pmsched
