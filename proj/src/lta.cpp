#include "pmsched/lta.hpp"

#include <algorithm>
#include <numeric>

namespace pmsched {

LtaState::LtaState(const Instance& instance)
    : instance_(&instance),
      lists_(instance.machine_count()),
      clocks_(instance.machine_count(), instance.horizon_origin()),
      families_(instance.machine_count()),
      loads_(instance.machine_count(), 0.0),
      list_sizes_(instance.machine_count(), 0),
      scheduled_(instance.operation_count(), false),
      remaining_(instance.operation_count()) {
  columns_.reserve(instance.family_count());
  for (const ColumnType& ct : instance.column_types()) columns_.emplace_back(ct.units);
  for (OpIndex i = 0; i < instance.operation_count(); ++i) {
    const Operation& op = instance.operation(i);
    for (MachineIndex m : op.eligible) lists_[m].push_back(i);
    sum_processing_ += static_cast<double>(op.processing);
    sum_setup_ += static_cast<double>(op.setup);
  }
  for (MachineIndex m = 0; m < lists_.size(); ++m) {
    list_sizes_[m] = lists_[m].size();
    loads_[m] = recompute_load(m);
  }
}

double LtaState::mean_processing() const {
  return remaining_ == 0 ? 0.0 : sum_processing_ / static_cast<double>(remaining_);
}

double LtaState::mean_setup() const {
  return remaining_ == 0 ? 0.0 : sum_setup_ / static_cast<double>(remaining_);
}

RuleContext LtaState::context() const {
  return RuleContext{mean_processing(), mean_setup(), instance_->machine_count(), list_sizes_, loads_};
}

double LtaState::recompute_load(MachineIndex m) const {
  double load = static_cast<double>(clocks_[m]);
  for (OpIndex i : lists_[m]) {
    const Operation& op = instance_->operation(i);
    load += static_cast<double>(op.processing) / static_cast<double>(op.eligible.size());
  }
  return load;
}

std::optional<Candidate> LtaState::evaluate(MachineIndex m, OpIndex i) const {
  const Operation& op = instance_->operation(i);
  const Job& job = instance_->job(op.job);
  const TimePoint t_min = std::max(clocks_[m], job.release);
  const CapacityProfile& column = columns_[op.family];
  const bool setup = families_[m] != op.family;

  std::optional<TimePoint> start =
      setup ? find_start_with_setup(t_min, op.setup, op.processing, instance_->operator_windows(), column)
            : find_start_without_setup(t_min, op.processing, column);
  if (!start) return std::nullopt;

  Candidate c;
  c.operation = i;
  c.machine = m;
  c.start = *start;
  c.completion = *start + (setup ? op.setup : 0) + op.processing;
  c.setup_required = setup;
  c.machine_clock = clocks_[m];
  c.processing = op.processing;
  c.setup = op.setup;
  c.due = job.due;
  c.eligible_count = op.eligible.size();
  c.machine_id = instance_->machine_ids()[m];
  c.job_id = job.id;
  c.operation_id = op.id;
  return c;
}

void LtaState::commit(const Candidate& chosen) {
  const OpIndex i = chosen.operation;
  if (i >= scheduled_.size() || scheduled_[i]) throw LtaError("commit of an already scheduled operation");
  const Operation& op = instance_->operation(i);
  try {
    columns_[op.family].reserve(Interval{chosen.start, chosen.completion});
  } catch (const CapacityError& e) {
    throw LtaError(std::string("inconsistent candidate: ") + e.what());
  }
  schedule_.placements.push_back(
      PlacedOperation{i, chosen.machine, chosen.setup_required, chosen.start, chosen.completion});
  clocks_[chosen.machine] = chosen.completion;
  families_[chosen.machine] = op.family;
  scheduled_[i] = true;
  --remaining_;
  sum_processing_ -= static_cast<double>(op.processing);
  sum_setup_ -= static_cast<double>(op.setup);
  for (MachineIndex m : op.eligible) {
    std::erase(lists_[m], i);
    list_sizes_[m] = lists_[m].size();
    loads_[m] = recompute_load(m);
  }
}

std::vector<Candidate> candidate_times(const LtaState& state, std::span<const MachineIndex> machines,
                                       std::size_t* dropped) {
  std::vector<Candidate> out;
  for (MachineIndex m : machines) {
    for (OpIndex i : state.schedulable(m)) {
      if (auto c = state.evaluate(m, i)) {
        out.push_back(*c);
      } else if (dropped != nullptr) {
        ++*dropped;
      }
    }
  }
  return out;
}

std::vector<Candidate> candidate_times(const LtaState& state, std::size_t* dropped) {
  std::vector<MachineIndex> all(state.instance().machine_count());
  std::iota(all.begin(), all.end(), MachineIndex{0});
  return candidate_times(state, all, dropped);
}

void commit_assignment(LtaState& state, const Candidate& chosen) { state.commit(chosen); }

LtaResult run_lta_detailed(const Instance& instance, const RuleParams& params, std::uint64_t seed) {
  params.check();
  Rng rng(seed);
  LtaState state(instance);
  LtaResult result;
  const std::size_t machines = instance.machine_count();

  // The machine policy only looks at per-machine keys, so candidates are
  // evaluated one key group at a time, cheapest group first. The first
  // group that yields a feasible candidate is exactly the group the policy
  // filter would keep from a full evaluation.
  std::vector<MachineIndex> order;
  std::vector<MachineIndex> group;
  while (!state.done()) {
    auto key = [&](MachineIndex m) -> double {
      switch (params.machine_policy) {
        case MachinePolicy::kFfm: return static_cast<double>(state.clock(m));
        case MachinePolicy::kLfm: return static_cast<double>(state.schedulable(m).size());
        case MachinePolicy::kLaw: return state.potential_load(m);
      }
      return 0;
    };
    order.clear();
    for (MachineIndex m = 0; m < machines; ++m) {
      if (!state.schedulable(m).empty()) order.push_back(m);
    }
    std::stable_sort(order.begin(), order.end(),
                     [&](MachineIndex a, MachineIndex b) { return key(a) < key(b); });

    std::vector<Candidate> candidates;
    std::size_t dropped = 0;
    for (std::size_t g = 0; g < order.size() && candidates.empty();) {
      group.clear();
      const double k = key(order[g]);
      while (g < order.size() && key(order[g]) == k) group.push_back(order[g++]);
      candidates = candidate_times(state, group, &dropped);
    }
    result.dropped_candidates += dropped;
    if (candidates.empty()) {
      throw LtaError("no operation can be placed within the search horizon (" +
                     std::to_string(state.remaining()) + " operations left)");
    }
    const Candidate& chosen = select_assignment(candidates, params, state.context(), rng);
    state.commit(chosen);
    ++result.iterations;
  }
  result.schedule = state.schedule();
  return result;
}

Schedule run_lta(const Instance& instance, const RuleParams& params, std::uint64_t seed) {
  return run_lta_detailed(instance, params, seed).schedule;
}

}  // namespace pmsched
