#include "pmsched/model.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <unordered_map>

namespace pmsched {

bool Operation::eligible_on(MachineIndex m) const {
  return std::binary_search(eligible.begin(), eligible.end(), m);
}

Instance::Instance(std::vector<int> machine_ids, std::vector<ColumnType> column_types,
                   TimeWindowSet operator_windows, const std::vector<JobSpec>& jobs,
                   TimePoint horizon_origin)
    : machine_ids_(std::move(machine_ids)),
      column_types_(std::move(column_types)),
      operator_windows_(std::move(operator_windows)),
      horizon_origin_(horizon_origin) {
  std::unordered_map<int, MachineIndex> machine_index;
  for (MachineIndex m = 0; m < machine_ids_.size(); ++m) {
    if (!machine_index.emplace(machine_ids_[m], m).second) {
      throw InstanceError("duplicate machine id " + std::to_string(machine_ids_[m]));
    }
  }
  std::unordered_map<int, FamilyIndex> family_index;
  for (FamilyIndex f = 0; f < column_types_.size(); ++f) {
    const ColumnType& ct = column_types_[f];
    if (ct.units < 1) {
      throw InstanceError("column type of family " + std::to_string(ct.family) +
                          " must have at least one unit");
    }
    if (!family_index.emplace(ct.family, f).second) {
      throw InstanceError("duplicate column family " + std::to_string(ct.family));
    }
  }

  std::set<int> job_ids;
  std::set<int> op_ids;
  jobs_.reserve(jobs.size());
  for (const JobSpec& js : jobs) {
    const std::string where = "job " + std::to_string(js.id);
    if (!job_ids.insert(js.id).second) throw InstanceError("duplicate " + where);
    if (js.due < js.release) throw InstanceError(where + ": due date before release date");
    if (js.operations.empty()) throw InstanceError(where + ": no operations");
    Job job{js.id, js.release, js.due, {}};
    for (const OperationSpec& os : js.operations) {
      const std::string owhere = where + " operation " + std::to_string(os.id);
      if (!op_ids.insert(os.id).second) throw InstanceError("duplicate id in " + owhere);
      if (os.processing <= 0) throw InstanceError(owhere + ": processing time must be > 0");
      if (os.setup < 0) throw InstanceError(owhere + ": setup time must be >= 0");
      auto fam = family_index.find(os.family);
      if (fam == family_index.end()) {
        throw InstanceError(owhere + ": family " + std::to_string(os.family) +
                            " has no column type");
      }
      if (os.eligible.empty()) throw InstanceError(owhere + ": no eligible machine");
      Operation op{os.id, jobs_.size(), fam->second, os.processing, os.setup, {}};
      for (int mid : os.eligible) {
        auto m = machine_index.find(mid);
        if (m == machine_index.end()) {
          throw InstanceError(owhere + ": unknown eligible machine " + std::to_string(mid));
        }
        op.eligible.push_back(m->second);
      }
      std::sort(op.eligible.begin(), op.eligible.end());
      op.eligible.erase(std::unique(op.eligible.begin(), op.eligible.end()), op.eligible.end());
      job.operations.push_back(operations_.size());
      operations_.push_back(std::move(op));
    }
    jobs_.push_back(std::move(job));
  }
}

std::optional<MachineIndex> Instance::find_machine(int id) const {
  auto it = std::find(machine_ids_.begin(), machine_ids_.end(), id);
  if (it == machine_ids_.end()) return std::nullopt;
  return static_cast<MachineIndex>(it - machine_ids_.begin());
}

std::optional<FamilyIndex> Instance::find_family(int id) const {
  for (FamilyIndex f = 0; f < column_types_.size(); ++f) {
    if (column_types_[f].family == id) return f;
  }
  return std::nullopt;
}

std::optional<OpIndex> Instance::find_operation(int id) const {
  for (OpIndex i = 0; i < operations_.size(); ++i) {
    if (operations_[i].id == id) return i;
  }
  return std::nullopt;
}

std::vector<JobSpec> Instance::job_specs() const {
  std::vector<JobSpec> out;
  out.reserve(jobs_.size());
  for (const Job& job : jobs_) {
    JobSpec js{job.id, job.release, job.due, {}};
    for (OpIndex i : job.operations) {
      const Operation& op = operations_[i];
      OperationSpec os{op.id, column_types_[op.family].family, op.processing, op.setup, {}};
      for (MachineIndex m : op.eligible) os.eligible.push_back(machine_ids_[m]);
      js.operations.push_back(std::move(os));
    }
    out.push_back(std::move(js));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Objective

namespace {

std::vector<const PlacedOperation*> index_by_operation(const Schedule& schedule,
                                                       const Instance& instance) {
  std::vector<const PlacedOperation*> by_op(instance.operation_count(), nullptr);
  for (const PlacedOperation& p : schedule.placements) {
    if (p.operation < by_op.size()) by_op[p.operation] = &p;
  }
  return by_op;
}

TimePoint completion_of(const std::vector<const PlacedOperation*>& by_op,
                        const Instance& instance, JobIndex job) {
  const Job& j = instance.job(job);
  TimePoint c = std::numeric_limits<TimePoint>::min();
  for (OpIndex i : j.operations) {
    if (by_op[i] == nullptr) {
      throw ScheduleError("operation " + std::to_string(instance.operation(i).id) + " of job " +
                          std::to_string(j.id) + " is not placed");
    }
    c = std::max(c, by_op[i]->completion);
  }
  return c;
}

}  // namespace

TimePoint job_completion(const Schedule& schedule, const Instance& instance, JobIndex job) {
  return completion_of(index_by_operation(schedule, instance), instance, job);
}

Duration total_tardiness(const Schedule& schedule, const Instance& instance) {
  return compute_metrics(schedule, instance).total_tardiness;
}

ScheduleMetrics compute_metrics(const Schedule& schedule, const Instance& instance) {
  auto by_op = index_by_operation(schedule, instance);
  ScheduleMetrics m;
  for (JobIndex j = 0; j < instance.job_count(); ++j) {
    const Duration late = completion_of(by_op, instance, j) - instance.job(j).due;
    if (late > 0) {
      m.total_tardiness += late;
      ++m.late_jobs;
    }
  }
  for (const PlacedOperation& p : schedule.placements) {
    if (p.setup) ++m.setups;
    m.makespan = std::max(m.makespan, p.completion);
  }
  return m;
}

// ---------------------------------------------------------------------------
// Validation

const char* to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::kUnknownOperation: return "unknown-operation";
    case ViolationKind::kMissingOperation: return "missing-operation";
    case ViolationKind::kDuplicateOperation: return "duplicate-operation";
    case ViolationKind::kIneligibleMachine: return "ineligible-machine";
    case ViolationKind::kDurationMismatch: return "duration-mismatch";
    case ViolationKind::kBeforeRelease: return "before-release";
    case ViolationKind::kMachineOverlap: return "machine-overlap";
    case ViolationKind::kSetupMismatch: return "setup-mismatch";
    case ViolationKind::kSetupOutsideOperatorWindow: return "setup-outside-operator-window";
    case ViolationKind::kColumnCapacity: return "column-capacity";
  }
  return "?";
}

std::vector<Violation> validate_schedule(const Instance& instance, const Schedule& schedule) {
  std::vector<Violation> out;
  auto report = [&](ViolationKind kind, std::vector<OpIndex> ops, std::string msg) {
    out.push_back(Violation{kind, std::move(ops), std::move(msg)});
  };
  auto op_name = [&](OpIndex i) { return "operation " + std::to_string(instance.operation(i).id); };

  // (a) coverage and eligibility
  std::vector<int> seen(instance.operation_count(), 0);
  std::vector<const PlacedOperation*> valid;
  for (const PlacedOperation& p : schedule.placements) {
    if (p.operation >= instance.operation_count()) {
      report(ViolationKind::kUnknownOperation, {},
             "placement refers to unknown operation index " + std::to_string(p.operation));
      continue;
    }
    if (++seen[p.operation] == 2) {
      report(ViolationKind::kDuplicateOperation, {p.operation}, op_name(p.operation) + " placed more than once");
    }
    const Operation& op = instance.operation(p.operation);
    if (p.machine >= instance.machine_count() || !op.eligible_on(p.machine)) {
      report(ViolationKind::kIneligibleMachine, {p.operation},
             op_name(p.operation) + " placed on a machine outside its eligible set");
      if (p.machine >= instance.machine_count()) continue;
    }
    const Duration expected = (p.setup ? op.setup : 0) + op.processing;
    if (p.completion - p.start != expected) {
      report(ViolationKind::kDurationMismatch, {p.operation},
             op_name(p.operation) + " spans " + std::to_string(p.completion - p.start) +
                 " minutes, expected " + std::to_string(expected));
    }
    // (b) release
    if (p.start < instance.job_of(p.operation).release) {
      report(ViolationKind::kBeforeRelease, {p.operation},
             op_name(p.operation) + " starts before its job release date");
    }
    // (e) operator windows
    if (p.setup && !instance.operator_windows().contains(p.start)) {
      report(ViolationKind::kSetupOutsideOperatorWindow, {p.operation},
             op_name(p.operation) + " setup starts at " + std::to_string(p.start) +
                 " outside operator windows");
    }
    valid.push_back(&p);
  }
  for (OpIndex i = 0; i < seen.size(); ++i) {
    if (seen[i] == 0) report(ViolationKind::kMissingOperation, {i}, op_name(i) + " is not placed");
  }

  // (c), (d) per-machine sequences
  std::vector<std::vector<const PlacedOperation*>> per_machine(instance.machine_count());
  for (const PlacedOperation* p : valid) per_machine[p->machine].push_back(p);
  for (auto& seq : per_machine) {
    std::stable_sort(seq.begin(), seq.end(), [](const PlacedOperation* a, const PlacedOperation* b) {
      return a->start < b->start;
    });
    const PlacedOperation* latest = nullptr;  // placement with the largest completion so far
    for (std::size_t k = 0; k < seq.size(); ++k) {
      const PlacedOperation* p = seq[k];
      if (latest != nullptr && latest->completion > p->start) {
        report(ViolationKind::kMachineOverlap, {latest->operation, p->operation},
               op_name(latest->operation) + " and " + op_name(p->operation) +
                   " overlap on machine " + std::to_string(instance.machine_ids()[p->machine]));
      }
      if (latest == nullptr || p->completion > latest->completion) latest = p;

      const bool needs_setup =
          k == 0 || instance.operation(seq[k - 1]->operation).family != instance.operation(p->operation).family;
      if (p->setup != needs_setup) {
        report(ViolationKind::kSetupMismatch, {p->operation},
               op_name(p->operation) + (needs_setup ? " needs a setup but none is performed"
                                                    : " performs a setup after the same family"));
      }
    }
  }

  // (f) column capacity, swept per family
  std::vector<std::vector<const PlacedOperation*>> per_family(instance.family_count());
  for (const PlacedOperation* p : valid) per_family[instance.operation(p->operation).family].push_back(p);
  for (FamilyIndex f = 0; f < per_family.size(); ++f) {
    struct Event {
      TimePoint at;
      int delta;
      const PlacedOperation* p;
    };
    std::vector<Event> events;
    for (const PlacedOperation* p : per_family[f]) {
      if (p->completion <= p->start) continue;
      events.push_back({p->start, +1, p});
      events.push_back({p->completion, -1, p});
    }
    std::sort(events.begin(), events.end(), [](const Event& a, const Event& b) {
      return a.at != b.at ? a.at < b.at : a.delta < b.delta;
    });
    std::vector<const PlacedOperation*> active;
    bool in_excess = false;
    for (const Event& e : events) {
      if (e.delta < 0) {
        std::erase(active, e.p);
        if (static_cast<int>(active.size()) <= instance.units(f)) in_excess = false;
        continue;
      }
      active.push_back(e.p);
      if (static_cast<int>(active.size()) > instance.units(f) && !in_excess) {
        in_excess = true;
        std::vector<OpIndex> ops;
        for (const PlacedOperation* a : active) ops.push_back(a->operation);
        report(ViolationKind::kColumnCapacity, std::move(ops),
               "family " + std::to_string(instance.column_types()[f].family) + " uses " +
                   std::to_string(active.size()) + " columns at t=" + std::to_string(e.at) +
                   " but has " + std::to_string(instance.units(f)));
      }
    }
  }
  return out;
}

}  // namespace pmsched
