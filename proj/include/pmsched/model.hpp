#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pmsched/calendar.hpp"

namespace pmsched {

// Dense internal indices. External ids (as they appear in files) are kept
// on the entities themselves.
using MachineIndex = std::size_t;
using FamilyIndex = std::size_t;
using JobIndex = std::size_t;
using OpIndex = std::size_t;

class InstanceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ColumnType {
  int family = 0;  // external family id
  int units = 1;
};

struct Operation {
  int id = 0;
  JobIndex job = 0;
  FamilyIndex family = 0;
  Duration processing = 0;
  Duration setup = 0;
  std::vector<MachineIndex> eligible;  // sorted, unique

  bool eligible_on(MachineIndex m) const;
};

struct Job {
  int id = 0;
  TimePoint release = 0;
  TimePoint due = 0;
  std::vector<OpIndex> operations;
};

/// Operation as written in input data: family and machines by external id.
struct OperationSpec {
  int id = 0;
  int family = 0;
  Duration processing = 0;
  Duration setup = 0;
  std::vector<int> eligible;
};

struct JobSpec {
  int id = 0;
  TimePoint release = 0;
  TimePoint due = 0;
  std::vector<OperationSpec> operations;
};

/// Immutable problem data. The constructor checks every structural
/// invariant and throws InstanceError naming the offending entity.
class Instance {
 public:
  Instance(std::vector<int> machine_ids, std::vector<ColumnType> column_types,
           TimeWindowSet operator_windows, const std::vector<JobSpec>& jobs,
           TimePoint horizon_origin = 0);

  std::size_t machine_count() const { return machine_ids_.size(); }
  std::size_t family_count() const { return column_types_.size(); }
  std::size_t job_count() const { return jobs_.size(); }
  std::size_t operation_count() const { return operations_.size(); }

  const std::vector<int>& machine_ids() const { return machine_ids_; }
  const std::vector<ColumnType>& column_types() const { return column_types_; }
  const TimeWindowSet& operator_windows() const { return operator_windows_; }
  const std::vector<Job>& jobs() const { return jobs_; }
  const std::vector<Operation>& operations() const { return operations_; }
  TimePoint horizon_origin() const { return horizon_origin_; }

  const Operation& operation(OpIndex i) const { return operations_.at(i); }
  const Job& job(JobIndex j) const { return jobs_.at(j); }
  const Job& job_of(OpIndex i) const { return jobs_[operations_.at(i).job]; }
  int units(FamilyIndex f) const { return column_types_.at(f).units; }

  std::optional<MachineIndex> find_machine(int id) const;
  std::optional<FamilyIndex> find_family(int id) const;
  std::optional<OpIndex> find_operation(int id) const;

  /// Round-trips to the input form.
  std::vector<JobSpec> job_specs() const;

 private:
  std::vector<int> machine_ids_;
  std::vector<ColumnType> column_types_;
  TimeWindowSet operator_windows_;
  std::vector<Job> jobs_;
  std::vector<Operation> operations_;
  TimePoint horizon_origin_;
};

struct PlacedOperation {
  OpIndex operation = 0;
  MachineIndex machine = 0;
  bool setup = false;
  TimePoint start = 0;  // setup start when `setup`, else processing start
  TimePoint completion = 0;

  friend bool operator==(const PlacedOperation&, const PlacedOperation&) = default;
};

struct Schedule {
  std::vector<PlacedOperation> placements;

  friend bool operator==(const Schedule&, const Schedule&) = default;
};

class ScheduleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Maximal completion over the job's operations. Throws ScheduleError if one
/// of them is not placed.
TimePoint job_completion(const Schedule& schedule, const Instance& instance, JobIndex job);

/// Sum over jobs of max(C_j - d_j, 0). Throws ScheduleError on an incomplete
/// schedule.
Duration total_tardiness(const Schedule& schedule, const Instance& instance);

struct ScheduleMetrics {
  Duration total_tardiness = 0;
  std::size_t late_jobs = 0;
  std::size_t setups = 0;
  TimePoint makespan = 0;
};

ScheduleMetrics compute_metrics(const Schedule& schedule, const Instance& instance);

enum class ViolationKind {
  kUnknownOperation,
  kMissingOperation,
  kDuplicateOperation,
  kIneligibleMachine,
  kDurationMismatch,
  kBeforeRelease,
  kMachineOverlap,
  kSetupMismatch,
  kSetupOutsideOperatorWindow,
  kColumnCapacity,
};

const char* to_string(ViolationKind kind);

struct Violation {
  ViolationKind kind;
  std::vector<OpIndex> operations;
  std::string message;
};

/// Checks the full feasibility contract. An empty result means feasible.
std::vector<Violation> validate_schedule(const Instance& instance, const Schedule& schedule);

}  // namespace pmsched
