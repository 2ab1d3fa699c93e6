#pragma once

#include <vector>

#include "pmsched/model.hpp"

namespace fixture {

using namespace pmsched;

/// Incremental instance builder; ids are assigned in call order from 1.
struct Builder {
  std::vector<int> machines{1};
  std::vector<ColumnType> columns{{1, 1}};
  TimeWindowSet windows = TimeWindowSet::always();
  std::vector<JobSpec> jobs;
  int next_op = 1;

  Builder& machine_count(int n) {
    machines.clear();
    for (int m = 1; m <= n; ++m) machines.push_back(m);
    return *this;
  }
  Builder& family(int id, int units) {
    for (auto& c : columns) {
      if (c.family == id) {
        c.units = units;
        return *this;
      }
    }
    columns.push_back({id, units});
    return *this;
  }
  /// One job with a single operation.
  Builder& job(TimePoint release, TimePoint due, int family, Duration p, Duration s, std::vector<int> eligible = {1}) {
    JobSpec js{static_cast<int>(jobs.size() + 1), release, due, {}};
    js.operations.push_back(OperationSpec{next_op++, family, p, s, std::move(eligible)});
    jobs.push_back(std::move(js));
    return *this;
  }
  /// Adds an operation to the last job.
  Builder& op(int family, Duration p, Duration s, std::vector<int> eligible = {1}) {
    jobs.back().operations.push_back(OperationSpec{next_op++, family, p, s, std::move(eligible)});
    return *this;
  }
  Instance build() const { return Instance(machines, columns, windows, jobs); }
};

}  // namespace fixture
