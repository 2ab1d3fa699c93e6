#include "pmsched/generator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

namespace pmsched {
namespace {

constexpr Duration kMinTotal = 120;
constexpr Duration kMaxTotal = 1440;
constexpr double kFlexStddev = 0.5;
constexpr Duration kReleaseLow = -8 * kMinutesPerDay;
constexpr Duration kReleaseHigh = 5 * kMinutesPerDay;
constexpr double kLeadMean = 10.0 * kMinutesPerDay;
constexpr double kLeadStddev = 1.0 * kMinutesPerDay;
constexpr Duration kWindowTail = 60 * kMinutesPerDay;

struct RoutingOperation {
  int family;
  Duration processing;
  Duration setup;
  std::vector<int> eligible;
};

template <typename T>
bool one_of(T v, std::initializer_list<T> values) {
  return std::find(values.begin(), values.end(), v) != values.end();
}

}  // namespace

std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

void GenConfig::check() const {
  if (jobs < 1 || routings < 1 || machines < 1 || column_types < 1) {
    throw std::invalid_argument("jobs, routings, machines and column types must be positive");
  }
  if (!(setup_ratio >= 0.0 && setup_ratio < 1.0)) throw std::invalid_argument("setup ratio must lie in [0, 1)");
  if (!(flex_mean >= 1.0)) throw std::invalid_argument("flexibility mean must be >= 1");
  if (unchecked) return;
  if (!one_of(jobs, {70, 140})) throw std::invalid_argument("jobs must be 70 or 140");
  if (!one_of(routings, {10, 20})) throw std::invalid_argument("routings must be 10 or 20");
  if (!one_of(setup_ratio, {0.5, 0.75})) throw std::invalid_argument("setup ratio must be 0.5 or 0.75");
  if (!one_of(flex_mean, {2.0, 4.0, 6.0, 10.0})) throw std::invalid_argument("flexibility mean must be 2, 4, 6 or 10");
  if (machines != 10) throw std::invalid_argument("machines must be 10");
  if (column_types != 20) throw std::invalid_argument("column types must be 20");
}

Instance generate_instance(const GenConfig& cfg) {
  cfg.check();
  std::mt19937_64 rng(cfg.seed);

  std::vector<int> all_machines(static_cast<std::size_t>(cfg.machines));
  std::iota(all_machines.begin(), all_machines.end(), 0);

  std::uniform_int_distribution<int> op_count(1, 3);
  std::uniform_int_distribution<int> family_pick(0, cfg.column_types - 1);
  std::uniform_int_distribution<Duration> total_pick(kMinTotal, kMaxTotal);
  std::normal_distribution<double> flex_pick(cfg.flex_mean, kFlexStddev);

  std::vector<std::vector<RoutingOperation>> routings(static_cast<std::size_t>(cfg.routings));
  for (auto& routing : routings) {
    const int n = op_count(rng);
    for (int k = 0; k < n; ++k) {
      RoutingOperation op;
      op.family = family_pick(rng);
      const Duration total = total_pick(rng);
      op.setup = std::llround(cfg.setup_ratio * static_cast<double>(total));
      op.processing = total - op.setup;
      if (op.processing < 1) {
        op.processing = 1;
        op.setup = total - 1;
      }
      if (cfg.flex_mean >= cfg.machines) {
        op.eligible = all_machines;
      } else {
        const auto count = std::clamp<long long>(std::llround(flex_pick(rng)), 1, cfg.machines);
        std::vector<int> pool = all_machines;
        std::shuffle(pool.begin(), pool.end(), rng);
        op.eligible.assign(pool.begin(), pool.begin() + count);
        std::sort(op.eligible.begin(), op.eligible.end());
      }
      routing.push_back(std::move(op));
    }
  }

  std::uniform_int_distribution<std::size_t> routing_pick(0, routings.size() - 1);
  std::uniform_int_distribution<Duration> release_pick(kReleaseLow, kReleaseHigh);
  std::normal_distribution<double> lead_pick(kLeadMean, kLeadStddev);
  std::vector<JobSpec> jobs;
  std::vector<Duration> usage(static_cast<std::size_t>(cfg.column_types), 0);
  int next_op_id = 0;
  TimePoint max_release = kReleaseLow;
  for (int j = 0; j < cfg.jobs; ++j) {
    const auto& routing = routings[routing_pick(rng)];
    JobSpec job;
    job.id = j;
    job.release = release_pick(rng);
    job.due = job.release + std::max<Duration>(0, std::llround(lead_pick(rng)));
    max_release = std::max(max_release, job.release);
    for (const RoutingOperation& rop : routing) {
      job.operations.push_back(OperationSpec{next_op_id++, rop.family, rop.processing, rop.setup, rop.eligible});
      usage[static_cast<std::size_t>(rop.family)] += rop.processing;
    }
    jobs.push_back(std::move(job));
  }

  // Column multiplicity by usage rank: top 10% get 3 units, next 30% get 2.
  std::vector<int> rank(static_cast<std::size_t>(cfg.column_types));
  std::iota(rank.begin(), rank.end(), 0);
  std::stable_sort(rank.begin(), rank.end(), [&](int a, int b) {
    return usage[static_cast<std::size_t>(a)] > usage[static_cast<std::size_t>(b)];
  });
  const auto top = static_cast<std::size_t>(std::llround(0.1 * cfg.column_types));
  const auto next = static_cast<std::size_t>(std::llround(0.3 * cfg.column_types));
  std::vector<ColumnType> columns(static_cast<std::size_t>(cfg.column_types));
  for (std::size_t k = 0; k < rank.size(); ++k) {
    const auto f = static_cast<std::size_t>(rank[k]);
    columns[f] = ColumnType{rank[k], k < top ? 3 : (k < top + next ? 2 : 1)};
  }

  WeeklyPattern office{{true, true, true, true, true, false, false}, 8 * 60, 18 * 60};
  auto windows = TimeWindowSet::weekly(office, kReleaseLow, max_release + kWindowTail);
  return Instance(all_machines, std::move(columns), std::move(windows), jobs, 0);
}

std::vector<GenConfig> generate_design(const std::vector<int>& loads, int seeds_per_cell,
                                       std::uint64_t master_seed, bool unchecked) {
  std::vector<GenConfig> out;
  const std::uint64_t base = mix_seed(master_seed);
  std::uint64_t index = 0;
  for (int load : loads) {
    for (int routings : {10, 20}) {
      for (double ratio : {0.5, 0.75}) {
        for (double flex : {2.0, 4.0, 6.0, 10.0}) {
          for (int rep = 0; rep < seeds_per_cell; ++rep) {
            GenConfig cfg;
            cfg.jobs = load;
            cfg.routings = routings;
            cfg.setup_ratio = ratio;
            cfg.flex_mean = flex;
            cfg.seed = mix_seed(base + index++);
            cfg.unchecked = unchecked;
            out.push_back(cfg);
          }
        }
      }
    }
  }
  return out;
}

}  // namespace pmsched
