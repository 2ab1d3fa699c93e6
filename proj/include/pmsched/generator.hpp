#pragma once

#include <cstdint>
#include <vector>

#include "pmsched/model.hpp"

namespace pmsched {

/// Parameters of one random problem. The design domains are
/// jobs in {70, 140}, routings in {10, 20}, setup_ratio in {0.5, 0.75} and
/// flex_mean in {2, 4, 6, 10}; `unchecked` lifts that restriction.
struct GenConfig {
  int jobs = 70;
  int routings = 10;
  double setup_ratio = 0.5;
  double flex_mean = 2;
  int machines = 10;
  int column_types = 20;
  std::uint64_t seed = 0;
  bool unchecked = false;

  /// Throws std::invalid_argument on an out-of-domain field.
  void check() const;
};

Instance generate_instance(const GenConfig& config);

/// Full factorial over routings x setup ratio x flexibility for every load,
/// `seeds_per_cell` replicates each, seeds derived from `master_seed`.
/// Order: load, routings, setup ratio, flexibility, replicate.
std::vector<GenConfig> generate_design(const std::vector<int>& loads, int seeds_per_cell,
                                       std::uint64_t master_seed = 1, bool unchecked = false);

/// splitmix64 step; used to derive independent seeds.
std::uint64_t mix_seed(std::uint64_t x);

}  // namespace pmsched
