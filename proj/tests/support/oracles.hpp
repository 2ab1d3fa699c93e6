#pragma once

// Independent reference implementations used by the unit and acceptance
// tests. They work minute by minute or by enumeration and share no code
// with the library beyond the plain data types.

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "pmsched/model.hpp"
#include "pmsched/sa.hpp"

namespace oracle {

using pmsched::Duration;
using pmsched::Interval;
using pmsched::TimePoint;

/// A column as a capacity plus the list of reserved intervals.
struct MinuteColumn {
  int units = 1;
  std::vector<Interval> reserved;

  int level_at(TimePoint t) const;
  bool free_over(TimePoint from, TimePoint to) const;
};

bool in_windows(const std::vector<Interval>& windows, TimePoint t);

/// Minute scan: first t in [t_min, t_min + horizon] passing the predicate.
std::optional<TimePoint> scan_with_setup(TimePoint t_min, Duration s, Duration p,
                                         const std::vector<Interval>& windows, const MinuteColumn& col,
                                         Duration horizon);
std::optional<TimePoint> scan_without_setup(TimePoint t_min, Duration p, const MinuteColumn& col,
                                            Duration horizon);

/// Random placement-search case over a bounded horizon.
struct PlacementCase {
  std::vector<Interval> windows;
  MinuteColumn column;
  TimePoint t_min = 0;
  Duration setup = 0;
  Duration processing = 1;
};
PlacementCase random_placement_case(std::mt19937_64& rng, Duration span);

/// Brute-force feasibility check minute by minute. Returns the number of
/// violated conditions (0 = feasible).
std::size_t brute_force_violations(const pmsched::Instance& instance, const pmsched::Schedule& schedule);

/// Small random instance with `ops` operations over `machines` machines and
/// a few families with 1 or 2 units.
pmsched::Instance random_micro_instance(std::mt19937_64& rng, std::size_t ops, std::size_t machines,
                                        bool with_windows);

/// Best tardiness over every encoding (assignment plus per-machine order),
/// each timed by the library decoder. Also reports the encoding count.
struct Enumeration {
  Duration best = 0;
  std::size_t encodings = 0;
  std::size_t undecodable = 0;
};
Enumeration enumerate_optimum(const pmsched::Instance& instance);

/// Lower bound on total tardiness over all feasible schedules. An operation
/// either carries its own setup, which starts in an operator window no
/// earlier than its release and the plan origin, or follows a same-family
/// operation that did.
Duration tardiness_lower_bound(const pmsched::Instance& instance);

/// Sum of job tardiness straight from the placements.
Duration total_tardiness_direct(const pmsched::Instance& instance, const pmsched::Schedule& schedule);

}  // namespace oracle
