#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace pmsched {

/// Minutes relative to the plan origin. Negative values are allowed.
using TimePoint = std::int64_t;
using Duration = std::int64_t;

inline constexpr TimePoint kUnbounded = std::numeric_limits<TimePoint>::max();
inline constexpr Duration kMinutesPerDay = 24 * 60;
inline constexpr Duration kDefaultSearchHorizon = 366 * kMinutesPerDay;

/// Half-open interval [begin, end). `end == kUnbounded` means +infinity.
struct Interval {
  TimePoint begin = 0;
  TimePoint end = 0;

  bool empty() const { return end <= begin; }
  bool contains(TimePoint t) const { return begin <= t && t < end; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

/// Raised when no start time satisfies the calendar and column conditions
/// before `horizon` minutes past the requested lower bound.
class NoSlotError : public std::runtime_error {
 public:
  NoSlotError(TimePoint t_min, Duration horizon);
  TimePoint t_min() const { return t_min_; }
  Duration horizon() const { return horizon_; }

 private:
  TimePoint t_min_;
  Duration horizon_;
};

class CapacityError : public std::runtime_error {
 public:
  CapacityError(const std::string& what, TimePoint instant)
      : std::runtime_error(what), instant_(instant) {}
  TimePoint instant() const { return instant_; }

 private:
  TimePoint instant_;
};

/// A weekly recurring opening pattern. Day 0 is Monday; the plan origin
/// (minute 0) is Monday 00:00.
struct WeeklyPattern {
  std::array<bool, 7> days{};
  int start_minute = 0;  // minute of day
  int end_minute = 0;    // exclusive, <= 1440
};

/// Sorted, disjoint, non-adjacent set of half-open minute intervals.
class TimeWindowSet {
 public:
  TimeWindowSet() = default;
  /// Normalizes: drops empty intervals, sorts, merges overlapping or
  /// touching ones.
  explicit TimeWindowSet(std::vector<Interval> windows);

  static TimeWindowSet always();
  /// Expands `pattern` over the days intersecting [from, to).
  static TimeWindowSet weekly(const WeeklyPattern& pattern, TimePoint from, TimePoint to);

  std::span<const Interval> windows() const { return windows_; }
  bool empty() const { return windows_.empty(); }
  bool contains(TimePoint t) const;
  /// Smallest t' >= t inside the set.
  std::optional<TimePoint> next_open(TimePoint t) const;

  friend bool operator==(const TimeWindowSet&, const TimeWindowSet&) = default;

 private:
  std::vector<Interval> windows_;
};

TimeWindowSet intersect(const TimeWindowSet& a, const TimeWindowSet& b);

/// Number of available units of one column type as a step function of time.
/// Before the first breakpoint the level equals the capacity.
class CapacityProfile {
 public:
  struct Breakpoint {
    TimePoint at;
    int level;  // applies on [at, next breakpoint)
    friend bool operator==(const Breakpoint&, const Breakpoint&) = default;
  };

  explicit CapacityProfile(int units = 1);

  int capacity() const { return capacity_; }
  std::span<const Breakpoint> breakpoints() const { return steps_; }
  int level_at(TimePoint t) const;
  /// True when the level is >= 1 over the whole interval.
  bool available(Interval iv) const;

  /// Minimal t in [t_min, limit] with level >= 1 over [t, t + length).
  std::optional<TimePoint> earliest_available(TimePoint t_min, Duration length,
                                              TimePoint limit) const;

  /// Takes one unit over `iv`. Throws CapacityError naming the first
  /// instant where no unit is free; the profile is left unchanged then.
  void reserve(Interval iv);
  /// Gives one unit back over `iv`. Over-release is not checked here; see
  /// first_invalid_instant().
  void release(Interval iv);

  /// First instant whose level lies outside [0, capacity], if any.
  std::optional<TimePoint> first_invalid_instant() const;

  /// Drops every reservation, keeping allocated storage.
  void reset(int units);

  friend bool operator==(const CapacityProfile&, const CapacityProfile&) = default;

 private:
  void adjust(Interval iv, int delta);
  std::size_t split_at(TimePoint t);
  int level_before(std::size_t index) const {
    return index == 0 ? capacity_ : steps_[index - 1].level;
  }

  int capacity_;
  std::vector<Breakpoint> steps_;
};

/// Earliest start of a setup-then-process placement: the start must lie in
/// `operator_windows` and one column unit must be free over [t, t + s + p).
std::optional<TimePoint> find_start_with_setup(TimePoint t_min, Duration setup, Duration processing,
                                               const TimeWindowSet& operator_windows,
                                               const CapacityProfile& column,
                                               Duration horizon = kDefaultSearchHorizon);

/// Earliest start of a placement without setup: only the column must be free
/// over [t, t + p).
std::optional<TimePoint> find_start_without_setup(TimePoint t_min, Duration processing,
                                                  const CapacityProfile& column,
                                                  Duration horizon = kDefaultSearchHorizon);

/// Throwing forms of the two searches above.
TimePoint earliest_start_with_setup(TimePoint t_min, Duration setup, Duration processing,
                                    const TimeWindowSet& operator_windows,
                                    const CapacityProfile& column,
                                    Duration horizon = kDefaultSearchHorizon);
TimePoint earliest_start_without_setup(TimePoint t_min, Duration processing,
                                       const CapacityProfile& column,
                                       Duration horizon = kDefaultSearchHorizon);

}  // namespace pmsched
