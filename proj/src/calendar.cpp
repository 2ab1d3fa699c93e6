#include "pmsched/calendar.hpp"

#include <algorithm>

namespace pmsched {
namespace {

TimePoint saturating_add(TimePoint t, Duration d) {
  if (d > 0 && t > kUnbounded - d) return kUnbounded;
  return t + d;
}

TimePoint floor_div(TimePoint a, TimePoint b) {
  TimePoint q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

}  // namespace

NoSlotError::NoSlotError(TimePoint t_min, Duration horizon)
    : std::runtime_error("no feasible start within " + std::to_string(horizon) +
                         " minutes after t=" + std::to_string(t_min)),
      t_min_(t_min),
      horizon_(horizon) {}

// ---------------------------------------------------------------------------
// TimeWindowSet

TimeWindowSet::TimeWindowSet(std::vector<Interval> windows) {
  std::erase_if(windows, [](const Interval& iv) { return iv.empty(); });
  std::sort(windows.begin(), windows.end(),
            [](const Interval& a, const Interval& b) { return a.begin < b.begin; });
  for (const Interval& iv : windows) {
    if (!windows_.empty() && iv.begin <= windows_.back().end) {
      windows_.back().end = std::max(windows_.back().end, iv.end);
    } else {
      windows_.push_back(iv);
    }
  }
}

TimeWindowSet TimeWindowSet::always() {
  return TimeWindowSet({Interval{std::numeric_limits<TimePoint>::min(), kUnbounded}});
}

TimeWindowSet TimeWindowSet::weekly(const WeeklyPattern& pattern, TimePoint from, TimePoint to) {
  std::vector<Interval> out;
  if (to <= from || pattern.end_minute <= pattern.start_minute) return TimeWindowSet{};
  const TimePoint first_day = floor_div(from, kMinutesPerDay);
  const TimePoint last_day = floor_div(to - 1, kMinutesPerDay);
  for (TimePoint day = first_day; day <= last_day; ++day) {
    const auto weekday = static_cast<std::size_t>(((day % 7) + 7) % 7);
    if (!pattern.days[weekday]) continue;
    const TimePoint base = day * kMinutesPerDay;
    Interval iv{std::max(from, base + pattern.start_minute), std::min(to, base + pattern.end_minute)};
    if (!iv.empty()) out.push_back(iv);
  }
  return TimeWindowSet(std::move(out));
}

bool TimeWindowSet::contains(TimePoint t) const {
  auto it = std::upper_bound(windows_.begin(), windows_.end(), t,
                             [](TimePoint v, const Interval& iv) { return v < iv.end; });
  return it != windows_.end() && it->begin <= t;
}

std::optional<TimePoint> TimeWindowSet::next_open(TimePoint t) const {
  // first window ending after t
  auto it = std::upper_bound(windows_.begin(), windows_.end(), t,
                             [](TimePoint v, const Interval& iv) { return v < iv.end; });
  if (it == windows_.end()) return std::nullopt;
  return std::max(t, it->begin);
}

TimeWindowSet intersect(const TimeWindowSet& a, const TimeWindowSet& b) {
  std::vector<Interval> out;
  auto wa = a.windows();
  auto wb = b.windows();
  std::size_t i = 0, j = 0;
  while (i < wa.size() && j < wb.size()) {
    Interval iv{std::max(wa[i].begin, wb[j].begin), std::min(wa[i].end, wb[j].end)};
    if (!iv.empty()) out.push_back(iv);
    if (wa[i].end < wb[j].end) {
      ++i;
    } else {
      ++j;
    }
  }
  return TimeWindowSet(std::move(out));
}

// ---------------------------------------------------------------------------
// CapacityProfile

CapacityProfile::CapacityProfile(int units) : capacity_(units) {
  if (units < 1) throw std::invalid_argument("column capacity must be >= 1");
}

void CapacityProfile::reset(int units) {
  if (units < 1) throw std::invalid_argument("column capacity must be >= 1");
  capacity_ = units;
  steps_.clear();
}

int CapacityProfile::level_at(TimePoint t) const {
  auto it = std::upper_bound(steps_.begin(), steps_.end(), t,
                             [](TimePoint v, const Breakpoint& b) { return v < b.at; });
  return level_before(static_cast<std::size_t>(it - steps_.begin()));
}

bool CapacityProfile::available(Interval iv) const {
  if (iv.empty()) return true;
  auto it = std::upper_bound(steps_.begin(), steps_.end(), iv.begin,
                             [](TimePoint v, const Breakpoint& b) { return v < b.at; });
  auto i = static_cast<std::size_t>(it - steps_.begin());
  if (level_before(i) < 1) return false;
  for (; i < steps_.size() && steps_[i].at < iv.end; ++i) {
    if (steps_[i].level < 1) return false;
  }
  return true;
}

std::optional<TimePoint> CapacityProfile::earliest_available(TimePoint t_min, Duration length,
                                                             TimePoint limit) const {
  TimePoint t = t_min;
  auto it = std::upper_bound(steps_.begin(), steps_.end(), t,
                             [](TimePoint v, const Breakpoint& b) { return v < b.at; });
  auto i = static_cast<std::size_t>(it - steps_.begin());  // first breakpoint after t
  const std::size_t n = steps_.size();
  while (t <= limit) {
    if (level_before(i) < 1) {
      if (i == n) return std::nullopt;
      t = steps_[i].at;
      ++i;
      continue;
    }
    const TimePoint end = saturating_add(t, length);
    std::size_t j = i;
    while (j < n && steps_[j].at < end && steps_[j].level >= 1) ++j;
    if (j == n || steps_[j].at >= end) return t;
    // segment j is exhausted; nothing before its end can work
    t = steps_[j].at;
    i = j + 1;
  }
  return std::nullopt;
}

std::size_t CapacityProfile::split_at(TimePoint t) {
  auto it = std::lower_bound(steps_.begin(), steps_.end(), t,
                             [](const Breakpoint& b, TimePoint v) { return b.at < v; });
  auto index = static_cast<std::size_t>(it - steps_.begin());
  if (it != steps_.end() && it->at == t) return index;
  steps_.insert(it, Breakpoint{t, level_before(index)});
  return index;
}

void CapacityProfile::adjust(Interval iv, int delta) {
  if (iv.empty()) return;
  const std::size_t b = split_at(iv.begin);
  std::size_t e = iv.end == kUnbounded ? steps_.size() : split_at(iv.end);
  for (std::size_t k = b; k < e; ++k) steps_[k].level += delta;
  if (e < steps_.size() && steps_[e].level == steps_[e - 1].level) {
    steps_.erase(steps_.begin() + static_cast<std::ptrdiff_t>(e));
  }
  if (steps_[b].level == level_before(b)) {
    steps_.erase(steps_.begin() + static_cast<std::ptrdiff_t>(b));
  }
}

void CapacityProfile::reserve(Interval iv) {
  if (iv.empty()) return;
  if (!available(iv)) {
    TimePoint bad = iv.begin;
    if (level_at(bad) >= 1) {
      for (const Breakpoint& bp : steps_) {
        if (bp.at > iv.begin && bp.at < iv.end && bp.level < 1) {
          bad = bp.at;
          break;
        }
      }
    }
    throw CapacityError("no free column unit at t=" + std::to_string(bad), bad);
  }
  adjust(iv, -1);
}

void CapacityProfile::release(Interval iv) { adjust(iv, +1); }

std::optional<TimePoint> CapacityProfile::first_invalid_instant() const {
  for (const Breakpoint& bp : steps_) {
    if (bp.level < 0 || bp.level > capacity_) return bp.at;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Placement searches

std::optional<TimePoint> find_start_with_setup(TimePoint t_min, Duration setup, Duration processing,
                                               const TimeWindowSet& operator_windows,
                                               const CapacityProfile& column, Duration horizon) {
  const TimePoint limit = saturating_add(t_min, horizon);
  const Duration length = setup + processing;
  TimePoint t = t_min;
  while (true) {
    auto open = operator_windows.next_open(t);
    if (!open || *open > limit) return std::nullopt;
    auto free = column.earliest_available(*open, length, limit);
    if (!free) return std::nullopt;
    if (*free == *open) return *free;
    t = *free;
  }
}

std::optional<TimePoint> find_start_without_setup(TimePoint t_min, Duration processing,
                                                  const CapacityProfile& column, Duration horizon) {
  return column.earliest_available(t_min, processing, saturating_add(t_min, horizon));
}

TimePoint earliest_start_with_setup(TimePoint t_min, Duration setup, Duration processing,
                                    const TimeWindowSet& operator_windows,
                                    const CapacityProfile& column, Duration horizon) {
  if (setup < 0 || processing <= 0) throw std::invalid_argument("need setup >= 0 and processing > 0");
  auto t = find_start_with_setup(t_min, setup, processing, operator_windows, column, horizon);
  if (!t) throw NoSlotError(t_min, horizon);
  return *t;
}

TimePoint earliest_start_without_setup(TimePoint t_min, Duration processing,
                                       const CapacityProfile& column, Duration horizon) {
  if (processing <= 0) throw std::invalid_argument("need processing > 0");
  auto t = find_start_without_setup(t_min, processing, column, horizon);
  if (!t) throw NoSlotError(t_min, horizon);
  return *t;
}

}  // namespace pmsched
