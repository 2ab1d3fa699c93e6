#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "pmsched/calendar.hpp"

using namespace pmsched;

namespace {

TimeWindowSet daily(TimePoint open, TimePoint close, int days) {
  std::vector<Interval> ivs;
  for (int d = 0; d < days; ++d) ivs.push_back({d * kMinutesPerDay + open, d * kMinutesPerDay + close});
  return TimeWindowSet(ivs);
}

TimeWindowSet random_set(std::mt19937_64& rng) {
  std::uniform_int_distribution<TimePoint> at(-50, 200), len(0, 40), count(0, 6);
  std::vector<Interval> ivs;
  for (auto n = count(rng); n > 0; --n) {
    const TimePoint b = at(rng);
    ivs.push_back({b, b + len(rng)});
  }
  return TimeWindowSet(ivs);
}

bool member_scan(const TimeWindowSet& s, TimePoint t) {
  for (const Interval& iv : s.windows()) {
    if (iv.begin <= t && t < iv.end) return true;
  }
  return false;
}

CapacityProfile profile_of(const oracle::MinuteColumn& col) {
  CapacityProfile p(col.units);
  for (const Interval& iv : col.reserved) p.reserve(iv);
  return p;
}

}  // namespace

TEST_SUITE("calendar") {
  TEST_CASE("window sets normalize") {
    TimeWindowSet s({{10, 20}, {0, 5}, {5, 8}, {15, 30}, {40, 40}});
    REQUIRE(s.windows().size() == 2);
    CHECK(s.windows()[0] == Interval{0, 8});
    CHECK(s.windows()[1] == Interval{10, 30});
    CHECK(s.contains(0));
    CHECK_FALSE(s.contains(8));
    CHECK(s.next_open(8) == 10);
    CHECK(s.next_open(12) == 12);
    CHECK_FALSE(s.next_open(30).has_value());
  }

  TEST_CASE("intersect examples") {
    TimeWindowSet a({{0, 10}});
    CHECK(intersect(a, a) == a);
    CHECK(intersect(a, TimeWindowSet({{5, 20}})) == TimeWindowSet({{5, 10}}));
    CHECK(intersect(a, TimeWindowSet({{10, 20}})).empty());
    CHECK(intersect(TimeWindowSet::always(), a) == a);
  }

  TEST_CASE("intersect laws against membership scan") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 300; ++trial) {
      const auto a = random_set(rng), b = random_set(rng), c = random_set(rng);
      const auto ab = intersect(a, b);
      CHECK(ab == intersect(b, a));
      CHECK(intersect(ab, c) == intersect(a, intersect(b, c)));
      CHECK(intersect(a, a) == a);
      CHECK(intersect(a, TimeWindowSet{}).empty());
      for (TimePoint t = -60; t < 260; ++t) {
        REQUIRE(member_scan(ab, t) == (member_scan(a, t) && member_scan(b, t)));
      }
    }
  }

  TEST_CASE("weekly pattern expansion") {
    WeeklyPattern p;
    for (int d = 0; d < 5; ++d) p.days[static_cast<std::size_t>(d)] = true;
    p.start_minute = 8 * 60;
    p.end_minute = 18 * 60;
    const auto w = TimeWindowSet::weekly(p, 0, 7 * kMinutesPerDay);
    REQUIRE(w.windows().size() == 5);
    for (int d = 0; d < 5; ++d) {
      CHECK(w.windows()[static_cast<std::size_t>(d)] == Interval{d * kMinutesPerDay + 480, d * kMinutesPerDay + 1080});
    }
    // negative origin: the Monday before minute 0 starts at -7 days
    const auto back = TimeWindowSet::weekly(p, -8 * kMinutesPerDay, 0);
    CHECK(back.windows().front().begin == -7 * kMinutesPerDay + 480);
    CHECK(back.windows().size() == 5);
  }

  TEST_CASE("earliest start with setup examples") {
    CapacityProfile free(1);
    CHECK(earliest_start_with_setup(0, 10, 20, TimeWindowSet::always(), free) == 0);
    CHECK(earliest_start_with_setup(1100, 60, 60, daily(480, 1080, 5), free) == 1920);
    CapacityProfile booked(1);
    booked.reserve({0, 100});
    CHECK(earliest_start_with_setup(0, 10, 20, TimeWindowSet::always(), booked) == 100);
  }

  TEST_CASE("earliest start without setup examples") {
    CapacityProfile free(1);
    CHECK(earliest_start_without_setup(50, 30, free) == 50);
    CapacityProfile booked(1);
    booked.reserve({40, 90});
    CHECK(earliest_start_without_setup(50, 30, booked) == 90);
    CapacityProfile two(2);
    two.reserve({60, 70});
    CHECK(earliest_start_without_setup(50, 30, two) == 50);
  }

  TEST_CASE("searches skip exhausted segments after a free prefix") {
    CapacityProfile p(1);
    p.reserve({100, 200});
    p.reserve({250, 300});
    CHECK(earliest_start_without_setup(0, 150, p) == 300);
    CHECK(earliest_start_without_setup(0, 50, p) == 0);
    CHECK(earliest_start_without_setup(0, 101, p) == 300);
    CHECK(earliest_start_without_setup(0, 50, p) == 0);
    CHECK(earliest_start_without_setup(120, 50, p) == 200);
  }

  TEST_CASE("no slot within the horizon raises") {
    CapacityProfile p(1);
    p.reserve({0, 10 * kMinutesPerDay});
    CHECK_THROWS_AS(earliest_start_without_setup(0, 10, p, kMinutesPerDay), NoSlotError);
    try {
      earliest_start_with_setup(0, 5, 5, TimeWindowSet{}, CapacityProfile(1), 1000);
      FAIL("expected NoSlotError");
    } catch (const NoSlotError& e) {
      CHECK(e.horizon() == 1000);
      CHECK(e.t_min() == 0);
    }
  }

  TEST_CASE("placement searches agree with the minute scan") {
    std::mt19937_64 rng(2024);
    const Duration span = 5 * kMinutesPerDay;
    for (int trial = 0; trial < 1500; ++trial) {
      const auto c = oracle::random_placement_case(rng, span);
      const auto prof = profile_of(c.column);
      const TimeWindowSet windows(c.windows);
      const Duration horizon = span;
      const auto expect_s = oracle::scan_with_setup(c.t_min, c.setup, c.processing, c.windows, c.column, horizon);
      const auto got_s = find_start_with_setup(c.t_min, c.setup, c.processing, windows, prof, horizon);
      REQUIRE(got_s == expect_s);
      const auto expect_n = oracle::scan_without_setup(c.t_min, c.processing, c.column, horizon);
      const auto got_n = find_start_without_setup(c.t_min, c.processing, prof, horizon);
      REQUIRE(got_n == expect_n);
    }
  }

  TEST_CASE("reserve and release") {
    CapacityProfile p(1);
    p.reserve({0, 10});
    CHECK(p.level_at(0) == 0);
    CHECK(p.level_at(9) == 0);
    CHECK(p.level_at(10) == 1);
    CHECK(p.level_at(-1) == 1);
    p.release({0, 10});
    CHECK(p == CapacityProfile(1));

    CapacityProfile two(2);
    two.reserve({0, 10});
    two.reserve({0, 10});
    CHECK(two.level_at(5) == 0);
    CHECK_FALSE(two.available({9, 11}));
  }

  TEST_CASE("failed reserve names the first deficient instant and keeps the profile") {
    CapacityProfile p(1);
    p.reserve({20, 30});
    const CapacityProfile before = p;
    try {
      p.reserve({10, 40});
      FAIL("expected CapacityError");
    } catch (const CapacityError& e) {
      CHECK(e.instant() == 20);
    }
    CHECK(p == before);
  }

  TEST_CASE("over-release is flagged") {
    CapacityProfile p(1);
    p.release({5, 15});
    CHECK(p.level_at(7) == 2);
    CHECK(p.first_invalid_instant() == 5);
  }

  TEST_CASE("random reserve/release sequences match a counting oracle") {
    std::mt19937_64 rng(99);
    std::uniform_int_distribution<TimePoint> at(0, 500), len(1, 80);
    for (int trial = 0; trial < 200; ++trial) {
      const int units = static_cast<int>(rng() % 3) + 1;
      CapacityProfile p(units);
      oracle::MinuteColumn col{units, {}};
      for (int step = 0; step < 30; ++step) {
        if (!col.reserved.empty() && rng() % 3 == 0) {
          const std::size_t k = rng() % col.reserved.size();
          p.release(col.reserved[k]);
          col.reserved.erase(col.reserved.begin() + static_cast<std::ptrdiff_t>(k));
        } else {
          const TimePoint b = at(rng);
          const Interval iv{b, b + len(rng)};
          if (col.free_over(iv.begin, iv.end)) {
            p.reserve(iv);
            col.reserved.push_back(iv);
          } else {
            CHECK_THROWS_AS(p.reserve(iv), CapacityError);
          }
        }
        CHECK_FALSE(p.first_invalid_instant().has_value());
      }
      for (TimePoint t = -5; t < 600; t += 3) REQUIRE(p.level_at(t) == col.level_at(t));
      const auto steps = p.breakpoints();
      for (std::size_t k = 1; k < steps.size(); ++k) {
        CHECK(steps[k - 1].at < steps[k].at);
        CHECK(steps[k - 1].level != steps[k].level);
      }
      while (!col.reserved.empty()) {
        p.release(col.reserved.back());
        col.reserved.pop_back();
      }
      CHECK(p == CapacityProfile(units));
    }
  }
}
