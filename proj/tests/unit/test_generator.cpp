#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "pmsched/generator.hpp"
#include "pmsched/io.hpp"

using namespace pmsched;

namespace {

GenConfig cell(int index, int jobs, std::uint64_t seed) {
  GenConfig cfg;
  cfg.jobs = jobs;
  cfg.routings = index & 1 ? 20 : 10;
  cfg.setup_ratio = index & 2 ? 0.75 : 0.5;
  cfg.flex_mean = std::array<double, 4>{2, 4, 6, 10}[static_cast<std::size_t>(index >> 2) & 3];
  cfg.seed = seed;
  cfg.unchecked = jobs != 70 && jobs != 140;
  return cfg;
}

using Signature = std::vector<std::tuple<FamilyIndex, Duration, Duration, std::vector<MachineIndex>>>;

}  // namespace

TEST_SUITE("generator") {
  TEST_CASE("configuration domains") {
    CHECK_NOTHROW(GenConfig{}.check());
    GenConfig c;
    c.jobs = 30;
    CHECK_THROWS_AS(c.check(), std::invalid_argument);
    c.unchecked = true;
    CHECK_NOTHROW(c.check());
    c.setup_ratio = 1.0;
    CHECK_THROWS_AS(c.check(), std::invalid_argument);
    c = GenConfig{};
    c.flex_mean = 3;
    CHECK_THROWS_AS(c.check(), std::invalid_argument);
  }

  TEST_CASE("generated instances respect the recipe") {
    std::size_t ops = 0;
    double eligible_sum[4] = {0, 0, 0, 0};
    std::size_t eligible_n[4] = {0, 0, 0, 0};
    for (int k = 0; k < 1000; ++k) {
      const GenConfig cfg = cell(k % 16, 10 + k % 21, static_cast<std::uint64_t>(k));
      const Instance inst = generate_instance(cfg);
      REQUIRE(inst.job_count() == static_cast<std::size_t>(cfg.jobs));
      CHECK(inst.machine_count() == 10);
      REQUIRE(inst.family_count() == 20);

      std::set<Signature> templates;
      for (const Job& job : inst.jobs()) {
        CHECK(job.release >= -8 * kMinutesPerDay);
        CHECK(job.release <= 5 * kMinutesPerDay);
        CHECK(job.due >= job.release);
        CHECK(job.operations.size() >= 1);
        CHECK(job.operations.size() <= 3);
        Signature sig;
        for (OpIndex i : job.operations) {
          const Operation& op = inst.operation(i);
          const Duration total = op.processing + op.setup;
          CHECK(total >= 120);
          CHECK(total <= 1440);
          CHECK(op.processing >= 1);
          CHECK(op.setup == std::llround(cfg.setup_ratio * static_cast<double>(total)));
          CHECK(op.eligible.size() >= 1);
          if (cfg.flex_mean == 10) CHECK(op.eligible.size() == 10);
          const std::size_t f = static_cast<std::size_t>(k % 16) >> 2;
          eligible_sum[f] += static_cast<double>(op.eligible.size());
          ++eligible_n[f];
          sig.emplace_back(op.family, op.processing, op.setup, op.eligible);
          ++ops;
        }
        templates.insert(sig);
      }
      CHECK(templates.size() <= static_cast<std::size_t>(cfg.routings));

      std::map<int, int> unit_counts;
      for (const ColumnType& ct : inst.column_types()) ++unit_counts[ct.units];
      CHECK(unit_counts[3] == 2);
      CHECK(unit_counts[2] == 6);
      CHECK(unit_counts[1] == 12);

      // units follow usage rank
      std::vector<Duration> usage(20, 0);
      for (const Operation& op : inst.operations()) usage[op.family] += op.processing;
      for (std::size_t a = 0; a < 20; ++a) {
        for (std::size_t b = 0; b < 20; ++b) {
          if (inst.units(a) > inst.units(b)) CHECK(usage[a] >= usage[b]);
        }
      }

      const auto ws = inst.operator_windows().windows();
      for (const Interval& w : ws.first(ws.size() - 1)) {  // the last one is clipped at the horizon end
        CHECK(w.end - w.begin == 600);
        CHECK(((w.begin % kMinutesPerDay) + kMinutesPerDay) % kMinutesPerDay == 480);
      }
    }
    CHECK(ops > 1000);
    CHECK(eligible_sum[0] / static_cast<double>(eligible_n[0]) == doctest::Approx(2).epsilon(0.1));
    CHECK(eligible_sum[1] / static_cast<double>(eligible_n[1]) == doctest::Approx(4).epsilon(0.1));
    CHECK(eligible_sum[2] / static_cast<double>(eligible_n[2]) == doctest::Approx(6).epsilon(0.1));
  }

  TEST_CASE("windows cover five weekdays of every week in the horizon") {
    const Instance inst = generate_instance(GenConfig{});
    std::set<TimePoint> days;
    TimePoint last_release = -8 * kMinutesPerDay;
    for (const Job& j : inst.jobs()) last_release = std::max(last_release, j.release);
    for (const Interval& w : inst.operator_windows().windows()) days.insert((w.begin - 480) / kMinutesPerDay);
    const auto first = inst.operator_windows().windows().front();
    const auto last = inst.operator_windows().windows().back();
    CHECK(first.begin < -8 * kMinutesPerDay + 4 * kMinutesPerDay);
    CHECK(last.end > last_release + 55 * kMinutesPerDay);
    // any seven consecutive days hold exactly five windows
    const TimePoint d0 = (first.begin - 480) / kMinutesPerDay;
    for (TimePoint d = d0; d + 7 < (last.begin - 480) / kMinutesPerDay; ++d) {
      int n = 0;
      for (TimePoint k = d; k < d + 7; ++k) n += days.count(k) ? 1 : 0;
      CHECK(n == 5);
    }
  }

  TEST_CASE("generation is a pure function of the configuration") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const GenConfig cfg = cell(static_cast<int>(seed % 16), 70, seed);
      CHECK(instance_to_json(generate_instance(cfg)) == instance_to_json(generate_instance(cfg)));
    }
    GenConfig a;
    GenConfig b;
    b.seed = 1;
    CHECK(instance_to_json(generate_instance(a)) != instance_to_json(generate_instance(b)));
  }

  TEST_CASE("design cardinality, order and seeding") {
    const auto design = generate_design({70, 140}, 10, 1);
    REQUIRE(design.size() == 320);
    std::set<std::uint64_t> seeds;
    for (const auto& c : design) seeds.insert(c.seed);
    CHECK(seeds.size() == 320);
    CHECK(design.front().jobs == 70);
    CHECK(design.back().jobs == 140);
    std::set<std::tuple<int, int, double, double>> cells;
    for (const auto& c : design) cells.emplace(c.jobs, c.routings, c.setup_ratio, c.flex_mean);
    CHECK(cells.size() == 32);
    CHECK(generate_design({140}, 1).size() == 16);
    const auto again = generate_design({70, 140}, 10, 1);
    for (std::size_t k = 0; k < design.size(); ++k) CHECK(again[k].seed == design[k].seed);
    CHECK(generate_design({70}, 1, 2)[0].seed != generate_design({70}, 1, 1)[0].seed);
  }
}
