#include <doctest.h>

#include <algorithm>
#include <random>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "pmsched/lta.hpp"

using namespace pmsched;
using fixture::Builder;

namespace {

bool has_kind(const std::vector<Violation>& v, ViolationKind kind) {
  return std::any_of(v.begin(), v.end(), [&](const Violation& x) { return x.kind == kind; });
}

}  // namespace

TEST_SUITE("model") {
  TEST_CASE("instance invariants are enforced") {
    Builder b;
    b.job(0, 100, 1, 10, 5);
    CHECK_NOTHROW(b.build());

    Builder bad_family = b;
    bad_family.jobs[0].operations[0].family = 9;
    CHECK_THROWS_AS(bad_family.build(), InstanceError);

    Builder bad_machine = b;
    bad_machine.jobs[0].operations[0].eligible = {4};
    CHECK_THROWS_AS(bad_machine.build(), InstanceError);

    Builder no_machine = b;
    no_machine.jobs[0].operations[0].eligible.clear();
    CHECK_THROWS_AS(no_machine.build(), InstanceError);

    Builder zero_units = b;
    zero_units.columns[0].units = 0;
    CHECK_THROWS_AS(zero_units.build(), InstanceError);

    Builder early_due = b;
    early_due.jobs[0].due = -1;
    CHECK_THROWS_AS(early_due.build(), InstanceError);

    Builder zero_p = b;
    zero_p.jobs[0].operations[0].processing = 0;
    CHECK_THROWS_AS(zero_p.build(), InstanceError);
  }

  TEST_CASE("job completion and total tardiness") {
    Builder b;
    b.job(0, 100, 1, 10, 0).job(0, 100, 1, 10, 0).op(1, 10, 0);
    const Instance inst = b.build();
    Schedule s;
    s.placements = {{0, 0, true, 90, 110}, {1, 0, false, 110, 120}, {2, 0, false, 240, 250}};
    CHECK(job_completion(s, inst, 0) == 110);
    CHECK(job_completion(s, inst, 1) == 250);
    CHECK(total_tardiness(s, inst) == 10 + 150);
    CHECK(total_tardiness(s, inst) == oracle::total_tardiness_direct(inst, s));

    Schedule partial;
    partial.placements = {{0, 0, true, 0, 10}};
    CHECK_THROWS_AS(job_completion(partial, inst, 1), ScheduleError);
    CHECK_THROWS_AS(total_tardiness(partial, inst), ScheduleError);
  }

  TEST_CASE("two jobs ten minutes late each") {
    Builder b;
    b.machine_count(2).job(0, 100, 1, 110, 0, {1}).job(0, 100, 1, 110, 0, {2});
    b.family(1, 2);
    const Instance inst = b.build();
    Schedule s;
    s.placements = {{0, 0, true, 0, 110}, {1, 1, true, 0, 110}};
    CHECK(total_tardiness(s, inst) == 20);
    CHECK(validate_schedule(inst, s).empty());
    const auto m = compute_metrics(s, inst);
    CHECK(m.late_jobs == 2);
    CHECK(m.setups == 2);
    CHECK(m.makespan == 110);
  }

  TEST_CASE("empty instance validates") {
    const Instance inst({1}, {{1, 1}}, TimeWindowSet::always(), {});
    CHECK(validate_schedule(inst, Schedule{}).empty());
    CHECK(total_tardiness(Schedule{}, inst) == 0);
  }

  TEST_CASE("each violation kind is reported") {
    Builder b;
    b.machine_count(2).family(2, 1);
    b.job(10, 100, 1, 10, 5, {1}).job(0, 100, 1, 10, 5, {1, 2}).job(0, 100, 2, 10, 5, {1, 2});
    const Instance inst = b.build();
    const PlacedOperation a{0, 0, true, 10, 25};
    const PlacedOperation c{1, 0, false, 25, 35};
    const PlacedOperation d{2, 1, true, 0, 15};
    Schedule ok{{a, c, d}};
    REQUIRE(validate_schedule(inst, ok).empty());

    auto with = [&](std::vector<PlacedOperation> ps) { return validate_schedule(inst, Schedule{std::move(ps)}); };
    CHECK(has_kind(with({a, c}), ViolationKind::kMissingOperation));
    CHECK(has_kind(with({a, c, d, d}), ViolationKind::kDuplicateOperation));
    CHECK(has_kind(with({a, c, d, {7, 0, true, 50, 65}}), ViolationKind::kUnknownOperation));
    CHECK(has_kind(with({{0, 1, true, 10, 25}, c, d}), ViolationKind::kIneligibleMachine));
    CHECK(has_kind(with({{0, 0, true, 10, 24}, c, d}), ViolationKind::kDurationMismatch));
    CHECK(has_kind(with({{0, 0, true, 5, 20}, {1, 0, false, 20, 30}, d}), ViolationKind::kBeforeRelease));
    CHECK(has_kind(with({a, {1, 0, false, 20, 30}, d}), ViolationKind::kMachineOverlap));
    CHECK(has_kind(with({a, {1, 0, true, 25, 40}, d}), ViolationKind::kSetupMismatch));
    CHECK(has_kind(with({{0, 0, false, 10, 20}, {1, 0, true, 20, 35}, d}), ViolationKind::kSetupMismatch));

    Builder shared = b;
    shared.windows = TimeWindowSet({{0, 5}});
    const Instance inst2 = shared.build();
    CHECK(has_kind(validate_schedule(inst2, ok), ViolationKind::kSetupOutsideOperatorWindow));
  }

  TEST_CASE("column capacity is counted across machines") {
    Builder b;
    b.machine_count(2).job(0, 100, 1, 10, 0, {1}).job(0, 100, 1, 10, 0, {2});
    const Instance one = b.build();
    Schedule s{{{0, 0, true, 0, 10}, {1, 1, true, 5, 15}}};
    const auto v = validate_schedule(one, s);
    REQUIRE(has_kind(v, ViolationKind::kColumnCapacity));
    CHECK(oracle::brute_force_violations(one, s) > 0);

    Builder two = b;
    two.family(1, 2);
    CHECK(validate_schedule(two.build(), s).empty());
    Schedule back_to_back{{{0, 0, true, 0, 10}, {1, 1, true, 10, 20}}};
    CHECK(validate_schedule(one, back_to_back).empty());
  }

  TEST_CASE("validation agrees with the minute-scan checker on perturbed schedules") {
    std::mt19937_64 rng(5);
    std::size_t infeasible = 0;
    for (int trial = 0; trial < 400; ++trial) {
      const Instance inst = oracle::random_micro_instance(rng, 1 + rng() % 6, 1 + rng() % 3, rng() % 2 == 0);
      Schedule s = run_lta(inst, RuleParams{}, trial);
      REQUIRE(validate_schedule(inst, s).empty());
      REQUIRE(oracle::brute_force_violations(inst, s) == 0);
      // random perturbation: shift, flip setup, move machine, or drop
      auto& pl = s.placements[rng() % s.placements.size()];
      switch (rng() % 4) {
        case 0: {
          const Duration shift = static_cast<Duration>(rng() % 41) - 20;
          pl.start += shift;
          pl.completion += shift;
          break;
        }
        case 1:
          pl.setup = !pl.setup;
          break;
        case 2:
          pl.machine = rng() % inst.machine_count();
          break;
        default:
          s.placements.pop_back();
          break;
      }
      const bool lib_ok = validate_schedule(inst, s).empty();
      const bool oracle_ok = oracle::brute_force_violations(inst, s) == 0;
      REQUIRE(lib_ok == oracle_ok);
      if (!lib_ok) ++infeasible;
    }
    CHECK(infeasible > 100);
  }
}
