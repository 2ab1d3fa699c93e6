#include "pmsched/sa.hpp"

#include <algorithm>
#include <cmath>

namespace pmsched {

const MechanismTable& default_mechanisms() {
  using M = MoveType;
  using I = ItemKind;
  using MC = MachineChoice;
  using D = DateChoice;
  static const MechanismTable table{{
      {0, M::kInsert, I::kOperation, false, MC::kUniform, D::kUniform},
      {1, M::kInsert, I::kOperation, true, MC::kEligible, D::kUniform},
      {2, M::kExchange, I::kOperation, true, MC::kEligible, D::kUniform},
      {3, M::kInsert, I::kOperation, false, MC::kUniform, D::kUniform},
      {4, M::kInsert, I::kPack, true, MC::kEligible, D::kUniform},
      {5, M::kExchange, I::kPack, true, MC::kEligible, D::kUniform},
      {6, M::kInsert, I::kPack, false, MC::kUniform, D::kUniform},
      {7, M::kExchange, I::kPack, false, MC::kIdem, D::kLatest},
  }};
  return table;
}

const char* to_string(Structure s) {
  switch (s) {
    case Structure::kSimple: return "simple";
    case Structure::kOperation: return "op";
    case Structure::kOperationPack: return "op_pa";
  }
  return "?";
}

std::optional<Structure> parse_structure(const std::string& name) {
  if (name == "simple") return Structure::kSimple;
  if (name == "op") return Structure::kOperation;
  if (name == "op_pa") return Structure::kOperationPack;
  return std::nullopt;
}

const char* to_string(SaStop stop) {
  switch (stop) {
    case SaStop::kOptimal: return "optimal";
    case SaStop::kFrozen: return "frozen";
    case SaStop::kIterationLimit: return "iteration-limit";
  }
  return "?";
}

void SaParams::check() const {
  if (!(cooling > 0 && cooling < 1)) throw std::invalid_argument("cooling factor must lie in (0, 1)");
  if (!(initial_accept_probability > 0 && initial_accept_probability < 1)) {
    throw std::invalid_argument("initial acceptance probability must lie in (0, 1)");
  }
  if (plateau_iterations == 0 || plateau_acceptances == 0 || dead_levels == 0 || resample_limit == 0) {
    throw std::invalid_argument("plateau sizes, dead levels and resample limit must be positive");
  }
}

std::vector<int> SaParams::mechanism_ids() const {
  switch (structure) {
    case Structure::kSimple: return {0};
    case Structure::kOperation: return {1, 2, 3};
    case Structure::kOperationPack:
      if (op_pack_includes_operation_moves) return {1, 2, 3, 4, 5, 6, 7};
      return {4, 5, 6, 7};
  }
  return {};
}

double initial_temperature(double mean_delta, double p0) { return mean_delta / -std::log(p0); }

// ---------------------------------------------------------------------------
// SaSolution

bool SaSolution::assign(Encoding encoding, Decoder& decoder) {
  Timing timing;
  if (!decoder.run(encoding, timing)) return false;
  encoding_ = std::move(encoding);
  timing_ = std::move(timing);
  derive();
  return true;
}

void SaSolution::derive() {
  const Instance& inst = *instance_;
  const std::size_t n = inst.operation_count();
  share_.assign(n, 0.0);
  position_.assign(n, 0);
  tardiness_ = 0;
  for (const Job& job : inst.jobs()) {
    TimePoint c = std::numeric_limits<TimePoint>::min();
    Duration lateness_sum = 0;
    for (OpIndex i : job.operations) {
      c = std::max(c, timing_.completion[i]);
      lateness_sum += std::max<Duration>(timing_.completion[i] - job.due, 0);
    }
    const Duration tardiness = std::max<Duration>(c - job.due, 0);
    tardiness_ += tardiness;
    if (tardiness == 0) continue;
    for (OpIndex i : job.operations) {
      const Duration lateness = std::max<Duration>(timing_.completion[i] - job.due, 0);
      share_[i] = static_cast<double>(tardiness) * static_cast<double>(lateness) /
                  static_cast<double>(lateness_sum);
    }
  }
  packs_.assign(inst.machine_count(), {});
  for (MachineIndex m = 0; m < encoding_.sequences.size(); ++m) {
    const auto& seq = encoding_.sequences[m];
    for (std::size_t k = 0; k < seq.size(); ++k) {
      const OpIndex i = seq[k];
      position_[i] = k;
      const bool continues = k > 0 && timing_.setup[i] == 0 && timing_.start[i] == timing_.completion[seq[k - 1]];
      if (continues) {
        packs_[m].back().end = k + 1;
      } else {
        packs_[m].push_back(Pack{m, k, k + 1, inst.operation(i).family});
      }
    }
  }
}

// ---------------------------------------------------------------------------
// Neighborhood

namespace {

std::span<const OpIndex> members(const SaSolution& s, const Item& item) {
  return std::span<const OpIndex>(s.encoding().sequences[item.machine]).subspan(item.begin, item.end - item.begin);
}

double item_share(const SaSolution& s, const Item& item) {
  double total = 0;
  for (OpIndex i : members(s, item)) total += s.share(i);
  return total;
}

TimePoint item_start(const SaSolution& s, const Item& item) {
  return s.timing().start[s.encoding().sequences[item.machine][item.begin]];
}

TimePoint item_ready(const SaSolution& s, const Item& item) {
  TimePoint ready = kUnbounded;
  for (OpIndex i : members(s, item)) ready = std::min(ready, s.instance().job_of(i).release);
  return ready;
}

FamilyIndex item_family(const SaSolution& s, const Item& item) {
  return s.instance().operation(s.encoding().sequences[item.machine][item.begin]).family;
}

bool item_eligible_on(const SaSolution& s, const Item& item, MachineIndex m) {
  for (OpIndex i : members(s, item)) {
    if (!s.instance().operation(i).eligible_on(m)) return false;
  }
  return true;
}

std::vector<MachineIndex> item_machines(const SaSolution& s, const Item& item) {
  std::vector<MachineIndex> out;
  for (MachineIndex m = 0; m < s.instance().machine_count(); ++m) {
    if (item_eligible_on(s, item, m)) out.push_back(m);
  }
  return out;
}

template <typename Fn>
void for_each_item(const SaSolution& s, MachineIndex m, ItemKind kind, Fn&& fn) {
  if (kind == ItemKind::kPack) {
    for (const Pack& p : s.packs(m)) fn(Item{m, p.begin, p.end});
  } else {
    const std::size_t n = s.encoding().sequences[m].size();
    for (std::size_t k = 0; k < n; ++k) fn(Item{m, k, k + 1});
  }
}

struct Target {
  Item item;  // begin == end marks the tail of the sequence
  TimePoint date;
};

Encoding apply_insert(const Encoding& enc, const Item& first, const Item& second) {
  Encoding out = enc;
  const auto& src = enc.sequences[first.machine];
  std::vector<OpIndex> moved(src.begin() + static_cast<std::ptrdiff_t>(first.begin),
                             src.begin() + static_cast<std::ptrdiff_t>(first.end));
  auto& from = out.sequences[first.machine];
  from.erase(from.begin() + static_cast<std::ptrdiff_t>(first.begin),
             from.begin() + static_cast<std::ptrdiff_t>(first.end));
  std::size_t at = second.begin;
  if (second.machine == first.machine && at > first.begin) at -= moved.size();
  auto& to = out.sequences[second.machine];
  to.insert(to.begin() + static_cast<std::ptrdiff_t>(at), moved.begin(), moved.end());
  return out;
}

Encoding apply_exchange(const Encoding& enc, const Item& first, const Item& second) {
  Encoding out = enc;
  auto slice = [&](const Item& it) {
    const auto& seq = enc.sequences[it.machine];
    return std::vector<OpIndex>(seq.begin() + static_cast<std::ptrdiff_t>(it.begin),
                                seq.begin() + static_cast<std::ptrdiff_t>(it.end));
  };
  if (first.machine == second.machine) {
    const Item& lo = first.begin < second.begin ? first : second;
    const Item& hi = first.begin < second.begin ? second : first;
    const auto& seq = enc.sequences[first.machine];
    std::vector<OpIndex> rebuilt(seq.begin(), seq.begin() + static_cast<std::ptrdiff_t>(lo.begin));
    auto a = slice(lo);
    auto b = slice(hi);
    rebuilt.insert(rebuilt.end(), b.begin(), b.end());
    rebuilt.insert(rebuilt.end(), seq.begin() + static_cast<std::ptrdiff_t>(lo.end),
                   seq.begin() + static_cast<std::ptrdiff_t>(hi.begin));
    rebuilt.insert(rebuilt.end(), a.begin(), a.end());
    rebuilt.insert(rebuilt.end(), seq.begin() + static_cast<std::ptrdiff_t>(hi.end), seq.end());
    out.sequences[first.machine] = std::move(rebuilt);
    return out;
  }
  auto a = slice(first);
  auto b = slice(second);
  auto replace = [&](const Item& it, const std::vector<OpIndex>& with) {
    auto& seq = out.sequences[it.machine];
    seq.erase(seq.begin() + static_cast<std::ptrdiff_t>(it.begin), seq.begin() + static_cast<std::ptrdiff_t>(it.end));
    seq.insert(seq.begin() + static_cast<std::ptrdiff_t>(it.begin), with.begin(), with.end());
  };
  replace(first, b);
  replace(second, a);
  return out;
}

}  // namespace

std::optional<Item> select_first_item(const SaSolution& solution, ItemKind kind, Rng& rng) {
  if (solution.tardiness() <= 0) return std::nullopt;
  double total = 0;
  for (MachineIndex m = 0; m < solution.instance().machine_count(); ++m) {
    for_each_item(solution, m, kind, [&](const Item& it) { total += item_share(solution, it); });
  }
  std::uniform_real_distribution<double> dist(0.0, total);
  const double u = dist(rng);
  double acc = 0;
  std::optional<Item> chosen;
  std::optional<Item> last_positive;
  for (MachineIndex m = 0; m < solution.instance().machine_count() && !chosen; ++m) {
    for_each_item(solution, m, kind, [&](const Item& it) {
      if (chosen) return;
      const double w = item_share(solution, it);
      if (w <= 0) return;
      last_positive = it;
      acc += w;
      if (u < acc) chosen = it;
    });
  }
  return chosen ? chosen : last_positive;
}

Proposal propose_neighbor(const SaSolution& solution, const Mechanism& mech, Rng& rng, const SaParams& params) {
  const Instance& inst = solution.instance();
  const Encoding& enc = solution.encoding();
  std::vector<Target> targets;
  for (std::size_t attempt = 0; attempt < params.resample_limit; ++attempt) {
    auto first = select_first_item(solution, mech.item, rng);
    if (!first) return Proposal{Proposal::Status::kOptimal, {}};
    const TimePoint start1 = item_start(solution, *first);
    const TimePoint ready1 = item_ready(solution, *first);
    const FamilyIndex family1 = item_family(solution, *first);

    std::vector<MachineIndex> machines;
    if (mech.machine == MachineChoice::kIdem) {
      machines = {first->machine};
    } else {
      auto eligible = item_machines(solution, *first);
      if (mech.machine == MachineChoice::kEligible) {
        machines = std::move(eligible);
      } else {
        std::uniform_int_distribution<std::size_t> pick(0, eligible.size() - 1);
        machines = {eligible[pick(rng)]};
      }
    }

    targets.clear();
    for (MachineIndex m2 : machines) {
      for_each_item(solution, m2, mech.item, [&](const Item& second) {
        if (m2 == first->machine && second.begin < first->end && first->begin < second.end) return;
        const TimePoint s2 = item_start(solution, second);
        const TimePoint c2 = solution.timing().completion[enc.sequences[m2][second.end - 1]];
        if (params.strict_target_window ? (s2 < ready1 || s2 >= start1) : (c2 <= ready1 || s2 >= start1)) return;
        if (mech.same_family && item_family(solution, second) != family1) return;
        if (mech.move == MoveType::kExchange && m2 != first->machine &&
            !item_eligible_on(solution, second, first->machine)) {
          return;
        }
        targets.push_back(Target{second, s2});
      });
      if (params.tail_insertion && mech.move == MoveType::kInsert && m2 != first->machine) {
        const auto& seq = enc.sequences[m2];
        const TimePoint free_at = seq.empty() ? inst.horizon_origin() : solution.timing().completion[seq.back()];
        const bool family_ok =
            !mech.same_family || (!seq.empty() && inst.operation(seq.back()).family == family1);
        const TimePoint date = std::max(free_at, ready1);
        if (family_ok && date < start1) targets.push_back(Target{Item{m2, seq.size(), seq.size()}, date});
      }
    }
    if (targets.empty()) continue;

    const Target* chosen = &targets.front();
    if (mech.date == DateChoice::kLatest) {
      for (const Target& t : targets) {
        if (t.date > chosen->date) chosen = &t;
      }
    } else {
      std::uniform_int_distribution<std::size_t> pick(0, targets.size() - 1);
      chosen = &targets[pick(rng)];
    }
    Encoding next = mech.move == MoveType::kInsert ? apply_insert(enc, *first, chosen->item)
                                                   : apply_exchange(enc, *first, chosen->item);
    return Proposal{Proposal::Status::kOk, std::move(next)};
  }
  return Proposal{Proposal::Status::kFailed, {}};
}

// ---------------------------------------------------------------------------
// Annealing

SaResult run_sa(const Instance& instance, const Schedule& initial, const SaParams& params, std::uint64_t seed) {
  params.check();
  const std::vector<int> ids = params.mechanism_ids();
  Rng rng(seed);
  Decoder decoder(instance);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> pick_mechanism(0, ids.size() - 1);

  SaResult result;
  SaStats& stats = result.stats;
  stats.initial_tardiness = total_tardiness(initial, instance);
  result.schedule = initial;
  result.tardiness = stats.initial_tardiness;

  SaSolution current(instance);
  SaSolution candidate(instance);
  if (!current.assign(encode(initial, instance), decoder)) {
    throw DecodeError("initial schedule cannot be re-timed from its machine sequences");
  }
  auto keep_if_best = [&](const SaSolution& s) {
    if (s.tardiness() < result.tardiness) {
      result.tardiness = s.tardiness();
      result.schedule = s.timing().to_schedule();
      ++stats.improvements;
    }
  };
  keep_if_best(current);

  double temperature = 0;
  auto record = [&] {
    if (params.record_trace) {
      result.trace.push_back(SaTracePoint{stats.iterations, temperature, current.tardiness(), result.tardiness});
    }
  };
  auto limit_reached = [&] { return params.max_iterations != 0 && stats.iterations >= params.max_iterations; };

  // One proposal; returns the tardiness change if a neighbor was decoded.
  bool optimal = false;
  auto try_neighbor = [&]() -> std::optional<Duration> {
    const Mechanism& mech = params.mechanisms[static_cast<std::size_t>(ids[pick_mechanism(rng)])];
    Proposal proposal = propose_neighbor(current, mech, rng, params);
    if (proposal.status == Proposal::Status::kOptimal) {
      optimal = true;
      return std::nullopt;
    }
    if (proposal.status == Proposal::Status::kFailed) {
      ++stats.proposal_failures;
      return std::nullopt;
    }
    if (!candidate.assign(std::move(proposal.encoding), decoder)) {
      ++stats.decode_failures;
      return std::nullopt;
    }
    return candidate.tardiness() - current.tardiness();
  };
  auto accept = [&] {
    std::swap(current, candidate);
    ++stats.accepted;
    keep_if_best(current);
  };

  // Descent phase: improvements only, measuring the mean move size.
  double abs_sum = 0;
  std::size_t measured = 0;
  while (stats.descent_iterations < params.descent_iterations && !limit_reached()) {
    if (current.tardiness() == 0) {
      optimal = true;
      break;
    }
    auto delta = try_neighbor();
    if (optimal) break;
    if (delta) {
      abs_sum += std::abs(static_cast<double>(*delta));
      ++measured;
      if (*delta < 0) accept();
    }
    ++stats.iterations;
    ++stats.descent_iterations;
    record();
  }
  stats.mean_abs_delta = measured > 0 ? abs_sum / static_cast<double>(measured) : 0.0;
  // A neighborhood with no measurable move size still needs a positive
  // temperature; one minute is the smallest tardiness change.
  temperature = initial_temperature(std::max(stats.mean_abs_delta, 1.0), params.initial_accept_probability);
  stats.initial_temperature = temperature;

  std::size_t level_iterations = 0;
  std::size_t level_acceptances = 0;
  std::size_t dead = 0;
  stats.stop = SaStop::kIterationLimit;
  while (!optimal && !limit_reached()) {
    if (current.tardiness() == 0) {
      optimal = true;
      break;
    }
    auto delta = try_neighbor();
    if (optimal) break;
    if (delta && (*delta <= 0 || unit(rng) < std::exp(-static_cast<double>(*delta) / temperature))) {
      accept();
      ++level_acceptances;
    }
    ++stats.iterations;
    ++level_iterations;
    record();
    if (level_iterations >= params.plateau_iterations || level_acceptances >= params.plateau_acceptances) {
      dead = level_acceptances == 0 ? dead + 1 : 0;
      level_iterations = 0;
      level_acceptances = 0;
      if (dead >= params.dead_levels) {
        stats.stop = SaStop::kFrozen;
        break;
      }
      temperature *= params.cooling;
      ++stats.levels;
    }
  }
  if (optimal) stats.stop = SaStop::kOptimal;
  stats.final_temperature = temperature;
  stats.best_tardiness = result.tardiness;
  return result;
}

}  // namespace pmsched
