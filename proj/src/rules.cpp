#include "pmsched/rules.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

namespace pmsched {

const char* to_string(Rule rule) {
  switch (rule) {
    case Rule::kRandom: return "random";
    case Rule::kEdd: return "edd";
    case Rule::kAtc: return "atc";
    case Rule::kAtcs: return "atcs";
    case Rule::kAtcoee: return "atcoee";
    case Rule::kAtcoeef: return "atcoeef";
    case Rule::kLfo: return "lfo";
  }
  return "?";
}

const char* to_string(MachinePolicy policy) {
  switch (policy) {
    case MachinePolicy::kFfm: return "ffm";
    case MachinePolicy::kLfm: return "lfm";
    case MachinePolicy::kLaw: return "law";
  }
  return "?";
}

std::optional<Rule> parse_rule(const std::string& name) {
  for (Rule r : {Rule::kRandom, Rule::kEdd, Rule::kAtc, Rule::kAtcs, Rule::kAtcoee, Rule::kAtcoeef,
                 Rule::kLfo}) {
    if (name == to_string(r)) return r;
  }
  return std::nullopt;
}

std::optional<MachinePolicy> parse_machine_policy(const std::string& name) {
  if (name == "ffm") return MachinePolicy::kFfm;
  if (name == "lfm") return MachinePolicy::kLfm;
  if (name == "law") return MachinePolicy::kLaw;
  return std::nullopt;
}

void RuleParams::check() const {
  if (!(k1 > 0) || !(k2 > 0) || !(k3 > 0)) {
    throw std::invalid_argument("rule parameters k1, k2, k3 must be positive");
  }
}

double atc_priority(const Candidate& c, double mean_processing, const RuleParams& params) {
  const double p = static_cast<double>(c.processing);
  const double slack = std::max(static_cast<double>(c.due - c.processing - c.machine_clock), 0.0);
  return std::exp(-slack / (params.k1 * mean_processing)) / p;
}

double atcs_priority(const Candidate& c, double mean_processing, double mean_setup,
                     const RuleParams& params) {
  const double atc = atc_priority(c, mean_processing, params);
  const double s_eff = c.setup_required ? static_cast<double>(c.setup) : 0.0;
  if (s_eff == 0.0 || mean_setup <= 0.0) return atc;
  const double exponent = s_eff / (params.k2 * mean_setup);
  return atc * std::exp(params.atcs_positive_setup_exponent ? exponent : -exponent);
}

double atcoee_priority(const Candidate& c, double mean_processing, const RuleParams& params) {
  if (c.completion <= c.machine_clock) {
    throw std::invalid_argument("candidate completes before the machine is free");
  }
  const double oee =
      static_cast<double>(c.processing) / static_cast<double>(c.completion - c.machine_clock);
  return atc_priority(c, mean_processing, params) * std::exp(oee / params.k2);
}

double atcoeef_priority(const Candidate& c, double mean_processing, std::size_t machine_count,
                        const RuleParams& params) {
  const double flexibility =
      static_cast<double>(c.eligible_count) / static_cast<double>(machine_count);
  return atcoee_priority(c, mean_processing, params) * std::exp(-flexibility / params.k3);
}

namespace {

auto tie_key(const Candidate& c) { return std::tie(c.machine_id, c.job_id, c.operation_id); }

double score(const Candidate& c, const RuleParams& params, const RuleContext& ctx) {
  switch (params.rule) {
    case Rule::kAtc: return atc_priority(c, ctx.mean_processing, params);
    case Rule::kAtcs: return atcs_priority(c, ctx.mean_processing, ctx.mean_setup, params);
    case Rule::kAtcoee: return atcoee_priority(c, ctx.mean_processing, params);
    case Rule::kAtcoeef: return atcoeef_priority(c, ctx.mean_processing, ctx.machine_count, params);
    // minimizing rules are negated so that larger is better everywhere
    case Rule::kEdd: return -static_cast<double>(c.due);
    case Rule::kLfo: return -static_cast<double>(c.eligible_count);
    case Rule::kRandom: return 0.0;
  }
  return 0.0;
}

}  // namespace

const Candidate& select_assignment(std::span<const Candidate> candidates, const RuleParams& params,
                                   const RuleContext& ctx, Rng& rng) {
  if (candidates.empty()) throw std::invalid_argument("select_assignment: no candidate");

  std::vector<const Candidate*> pool;
  pool.reserve(candidates.size());
  if (params.machine_policy == MachinePolicy::kFfm) {
    TimePoint best = kUnbounded;
    for (const Candidate& c : candidates) best = std::min(best, c.machine_clock);
    for (const Candidate& c : candidates) {
      if (c.machine_clock == best) pool.push_back(&c);
    }
  } else if (params.machine_policy == MachinePolicy::kLaw) {
    auto law = [&](const Candidate& c) {
      return c.machine < ctx.potential_load_per_machine.size() ? ctx.potential_load_per_machine[c.machine] : 0.0;
    };
    double best = std::numeric_limits<double>::infinity();
    for (const Candidate& c : candidates) best = std::min(best, law(c));
    for (const Candidate& c : candidates) {
      if (law(c) == best) pool.push_back(&c);
    }
  } else {
    auto load = [&](const Candidate& c) {
      return c.machine < ctx.remaining_per_machine.size() ? ctx.remaining_per_machine[c.machine] : 0;
    };
    std::size_t best = std::numeric_limits<std::size_t>::max();
    for (const Candidate& c : candidates) best = std::min(best, load(c));
    for (const Candidate& c : candidates) {
      if (load(c) == best) pool.push_back(&c);
    }
  }

  std::sort(pool.begin(), pool.end(),
            [](const Candidate* a, const Candidate* b) { return tie_key(*a) < tie_key(*b); });
  if (params.rule == Rule::kRandom) {
    std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
    return *pool[pick(rng)];
  }
  const Candidate* chosen = pool.front();
  double best_score = score(*chosen, params, ctx);
  for (std::size_t k = 1; k < pool.size(); ++k) {
    const double s = score(*pool[k], params, ctx);
    if (s > best_score) {
      best_score = s;
      chosen = pool[k];
    }
  }
  return *chosen;
}

}  // namespace pmsched
