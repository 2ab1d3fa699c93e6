#include <algorithm>

#include "pmsched/sa.hpp"

namespace pmsched {

void check_encoding(const Encoding& encoding, const Instance& instance) {
  if (encoding.sequences.size() != instance.machine_count()) {
    throw std::invalid_argument("encoding has " + std::to_string(encoding.sequences.size()) +
                                " machine sequences, instance has " +
                                std::to_string(instance.machine_count()) + " machines");
  }
  std::vector<int> seen(instance.operation_count(), 0);
  for (MachineIndex m = 0; m < encoding.sequences.size(); ++m) {
    for (OpIndex i : encoding.sequences[m]) {
      if (i >= seen.size()) throw std::invalid_argument("encoding refers to an unknown operation");
      if (seen[i]++ != 0) {
        throw std::invalid_argument("operation " + std::to_string(instance.operation(i).id) +
                                    " appears twice in the encoding");
      }
      if (!instance.operation(i).eligible_on(m)) {
        throw std::invalid_argument("operation " + std::to_string(instance.operation(i).id) +
                                    " sequenced on an ineligible machine");
      }
    }
  }
  for (OpIndex i = 0; i < seen.size(); ++i) {
    if (seen[i] == 0) {
      throw std::invalid_argument("operation " + std::to_string(instance.operation(i).id) +
                                  " missing from the encoding");
    }
  }
}

Encoding encode(const Schedule& schedule, const Instance& instance) {
  std::vector<std::vector<const PlacedOperation*>> per_machine(instance.machine_count());
  for (const PlacedOperation& p : schedule.placements) per_machine.at(p.machine).push_back(&p);
  Encoding enc;
  enc.sequences.resize(instance.machine_count());
  for (MachineIndex m = 0; m < per_machine.size(); ++m) {
    auto& seq = per_machine[m];
    std::stable_sort(seq.begin(), seq.end(), [](const PlacedOperation* a, const PlacedOperation* b) {
      return a->start < b->start;
    });
    for (const PlacedOperation* p : seq) enc.sequences[m].push_back(p->operation);
  }
  return enc;
}

Schedule Timing::to_schedule() const {
  Schedule s;
  s.placements.reserve(start.size());
  for (OpIndex i = 0; i < start.size(); ++i) {
    s.placements.push_back(PlacedOperation{i, machine[i], setup[i] != 0, start[i], completion[i]});
  }
  return s;
}

Decoder::Decoder(const Instance& instance)
    : instance_(&instance),
      clocks_(instance.machine_count()),
      cursor_(instance.machine_count()),
      families_(instance.machine_count()) {
  for (const ColumnType& ct : instance.column_types()) columns_.emplace_back(ct.units);
}

bool Decoder::run(const Encoding& encoding, Timing& out) {
  const Instance& inst = *instance_;
  const std::size_t n = inst.operation_count();
  const std::size_t machines = inst.machine_count();
  out.machine.assign(n, 0);
  out.start.assign(n, 0);
  out.completion.assign(n, 0);
  out.setup.assign(n, 0);
  for (FamilyIndex f = 0; f < columns_.size(); ++f) columns_[f].reset(inst.units(f));
  std::fill(clocks_.begin(), clocks_.end(), inst.horizon_origin());
  std::fill(cursor_.begin(), cursor_.end(), 0);
  std::fill(families_.begin(), families_.end(), std::nullopt);

  for (std::size_t placed = 0; placed < n; ++placed) {
    MachineIndex m = machines;
    for (MachineIndex k = 0; k < machines; ++k) {
      if (cursor_[k] < encoding.sequences[k].size() && (m == machines || clocks_[k] < clocks_[m])) m = k;
    }
    if (m == machines) return false;  // fewer operations in the encoding than expected
    const OpIndex i = encoding.sequences[m][cursor_[m]++];
    const Operation& op = inst.operation(i);
    const TimePoint t_min = std::max(clocks_[m], inst.job(op.job).release);
    CapacityProfile& column = columns_[op.family];
    const bool setup = families_[m] != op.family;
    auto start = setup ? find_start_with_setup(t_min, op.setup, op.processing, inst.operator_windows(), column)
                       : find_start_without_setup(t_min, op.processing, column);
    if (!start) return false;
    const TimePoint completion = *start + (setup ? op.setup : 0) + op.processing;
    column.reserve(Interval{*start, completion});
    out.machine[i] = m;
    out.start[i] = *start;
    out.completion[i] = completion;
    out.setup[i] = setup ? 1 : 0;
    clocks_[m] = completion;
    families_[m] = op.family;
  }
  return true;
}

Schedule decode(const Encoding& encoding, const Instance& instance) {
  check_encoding(encoding, instance);
  Decoder decoder(instance);
  Timing timing;
  if (!decoder.run(encoding, timing)) {
    throw DecodeError("encoding cannot be timed: an operation has no slot within the search horizon");
  }
  return timing.to_schedule();
}

std::vector<Pack> packs_of(const Encoding& encoding, MachineIndex machine, const Schedule& decoded,
                           const Instance& instance) {
  std::vector<const PlacedOperation*> by_op(instance.operation_count(), nullptr);
  for (const PlacedOperation& p : decoded.placements) by_op.at(p.operation) = &p;
  std::vector<Pack> packs;
  const auto& seq = encoding.sequences.at(machine);
  for (std::size_t k = 0; k < seq.size(); ++k) {
    const PlacedOperation* p = by_op.at(seq[k]);
    if (p == nullptr) throw std::invalid_argument("decoded schedule misses a sequenced operation");
    const bool continues = k > 0 && !p->setup && p->start == by_op[seq[k - 1]]->completion;
    if (continues) {
      packs.back().end = k + 1;
    } else {
      packs.push_back(Pack{machine, k, k + 1, instance.operation(seq[k]).family});
    }
  }
  return packs;
}

}  // namespace pmsched
