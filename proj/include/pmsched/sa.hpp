#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "pmsched/model.hpp"
#include "pmsched/rules.hpp"

namespace pmsched {

/// Per-machine processing sequences. Every operation appears exactly once,
/// on one of its eligible machines.
struct Encoding {
  std::vector<std::vector<OpIndex>> sequences;
  friend bool operator==(const Encoding&, const Encoding&) = default;
};

class DecodeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Throws std::invalid_argument if `encoding` breaks its invariants.
void check_encoding(const Encoding& encoding, const Instance& instance);

/// Machine sequences of `schedule`, ordered by start time.
Encoding encode(const Schedule& schedule, const Instance& instance);

/// Op-indexed timing of a decoded encoding.
struct Timing {
  std::vector<MachineIndex> machine;
  std::vector<TimePoint> start;
  std::vector<TimePoint> completion;
  std::vector<char> setup;

  Schedule to_schedule() const;
};

/// Re-times an encoding: the front operation of the machine with the
/// smallest clock (ties by lowest index) is placed next at its earliest
/// feasible start. Reuses its column profiles across calls.
class Decoder {
 public:
  explicit Decoder(const Instance& instance);
  /// False when some operation has no slot within the search horizon.
  bool run(const Encoding& encoding, Timing& out);

 private:
  const Instance* instance_;
  std::vector<CapacityProfile> columns_;
  std::vector<TimePoint> clocks_;
  std::vector<std::size_t> cursor_;
  std::vector<std::optional<FamilyIndex>> families_;
};

/// Throws DecodeError when no slot exists, std::invalid_argument on an
/// invalid encoding.
Schedule decode(const Encoding& encoding, const Instance& instance);

/// Maximal run of same-family operations on one machine placed back to back
/// without setup or idle time. Indices refer to the machine sequence.
struct Pack {
  MachineIndex machine = 0;
  std::size_t begin = 0;
  std::size_t end = 0;  // exclusive
  FamilyIndex family = 0;
  friend bool operator==(const Pack&, const Pack&) = default;
};

std::vector<Pack> packs_of(const Encoding& encoding, MachineIndex machine, const Schedule& decoded,
                           const Instance& instance);

// ---------------------------------------------------------------------------
// Neighborhood mechanisms

enum class MoveType { kInsert, kExchange };
enum class ItemKind { kOperation, kPack };
enum class MachineChoice { kIdem, kEligible, kUniform };
enum class DateChoice { kUniform, kLatest };

struct Mechanism {
  int id = 0;
  MoveType move = MoveType::kInsert;
  ItemKind item = ItemKind::kOperation;
  bool same_family = false;
  MachineChoice machine = MachineChoice::kUniform;
  DateChoice date = DateChoice::kUniform;
  friend bool operator==(const Mechanism&, const Mechanism&) = default;
};

using MechanismTable = std::array<Mechanism, 8>;

/// The eight neighbor generation mechanisms, ids 0-7.
const MechanismTable& default_mechanisms();

enum class Structure { kSimple, kOperation, kOperationPack };

const char* to_string(Structure s);
std::optional<Structure> parse_structure(const std::string& name);

struct SaParams {
  Structure structure = Structure::kOperationPack;
  double cooling = 0.95;
  std::size_t descent_iterations = 100;
  std::size_t plateau_iterations = 400;
  std::size_t plateau_acceptances = 80;
  double initial_accept_probability = 0.8;
  std::size_t max_iterations = 15000;  // 0 = no limit
  std::size_t dead_levels = 3;
  std::size_t resample_limit = 50;
  MechanismTable mechanisms = default_mechanisms();
  // When false the operation-pack structure uses the pack mechanisms 4-7 only.
  bool op_pack_includes_operation_moves = true;
  // Lets an insert target the end of a machine sequence (or an empty
  // machine) when that machine frees up inside the search window.
  bool tail_insertion = true;
  // A second item qualifies when it occupies part of [ready, start) of the
  // first item; strict mode requires it to start inside that span.
  bool strict_target_window = false;
  bool record_trace = true;

  void check() const;
  /// Mechanism ids drawn uniformly by `structure`.
  std::vector<int> mechanism_ids() const;
};

/// A decoded encoding plus what the neighborhood needs: tardiness shares
/// per operation, packs, and sequence positions.
class SaSolution {
 public:
  explicit SaSolution(const Instance& instance) : instance_(&instance) {}

  /// Decodes `encoding`; false (and unchanged state) on decode failure.
  bool assign(Encoding encoding, Decoder& decoder);

  const Instance& instance() const { return *instance_; }
  const Encoding& encoding() const { return encoding_; }
  const Timing& timing() const { return timing_; }
  Duration tardiness() const { return tardiness_; }
  /// Tardiness attributed to one operation; shares of a job sum to T_j.
  double share(OpIndex op) const { return share_[op]; }
  std::span<const Pack> packs(MachineIndex m) const { return packs_[m]; }
  std::size_t position(OpIndex op) const { return position_[op]; }

 private:
  void derive();

  const Instance* instance_;
  Encoding encoding_;
  Timing timing_;
  Duration tardiness_ = 0;
  std::vector<double> share_;
  std::vector<std::vector<Pack>> packs_;
  std::vector<std::size_t> position_;
};

/// Contiguous range of a machine sequence: one operation or one pack.
struct Item {
  MachineIndex machine = 0;
  std::size_t begin = 0;
  std::size_t end = 0;
  friend bool operator==(const Item&, const Item&) = default;
};

/// Draws an item with probability share / total tardiness. Returns nullopt
/// when the total tardiness is zero, i.e. the solution is optimal.
std::optional<Item> select_first_item(const SaSolution& solution, ItemKind kind, Rng& rng);

struct Proposal {
  enum class Status { kOk, kOptimal, kFailed };
  Status status = Status::kFailed;
  Encoding encoding;
};

Proposal propose_neighbor(const SaSolution& solution, const Mechanism& mechanism, Rng& rng,
                          const SaParams& params);

struct SaTracePoint {
  std::size_t iteration = 0;
  double temperature = 0;
  Duration current = 0;
  Duration best = 0;
};

enum class SaStop { kOptimal, kFrozen, kIterationLimit };

struct SaStats {
  std::size_t iterations = 0;
  std::size_t descent_iterations = 0;
  double mean_abs_delta = 0;
  double initial_temperature = 0;
  double final_temperature = 0;
  std::size_t levels = 0;
  std::size_t accepted = 0;
  std::size_t improvements = 0;
  std::size_t proposal_failures = 0;
  std::size_t decode_failures = 0;
  Duration initial_tardiness = 0;
  Duration best_tardiness = 0;
  SaStop stop = SaStop::kIterationLimit;
};

const char* to_string(SaStop stop);

struct SaResult {
  Schedule schedule;
  Duration tardiness = 0;
  SaStats stats;
  std::vector<SaTracePoint> trace;
};

/// Initial temperature giving acceptance probability `p0` to a move of
/// size `mean_delta`.
double initial_temperature(double mean_delta, double p0);

/// Anneals from a feasible schedule; returns the best schedule observed.
SaResult run_sa(const Instance& instance, const Schedule& initial, const SaParams& params,
                std::uint64_t seed);

}  // namespace pmsched
