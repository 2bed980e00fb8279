#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "qdv/quantum_core.hpp"
#include "qdv/trace.hpp"
#include "qdv/types.hpp"

namespace qdv {

using PairId = std::uint64_t;

/// One qubit slot at a node.
struct EndpointRef {
  NodeId node = kNoNode;
  std::uint32_t slot = 0;

  auto operator<=>(const EndpointRef&) const = default;
};

enum class PairStatus { Fresh, Flagged, Consumed, Erased };

const char* to_string(PairStatus status);

/// What a pair is used for: watching a node from a gateway, or vouching for
/// one routing-table entry between two neighbors.
struct PairPurpose {
  enum class Kind { Sentinel, Entry };
  Kind kind = Kind::Sentinel;
  NodeId dest = kNoNode;

  static PairPurpose sentinel(NodeId watched) { return {Kind::Sentinel, watched}; }
  static PairPurpose entry(NodeId dest) { return {Kind::Entry, dest}; }

  bool operator==(const PairPurpose&) const = default;
};

/// Qubit 0 belongs to endpoint_a, qubit 1 to endpoint_b.
struct EntangledPair {
  PairId id = 0;
  EndpointRef endpoint_a;
  EndpointRef endpoint_b;
  JointState state = bell_pair();
  PairStatus status = PairStatus::Fresh;
  PairPurpose purpose;
  std::optional<std::size_t> flagged_qubit;
  bool in_transit = true;

  bool live() const noexcept { return status == PairStatus::Fresh || status == PairStatus::Flagged; }
};

enum class ProbeResult { Alive, FlaggedDown };

const char* to_string(ProbeResult result);

/// Target fresh-pair level for one (a, b, purpose) line.
struct BudgetLine {
  NodeId a = kNoNode;
  NodeId b = kNoNode;
  PairPurpose purpose;
  std::uint32_t target = 0;
};

struct PairBudget {
  std::vector<BudgetLine> lines;
  std::uint32_t replenish_batch = 1;  // most pairs added to one line per boundary
  Tick replenish_period = 1;
};

struct RegistryCounts {
  std::uint64_t allocated = 0;
  std::uint64_t flagged = 0;
  std::uint64_t probed = 0;
  std::uint64_t erased = 0;
  std::uint64_t live_fresh = 0;
  std::uint64_t live_flagged = 0;
};

/// Store of every entangled pair in a run.
///
/// Owned by the simulation loop and mutated in event order. Pair ids are
/// assigned from a monotonic counter starting at 0. When a trace log is
/// attached, every lifecycle transition is recorded.
class EntanglementRegistry {
 public:
  explicit EntanglementRegistry(TraceLog* trace = nullptr) : trace_(trace) {}

  /// Registers `count` fresh Bell pairs using slots a.slot.., b.slot.. on the
  /// two nodes. Throws InputError if any slot is already held by a live pair.
  std::vector<PairId> allocate(EndpointRef a, EndpointRef b, PairPurpose purpose, std::uint32_t count);

  /// Same, with slots picked from each node's free-slot counter.
  std::vector<PairId> allocate_between(NodeId a, NodeId b, PairPurpose purpose, std::uint32_t count);

  /// Applies P0 at the flagger's qubit.
  void flag(PairId id, EndpointRef by);
  void flag(PairId id, NodeId by);

  /// Reads <P1> at the prober's qubit and consumes the pair.
  ProbeResult probe(PairId id, EndpointRef by);
  ProbeResult probe(PairId id, NodeId by);

  /// Single-shot variant: measures the prober's qubit once. A 1 outcome
  /// means alive; a 0 outcome is reported as flagged_down, which is wrong
  /// half of the time for a fresh pair.
  ProbeResult probe_sampled(PairId id, NodeId by, RandomStream& stream);

  /// At multiples of budget.replenish_period, tops each line back up to its
  /// target. Returns the new pair ids (empty between boundaries).
  std::vector<PairId> replenish(const PairBudget& budget, Tick now);

  /// Each fresh pair still in transit is erased with probability `rate`; all
  /// in-transit pairs are delivered afterwards. Draws one value per pair, in
  /// id order.
  std::vector<PairId> erase_randomly(double rate, RandomStream& stream);

  const EntangledPair& pair(PairId id) const;
  std::size_t size() const noexcept { return pairs_.size(); }
  const std::vector<EntangledPair>& pairs() const noexcept { return pairs_; }

  std::uint32_t fresh_count(NodeId a, NodeId b, PairPurpose purpose) const;

  /// Live pairs with `a` on endpoint_a and `b` on endpoint_b.
  std::vector<PairId> live_pairs(NodeId a, NodeId b, PairPurpose purpose) const;

  RegistryCounts counts() const;

 private:
  EntangledPair& checked(PairId id);
  std::size_t qubit_of(const EntangledPair& p, EndpointRef by) const;
  std::size_t qubit_of(const EntangledPair& p, NodeId by) const;
  ProbeResult finish_probe(EntangledPair& p, std::size_t qubit, Json detail, ProbeResult result);
  void release_slots(const EntangledPair& p);
  void record(NodeId actor, const char* kind, Json data);

  using LineKey = std::tuple<NodeId, NodeId, int, NodeId>;
  static LineKey line_key(NodeId a, NodeId b, PairPurpose purpose) {
    return {a, b, static_cast<int>(purpose.kind), purpose.dest};
  }

  TraceLog* trace_;
  std::vector<EntangledPair> pairs_;
  std::map<LineKey, std::set<PairId>> live_by_line_;
  std::vector<PairId> in_transit_;
  std::set<EndpointRef> held_slots_;
  std::map<NodeId, std::uint32_t> next_slot_;
  std::uint64_t flagged_ = 0;
  std::uint64_t probed_ = 0;
  std::uint64_t erased_ = 0;
};

Json purpose_json(const PairPurpose& purpose, const TraceLog* trace);

}  // namespace qdv
