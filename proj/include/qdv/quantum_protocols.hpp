#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string_view>
#include <tuple>
#include <vector>

#include "qdv/dv_routing.hpp"
#include "qdv/entanglement_registry.hpp"
#include "qdv/random_stream.hpp"
#include "qdv/topology.hpp"
#include "qdv/trace.hpp"

namespace qdv {

enum class ProbeMode { Expectation, Sampled };

const char* to_string(ProbeMode mode);
std::optional<ProbeMode> parse_probe_mode(std::string_view text);

/// How many pairs one check reads, and how.
///
/// Expectation mode is deterministic; one flagged pair among those read is
/// enough to report down. In sampled mode a fresh pair reads 0 half of the
/// time, so down is reported only when every pair read comes back 0.
struct ProbeSettings {
  ProbeMode mode = ProbeMode::Expectation;
  std::uint32_t probes_per_check = 1;
};

/// Called for every routing-table change a protocol makes, with a short cause.
using RouteObserver = std::function<void(const RouteChange&, std::string_view cause)>;

/// Reads up to settings.probes_per_check of `candidates` (oldest first) from
/// node `by`. Returns nullopt when there is nothing to read.
std::optional<ProbeResult> read_pairs(EntanglementRegistry& registry, const std::vector<PairId>& candidates,
                                      NodeId by, const ProbeSettings& settings, RandomStream& sampling);

struct SentinelConfig {
  NodeId watched = kNoNode;
  std::vector<NodeId> watchers;
  std::vector<NodeId> gateways;
  std::uint32_t pairs_per_watcher_gateway = 4;
  Tick poll_period = 1;
};

enum class PollResult { Alive, RegionDown, NoPairs };

const char* to_string(PollResult result);

/// Pairs between the neighbors of a watched node and distant gateways.
///
/// A watcher that loses the watched node flags its pairs; each gateway polls
/// one pair per watcher every period, and on a down reading caps its own
/// metric for the watched node at (hops to the nearest watcher + 1) and stops
/// trusting routes to it that arrive from the watcher side.
class GatewaySentinel {
 public:
  GatewaySentinel(SentinelConfig config, const Topology& initial, int infinity,
                  EntanglementRegistry& registry, TraceLog* trace, ProbeSettings settings,
                  RandomStream& sampling, RouteObserver observer = {});

  const SentinelConfig& config() const noexcept { return config_; }

  /// One budget line per (watcher, gateway).
  PairBudget budget(std::uint32_t replenish_batch, Tick replenish_period) const;

  /// Returns true if the watcher flagged anything.
  bool on_failure_detected(NodeId watcher, NodeId silent_neighbor);

  PollResult poll(NodeId gateway, RoutingTable& gateway_table);

  bool region_down(NodeId gateway) const { return down_.contains(gateway); }
  int scoped_infinity(NodeId gateway) const;
  int hops(NodeId gateway) const;

  /// True if `gateway` must drop an advertisement for `dest` from `from`.
  bool rejects(NodeId gateway, NodeId from, NodeId dest) const;

 private:
  SentinelConfig config_;
  EntanglementRegistry& registry_;
  TraceLog* trace_;
  ProbeSettings settings_;
  RandomStream& sampling_;
  RouteObserver observer_;
  std::map<NodeId, int> hops_;
  std::map<NodeId, std::set<NodeId>> watcher_side_;
  std::set<NodeId> down_;
};

struct HandshakeConfig {
  // Fresh pairs kept per (sender, receiver, entry). Each receipt consumes one,
  // so two leave a spare for probing a neighbor that went quiet.
  std::uint32_t pairs_per_entry = 2;
};

enum class ExchangeDecision { Trust, Distrust, NoPairs };

const char* to_string(ExchangeDecision decision);

/// Pairs attached to individual routing-table entries.
///
/// A sender advertising a finite route for an entry tops up the pairs it
/// shares with that receiver for the entry; the sender holds qubit 0, the
/// receiver qubit 1. A node that loses a destination flags every pair it
/// generated for it. A receiver probes one pair just before applying each
/// advertised item and drops the item when the sender has flagged it.
///
/// Offers built before the receiver itself lost the destination are stale
/// by construction and are dropped as well; a causal stamp orders message
/// construction against losses.
class EntangledHandshake {
 public:
  EntangledHandshake(HandshakeConfig config, EntanglementRegistry& registry, TraceLog* trace,
                     ProbeSettings settings, RandomStream& sampling, RouteObserver observer = {});

  std::vector<PairId> attach(NodeId sender, NodeId receiver, NodeId dest, std::uint32_t count);

  /// Tops the (sender, receiver, dest) entry back up to pairs_per_entry fresh pairs.
  std::vector<PairId> top_up(NodeId sender, NodeId receiver, NodeId dest);

  /// Flags every fresh pair `node` generated for `dest`. Returns how many.
  std::size_t flag_entry(NodeId node, NodeId dest);

  /// `node` no longer has a route to `dest`: flag its pairs for it and
  /// remember when, so older offers can be recognized.
  void on_route_lost(NodeId node, NodeId dest);

  /// Stamp for a message about to be built.
  std::uint64_t next_stamp() noexcept { return ++clock_; }

  /// True if an offer stamped `stamp` predates `node` losing `dest`.
  bool built_before_loss(NodeId node, NodeId dest, std::uint64_t stamp) const;

  /// Probe before applying `neighbor`'s advertised metric for `dest` at
  /// `node`. On distrust, a route of `node` through `neighbor` becomes
  /// unreachable and counts as a loss.
  ExchangeDecision pre_exchange_probe(NodeId node, NodeId neighbor, NodeId dest, RoutingTable& table);

  /// Reads a pair generated by a neighbor that sent nothing this round.
  std::optional<ProbeResult> probe_silent_neighbor(NodeId node, NodeId neighbor);

  /// A failing node flags every pair it generated before it goes.
  std::size_t on_node_down(NodeId node);

  /// Live pair ids recorded for `node`'s entry `dest` shared with `neighbor`,
  /// in either direction.
  std::vector<PairId> ledger(NodeId node, NodeId neighbor, NodeId dest);
  std::uint64_t generation() const noexcept { return generation_; }

 private:
  using Key = std::tuple<NodeId, NodeId, NodeId>;  // (node, neighbor, dest)
  void prune(std::vector<PairId>& ids) const;

  HandshakeConfig config_;
  EntanglementRegistry& registry_;
  TraceLog* trace_;
  ProbeSettings settings_;
  RandomStream& sampling_;
  RouteObserver observer_;
  std::map<Key, std::vector<PairId>> ledger_;
  std::map<std::pair<NodeId, NodeId>, std::uint64_t> lost_at_;
  std::uint64_t generation_ = 0;
  std::uint64_t clock_ = 0;
};

}  // namespace qdv
