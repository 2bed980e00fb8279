#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string_view>
#include <utility>
#include <vector>

#include "qdv/topology.hpp"
#include "qdv/types.hpp"

namespace qdv {

inline constexpr int kDefaultInfinity = 16;

enum class Variant { Plain, SplitHorizon, PoisonedReverse };

const char* to_string(Variant v);
std::optional<Variant> parse_variant(std::string_view text);

struct RouteEntry {
  NodeId dest = kNoNode;
  NodeId next_hop = kNoNode;  // kNoNode when unreachable
  int metric = kDefaultInfinity;
};

/// Per-node destination -> (next hop, metric) map.
///
/// Invariants: the self entry is always present with metric 0; a metric equal
/// to the destination's infinity goes with next_hop == kNoNode and vice versa.
/// A destination may carry a scoped infinity below the table-wide one, which
/// is what a sentinel gateway uses to cut off a counting region.
class RoutingTable {
 public:
  explicit RoutingTable(NodeId owner, int infinity = kDefaultInfinity);

  NodeId owner() const noexcept { return owner_; }
  int infinity() const noexcept { return infinity_; }
  int infinity_for(NodeId dest) const;

  const RouteEntry* find(NodeId dest) const;
  /// Metric for `dest`, or its infinity when no entry exists.
  int metric(NodeId dest) const;
  bool reachable(NodeId dest) const { return metric(dest) < infinity_for(dest); }
  const std::map<NodeId, RouteEntry>& entries() const noexcept { return entries_; }

  /// Installs a route; metrics at or above the destination's infinity are
  /// stored as unreachable.
  void set_route(NodeId dest, NodeId next_hop, int metric);
  void set_unreachable(NodeId dest);

  /// Lowers the infinity used for `dest`; an existing entry at or above the
  /// new value becomes unreachable at that value.
  void set_scoped_infinity(NodeId dest, int value);

 private:
  NodeId owner_;
  int infinity_;
  std::map<NodeId, RouteEntry> entries_;
  std::map<NodeId, int> scoped_infinity_;
};

struct UpdateMessage {
  NodeId from = kNoNode;
  NodeId to = kNoNode;
  std::vector<std::pair<NodeId, int>> items;  // (dest, advertised metric)
};

struct RouteChange {
  NodeId owner = kNoNode;
  NodeId dest = kNoNode;
  NodeId old_next_hop = kNoNode;
  int old_metric = 0;
  NodeId next_hop = kNoNode;
  int metric = 0;
};

/// Advertisement of `table` to one neighbor under the given variant. Routes at
/// a scoped infinity go out as the table-wide infinity.
UpdateMessage build_update(const RoutingTable& table, NodeId to_neighbor, Variant variant);

/// Bellman relaxation of one advertised item. Installs when the candidate
/// beats the current metric, or whenever the sender is the current next hop.
std::optional<RouteChange> apply_item(RoutingTable& table, NodeId from, NodeId dest,
                                      int advertised, std::uint32_t link_cost);

std::vector<RouteChange> apply_update(RoutingTable& table, const UpdateMessage& msg,
                                      std::uint32_t link_cost);

/// Invalidates every route through `dead_neighbor` and drops it from the
/// live-neighbor set.
std::vector<RouteChange> handle_silence(RoutingTable& table, std::set<NodeId>& live_neighbors,
                                        NodeId dead_neighbor);

/// Shortest-path tables for every node (Dijkstra per source). Distances at or
/// above `infinity` are unreachable. Next hop is the lowest-id neighbor on a
/// shortest path.
std::vector<RoutingTable> converged_tables(const Topology& topology, int infinity = kDefaultInfinity);

/// True iff every table of a node with include[n] set matches the oracle's
/// metrics for all destinations and each finite route uses a shortest-path
/// next hop in `topology`.
bool check_convergence(const std::vector<RoutingTable>& tables,
                       const std::vector<RoutingTable>& oracle, const Topology& topology,
                       const std::vector<bool>& include);

}  // namespace qdv
