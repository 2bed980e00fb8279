#include "qdv/dv_routing.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <queue>

#include "qdv/errors.hpp"

namespace qdv {

const char* to_string(Variant v) {
  switch (v) {
    case Variant::Plain: return "plain";
    case Variant::SplitHorizon: return "split_horizon";
    case Variant::PoisonedReverse: return "poisoned_reverse";
  }
  return "?";
}

std::optional<Variant> parse_variant(std::string_view text) {
  if (text == "plain") return Variant::Plain;
  if (text == "split_horizon") return Variant::SplitHorizon;
  if (text == "poisoned_reverse") return Variant::PoisonedReverse;
  return std::nullopt;
}

RoutingTable::RoutingTable(NodeId owner, int infinity) : owner_(owner), infinity_(infinity) {
  if (infinity < 2) throw InputError("infinity must be at least 2");
  entries_[owner] = {owner, owner, 0};
}

int RoutingTable::infinity_for(NodeId dest) const {
  const auto it = scoped_infinity_.find(dest);
  return it == scoped_infinity_.end() ? infinity_ : it->second;
}

const RouteEntry* RoutingTable::find(NodeId dest) const {
  const auto it = entries_.find(dest);
  return it == entries_.end() ? nullptr : &it->second;
}

int RoutingTable::metric(NodeId dest) const {
  const RouteEntry* e = find(dest);
  return e ? e->metric : infinity_for(dest);
}

void RoutingTable::set_route(NodeId dest, NodeId next_hop, int metric) {
  if (dest == owner_) throw InputError("the self entry cannot be replaced");
  if (metric < 1) throw InputError("route metric must be positive");
  const int inf = infinity_for(dest);
  if (metric >= inf || next_hop == kNoNode) {
    entries_[dest] = {dest, kNoNode, inf};
  } else {
    entries_[dest] = {dest, next_hop, metric};
  }
}

void RoutingTable::set_unreachable(NodeId dest) { set_route(dest, kNoNode, infinity_for(dest)); }

void RoutingTable::set_scoped_infinity(NodeId dest, int value) {
  if (dest == owner_) throw InputError("cannot scope the infinity of the self entry");
  if (value < 2 || value > infinity_) {
    throw InputError("scoped infinity must be in [2, " + std::to_string(infinity_) + "]");
  }
  scoped_infinity_[dest] = value;
  const auto it = entries_.find(dest);
  if (it != entries_.end() && (it->second.metric >= value || it->second.next_hop == kNoNode)) {
    it->second = {dest, kNoNode, value};
  }
}

UpdateMessage build_update(const RoutingTable& table, NodeId to_neighbor, Variant variant) {
  UpdateMessage msg{table.owner(), to_neighbor, {}};
  for (const auto& [dest, entry] : table.entries()) {
    int advertised = entry.next_hop == kNoNode ? table.infinity() : entry.metric;
    if (entry.next_hop == to_neighbor && dest != table.owner()) {
      if (variant == Variant::SplitHorizon) continue;
      if (variant == Variant::PoisonedReverse) advertised = table.infinity();
    }
    msg.items.emplace_back(dest, advertised);
  }
  return msg;
}

std::optional<RouteChange> apply_item(RoutingTable& table, NodeId from, NodeId dest,
                                      int advertised, std::uint32_t link_cost) {
  if (advertised < 0 || advertised > table.infinity()) {
    throw InputError("advertised metric " + std::to_string(advertised) + " outside [0, infinity]");
  }
  if (dest == table.owner()) return std::nullopt;
  const int inf = table.infinity_for(dest);
  const long long raw = static_cast<long long>(advertised) + link_cost;
  const int candidate = static_cast<int>(std::min<long long>(raw, inf));
  const RouteEntry* current = table.find(dest);
  const int cur_metric = current ? current->metric : inf;
  const NodeId cur_next = current ? current->next_hop : kNoNode;

  const bool from_next_hop = cur_next == from;
  if (from_next_hop ? candidate == cur_metric : candidate >= cur_metric) return std::nullopt;

  RouteChange change{table.owner(), dest, cur_next, cur_metric, kNoNode, inf};
  table.set_route(dest, from, candidate);
  const RouteEntry* now = table.find(dest);
  change.next_hop = now->next_hop;
  change.metric = now->metric;
  return change;
}

std::vector<RouteChange> apply_update(RoutingTable& table, const UpdateMessage& msg,
                                      std::uint32_t link_cost) {
  if (msg.to != table.owner()) throw InputError("update is addressed to another node");
  std::vector<RouteChange> changes;
  for (const auto& [dest, metric] : msg.items) {
    if (auto c = apply_item(table, msg.from, dest, metric, link_cost)) changes.push_back(*c);
  }
  return changes;
}

std::vector<RouteChange> handle_silence(RoutingTable& table, std::set<NodeId>& live_neighbors,
                                        NodeId dead_neighbor) {
  std::vector<RouteChange> changes;
  std::vector<NodeId> affected;
  for (const auto& [dest, entry] : table.entries()) {
    if (entry.next_hop == dead_neighbor && dest != table.owner()) affected.push_back(dest);
  }
  for (NodeId dest : affected) {
    const RouteEntry before = *table.find(dest);
    table.set_unreachable(dest);
    changes.push_back({table.owner(), dest, before.next_hop, before.metric, kNoNode,
                       table.metric(dest)});
  }
  live_neighbors.erase(dead_neighbor);
  return changes;
}

std::vector<RoutingTable> converged_tables(const Topology& topology, int infinity) {
  const std::size_t n = topology.size();
  constexpr long long kUnreached = std::numeric_limits<long long>::max();
  std::vector<std::vector<long long>> dist(n, std::vector<long long>(n, kUnreached));
  for (NodeId s = 0; s < n; ++s) {
    using Item = std::pair<long long, NodeId>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    dist[s][s] = 0;
    heap.push({0, s});
    while (!heap.empty()) {
      const auto [d, u] = heap.top();
      heap.pop();
      if (d > dist[s][u]) continue;
      for (NodeId v : topology.neighbors(u)) {
        const long long nd = d + *topology.cost(u, v);
        if (nd < dist[s][v]) {
          dist[s][v] = nd;
          heap.push({nd, v});
        }
      }
    }
  }

  std::vector<RoutingTable> tables;
  tables.reserve(n);
  for (NodeId s = 0; s < n; ++s) {
    RoutingTable t(s, infinity);
    for (NodeId d = 0; d < n; ++d) {
      if (d == s) continue;
      if (dist[s][d] >= infinity) {
        t.set_unreachable(d);
        continue;
      }
      for (NodeId v : topology.neighbors(s)) {
        if (dist[v][d] != kUnreached && *topology.cost(s, v) + dist[v][d] == dist[s][d]) {
          t.set_route(d, v, static_cast<int>(dist[s][d]));
          break;
        }
      }
    }
    tables.push_back(std::move(t));
  }
  return tables;
}

bool check_convergence(const std::vector<RoutingTable>& tables,
                       const std::vector<RoutingTable>& oracle, const Topology& topology,
                       const std::vector<bool>& include) {
  if (tables.size() != oracle.size() || include.size() != oracle.size()) {
    throw InputError("table, oracle and mask sizes differ");
  }
  for (NodeId s = 0; s < tables.size(); ++s) {
    if (!include[s]) continue;
    for (NodeId d = 0; d < oracle.size(); ++d) {
      const bool want = oracle[s].reachable(d);
      if (tables[s].reachable(d) != want) return false;
      if (!want || d == s) continue;
      const int m = tables[s].metric(d);
      if (m != oracle[s].metric(d)) return false;
      const NodeId hop = tables[s].find(d)->next_hop;
      const auto cost = topology.cost(s, hop);
      if (!cost || static_cast<int>(*cost) + oracle[hop].metric(d) != m) return false;
    }
  }
  return true;
}

}  // namespace qdv
