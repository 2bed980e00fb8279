#include "qdv/quantum_protocols.hpp"

#include <algorithm>

#include "qdv/errors.hpp"

namespace qdv {

const char* to_string(ProbeMode mode) {
  return mode == ProbeMode::Expectation ? "expectation" : "sampled";
}

std::optional<ProbeMode> parse_probe_mode(std::string_view text) {
  if (text == "expectation") return ProbeMode::Expectation;
  if (text == "sampled") return ProbeMode::Sampled;
  return std::nullopt;
}

const char* to_string(PollResult result) {
  switch (result) {
    case PollResult::Alive: return "alive";
    case PollResult::RegionDown: return "region_down";
    case PollResult::NoPairs: return "no_pairs";
  }
  return "?";
}

const char* to_string(ExchangeDecision decision) {
  switch (decision) {
    case ExchangeDecision::Trust: return "trust";
    case ExchangeDecision::Distrust: return "distrust";
    case ExchangeDecision::NoPairs: return "no_pairs";
  }
  return "?";
}

std::optional<ProbeResult> read_pairs(EntanglementRegistry& registry, const std::vector<PairId>& candidates,
                                      NodeId by, const ProbeSettings& settings, RandomStream& sampling) {
  if (candidates.empty()) return std::nullopt;
  const std::size_t n = std::min<std::size_t>(candidates.size(), std::max<std::uint32_t>(1, settings.probes_per_check));
  std::size_t down = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const ProbeResult r = settings.mode == ProbeMode::Expectation
                              ? registry.probe(candidates[i], by)
                              : registry.probe_sampled(candidates[i], by, sampling);
    if (r == ProbeResult::FlaggedDown) ++down;
  }
  if (settings.mode == ProbeMode::Expectation) {
    return down > 0 ? ProbeResult::FlaggedDown : ProbeResult::Alive;
  }
  return down == n ? ProbeResult::FlaggedDown : ProbeResult::Alive;
}

// ---------------------------------------------------------------------------

GatewaySentinel::GatewaySentinel(SentinelConfig config, const Topology& initial, int infinity,
                                 EntanglementRegistry& registry, TraceLog* trace,
                                 ProbeSettings settings, RandomStream& sampling,
                                 RouteObserver observer)
    : config_(std::move(config)),
      registry_(registry),
      trace_(trace),
      settings_(settings),
      sampling_(sampling),
      observer_(std::move(observer)) {
  if (config_.watched >= initial.size()) throw InputError("sentinel watched node does not exist");
  if (config_.watchers.empty()) throw InputError("sentinel needs at least one watcher");
  if (config_.gateways.empty()) throw InputError("sentinel needs at least one gateway");
  if (config_.pairs_per_watcher_gateway == 0) throw InputError("sentinel pair count must be positive");
  if (config_.poll_period == 0) throw InputError("sentinel poll period must be positive");
  std::sort(config_.watchers.begin(), config_.watchers.end());
  std::sort(config_.gateways.begin(), config_.gateways.end());

  const auto around = initial.neighbors(config_.watched);
  for (NodeId w : config_.watchers) {
    if (!std::binary_search(around.begin(), around.end(), w)) {
      throw InputError("sentinel watcher " + initial.name(w) + " is not a neighbor of " +
                       initial.name(config_.watched));
    }
  }

  // Hop distance from the nearest watcher to every node.
  std::vector<int> region(initial.size(), -1);
  for (NodeId w : config_.watchers) {
    const auto d = initial.hop_distances(w);
    for (std::size_t i = 0; i < d.size(); ++i) {
      if (d[i] >= 0 && (region[i] < 0 || d[i] < region[i])) region[i] = d[i];
    }
  }

  for (NodeId g : config_.gateways) {
    if (g == config_.watched || std::binary_search(config_.watchers.begin(), config_.watchers.end(), g)) {
      throw InputError("sentinel gateway " + initial.name(g) + " overlaps the watched region");
    }
    if (region[g] < 0) throw InputError("sentinel gateway " + initial.name(g) + " is unreachable");
    if (region[g] + 1 > infinity) {
      throw InputError("sentinel gateway " + initial.name(g) + " is too far for infinity " +
                       std::to_string(infinity));
    }
    hops_[g] = region[g];
    for (NodeId n : initial.neighbors(g)) {
      if (region[n] >= 0 && region[n] < region[g]) watcher_side_[g].insert(n);
    }
  }
}

PairBudget GatewaySentinel::budget(std::uint32_t replenish_batch, Tick replenish_period) const {
  PairBudget b;
  b.replenish_batch = replenish_batch;
  b.replenish_period = replenish_period;
  for (NodeId w : config_.watchers) {
    for (NodeId g : config_.gateways) {
      b.lines.push_back({w, g, PairPurpose::sentinel(config_.watched), config_.pairs_per_watcher_gateway});
    }
  }
  return b;
}

int GatewaySentinel::hops(NodeId gateway) const {
  const auto it = hops_.find(gateway);
  if (it == hops_.end()) throw InputError("node is not a sentinel gateway");
  return it->second;
}

int GatewaySentinel::scoped_infinity(NodeId gateway) const { return hops(gateway) + 1; }

bool GatewaySentinel::on_failure_detected(NodeId watcher, NodeId silent_neighbor) {
  if (silent_neighbor != config_.watched) return false;
  if (!std::binary_search(config_.watchers.begin(), config_.watchers.end(), watcher)) return false;
  bool any = false;
  const PairPurpose purpose = PairPurpose::sentinel(config_.watched);
  for (NodeId g : config_.gateways) {
    std::size_t flagged = 0;
    for (PairId id : registry_.live_pairs(watcher, g, purpose)) {
      if (registry_.pair(id).status != PairStatus::Fresh) continue;
      registry_.flag(id, watcher);
      ++flagged;
    }
    if (trace_) {
      if (flagged == 0) {
        trace_->append(watcher, "degraded", {{"reason", "no_sentinel_pairs"}, {"gateway", trace_->name(g)}});
      } else {
        trace_->append(watcher, "sentinel_flag", {{"gateway", trace_->name(g)}, {"count", flagged}});
      }
    }
    any = any || flagged > 0;
  }
  return any;
}

PollResult GatewaySentinel::poll(NodeId gateway, RoutingTable& gateway_table) {
  const int cap = scoped_infinity(gateway);
  if (down_.contains(gateway)) return PollResult::RegionDown;

  const PairPurpose purpose = PairPurpose::sentinel(config_.watched);
  bool read_any = false;
  bool down = false;
  for (NodeId w : config_.watchers) {
    const auto r = read_pairs(registry_, registry_.live_pairs(w, gateway, purpose), gateway, settings_, sampling_);
    if (!r) {
      if (trace_) trace_->append(gateway, "degraded", {{"reason", "no_pairs"}, {"watcher", trace_->name(w)}});
      continue;
    }
    read_any = true;
    down = down || *r == ProbeResult::FlaggedDown;
  }
  const PollResult result = down ? PollResult::RegionDown : read_any ? PollResult::Alive : PollResult::NoPairs;
  if (trace_) trace_->append(gateway, "sentinel_poll", {{"result", to_string(result)}});
  if (!down) return result;

  down_.insert(gateway);
  if (trace_) {
    trace_->append(gateway, "region_down", {{"watched", trace_->name(config_.watched)},
                                            {"hops", hops(gateway)},
                                            {"scoped_infinity", cap}});
  }
  const NodeId watched = config_.watched;
  const RouteEntry* before = gateway_table.find(watched);
  const NodeId old_next = before ? before->next_hop : kNoNode;
  const int old_metric = gateway_table.metric(watched);
  gateway_table.set_scoped_infinity(watched, cap);
  if (old_next != kNoNode && watcher_side_[gateway].contains(old_next)) {
    gateway_table.set_unreachable(watched);
  }
  const RouteEntry* after = gateway_table.find(watched);
  const NodeId new_next = after ? after->next_hop : kNoNode;
  const int new_metric = gateway_table.metric(watched);
  if (observer_ && (new_next != old_next || new_metric != old_metric)) {
    observer_({gateway, watched, old_next, old_metric, new_next, new_metric}, "region_down");
  }
  return result;
}

bool GatewaySentinel::rejects(NodeId gateway, NodeId from, NodeId dest) const {
  if (dest != config_.watched || !down_.contains(gateway)) return false;
  const auto it = watcher_side_.find(gateway);
  return it != watcher_side_.end() && it->second.contains(from);
}

// ---------------------------------------------------------------------------

EntangledHandshake::EntangledHandshake(HandshakeConfig config, EntanglementRegistry& registry,
                                       TraceLog* trace, ProbeSettings settings,
                                       RandomStream& sampling, RouteObserver observer)
    : config_(config),
      registry_(registry),
      trace_(trace),
      settings_(settings),
      sampling_(sampling),
      observer_(std::move(observer)) {}

void EntangledHandshake::prune(std::vector<PairId>& ids) const {
  std::erase_if(ids, [this](PairId id) { return !registry_.pair(id).live(); });
}

std::vector<PairId> EntangledHandshake::attach(NodeId sender, NodeId receiver, NodeId dest,
                                               std::uint32_t count) {
  if (count == 0) return {};
  auto ids = registry_.allocate_between(sender, receiver, PairPurpose::entry(dest), count);
  for (const Key& key : {Key{sender, receiver, dest}, Key{receiver, sender, dest}}) {
    auto& list = ledger_[key];
    prune(list);
    list.insert(list.end(), ids.begin(), ids.end());
  }
  ++generation_;
  return ids;
}

std::vector<PairId> EntangledHandshake::top_up(NodeId sender, NodeId receiver, NodeId dest) {
  const std::uint32_t fresh = registry_.fresh_count(sender, receiver, PairPurpose::entry(dest));
  if (fresh >= config_.pairs_per_entry) return {};
  return attach(sender, receiver, dest, config_.pairs_per_entry - fresh);
}

std::size_t EntangledHandshake::flag_entry(NodeId node, NodeId dest) {
  std::size_t flagged = 0;
  for (auto it = ledger_.lower_bound({node, 0, 0}); it != ledger_.end() && std::get<0>(it->first) == node; ++it) {
    if (std::get<2>(it->first) != dest) continue;
    prune(it->second);
    for (PairId id : it->second) {
      const EntangledPair& p = registry_.pair(id);
      if (p.endpoint_a.node != node || p.status != PairStatus::Fresh) continue;
      registry_.flag(id, node);
      ++flagged;
    }
  }
  if (trace_) trace_->append(node, "handshake_flag", {{"dest", trace_->name(dest)}, {"count", flagged}});
  return flagged;
}

ExchangeDecision EntangledHandshake::pre_exchange_probe(NodeId node, NodeId neighbor, NodeId dest,
                                                        RoutingTable& table) {
  const auto r = read_pairs(registry_, registry_.live_pairs(neighbor, node, PairPurpose::entry(dest)), node,
                            settings_, sampling_);
  const ExchangeDecision decision = !r                              ? ExchangeDecision::NoPairs
                                    : *r == ProbeResult::FlaggedDown ? ExchangeDecision::Distrust
                                                                     : ExchangeDecision::Trust;
  if (trace_) {
    trace_->append(node, "probe_decision", {{"neighbor", trace_->name(neighbor)},
                                            {"dest", trace_->name(dest)},
                                            {"decision", to_string(decision)}});
  }
  if (decision != ExchangeDecision::Distrust) return decision;

  const RouteEntry* current = table.find(dest);
  if (current && current->next_hop == neighbor) {
    const RouteEntry before = *current;
    table.set_unreachable(dest);
    if (observer_) {
      observer_({node, dest, before.next_hop, before.metric, kNoNode, table.metric(dest)}, "distrust");
    }
    on_route_lost(node, dest);
  }
  return decision;
}

void EntangledHandshake::on_route_lost(NodeId node, NodeId dest) {
  lost_at_[{node, dest}] = next_stamp();
  flag_entry(node, dest);
}

bool EntangledHandshake::built_before_loss(NodeId node, NodeId dest, std::uint64_t stamp) const {
  const auto it = lost_at_.find({node, dest});
  return it != lost_at_.end() && stamp < it->second;
}

std::optional<ProbeResult> EntangledHandshake::probe_silent_neighbor(NodeId node, NodeId neighbor) {
  // Prefer the pairs vouching for the neighbor itself, then any other entry.
  std::vector<PairId> candidates = registry_.live_pairs(neighbor, node, PairPurpose::entry(neighbor));
  for (auto it = ledger_.lower_bound({node, neighbor, 0});
       it != ledger_.end() && std::get<0>(it->first) == node && std::get<1>(it->first) == neighbor; ++it) {
    if (std::get<2>(it->first) == neighbor) continue;
    prune(it->second);
    for (PairId id : it->second) {
      if (registry_.pair(id).endpoint_a.node == neighbor) candidates.push_back(id);
    }
  }
  const auto r = read_pairs(registry_, candidates, node, settings_, sampling_);
  if (trace_) {
    trace_->append(node, "liveness_probe",
                   {{"neighbor", trace_->name(neighbor)}, {"result", r ? to_string(*r) : "no_pairs"}});
  }
  return r;
}

std::size_t EntangledHandshake::on_node_down(NodeId node) {
  std::set<NodeId> dests;
  for (auto it = ledger_.lower_bound({node, 0, 0}); it != ledger_.end() && std::get<0>(it->first) == node; ++it) {
    dests.insert(std::get<2>(it->first));
  }
  std::size_t flagged = 0;
  for (NodeId d : dests) flagged += flag_entry(node, d);
  return flagged;
}

std::vector<PairId> EntangledHandshake::ledger(NodeId node, NodeId neighbor, NodeId dest) {
  const auto it = ledger_.find({node, neighbor, dest});
  if (it == ledger_.end()) return {};
  prune(it->second);
  return it->second;
}

}  // namespace qdv
