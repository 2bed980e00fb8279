#include "qdv/simulator.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <memory>
#include <queue>
#include <set>

#include "qdv/entanglement_registry.hpp"
#include "qdv/errors.hpp"
#include "qdv/quantum_protocols.hpp"
#include "qdv/random_stream.hpp"

namespace qdv {

const char* to_string(EventKind kind) {
  switch (kind) {
    case EventKind::ExchangeRound: return "exchange_round";
    case EventKind::NodeDown: return "node_down";
    case EventKind::LinkDown: return "link_down";
    case EventKind::SentinelPoll: return "sentinel_poll";
    case EventKind::PairReplenish: return "pair_replenish";
  }
  return "?";
}

namespace {

constexpr int kPhaseShift = 48;

std::uint64_t phase_of(EventKind kind) {
  switch (kind) {
    case EventKind::NodeDown:
    case EventKind::LinkDown: return 0;
    case EventKind::PairReplenish: return 1;
    case EventKind::SentinelPoll: return 2;
    case EventKind::ExchangeRound: return 3;
  }
  return 3;
}

struct Later {
  bool operator()(const Event& x, const Event& y) const {
    return std::tie(x.tick, x.seq) > std::tie(y.tick, y.seq);
  }
};

class Simulator {
 public:
  explicit Simulator(const ScenarioConfig& config)
      : cfg_(config),
        n_(config.topology.size()),
        physical_(config.topology),
        trace_(config.topology.names()),
        registry_(&trace_),
        erasure_rng_(RandomStream::derive(config.seed, "erasure")),
        sampling_rng_(RandomStream::derive(config.seed, "sampling")),
        timing_rng_(RandomStream::derive(config.seed, "timing")),
        up_(n_, true),
        live_(n_),
        missed_(n_),
        heard_(n_) {
    cfg_.validate();
    for (NodeId x = 0; x < n_; ++x) {
      tables_.emplace_back(x, cfg_.infinity);
      const auto around = physical_.neighbors(x);
      live_[x] = {around.begin(), around.end()};
    }
    auto observer = [this](const RouteChange& c, std::string_view cause) { on_route_change(c, cause); };
    if (cfg_.variant == ProtocolVariant::GatewaySentinel) {
      sentinel_ = std::make_unique<GatewaySentinel>(*cfg_.sentinel, cfg_.topology, cfg_.infinity, registry_,
                                                    &trace_, cfg_.probe, sampling_rng_, observer);
    } else if (cfg_.variant == ProtocolVariant::EntangledHandshake) {
      handshake_ = std::make_unique<EntangledHandshake>(cfg_.handshake, registry_, &trace_, cfg_.probe,
                                                        sampling_rng_, observer);
    }
    entries_per_dest_.assign(n_, 0);
    max_after_.assign(n_, -1);
    max_finite_after_.assign(n_, -1);
  }

  RunResult run() {
    record_scenario();
    for (std::size_t i = 0; i < cfg_.failures.size(); ++i) {
      schedule(cfg_.failures[i].tick,
               cfg_.failures[i].kind == FailureEvent::Kind::NodeDown ? EventKind::NodeDown : EventKind::LinkDown, i);
    }
    pending_failures_ = cfg_.failures.size();
    schedule(0, EventKind::ExchangeRound);
    if (sentinel_) {
      schedule(0, EventKind::PairReplenish);
      schedule(cfg_.sentinel->poll_period, EventKind::SentinelPoll);
    }

    while (!queue_.empty() && !done_) {
      const Event ev = queue_.top();
      queue_.pop();
      ++event_index_;
      trace_.set_context(ev.tick, event_index_);
      trace_.append_global("event", {{"kind", to_string(ev.kind)}});
      process(ev);
      registry_.erase_randomly(cfg_.erasure_rate, erasure_rng_);
    }
    trace_.append_global("run_end", {{"termination", termination_}});
    return {trace_.records(), build_metrics(), tables_};
  }

 private:
  void schedule(Tick tick, EventKind kind, std::size_t failure = 0) {
    queue_.push({tick, (phase_of(kind) << kPhaseShift) | next_seq_++, kind, failure});
  }

  void record_scenario() {
    Json links = Json::array();
    for (const Link& l : cfg_.topology.links()) links.push_back({name(l.a), name(l.b), l.cost});
    Json d;
    d["nodes"] = cfg_.topology.names();
    d["links"] = links;
    d["variant"] = to_string(cfg_.variant);
    d["classical_variant"] = to_string(cfg_.classical_variant());
    d["infinity"] = cfg_.infinity;
    d["timing"] = to_string(cfg_.timing);
    d["detect_after"] = cfg_.detect_after;
    d["seed"] = cfg_.seed;
    d["max_rounds"] = cfg_.max_rounds;
    trace_.append_global("scenario", std::move(d));
  }

  std::string name(NodeId id) const { return trace_.name(id); }

  void process(const Event& ev) {
    switch (ev.kind) {
      case EventKind::NodeDown: {
        const NodeId x = cfg_.failures[ev.failure].a;
        topology_changed();
        trace_.append(x, "node_down");
        up_[x] = false;
        physical_.isolate(x);
        if (handshake_) handshake_->on_node_down(x);
        break;
      }
      case EventKind::LinkDown: {
        const auto& f = cfg_.failures[ev.failure];
        topology_changed();
        trace_.append_global("link_down", {{"a", name(f.a)}, {"b", name(f.b)}});
        physical_.remove_link(f.a, f.b);
        break;
      }
      case EventKind::PairReplenish: {
        PairBudget budget = sentinel_->budget(cfg_.replenish_batch, cfg_.replenish_period);
        std::erase_if(budget.lines, [this](const BudgetLine& l) { return !up_[l.a] || !up_[l.b]; });
        registry_.replenish(budget, ev.tick);
        schedule(ev.tick + cfg_.replenish_period, EventKind::PairReplenish);
        break;
      }
      case EventKind::SentinelPoll: {
        for (NodeId g : sentinel_->config().gateways) {
          if (!up_[g]) continue;
          const bool was_down = sentinel_->region_down(g);
          const PollResult r = sentinel_->poll(g, tables_[g]);
          if (r == PollResult::RegionDown && !was_down && !region_down_event_) region_down_event_ = event_index_;
        }
        schedule(ev.tick + cfg_.sentinel->poll_period, EventKind::SentinelPoll);
        break;
      }
      case EventKind::ExchangeRound:
        exchange_round();
        if (!done_) schedule(ev.tick + cfg_.exchange_period, EventKind::ExchangeRound);
        break;
    }
  }

  void topology_changed() {
    --pending_failures_;
    after_failure_ = true;
    rounds_since_change_ = 0;
    rounds_to_convergence_.reset();
    oracle_.clear();
  }

  // ---- exchange -----------------------------------------------------------

  void exchange_round() {
    ++rounds_;
    ++rounds_since_change_;
    round_changes_ = 0;
    trace_.append_global("round_begin", {{"round", rounds_}});
    if (cfg_.timing == Timing::Synchronous) {
      sync_round();
    } else {
      async_round();
    }
    end_of_round();
  }

  struct Outgoing {
    UpdateMessage msg;
    std::uint64_t stamp = 0;
  };

  std::vector<Outgoing> build_all(NodeId x) {
    std::vector<Outgoing> out;
    for (NodeId nb : physical_.neighbors(x)) {
      if (!up_[nb]) continue;
      UpdateMessage msg = build_update(tables_[x], nb, cfg_.classical_variant());
      Json items = Json::array();
      for (const auto& [dest, metric] : msg.items) {
        items.push_back({name(dest), metric});
        ++entries_per_dest_[dest];
      }
      ++messages_sent_;
      entries_sent_ += msg.items.size();
      trace_.append(x, "message", {{"to", name(nb)}, {"items", std::move(items)}});
      std::uint64_t stamp = 0;
      if (handshake_) {
        stamp = handshake_->next_stamp();
        for (const auto& [dest, metric] : msg.items) {
          if (metric < cfg_.infinity) handshake_->top_up(x, nb, dest);
        }
      }
      out.push_back({std::move(msg), stamp});
    }
    return out;
  }

  void sync_round() {
    std::vector<std::vector<Outgoing>> inbox(n_);
    for (NodeId x = 0; x < n_; ++x) {
      if (!up_[x]) continue;
      for (auto& o : build_all(x)) inbox[o.msg.to].push_back(std::move(o));
    }
    for (NodeId x = 0; x < n_; ++x) {
      if (!up_[x]) continue;
      std::sort(inbox[x].begin(), inbox[x].end(),
                [](const auto& a, const auto& b) { return a.msg.from < b.msg.from; });
      std::set<NodeId> heard;
      for (const auto& o : inbox[x]) heard.insert(o.msg.from);
      check_silence(x, heard);
      for (const auto& o : inbox[x]) apply_message(x, o);
    }
  }

  void async_round() {
    std::vector<NodeId> order;
    for (NodeId x = 0; x < n_; ++x) {
      if (up_[x]) order.push_back(x);
    }
    for (std::size_t i = order.size(); i > 1; --i) {
      std::swap(order[i - 1], order[timing_rng_.next_u64() % i]);
    }
    for (NodeId x : order) {
      if (!up_[x]) continue;
      // Nobody has had a turn before the first round, so nothing is missed yet.
      if (rounds_ > 1) check_silence(x, heard_[x]);
      heard_[x].clear();
      for (const auto& o : build_all(x)) {
        heard_[o.msg.to].insert(x);
        apply_message(o.msg.to, o);
      }
    }
  }

  void check_silence(NodeId x, const std::set<NodeId>& heard) {
    const std::vector<NodeId> expected(live_[x].begin(), live_[x].end());
    for (NodeId nb : expected) {
      if (heard.contains(nb)) {
        missed_[x][nb] = 0;
        continue;
      }
      const std::uint32_t missed = ++missed_[x][nb];
      bool silent = missed >= cfg_.detect_after;
      if (!silent && handshake_) {
        silent = handshake_->probe_silent_neighbor(x, nb) == ProbeResult::FlaggedDown;
      }
      if (silent) declare_silent(x, nb);
    }
  }

  void declare_silent(NodeId x, NodeId nb) {
    trace_.append(x, "silence", {{"neighbor", name(nb)}});
    const auto changes = handle_silence(tables_[x], live_[x], nb);
    missed_[x].erase(nb);
    for (const auto& c : changes) on_route_change(c, "silence");
    if (sentinel_ && sentinel_->on_failure_detected(x, nb) && !sentinel_flag_event_) {
      sentinel_flag_event_ = event_index_;
    }
  }

  void apply_message(NodeId x, const Outgoing& out) {
    const UpdateMessage& msg = out.msg;
    trace_.append(x, "recv", {{"from", name(msg.from)}});
    ++messages_received_;
    if (!live_[x].contains(msg.from)) live_[x].insert(msg.from);
    const std::uint32_t cost = *physical_.cost(x, msg.from);
    RoutingTable& table = tables_[x];
    for (const auto& [dest, metric] : msg.items) {
      if (dest == x) continue;
      if (sentinel_ && sentinel_->rejects(x, msg.from, dest)) continue;
      if (handshake_) {
        if (metric < cfg_.infinity && handshake_->built_before_loss(x, dest, out.stamp)) {
          trace_.append(x, "stale_offer", {{"neighbor", name(msg.from)}, {"dest", name(dest)}});
          continue;
        }
        if (handshake_->pre_exchange_probe(x, msg.from, dest, table) == ExchangeDecision::Distrust) continue;
      }
      if (auto c = apply_item(table, msg.from, dest, metric, cost)) on_route_change(*c, "update");
    }
  }

  void on_route_change(const RouteChange& c, std::string_view cause) {
    ++round_changes_;
    const bool finite = c.next_hop != kNoNode;
    trace_.append(c.owner, "route",
                  {{"dest", name(c.dest)},
                   {"next_hop", finite ? Json(name(c.next_hop)) : Json(nullptr)},
                   {"metric", c.metric},
                   {"cause", cause}});
    if (handshake_ && cause != "distrust" && c.old_next_hop != kNoNode && !finite) {
      handshake_->on_route_lost(c.owner, c.dest);
    }
    if (!after_failure_) return;
    max_after_[c.dest] = std::max(max_after_[c.dest], c.metric);
    if (finite) {
      max_finite_after_[c.dest] = std::max(max_finite_after_[c.dest], c.metric);
      if (physical_.hop_distances(c.owner)[c.dest] < 0) loop_detected_ = true;
    }
  }

  // ---- round end ----------------------------------------------------------

  bool next_hop_cycle() const {
    for (NodeId dest = 0; dest < n_; ++dest) {
      for (NodeId start = 0; start < n_; ++start) {
        if (!up_[start]) continue;
        std::vector<bool> seen(n_, false);
        NodeId cur = start;
        while (cur != dest && up_[cur]) {
          if (seen[cur]) return true;
          seen[cur] = true;
          const RouteEntry* e = tables_[cur].find(dest);
          if (!e || e->next_hop == kNoNode) break;
          cur = e->next_hop;
        }
      }
    }
    return false;
  }

  void end_of_round() {
    if (after_failure_ && !loop_detected_ && next_hop_cycle()) loop_detected_ = true;
    if (oracle_.empty()) oracle_ = converged_tables(physical_, cfg_.infinity);
    converged_ = check_convergence(tables_, oracle_, physical_, up_);
    if (converged_ && !rounds_to_convergence_) rounds_to_convergence_ = rounds_since_change_;
    trace_.append_global("round_end", {{"round", rounds_}, {"changes", round_changes_}});
    if (converged_ && round_changes_ == 0 && pending_failures_ == 0) {
      finish("converged");
    } else if (rounds_ >= cfg_.max_rounds) {
      finish("max_rounds");
    }
  }

  void finish(const char* why) {
    done_ = true;
    termination_ = why;
  }

  Metrics build_metrics() const {
    Metrics m;
    m.variant = to_string(cfg_.variant);
    m.seed = cfg_.seed;
    m.rounds = rounds_;
    m.converged = converged_;
    m.rounds_to_convergence = rounds_to_convergence_;
    m.termination = termination_;
    m.total_messages = messages_sent_;
    m.messages_received = messages_received_;
    m.total_update_entries = entries_sent_;
    for (NodeId d = 0; d < n_; ++d) {
      m.update_entries_per_dest.emplace_back(name(d), entries_per_dest_[d]);
      if (max_after_[d] >= 0) m.max_metric_after_failure.emplace_back(name(d), max_after_[d]);
      if (max_finite_after_[d] >= 0) m.max_finite_metric_after_failure.emplace_back(name(d), max_finite_after_[d]);
    }
    m.loop_detected = loop_detected_;
    m.pairs = registry_.counts();
    if (sentinel_flag_event_ && region_down_event_ && *region_down_event_ >= *sentinel_flag_event_) {
      m.notification_latency_events = *region_down_event_ - *sentinel_flag_event_;
    }
    return m;
  }

  ScenarioConfig cfg_;
  std::size_t n_;
  Topology physical_;
  TraceLog trace_;
  EntanglementRegistry registry_;
  RandomStream erasure_rng_;
  RandomStream sampling_rng_;
  RandomStream timing_rng_;
  std::unique_ptr<GatewaySentinel> sentinel_;
  std::unique_ptr<EntangledHandshake> handshake_;

  std::vector<RoutingTable> tables_;
  std::vector<bool> up_;
  std::vector<std::set<NodeId>> live_;
  std::vector<std::map<NodeId, std::uint32_t>> missed_;
  std::vector<std::set<NodeId>> heard_;  // asynchronous mode only
  std::vector<RoutingTable> oracle_;

  std::priority_queue<Event, std::vector<Event>, Later> queue_;
  std::uint64_t next_seq_ = 0;
  std::uint64_t event_index_ = 0;
  std::size_t pending_failures_ = 0;
  bool done_ = false;
  std::string termination_ = "max_rounds";

  std::uint64_t rounds_ = 0;
  std::uint64_t rounds_since_change_ = 0;
  std::uint64_t round_changes_ = 0;
  bool converged_ = false;
  bool after_failure_ = false;
  bool loop_detected_ = false;
  std::optional<std::uint64_t> rounds_to_convergence_;
  std::uint64_t messages_sent_ = 0;
  std::uint64_t messages_received_ = 0;
  std::uint64_t entries_sent_ = 0;
  std::vector<std::uint64_t> entries_per_dest_;
  std::vector<int> max_after_;
  std::vector<int> max_finite_after_;
  std::optional<std::uint64_t> sentinel_flag_event_;
  std::optional<std::uint64_t> region_down_event_;
};

}  // namespace

RunResult run(const ScenarioConfig& config) { return Simulator(config).run(); }

std::string trace_text(const std::vector<TraceRecord>& trace) {
  std::string out;
  for (const auto& r : trace) {
    out += to_json_line(r);
    out += '\n';
  }
  return out;
}

std::string metrics_text(const Metrics& metrics) { return metrics.to_json().dump(2) + "\n"; }

namespace {

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << content;
  out.flush();
  if (!out) throw IoError("failed writing '" + path + "'");
}

}  // namespace

void emit(const RunResult& result, const std::optional<std::string>& trace_path,
          const std::optional<std::string>& metrics_path) {
  if (trace_path) write_file(*trace_path, trace_text(result.trace));
  if (metrics_path) write_file(*metrics_path, metrics_text(result.metrics));
}

}  // namespace qdv
