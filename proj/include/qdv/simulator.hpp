#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qdv/dv_routing.hpp"
#include "qdv/metrics.hpp"
#include "qdv/scenario.hpp"
#include "qdv/trace.hpp"

namespace qdv {

enum class EventKind { ExchangeRound, NodeDown, LinkDown, SentinelPoll, PairReplenish };

const char* to_string(EventKind kind);

/// Scheduler entry. Ordered by (tick, seq); seq carries the event's phase in
/// its top bits (failures, then replenishment, then polls, then the exchange
/// round) and the insertion counter below, so same-tick order never depends
/// on when an event was scheduled.
struct Event {
  Tick tick = 0;
  std::uint64_t seq = 0;
  EventKind kind = EventKind::ExchangeRound;
  std::size_t failure = 0;  // index into ScenarioConfig::failures
};

struct RunResult {
  std::vector<TraceRecord> trace;
  Metrics metrics;
  std::vector<RoutingTable> tables;  // final table of every node
};

/// Runs the scenario until it converges or hits max_rounds. The result is a
/// pure function of the config (including its seed).
RunResult run(const ScenarioConfig& config);

/// JSON lines, one record per line.
std::string trace_text(const std::vector<TraceRecord>& trace);
std::string metrics_text(const Metrics& metrics);

/// Writes whichever outputs have a path. Throws IoError naming the path.
void emit(const RunResult& result, const std::optional<std::string>& trace_path,
          const std::optional<std::string>& metrics_path);

}  // namespace qdv
