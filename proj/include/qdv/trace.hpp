#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qdv/types.hpp"

namespace qdv {

using Json = nlohmann::ordered_json;

struct TraceRecord {
  Tick tick = 0;
  std::uint64_t seq = 0;    // position in the trace
  std::uint64_t event = 0;  // index of the scheduler event that produced it
  std::string actor;        // node name, empty for global records
  std::string kind;
  Json data;
};

/// One JSON object per line: tick, seq, event, actor, kind, data.
std::string to_json_line(const TraceRecord& record);

/// Append-only trace. The scheduler sets the (tick, event) context before
/// dispatching an event; every module appends through the same log.
class TraceLog {
 public:
  TraceLog() = default;
  explicit TraceLog(std::vector<std::string> node_names) : names_(std::move(node_names)) {}

  void set_context(Tick tick, std::uint64_t event) {
    tick_ = tick;
    event_ = event;
  }
  Tick tick() const noexcept { return tick_; }
  std::uint64_t event() const noexcept { return event_; }

  void append(NodeId actor, std::string kind, Json data = Json::object());
  void append_global(std::string kind, Json data = Json::object());

  /// Node name, or "#<id>" when the log was built without names.
  std::string name(NodeId id) const;

  const std::vector<TraceRecord>& records() const noexcept { return records_; }

 private:
  std::vector<std::string> names_;
  std::vector<TraceRecord> records_;
  Tick tick_ = 0;
  std::uint64_t event_ = 0;
};

}  // namespace qdv
