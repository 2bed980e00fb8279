#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qdv/trace.hpp"

namespace qdv {

/// Scheduler events between the first sentinel flag and the first gateway
/// region_down decision. Absent when either never happened.
std::optional<std::uint64_t> sentinel_notification_latency(const std::vector<TraceRecord>& trace);

/// Rounds from `origin` declaring `dest` silent until `observer` first
/// changes its route to `dest`. Absent if either never happened.
std::optional<std::uint64_t> propagation_rounds(const std::vector<TraceRecord>& trace, const std::string& origin,
                                                const std::string& observer, const std::string& dest);

/// Metric `node` holds for `dest` at the end of each round (index 0 is
/// round 1), rebuilt from route records.
std::vector<int> metric_history(const std::vector<TraceRecord>& trace, const std::string& node,
                                const std::string& dest);

/// Round number in effect for each record (0 before the first round).
std::vector<std::uint64_t> round_of_records(const std::vector<TraceRecord>& trace);

}  // namespace qdv
