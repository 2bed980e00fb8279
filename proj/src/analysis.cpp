#include "qdv/analysis.hpp"

#include "qdv/errors.hpp"

namespace qdv {

std::optional<std::uint64_t> sentinel_notification_latency(const std::vector<TraceRecord>& trace) {
  std::optional<std::uint64_t> flag;
  std::optional<std::uint64_t> decision;
  for (const auto& r : trace) {
    if (!flag && r.kind == "sentinel_flag") flag = r.event;
    if (!decision && r.kind == "region_down") decision = r.event;
  }
  if (!flag || !decision || *decision < *flag) return std::nullopt;
  return *decision - *flag;
}

std::vector<std::uint64_t> round_of_records(const std::vector<TraceRecord>& trace) {
  std::vector<std::uint64_t> rounds;
  rounds.reserve(trace.size());
  std::uint64_t current = 0;
  for (const auto& r : trace) {
    if (r.kind == "round_begin") current = r.data.at("round").get<std::uint64_t>();
    rounds.push_back(current);
  }
  return rounds;
}

std::optional<std::uint64_t> propagation_rounds(const std::vector<TraceRecord>& trace, const std::string& origin,
                                                const std::string& observer, const std::string& dest) {
  const auto rounds = round_of_records(trace);
  std::optional<std::uint64_t> start;
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const auto& r = trace[i];
    if (!start) {
      if (r.kind == "silence" && r.actor == origin && r.data.at("neighbor") == dest) start = rounds[i];
      continue;
    }
    if (r.kind == "route" && r.actor == observer && r.data.at("dest") == dest) return rounds[i] - *start;
  }
  return std::nullopt;
}

std::vector<int> metric_history(const std::vector<TraceRecord>& trace, const std::string& node,
                                const std::string& dest) {
  if (trace.empty() || trace.front().kind != "scenario") throw InputError("trace does not start with a scenario");
  int metric = node == dest ? 0 : trace.front().data.at("infinity").get<int>();
  std::vector<int> history;
  for (const auto& r : trace) {
    if (r.kind == "route" && r.actor == node && r.data.at("dest") == dest) metric = r.data.at("metric").get<int>();
    if (r.kind == "round_end") history.push_back(metric);
  }
  return history;
}

}  // namespace qdv
