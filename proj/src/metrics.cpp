#include "qdv/metrics.hpp"

namespace qdv {

Json Metrics::to_json() const {
  Json j;
  j["variant"] = variant;
  j["seed"] = seed;
  j["rounds"] = rounds;
  j["converged"] = converged;
  j["rounds_to_convergence"] = rounds_to_convergence ? Json(*rounds_to_convergence) : Json(nullptr);
  j["termination"] = termination;
  j["total_messages"] = total_messages;
  j["messages_received"] = messages_received;
  j["total_update_entries"] = total_update_entries;
  Json per_dest = Json::object();
  for (const auto& [d, n] : update_entries_per_dest) per_dest[d] = n;
  j["update_entries_per_dest"] = per_dest;
  Json max_m = Json::object();
  for (const auto& [d, m] : max_metric_after_failure) max_m[d] = m;
  j["max_metric_after_failure"] = max_m;
  Json max_f = Json::object();
  for (const auto& [d, m] : max_finite_metric_after_failure) max_f[d] = m;
  j["max_finite_metric_after_failure"] = max_f;
  j["loop_detected"] = loop_detected;
  j["pairs"] = {{"allocated", pairs.allocated}, {"flagged", pairs.flagged},   {"probed", pairs.probed},
                {"erased", pairs.erased},       {"live_fresh", pairs.live_fresh}, {"live_flagged", pairs.live_flagged}};
  j["notification_latency_events"] =
      notification_latency_events ? Json(*notification_latency_events) : Json(nullptr);
  return j;
}

}  // namespace qdv
