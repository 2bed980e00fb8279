#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qdv/entanglement_registry.hpp"
#include "qdv/trace.hpp"

namespace qdv {

/// Run summary. Every field can be recomputed from the trace alone.
struct Metrics {
  std::string variant;
  std::uint64_t seed = 0;
  std::uint64_t rounds = 0;
  bool converged = false;
  // Rounds after the last topology change up to the first converged round.
  std::optional<std::uint64_t> rounds_to_convergence;
  std::string termination;  // "converged" or "max_rounds"
  std::uint64_t total_messages = 0;
  std::uint64_t messages_received = 0;
  std::uint64_t total_update_entries = 0;
  std::vector<std::pair<std::string, std::uint64_t>> update_entries_per_dest;
  // Over route changes after the first failure; only destinations that changed.
  std::vector<std::pair<std::string, int>> max_metric_after_failure;
  std::vector<std::pair<std::string, int>> max_finite_metric_after_failure;
  // A finite route to an unreachable destination was installed, or the
  // next hops formed a cycle at the end of a round, after the first failure.
  bool loop_detected = false;
  RegistryCounts pairs;
  std::optional<std::uint64_t> notification_latency_events;

  Json to_json() const;
};

}  // namespace qdv
