#pragma once

#include <istream>

#include <nlohmann/json.hpp>

namespace qdv::replay {

/// Recomputes the metrics summary from a JSON-lines trace without touching
/// the simulator: tables are rebuilt from route records and convergence is
/// judged against a Floyd-Warshall pass over the surviving links.
nlohmann::ordered_json replay_metrics(std::istream& trace_lines);

}  // namespace qdv::replay
