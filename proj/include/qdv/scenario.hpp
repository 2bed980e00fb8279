#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qdv/dv_routing.hpp"
#include "qdv/quantum_protocols.hpp"
#include "qdv/topology.hpp"

namespace qdv {

enum class ProtocolVariant { Plain, SplitHorizon, PoisonedReverse, GatewaySentinel, EntangledHandshake };

const char* to_string(ProtocolVariant v);
std::optional<ProtocolVariant> parse_protocol_variant(std::string_view text);

enum class Timing { Synchronous, Asynchronous };

const char* to_string(Timing t);

struct FailureEvent {
  enum class Kind { NodeDown, LinkDown };
  Tick tick = 0;
  Kind kind = Kind::NodeDown;
  NodeId a = kNoNode;
  NodeId b = kNoNode;  // LinkDown only
};

struct ScenarioConfig {
  Topology topology;
  ProtocolVariant variant = ProtocolVariant::Plain;
  // Advertisement rule underneath the quantum variants. Unset means
  // poisoned reverse for the sentinel and plain for the handshake.
  std::optional<Variant> base_variant;
  int infinity = kDefaultInfinity;
  Tick exchange_period = 1;
  std::uint32_t detect_after = 3;  // missed updates before a neighbor is declared silent
  Timing timing = Timing::Synchronous;
  std::vector<FailureEvent> failures;  // sorted by (tick, kind, a, b)
  std::uint64_t seed = 0;
  std::uint32_t max_rounds = 1000;

  std::optional<SentinelConfig> sentinel;
  Tick replenish_period = 4;
  std::uint32_t replenish_batch = 4;
  HandshakeConfig handshake;
  double erasure_rate = 0.0;
  ProbeSettings probe;

  /// Advertisement rule actually used for route exchange.
  Variant classical_variant() const;

  /// Throws InputError on any broken invariant.
  void validate() const;
};

/// Parses the sectioned scenario text ([nodes], [links], [protocol],
/// [failures], [quantum]). Errors carry the offending line number.
ScenarioConfig load_scenario(std::string_view text);
ScenarioConfig load_scenario_file(const std::string& path);

}  // namespace qdv
