#include <string>

#include <doctest.h>

#include "qdv/errors.hpp"
#include "qdv/scenario.hpp"

using namespace qdv;

namespace {

int error_line(const std::string& text) {
  try {
    load_scenario(text);
  } catch (const ParseError& e) {
    return e.line();
  }
  return -1;
}

}  // namespace

TEST_CASE("minimal scenario takes the defaults") {
  const auto cfg = load_scenario("[nodes]\nA B C\n[links]\nA B\nB C 3\n");
  CHECK(cfg.topology.size() == 3);
  CHECK(cfg.topology.cost(1, 2) == 3u);
  CHECK(cfg.variant == ProtocolVariant::Plain);
  CHECK(cfg.infinity == 16);
  CHECK(cfg.exchange_period == 1);
  CHECK(cfg.detect_after == 3);
  CHECK(cfg.timing == Timing::Synchronous);
  CHECK(cfg.failures.empty());
  CHECK(cfg.max_rounds == 1000);
  CHECK(cfg.erasure_rate == 0.0);
}

TEST_CASE("full scenario") {
  const auto cfg = load_scenario(R"(# comment line
[nodes]
A B C D   # trailing comment
[links]
A B
B C
C D
[protocol]
variant = gateway_sentinel
infinity = 12
exchange_period = 2
detect_after = 2
timing = asynchronous
seed = 99
max_rounds = 50
[failures]
30 link_down C D
20 node_down A
[quantum]
watched = A
watchers = B
gateways = D
pairs_per_link = 5
poll_period = 2
replenish_period = 3
replenish_batch = 2
erasure_rate = 0.25
probe_mode = sampled
probes_per_check = 3
base_variant = split_horizon
)");
  CHECK(cfg.variant == ProtocolVariant::GatewaySentinel);
  CHECK(cfg.infinity == 12);
  CHECK(cfg.timing == Timing::Asynchronous);
  CHECK(cfg.seed == 99);
  REQUIRE(cfg.failures.size() == 2);
  CHECK(cfg.failures[0].tick == 20);
  CHECK(cfg.failures[1].kind == FailureEvent::Kind::LinkDown);
  REQUIRE(cfg.sentinel);
  CHECK(cfg.sentinel->pairs_per_watcher_gateway == 5);
  CHECK(cfg.sentinel->poll_period == 2);
  CHECK(cfg.replenish_period == 3);
  CHECK(cfg.replenish_batch == 2);
  CHECK(cfg.erasure_rate == 0.25);
  CHECK(cfg.probe.mode == ProbeMode::Sampled);
  CHECK(cfg.probe.probes_per_check == 3);
  CHECK(cfg.classical_variant() == Variant::SplitHorizon);
}

TEST_CASE("quantum variants pick their default base rule") {
  auto cfg = load_scenario("[nodes]\nA B C\n[links]\nA B\nB C\n[protocol]\nvariant = entangled_handshake\n");
  CHECK(cfg.classical_variant() == Variant::Plain);
  cfg = load_scenario(
      "[nodes]\nA B C\n[links]\nA B\nB C\n[protocol]\nvariant = gateway_sentinel\n"
      "[quantum]\nwatched = A\nwatchers = B\ngateways = C\n");
  CHECK(cfg.classical_variant() == Variant::PoisonedReverse);
}

TEST_CASE("parse errors carry the offending line") {
  CHECK(error_line("[nodes]\nA B\n[links]\nA Z\n") == 4);
  CHECK(error_line("[nodes]\nA A\n") == 2);
  CHECK(error_line("A B\n") == 1);
  CHECK(error_line("[nodes]\nA\n[bogus]\n") == 3);
  CHECK(error_line("[nodes\n") == 1);
  CHECK(error_line("[nodes]\nA B\n[links]\nA B\nA B\n") == 5);
  CHECK(error_line("[nodes]\nA B\n[links]\nA A\n") == 4);
  CHECK(error_line("[nodes]\nA B\n[links]\nA B 0\n") == 4);
  CHECK(error_line("[nodes]\nA B\n[protocol]\nvariant = rip\n") == 4);
  CHECK(error_line("[nodes]\nA B\n[protocol]\ninfinity = -3\n") == 4);
  CHECK(error_line("[nodes]\nA B\n[protocol]\ninfinity = 1\n") == 4);
  CHECK(error_line("[nodes]\nA B\n[protocol]\nseed = 1\nseed = 2\n") == 5);
  CHECK(error_line("[nodes]\nA B\n[protocol]\ncolour = blue\n") == 4);
  CHECK(error_line("[nodes]\nA B\n[protocol]\nnovalue\n") == 4);
  CHECK(error_line("[nodes]\nA B\n[links]\nA B\n[failures]\nx node_down A\n") == 6);
  CHECK(error_line("[nodes]\nA B\n[links]\nA B\n[failures]\n3 explode A\n") == 6);
  CHECK(error_line("[nodes]\nA B\n[links]\nA B\n[failures]\n3 node_down Z\n") == 6);
  CHECK(error_line("[nodes]\nA B C\n[links]\nA B\n[failures]\n3 link_down A C\n") == 6);
  CHECK(error_line("[nodes]\nA B\n[quantum]\nerasure_rate = 1.5\n") == 4);
  CHECK(error_line("[nodes]\nA B\n[quantum]\nprobe_mode = weak\n") == 4);
}

TEST_CASE("sentinel variant without a sentinel section is rejected") {
  CHECK_THROWS_AS(load_scenario("[nodes]\nA B\n[links]\nA B\n[protocol]\nvariant = gateway_sentinel\n"),
                  std::exception);
}

TEST_CASE("missing scenario file") {
  CHECK_THROWS_AS(load_scenario_file("/nonexistent/dir/x.scn"), IoError);
}

TEST_CASE("protocol variant names round-trip") {
  for (auto v : {ProtocolVariant::Plain, ProtocolVariant::SplitHorizon, ProtocolVariant::PoisonedReverse,
                 ProtocolVariant::GatewaySentinel, ProtocolVariant::EntangledHandshake}) {
    CHECK(parse_protocol_variant(to_string(v)) == v);
  }
}
