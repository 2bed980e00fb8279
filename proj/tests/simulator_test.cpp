#include <cstdlib>
#include <map>
#include <set>
#include <sstream>

#include <doctest.h>

#include "qdv/analysis.hpp"
#include "qdv/errors.hpp"
#include "qdv/simulator.hpp"
#include "replay/trace_replay.hpp"
#include "support.hpp"

using namespace qdv;

namespace {

RunResult run_text(const std::string& text) { return run(load_scenario(text)); }

Json replayed(const RunResult& r) {
  std::istringstream in(trace_text(r.trace));
  return replay::replay_metrics(in);
}

const std::vector<std::string> kLine5{"A", "B", "C", "D", "E"};

}  // namespace

TEST_CASE("identical seeds give byte-identical output") {
  for (const auto& text : {test::line_scenario({"A", "B", "C"}, "plain", 7, 10, "A"),
                           test::line_scenario(kLine5, "entangled_handshake", 11, 10, "A", "erasure_rate = 0.2"),
                           test::sentinel_chain(5, "gateway_sentinel")}) {
    const auto a = run_text(text);
    const auto b = run_text(text);
    CHECK(trace_text(a.trace) == trace_text(b.trace));
    CHECK(metrics_text(a.metrics) == metrics_text(b.metrics));
  }
}

TEST_CASE("seed changes the erasure pattern") {
  const auto a = run_text(test::line_scenario(kLine5, "entangled_handshake", 1, 10, "A", "erasure_rate = 0.3"));
  const auto b = run_text(test::line_scenario(kLine5, "entangled_handshake", 2, 10, "A", "erasure_rate = 0.3"));
  CHECK(trace_text(a.trace) != trace_text(b.trace));
}

TEST_CASE("trace starts with the scenario and ends with run_end") {
  const auto r = run_text(test::line_scenario({"A", "B", "C"}, "plain", 7, 10, "A"));
  REQUIRE(r.trace.size() > 2);
  CHECK(r.trace.front().kind == "scenario");
  CHECK(r.trace.back().kind == "run_end");
  for (std::size_t i = 1; i < r.trace.size(); ++i) {
    CHECK(r.trace[i].seq == i);
    CHECK(r.trace[i - 1].tick <= r.trace[i].tick);
    CHECK(r.trace[i - 1].event <= r.trace[i].event);
  }
  const auto line = to_json_line(r.trace[1]);
  CHECK(line.rfind(R"({"tick":)", 0) == 0);
  CHECK(line.find(R"("seq":)") < line.find(R"("event":)"));
  CHECK(line.find(R"("actor":)") < line.find(R"("kind":)"));
}

TEST_CASE("replay reproduces the metrics") {
  RandomStream rng(8080);
  std::vector<std::string> scenarios{
      test::line_scenario({"A", "B", "C"}, "plain", 7, 10, "A"),
      test::line_scenario({"A", "B", "C"}, "split_horizon", 7, 10, "A"),
      test::line_scenario(kLine5, "entangled_handshake", 11, 10, "A"),
      test::line_scenario(kLine5, "entangled_handshake", 12, 10, "A", "erasure_rate = 0.5"),
      test::line_scenario(kLine5, "entangled_handshake", 13, 10, "A", "probe_mode = sampled\nprobes_per_check = 3"),
      test::triangle_tail("poisoned_reverse"),
      test::triangle_tail("split_horizon"),
      test::sentinel_chain(2, "gateway_sentinel"),
      test::sentinel_chain(10, "plain"),
      "[nodes]\nA B C D E F\n[links]\nA B 2\nB C\nC D 3\nD E\nE F\nF A\n[protocol]\ntiming = asynchronous\n"
      "seed = 4\n[failures]\n12 link_down C D\n"};
  for (const auto& text : scenarios) {
    const auto r = run_text(text);
    CHECK(replayed(r).dump() == r.metrics.to_json().dump());
  }
}

TEST_CASE("replay rejects a malformed trace") {
  std::istringstream bad("{\"tick\":0}\nnot json\n");
  CHECK_THROWS(replay::replay_metrics(bad));
}

TEST_CASE("no failure: converged with no loop and no post-failure maxima") {
  const auto r = run_text("[nodes]\nA B C D\n[links]\nA B\nB C\nC D\nD A\n[protocol]\nseed = 1\n");
  CHECK(r.metrics.converged);
  CHECK(r.metrics.termination == "converged");
  CHECK_FALSE(r.metrics.loop_detected);
  CHECK(r.metrics.max_metric_after_failure.empty());
  CHECK(r.metrics.rounds == *r.metrics.rounds_to_convergence + 1);
}

TEST_CASE("max_rounds stops a run that cannot settle") {
  auto cfg = load_scenario(test::line_scenario({"A", "B", "C"}, "plain", 7, 10, "A"));
  cfg.max_rounds = 15;
  const auto r = run(cfg);
  CHECK(r.metrics.rounds == 15);
  CHECK(r.metrics.termination == "max_rounds");
  CHECK_FALSE(r.metrics.converged);
}

TEST_CASE("ring reroutes around a cut link under every variant") {
  for (const char* v : {"plain", "split_horizon", "poisoned_reverse", "entangled_handshake"}) {
    const auto r = run_text(std::string("[nodes]\nA B C D E F\n[links]\nA B\nB C\nC D\nD E\nE F\nF A\n"
                                        "[protocol]\nseed = 3\nvariant = ") +
                            v + "\n[failures]\n12 link_down A B\n");
    CHECK(r.metrics.converged);
    CHECK(r.tables[0].metric(1) == 5);
    CHECK(r.tables[1].find(0)->next_hop == 2);
  }
}

TEST_CASE("asynchronous timing converges after a failure") {
  auto cfg = load_scenario(test::line_scenario(kLine5, "poisoned_reverse", 21, 10, "A"));
  cfg.timing = Timing::Asynchronous;
  const auto r = run(cfg);
  CHECK(r.metrics.converged);
  for (NodeId n = 1; n < 5; ++n) CHECK_FALSE(r.tables[n].reachable(0));
}

TEST_CASE("three-node line counting under plain, resolved by poisoned reverse") {
  const auto plain = run_text(test::line_scenario({"A", "B", "C"}, "plain", 7, 10, "A"));
  CHECK(plain.metrics.loop_detected);
  CHECK(plain.metrics.max_finite_metric_after_failure.at(0).second == 15);
  const auto pr = run_text(test::line_scenario({"A", "B", "C"}, "poisoned_reverse", 7, 10, "A"));
  CHECK(pr.metrics.converged);
  CHECK_FALSE(pr.metrics.loop_detected);
  CHECK(pr.metrics.max_finite_metric_after_failure.empty());
}

TEST_CASE("triangle plus tail keeps a loop past two gateways") {
  const auto pr = run_text(test::triangle_tail("poisoned_reverse"));
  CHECK(pr.metrics.loop_detected);
  CHECK(pr.metrics.max_finite_metric_after_failure.at(0).second == 15);
  CHECK(pr.metrics.converged);
  // plain split horizon never re-advertises to the next hop, so the C-D
  // loop is frozen instead of counted out
  const auto sh = run_text(test::triangle_tail("split_horizon"));
  CHECK(sh.metrics.loop_detected);
  CHECK(sh.metrics.termination == "max_rounds");
}

TEST_CASE("pair conservation holds in every quantum run") {
  for (const auto& text :
       {test::line_scenario(kLine5, "entangled_handshake", 5, 10, "A", "erasure_rate = 0.3"),
        test::line_scenario(kLine5, "entangled_handshake", 6, 10, "A", "probe_mode = sampled"),
        test::sentinel_chain(5, "gateway_sentinel"), test::sentinel_chain(3, "gateway_sentinel", 8)}) {
    const auto p = run_text(text).metrics.pairs;
    CHECK(p.allocated == p.live_fresh + p.live_flagged + p.probed + p.erased);
  }
}

TEST_CASE("handshake probes happen only inside exchange rounds") {
  const auto r = run_text(test::line_scenario(kLine5, "entangled_handshake", 11, 10, "A"));
  std::map<std::uint64_t, std::string> event_kind;
  for (const auto& rec : r.trace)
    if (rec.kind == "event") event_kind[rec.event] = rec.data.at("kind");
  std::size_t probes = 0;
  for (const auto& rec : r.trace) {
    if (rec.kind != "pair_probe") continue;
    ++probes;
    CHECK(event_kind.at(rec.event) == "exchange_round");
  }
  CHECK(probes > 0);
}

TEST_CASE("handshake never installs a route longer than the path to B plus one") {
  for (std::uint64_t seed : {1, 2, 3, 11, 42}) {
    const auto r = run_text(test::line_scenario(kLine5, "entangled_handshake", seed, 10, "A"));
    const auto distance_to_b = [](const std::string& n) { return std::abs(n[0] - 'B'); };
    bool after = false;
    for (const auto& rec : r.trace) {
      after = after || rec.kind == "node_down";
      if (!after || rec.kind != "route" || rec.data.at("dest") != "A") continue;
      if (rec.data.at("next_hop").is_null()) continue;
      CHECK(rec.data.at("metric").get<int>() <= distance_to_b(rec.actor) + 1);
    }
    CHECK(r.metrics.converged);
  }
}

TEST_CASE("sentinel containment and scoped infinity") {
  for (int d : {2, 3, 5, 10}) {
    const auto r = run_text(test::sentinel_chain(d, "gateway_sentinel"));
    const auto* decision = test::first_of(r.trace, "region_down");
    REQUIRE(decision);
    CHECK(decision->data.at("hops") == d);
    CHECK(decision->data.at("scoped_infinity") == d + 1);
    for (const auto& rec : r.trace) {
      if (rec.kind != "route" || rec.event < decision->event || rec.data.at("dest") != "A") continue;
      if (rec.actor == "X" || rec.actor == "Y") CHECK(rec.data.at("next_hop").is_null());
      if (rec.actor == "G") CHECK(rec.data.at("metric").get<int>() <= d + 1);
    }
    CHECK(r.metrics.notification_latency_events == 1u);
  }
}

TEST_CASE("sentinel with every pair erased degrades to classical behavior") {
  auto cfg = load_scenario(test::sentinel_chain(4, "gateway_sentinel"));
  cfg.erasure_rate = 1.0;
  const auto r = run(cfg);
  CHECK(test::first_of(r.trace, "region_down") == nullptr);
  CHECK(test::first_of(r.trace, "degraded") != nullptr);
  CHECK_FALSE(r.metrics.notification_latency_events.has_value());
  CHECK(r.metrics.converged);
}

TEST_CASE("analysis helpers") {
  const auto r = run_text(test::sentinel_chain(5, "plain"));
  CHECK(propagation_rounds(r.trace, "W", "G", "A") == 5u);
  CHECK(propagation_rounds(r.trace, "G", "W", "A") == std::nullopt);
  const auto hist = metric_history(r.trace, "W", "A");
  CHECK(hist.size() == r.metrics.rounds);
  CHECK(hist.front() == 1);
  CHECK(hist.back() == 16);
  CHECK(sentinel_notification_latency(r.trace) == std::nullopt);
  CHECK_THROWS_AS(metric_history({}, "W", "A"), InputError);
}

TEST_CASE("emit writes files and reports unwritable paths") {
  const auto r = run_text(test::line_scenario({"A", "B"}, "plain", 1, 5, "A"));
  CHECK_THROWS_AS(emit(r, std::string("/nonexistent/dir/t.jsonl"), std::nullopt), IoError);
  CHECK_NOTHROW(emit(r, std::nullopt, std::nullopt));
}
