#include <doctest.h>

#include "qdv/entanglement_registry.hpp"
#include "qdv/errors.hpp"

using namespace qdv;

namespace {

void check_conservation(const EntanglementRegistry& r) {
  const auto c = r.counts();
  CHECK(c.allocated == c.live_fresh + c.live_flagged + c.probed + c.erased);
  CHECK(c.allocated == r.size());
}

}  // namespace

TEST_CASE("allocate hands out fresh bell pairs on consecutive slots") {
  EntanglementRegistry reg;
  const auto ids = reg.allocate({1, 0}, {4, 0}, PairPurpose::sentinel(0), 3);
  REQUIRE(ids.size() == 3);
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const auto& p = reg.pair(ids[i]);
    CHECK(p.id == i);
    CHECK(p.status == PairStatus::Fresh);
    CHECK(p.endpoint_a == EndpointRef{1, static_cast<std::uint32_t>(i)});
    CHECK(p.endpoint_b == EndpointRef{4, static_cast<std::uint32_t>(i)});
    CHECK(expectation(p.state, Projector::p1(1)) == doctest::Approx(0.5));
  }
  CHECK(reg.fresh_count(1, 4, PairPurpose::sentinel(0)) == 3);
  CHECK(reg.fresh_count(4, 1, PairPurpose::sentinel(0)) == 0);
  check_conservation(reg);
}

TEST_CASE("allocate rejects bad requests") {
  EntanglementRegistry reg;
  CHECK_THROWS_AS(reg.allocate({1, 0}, {2, 0}, PairPurpose::entry(0), 0), InputError);
  CHECK_THROWS_AS(reg.allocate({1, 0}, {1, 1}, PairPurpose::entry(0), 1), InputError);
  reg.allocate({1, 0}, {2, 0}, PairPurpose::entry(0), 2);
  CHECK_THROWS_AS(reg.allocate({1, 1}, {3, 0}, PairPurpose::entry(0), 1), InputError);
  CHECK(reg.size() == 2);
}

TEST_CASE("a probed slot can be reused") {
  EntanglementRegistry reg;
  const auto ids = reg.allocate({1, 0}, {2, 0}, PairPurpose::entry(0), 1);
  reg.probe(ids[0], 2);
  CHECK_NOTHROW(reg.allocate({1, 0}, {2, 0}, PairPurpose::entry(0), 1));
}

TEST_CASE("flag then probe reads down; untouched pair reads alive") {
  EntanglementRegistry reg;
  const auto ids = reg.allocate_between(1, 4, PairPurpose::sentinel(0), 2);
  reg.flag(ids[0], NodeId{1});
  CHECK(reg.pair(ids[0]).status == PairStatus::Flagged);
  CHECK(reg.pair(ids[0]).flagged_qubit == 0u);
  CHECK(reg.probe(ids[0], NodeId{4}) == ProbeResult::FlaggedDown);
  CHECK(reg.probe(ids[1], NodeId{4}) == ProbeResult::Alive);
  CHECK(reg.pair(ids[0]).status == PairStatus::Consumed);
  CHECK(reg.pair(ids[1]).status == PairStatus::Consumed);
  check_conservation(reg);
}

TEST_CASE("lifecycle violations") {
  EntanglementRegistry reg;
  const auto ids = reg.allocate_between(1, 4, PairPurpose::sentinel(0), 2);
  reg.flag(ids[0], NodeId{1});
  CHECK_THROWS_AS(reg.flag(ids[0], NodeId{1}), LifecycleError);
  CHECK_THROWS_AS(reg.probe(ids[0], NodeId{1}), InputError);
  reg.probe(ids[0], NodeId{4});
  CHECK_THROWS_AS(reg.probe(ids[0], NodeId{4}), LifecycleError);
  CHECK_THROWS_AS(reg.flag(ids[0], NodeId{4}), LifecycleError);
  CHECK_THROWS_AS(reg.probe(ids[1], NodeId{7}), InputError);
  CHECK_THROWS_AS(reg.pair(99), InputError);
  check_conservation(reg);
}

TEST_CASE("either endpoint may flag") {
  EntanglementRegistry reg;
  const auto ids = reg.allocate_between(2, 3, PairPurpose::entry(0), 1);
  reg.flag(ids[0], NodeId{3});
  CHECK(reg.probe(ids[0], NodeId{2}) == ProbeResult::FlaggedDown);
}

TEST_CASE("sampled probe of a flagged pair always reads down") {
  EntanglementRegistry reg;
  RandomStream rng(9);
  for (int i = 0; i < 200; ++i) {
    const auto ids = reg.allocate_between(1, 2, PairPurpose::entry(0), 1);
    reg.flag(ids[0], NodeId{1});
    CHECK(reg.probe_sampled(ids[0], 2, rng) == ProbeResult::FlaggedDown);
  }
}

TEST_CASE("sampled probe of a fresh pair is a coin flip") {
  EntanglementRegistry reg;
  RandomStream rng(10);
  int alive = 0;
  constexpr int kPairs = 4000;
  for (int i = 0; i < kPairs; ++i) {
    const auto ids = reg.allocate_between(1, 2, PairPurpose::entry(0), 1);
    alive += reg.probe_sampled(ids[0], 2, rng) == ProbeResult::Alive;
  }
  // 4 sigma of Binomial(4000, 0.5)
  CHECK(std::abs(alive - kPairs / 2) <= 127);
}

TEST_CASE("erasure follows the binomial rate and never touches delivered pairs") {
  EntanglementRegistry reg;
  RandomStream rng = RandomStream::derive(2718, "erasure");
  reg.allocate_between(1, 2, PairPurpose::entry(0), 10000);
  const auto erased = reg.erase_randomly(0.1, rng);
  CHECK(std::abs(static_cast<long>(erased.size()) - 1000) <= 90);
  for (PairId id : erased) CHECK(reg.pair(id).status == PairStatus::Erased);
  CHECK(reg.erase_randomly(1.0, rng).empty());
  CHECK_THROWS_AS(reg.erase_randomly(1.5, rng), InputError);
  check_conservation(reg);
}

TEST_CASE("flagged pairs in transit are not erased") {
  EntanglementRegistry reg;
  RandomStream rng(1);
  const auto ids = reg.allocate_between(1, 2, PairPurpose::entry(0), 5);
  for (PairId id : ids) reg.flag(id, NodeId{1});
  CHECK(reg.erase_randomly(1.0, rng).empty());
}

TEST_CASE("replenish tops lines up only at period boundaries") {
  EntanglementRegistry reg;
  PairBudget budget;
  budget.lines.push_back({1, 4, PairPurpose::sentinel(0), 3});
  budget.replenish_batch = 2;
  budget.replenish_period = 4;
  CHECK(reg.replenish(budget, 1).empty());
  CHECK(reg.replenish(budget, 0).size() == 2);
  CHECK(reg.replenish(budget, 4).size() == 1);
  CHECK(reg.replenish(budget, 8).empty());
  const auto live = reg.live_pairs(1, 4, PairPurpose::sentinel(0));
  reg.probe(live[0], NodeId{4});
  reg.flag(live[1], NodeId{1});
  CHECK(reg.replenish(budget, 12).size() == 2);
  CHECK(reg.fresh_count(1, 4, PairPurpose::sentinel(0)) == 3);
  budget.replenish_period = 0;
  CHECK_THROWS_AS(reg.replenish(budget, 0), InputError);
  check_conservation(reg);
}

TEST_CASE("registry emits lifecycle trace records") {
  TraceLog log({"A", "B"});
  EntanglementRegistry reg(&log);
  const auto ids = reg.allocate_between(0, 1, PairPurpose::entry(0), 1);
  reg.flag(ids[0], NodeId{0});
  reg.probe(ids[0], NodeId{1});
  std::vector<std::string> kinds;
  for (const auto& r : log.records()) kinds.push_back(r.kind);
  CHECK(kinds == std::vector<std::string>{"pair_alloc", "pair_flag", "pair_probe"});
  CHECK(log.records().back().data.at("result") == "flagged_down");
  CHECK(log.records().back().actor == "B");
}

TEST_CASE("conservation under a random mix of operations") {
  EntanglementRegistry reg;
  RandomStream rng(31337);
  for (int step = 0; step < 3000; ++step) {
    const auto op = rng.next_u64() % 4;
    if (op == 0 || reg.size() == 0) {
      reg.allocate_between(static_cast<NodeId>(rng.next_u64() % 3), 3 + static_cast<NodeId>(rng.next_u64() % 3),
                           PairPurpose::entry(0), 1 + rng.next_u64() % 3);
      continue;
    }
    const PairId id = rng.next_u64() % reg.size();
    const auto& p = reg.pair(id);
    if (op == 1 && p.status == PairStatus::Fresh) reg.flag(id, p.endpoint_a.node);
    if (op == 2 && p.live()) reg.probe(id, p.endpoint_b.node);
    if (op == 3) reg.erase_randomly(0.05, rng);
  }
  check_conservation(reg);
}
