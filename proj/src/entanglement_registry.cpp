#include "qdv/entanglement_registry.hpp"

#include <cmath>

#include "qdv/errors.hpp"

namespace qdv {
namespace {

constexpr double kSignalTolerance = 1e-9;

std::string id_text(PairId id) { return "pair " + std::to_string(id); }

}  // namespace

const char* to_string(PairStatus status) {
  switch (status) {
    case PairStatus::Fresh: return "fresh";
    case PairStatus::Flagged: return "flagged";
    case PairStatus::Consumed: return "consumed";
    case PairStatus::Erased: return "erased";
  }
  return "?";
}

const char* to_string(ProbeResult result) {
  return result == ProbeResult::Alive ? "alive" : "flagged_down";
}

Json purpose_json(const PairPurpose& purpose, const TraceLog* trace) {
  Json j;
  j["kind"] = purpose.kind == PairPurpose::Kind::Sentinel ? "sentinel" : "entry";
  j["dest"] = trace ? trace->name(purpose.dest) : "#" + std::to_string(purpose.dest);
  return j;
}

void EntanglementRegistry::record(NodeId actor, const char* kind, Json data) {
  if (trace_) trace_->append(actor, kind, std::move(data));
}

std::vector<PairId> EntanglementRegistry::allocate(EndpointRef a, EndpointRef b, PairPurpose purpose,
                                                   std::uint32_t count) {
  if (count == 0) throw InputError("allocation count must be at least 1");
  if (a.node == b.node) throw InputError("both endpoints of a pair are on the same node");
  for (std::uint32_t k = 0; k < count; ++k) {
    for (EndpointRef e : {EndpointRef{a.node, a.slot + k}, EndpointRef{b.node, b.slot + k}}) {
      if (held_slots_.contains(e)) {
        throw InputError("slot " + std::to_string(e.slot) + " on node " + std::to_string(e.node) +
                         " is already held by a live pair");
      }
    }
  }
  std::vector<PairId> ids;
  ids.reserve(count);
  for (std::uint32_t k = 0; k < count; ++k) {
    EntangledPair p;
    p.id = pairs_.size();
    p.endpoint_a = {a.node, a.slot + k};
    p.endpoint_b = {b.node, b.slot + k};
    p.purpose = purpose;
    held_slots_.insert(p.endpoint_a);
    held_slots_.insert(p.endpoint_b);
    for (const auto& e : {p.endpoint_a, p.endpoint_b}) {
      auto& next = next_slot_[e.node];
      next = std::max(next, e.slot + 1);
    }
    if (trace_) {
      Json d;
      d["pair"] = p.id;
      d["a"] = {trace_->name(a.node), p.endpoint_a.slot};
      d["b"] = {trace_->name(b.node), p.endpoint_b.slot};
      d["purpose"] = purpose_json(purpose, trace_);
      trace_->append(a.node, "pair_alloc", std::move(d));
    }
    ids.push_back(p.id);
    live_by_line_[line_key(a.node, b.node, purpose)].insert(p.id);
    in_transit_.push_back(p.id);
    pairs_.push_back(std::move(p));
  }
  return ids;
}

std::vector<PairId> EntanglementRegistry::allocate_between(NodeId a, NodeId b, PairPurpose purpose,
                                                           std::uint32_t count) {
  return allocate({a, next_slot_[a]}, {b, next_slot_[b]}, purpose, count);
}

EntangledPair& EntanglementRegistry::checked(PairId id) {
  if (id >= pairs_.size()) throw InputError("unknown " + id_text(id));
  return pairs_[id];
}

const EntangledPair& EntanglementRegistry::pair(PairId id) const {
  if (id >= pairs_.size()) throw InputError("unknown " + id_text(id));
  return pairs_[id];
}

std::size_t EntanglementRegistry::qubit_of(const EntangledPair& p, EndpointRef by) const {
  if (by == p.endpoint_a) return 0;
  if (by == p.endpoint_b) return 1;
  throw InputError("endpoint is not a member of " + id_text(p.id));
}

std::size_t EntanglementRegistry::qubit_of(const EntangledPair& p, NodeId by) const {
  if (by == p.endpoint_a.node) return 0;
  if (by == p.endpoint_b.node) return 1;
  throw InputError("node " + std::to_string(by) + " is not a member of " + id_text(p.id));
}

void EntanglementRegistry::flag(PairId id, EndpointRef by) {
  EntangledPair& p = checked(id);
  const std::size_t q = qubit_of(p, by);
  if (p.status != PairStatus::Fresh) {
    throw LifecycleError("cannot flag " + id_text(id) + " in status " + to_string(p.status));
  }
  p.state = apply_projector(p.state, Projector::p0(q));
  p.status = PairStatus::Flagged;
  p.flagged_qubit = q;
  ++flagged_;
  record(by.node, "pair_flag", {{"pair", id}});
}

void EntanglementRegistry::flag(PairId id, NodeId by) {
  const EntangledPair& p = checked(id);
  flag(id, qubit_of(p, by) == 0 ? p.endpoint_a : p.endpoint_b);
}

ProbeResult EntanglementRegistry::finish_probe(EntangledPair& p, std::size_t qubit, Json detail,
                                               ProbeResult result) {
  p.status = PairStatus::Consumed;
  release_slots(p);
  ++probed_;
  const EndpointRef by = qubit == 0 ? p.endpoint_a : p.endpoint_b;
  Json d;
  d["pair"] = p.id;
  for (auto& [k, v] : detail.items()) d[k] = v;
  d["result"] = to_string(result);
  record(by.node, "pair_probe", std::move(d));
  return result;
}

ProbeResult EntanglementRegistry::probe(PairId id, EndpointRef by) {
  EntangledPair& p = checked(id);
  const std::size_t q = qubit_of(p, by);
  if (!p.live()) {
    throw LifecycleError("cannot probe " + id_text(id) + " in status " + to_string(p.status));
  }
  if (p.flagged_qubit && *p.flagged_qubit == q) {
    throw InputError(id_text(id) + " must be probed from the endpoint opposite its flagger");
  }
  const double value = expectation(p.state, Projector::p1(q));
  ProbeResult result;
  if (std::abs(value - 0.5) <= kSignalTolerance) {
    result = ProbeResult::Alive;
  } else if (std::abs(value) <= kSignalTolerance) {
    result = ProbeResult::FlaggedDown;
  } else {
    throw InvalidStateError(id_text(id) + " read " + std::to_string(value) +
                            ", expected 0.5 or 0");
  }
  return finish_probe(p, q, {{"mode", "expectation"}, {"value", value}}, result);
}

ProbeResult EntanglementRegistry::probe(PairId id, NodeId by) {
  const EntangledPair& p = checked(id);
  return probe(id, qubit_of(p, by) == 0 ? p.endpoint_a : p.endpoint_b);
}

ProbeResult EntanglementRegistry::probe_sampled(PairId id, NodeId by, RandomStream& stream) {
  EntangledPair& p = checked(id);
  const std::size_t q = qubit_of(p, by);
  if (!p.live()) {
    throw LifecycleError("cannot probe " + id_text(id) + " in status " + to_string(p.status));
  }
  if (p.flagged_qubit && *p.flagged_qubit == q) {
    throw InputError(id_text(id) + " must be probed from the endpoint opposite its flagger");
  }
  const SampleResult shot = measure_sample(p.state, q, stream);
  p.state = shot.collapsed;
  const ProbeResult result = shot.bit == 1 ? ProbeResult::Alive : ProbeResult::FlaggedDown;
  return finish_probe(p, q, {{"mode", "sampled"}, {"bit", shot.bit}}, result);
}

void EntanglementRegistry::release_slots(const EntangledPair& p) {
  held_slots_.erase(p.endpoint_a);
  held_slots_.erase(p.endpoint_b);
  live_by_line_[line_key(p.endpoint_a.node, p.endpoint_b.node, p.purpose)].erase(p.id);
}

std::vector<PairId> EntanglementRegistry::replenish(const PairBudget& budget, Tick now) {
  if (budget.replenish_period == 0) throw InputError("replenish period must be positive");
  std::vector<PairId> added;
  if (now % budget.replenish_period != 0) return added;
  for (const BudgetLine& line : budget.lines) {
    const std::uint32_t fresh = fresh_count(line.a, line.b, line.purpose);
    if (fresh >= line.target) continue;
    const std::uint32_t n = std::min(line.target - fresh, budget.replenish_batch);
    if (n == 0) continue;
    auto ids = allocate_between(line.a, line.b, line.purpose, n);
    added.insert(added.end(), ids.begin(), ids.end());
  }
  if (trace_ && !added.empty()) trace_->append_global("replenish", {{"count", added.size()}});
  return added;
}

std::vector<PairId> EntanglementRegistry::erase_randomly(double rate, RandomStream& stream) {
  if (!(rate >= 0.0 && rate <= 1.0)) throw InputError("erasure rate must be in [0, 1]");
  std::vector<PairId> erased;
  std::vector<PairId> batch;
  batch.swap(in_transit_);
  for (PairId id : batch) {
    EntangledPair& p = pairs_[id];
    p.in_transit = false;
    if (p.status != PairStatus::Fresh) continue;
    if (stream.bernoulli(rate)) {
      p.status = PairStatus::Erased;
      release_slots(p);
      ++erased_;
      erased.push_back(p.id);
      record(p.endpoint_b.node, "pair_erase", {{"pair", p.id}});
    }
  }
  return erased;
}

std::uint32_t EntanglementRegistry::fresh_count(NodeId a, NodeId b, PairPurpose purpose) const {
  const auto it = live_by_line_.find(line_key(a, b, purpose));
  if (it == live_by_line_.end()) return 0;
  std::uint32_t n = 0;
  for (PairId id : it->second) {
    if (pairs_[id].status == PairStatus::Fresh) ++n;
  }
  return n;
}

std::vector<PairId> EntanglementRegistry::live_pairs(NodeId a, NodeId b, PairPurpose purpose) const {
  const auto it = live_by_line_.find(line_key(a, b, purpose));
  if (it == live_by_line_.end()) return {};
  return {it->second.begin(), it->second.end()};
}

RegistryCounts EntanglementRegistry::counts() const {
  RegistryCounts c;
  c.allocated = pairs_.size();
  c.flagged = flagged_;
  c.probed = probed_;
  c.erased = erased_;
  for (const EntangledPair& p : pairs_) {
    if (p.status == PairStatus::Fresh) ++c.live_fresh;
    if (p.status == PairStatus::Flagged) ++c.live_flagged;
  }
  return c;
}

}  // namespace qdv
