#include "qdv/topology.hpp"

#include <algorithm>
#include <deque>

#include "qdv/errors.hpp"

namespace qdv {

void Topology::check(NodeId n) const {
  if (n >= names_.size()) throw InputError("unknown node id " + std::to_string(n));
}

NodeId Topology::add_node(const std::string& name) {
  if (name.empty()) throw InputError("node name must not be empty");
  if (find(name)) throw InputError("duplicate node '" + name + "'");
  names_.push_back(name);
  adjacency_.emplace_back();
  return static_cast<NodeId>(names_.size() - 1);
}

void Topology::add_link(NodeId a, NodeId b, std::uint32_t cost) {
  check(a);
  check(b);
  if (a == b) throw InputError("self-link on node '" + names_[a] + "'");
  if (cost < 1) throw InputError("link cost must be at least 1");
  if (adjacency_[a].contains(b)) {
    throw InputError("duplicate link " + names_[a] + "-" + names_[b]);
  }
  adjacency_[a][b] = cost;
  adjacency_[b][a] = cost;
}

bool Topology::remove_link(NodeId a, NodeId b) {
  check(a);
  check(b);
  const bool had = adjacency_[a].erase(b) > 0;
  adjacency_[b].erase(a);
  return had;
}

void Topology::isolate(NodeId n) {
  check(n);
  for (const auto& [m, cost] : adjacency_[n]) adjacency_[m].erase(n);
  adjacency_[n].clear();
}

std::optional<NodeId> Topology::find(const std::string& name) const {
  const auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) return std::nullopt;
  return static_cast<NodeId>(it - names_.begin());
}

std::vector<NodeId> Topology::neighbors(NodeId n) const {
  check(n);
  std::vector<NodeId> out;
  out.reserve(adjacency_[n].size());
  for (const auto& [m, cost] : adjacency_[n]) out.push_back(m);
  return out;
}

std::optional<std::uint32_t> Topology::cost(NodeId a, NodeId b) const {
  check(a);
  check(b);
  const auto it = adjacency_[a].find(b);
  if (it == adjacency_[a].end()) return std::nullopt;
  return it->second;
}

std::vector<Link> Topology::links() const {
  std::vector<Link> out;
  for (NodeId a = 0; a < adjacency_.size(); ++a) {
    for (const auto& [b, cost] : adjacency_[a]) {
      if (a < b) out.push_back({a, b, cost});
    }
  }
  return out;
}

std::vector<int> Topology::hop_distances(NodeId source) const {
  check(source);
  std::vector<int> dist(size(), -1);
  std::deque<NodeId> queue{source};
  dist[source] = 0;
  while (!queue.empty()) {
    const NodeId u = queue.front();
    queue.pop_front();
    for (const auto& [v, cost] : adjacency_[u]) {
      if (dist[v] < 0) {
        dist[v] = dist[u] + 1;
        queue.push_back(v);
      }
    }
  }
  return dist;
}

bool Topology::connected() const {
  if (names_.empty()) return true;
  const auto dist = hop_distances(0);
  return std::none_of(dist.begin(), dist.end(), [](int d) { return d < 0; });
}

}  // namespace qdv
