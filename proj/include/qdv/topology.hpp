#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qdv/types.hpp"

namespace qdv {

struct Link {
  NodeId a = kNoNode;
  NodeId b = kNoNode;
  std::uint32_t cost = 1;
};

/// Undirected graph with named nodes and positive integer link costs.
class Topology {
 public:
  NodeId add_node(const std::string& name);
  void add_link(NodeId a, NodeId b, std::uint32_t cost = 1);
  bool remove_link(NodeId a, NodeId b);
  /// Drops every link touching `n`; the node itself stays.
  void isolate(NodeId n);

  std::size_t size() const noexcept { return names_.size(); }
  const std::vector<std::string>& names() const noexcept { return names_; }
  const std::string& name(NodeId n) const { return names_.at(n); }
  std::optional<NodeId> find(const std::string& name) const;

  /// Sorted by id.
  std::vector<NodeId> neighbors(NodeId n) const;
  std::optional<std::uint32_t> cost(NodeId a, NodeId b) const;
  std::vector<Link> links() const;

  /// Hop counts from `source` (unit weights); -1 where unreachable.
  std::vector<int> hop_distances(NodeId source) const;
  bool connected() const;

 private:
  void check(NodeId n) const;

  std::vector<std::string> names_;
  std::vector<std::map<NodeId, std::uint32_t>> adjacency_;
};

}  // namespace qdv
