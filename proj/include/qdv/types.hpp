#pragma once

#include <cstdint>
#include <limits>

namespace qdv {

/// Index of a node in declaration order of its topology.
using NodeId = std::uint32_t;
inline constexpr NodeId kNoNode = std::numeric_limits<NodeId>::max();

using Tick = std::uint64_t;

}  // namespace qdv
