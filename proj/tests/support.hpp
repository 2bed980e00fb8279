#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "qdv/random_stream.hpp"
#include "qdv/scenario.hpp"
#include "qdv/simulator.hpp"
#include "qdv/topology.hpp"

namespace qdv::test {

inline constexpr long kUnreachable = std::numeric_limits<long>::max() / 4;

// All-pairs shortest paths, written without any of the library's routing code.
inline std::vector<std::vector<long>> floyd_warshall(const Topology& t) {
  const std::size_t n = t.size();
  std::vector<std::vector<long>> d(n, std::vector<long>(n, kUnreachable));
  for (std::size_t i = 0; i < n; ++i) d[i][i] = 0;
  for (const auto& l : t.links()) {
    d[l.a][l.b] = std::min<long>(d[l.a][l.b], l.cost);
    d[l.b][l.a] = std::min<long>(d[l.b][l.a], l.cost);
  }
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (d[i][k] + d[k][j] < d[i][j]) d[i][j] = d[i][k] + d[k][j];
  return d;
}

inline long hop_diameter(const Topology& t) {
  Topology unit;
  for (const auto& name : t.names()) unit.add_node(name);
  for (const auto& l : t.links()) unit.add_link(l.a, l.b, 1);
  long best = 0;
  for (const auto& row : floyd_warshall(unit))
    for (long v : row)
      if (v < kUnreachable) best = std::max(best, v);
  return best;
}

inline std::vector<std::string> names_for(std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back("n" + std::to_string(i));
  return out;
}

inline Topology line(std::size_t n) {
  Topology t;
  for (const auto& name : names_for(n)) t.add_node(name);
  for (NodeId i = 1; i < n; ++i) t.add_link(i - 1, i);
  return t;
}

inline Topology ring(std::size_t n) {
  Topology t = line(n);
  t.add_link(static_cast<NodeId>(n - 1), 0);
  return t;
}

// Random spanning tree plus a few chords. Connected by construction.
inline Topology random_connected(RandomStream& rng, std::size_t n, std::uint32_t max_cost = 1) {
  Topology t;
  for (const auto& name : names_for(n)) t.add_node(name);
  auto cost = [&] { return static_cast<std::uint32_t>(1 + rng.next_u64() % max_cost); };
  for (NodeId i = 1; i < n; ++i) t.add_link(static_cast<NodeId>(rng.next_u64() % i), i, cost());
  const std::size_t chords = rng.next_u64() % (n + 1);
  for (std::size_t c = 0; c < chords; ++c) {
    const auto a = static_cast<NodeId>(rng.next_u64() % n);
    const auto b = static_cast<NodeId>(rng.next_u64() % n);
    if (a != b && !t.cost(a, b)) t.add_link(a, b, cost());
  }
  return t;
}

inline std::string join(const std::vector<std::string>& parts, const char* sep = " ") {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? sep : "") + parts[i];
  return out;
}

// A-B-C-... line with one node_down.
inline std::string line_scenario(const std::vector<std::string>& names, const std::string& variant,
                                 std::uint64_t seed, int fail_tick, const std::string& victim,
                                 const std::string& extra_quantum = "") {
  std::ostringstream s;
  s << "[nodes]\n" << join(names) << "\n[links]\n";
  for (std::size_t i = 1; i < names.size(); ++i) s << names[i - 1] << ' ' << names[i] << '\n';
  s << "[protocol]\nvariant = " << variant << "\nseed = " << seed << "\nmax_rounds = 400\n";
  s << "[failures]\n" << fail_tick << " node_down " << victim << '\n';
  if (!extra_quantum.empty()) s << "[quantum]\n" << extra_quantum << '\n';
  return s.str();
}

// A - W - N1 .. N(d-1) - G - X - Y: watcher W sits d hops from gateway G,
// with two nodes past the gateway.
inline std::string sentinel_chain(int d, const std::string& variant, std::uint64_t seed = 5,
                                  int fail_tick = 30) {
  std::vector<std::string> names{"A", "W"};
  for (int i = 1; i < d; ++i) names.push_back("N" + std::to_string(i));
  names.insert(names.end(), {"G", "X", "Y"});
  std::ostringstream s;
  s << "[nodes]\n" << join(names) << "\n[links]\n";
  for (std::size_t i = 1; i < names.size(); ++i) s << names[i - 1] << ' ' << names[i] << '\n';
  s << "[protocol]\nvariant = " << variant << "\nseed = " << seed << "\nmax_rounds = 400\n";
  s << "[failures]\n" << fail_tick << " node_down A\n";
  s << "[quantum]\nwatched = A\nwatchers = W\ngateways = G\n";
  return s.str();
}

// Tail A hanging off a B-C-D triangle.
inline std::string triangle_tail(const std::string& variant, std::uint64_t seed = 9) {
  return "[nodes]\nA B C D\n[links]\nA B\nB C\nB D\nC D\n[protocol]\nvariant = " + variant +
         "\nseed = " + std::to_string(seed) + "\nmax_rounds = 400\n[failures]\n20 node_down A\n";
}

inline const TraceRecord* first_of(const std::vector<TraceRecord>& trace, const std::string& kind) {
  for (const auto& r : trace)
    if (r.kind == kind) return &r;
  return nullptr;
}

}  // namespace qdv::test
