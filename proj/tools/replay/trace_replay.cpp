#include "trace_replay.hpp"

#include <limits>
#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace qdv::replay {
namespace {

using json = nlohmann::ordered_json;

struct Route {
  std::string next;  // empty when unreachable
  int metric = 0;
};

class Replayer {
 public:
  json run(std::istream& in) {
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const json r = json::parse(line);
      handle(r);
    }
    return summary();
  }

 private:
  int index(const std::string& name) const {
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      if (nodes_[i] == name) return static_cast<int>(i);
    }
    throw std::runtime_error("trace names unknown node '" + name + "'");
  }

  void handle(const json& r) {
    const std::string kind = r.at("kind");
    const std::string actor = r.at("actor");
    const json& d = r.at("data");
    if (kind == "scenario") {
      for (const auto& n : d.at("nodes")) nodes_.push_back(n);
      const std::size_t n = nodes_.size();
      cost_.assign(n, std::vector<long long>(n, 0));
      for (const auto& l : d.at("links")) {
        const int a = index(l[0]);
        const int b = index(l[1]);
        cost_[a][b] = cost_[b][a] = l[2].get<long long>();
      }
      up_.assign(n, true);
      tables_.assign(n, {});
      entries_per_dest_.assign(n, 0);
      max_after_.assign(n, -1);
      max_finite_after_.assign(n, -1);
      variant_ = d.at("variant");
      seed_ = d.at("seed");
      infinity_ = d.at("infinity");
    } else if (kind == "node_down") {
      topology_change();
      const int x = index(actor);
      up_[x] = false;
      for (std::size_t y = 0; y < nodes_.size(); ++y) cost_[x][y] = cost_[y][x] = 0;
    } else if (kind == "link_down") {
      topology_change();
      const int a = index(d.at("a"));
      const int b = index(d.at("b"));
      cost_[a][b] = cost_[b][a] = 0;
    } else if (kind == "round_begin") {
      ++rounds_;
      ++rounds_since_change_;
    } else if (kind == "message") {
      ++messages_;
      for (const auto& item : d.at("items")) {
        ++entries_;
        ++entries_per_dest_[index(item[0])];
      }
    } else if (kind == "recv") {
      ++received_;
    } else if (kind == "route") {
      const int owner = index(actor);
      const int dest = index(d.at("dest"));
      const int metric = d.at("metric");
      const bool finite = !d.at("next_hop").is_null();
      tables_[owner][dest] = {finite ? d.at("next_hop").get<std::string>() : "", metric};
      if (after_failure_) {
        max_after_[dest] = std::max(max_after_[dest], metric);
        if (finite) {
          max_finite_after_[dest] = std::max(max_finite_after_[dest], metric);
          if (!connected(owner, dest)) loop_ = true;
        }
      }
    } else if (kind == "round_end") {
      if (after_failure_ && cycle()) loop_ = true;
      converged_ = converged();
      if (converged_ && !rtc_) rtc_ = rounds_since_change_;
    } else if (kind == "run_end") {
      termination_ = d.at("termination");
    } else if (kind == "pair_alloc") {
      status_[d.at("pair").get<std::uint64_t>()] = 'f';
      ++allocated_;
      sentinel_pair_[d.at("pair").get<std::uint64_t>()] = d.at("purpose").at("kind") == "sentinel";
    } else if (kind == "pair_flag") {
      const auto id = d.at("pair").get<std::uint64_t>();
      status_[id] = 'F';
      ++flagged_;
      if (sentinel_pair_[id] && !first_flag_) first_flag_ = r.at("event").get<std::uint64_t>();
    } else if (kind == "pair_probe") {
      status_[d.at("pair").get<std::uint64_t>()] = 'c';
      ++probed_;
    } else if (kind == "pair_erase") {
      status_[d.at("pair").get<std::uint64_t>()] = 'e';
      ++erased_;
    } else if (kind == "region_down") {
      if (!region_down_) region_down_ = r.at("event").get<std::uint64_t>();
    }
  }

  void topology_change() {
    after_failure_ = true;
    rounds_since_change_ = 0;
    rtc_.reset();
  }

  bool connected(int from, int to) const {
    std::vector<bool> seen(nodes_.size(), false);
    std::vector<int> stack{from};
    seen[from] = true;
    while (!stack.empty()) {
      const int u = stack.back();
      stack.pop_back();
      if (u == to) return true;
      for (std::size_t v = 0; v < nodes_.size(); ++v) {
        if (cost_[u][v] > 0 && !seen[v]) {
          seen[v] = true;
          stack.push_back(static_cast<int>(v));
        }
      }
    }
    return false;
  }

  bool cycle() const {
    const int n = static_cast<int>(nodes_.size());
    for (int dest = 0; dest < n; ++dest) {
      for (int start = 0; start < n; ++start) {
        std::set<int> seen;
        int cur = start;
        while (cur != dest && up_[cur]) {
          if (!seen.insert(cur).second) return true;
          const auto it = tables_[cur].find(dest);
          if (it == tables_[cur].end() || it->second.next.empty()) break;
          cur = index(it->second.next);
        }
      }
    }
    return false;
  }

  bool converged() const {
    const int n = static_cast<int>(nodes_.size());
    constexpr long long kFar = std::numeric_limits<long long>::max() / 4;
    std::vector<std::vector<long long>> dist(n, std::vector<long long>(n, kFar));
    for (int i = 0; i < n; ++i) {
      dist[i][i] = 0;
      for (int j = 0; j < n; ++j) {
        if (cost_[i][j] > 0) dist[i][j] = cost_[i][j];
      }
    }
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          if (dist[i][k] + dist[k][j] < dist[i][j]) dist[i][j] = dist[i][k] + dist[k][j];

    for (int s = 0; s < n; ++s) {
      if (!up_[s]) continue;
      for (int d = 0; d < n; ++d) {
        if (d == s) continue;
        const bool want = dist[s][d] < infinity_;
        const auto it = tables_[s].find(d);
        const bool have = it != tables_[s].end() && !it->second.next.empty();
        if (want != have) return false;
        if (!want) continue;
        if (it->second.metric != dist[s][d]) return false;
        const int hop = index(it->second.next);
        if (cost_[s][hop] == 0 || cost_[s][hop] + dist[hop][d] != dist[s][d]) return false;
      }
    }
    return true;
  }

  json summary() const {
    json j;
    j["variant"] = variant_;
    j["seed"] = seed_;
    j["rounds"] = rounds_;
    j["converged"] = converged_;
    j["rounds_to_convergence"] = rtc_ ? json(*rtc_) : json(nullptr);
    j["termination"] = termination_;
    j["total_messages"] = messages_;
    j["messages_received"] = received_;
    j["total_update_entries"] = entries_;
    json per_dest = json::object();
    json max_m = json::object();
    json max_f = json::object();
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      per_dest[nodes_[i]] = entries_per_dest_[i];
      if (max_after_[i] >= 0) max_m[nodes_[i]] = max_after_[i];
      if (max_finite_after_[i] >= 0) max_f[nodes_[i]] = max_finite_after_[i];
    }
    j["update_entries_per_dest"] = per_dest;
    j["max_metric_after_failure"] = max_m;
    j["max_finite_metric_after_failure"] = max_f;
    j["loop_detected"] = loop_;
    std::uint64_t fresh = 0;
    std::uint64_t flagged = 0;
    for (const auto& [id, s] : status_) {
      if (s == 'f') ++fresh;
      if (s == 'F') ++flagged;
    }
    j["pairs"] = {{"allocated", allocated_}, {"flagged", flagged_}, {"probed", probed_},
                  {"erased", erased_},       {"live_fresh", fresh}, {"live_flagged", flagged}};
    if (first_flag_ && region_down_ && *region_down_ >= *first_flag_) {
      j["notification_latency_events"] = *region_down_ - *first_flag_;
    } else {
      j["notification_latency_events"] = nullptr;
    }
    return j;
  }

  std::vector<std::string> nodes_;
  std::vector<std::vector<long long>> cost_;
  std::vector<bool> up_;
  std::vector<std::map<int, Route>> tables_;
  std::string variant_;
  std::uint64_t seed_ = 0;
  long long infinity_ = 16;
  std::string termination_;

  std::uint64_t rounds_ = 0;
  std::uint64_t rounds_since_change_ = 0;
  std::optional<std::uint64_t> rtc_;
  bool converged_ = false;
  bool after_failure_ = false;
  bool loop_ = false;
  std::uint64_t messages_ = 0;
  std::uint64_t received_ = 0;
  std::uint64_t entries_ = 0;
  std::vector<std::uint64_t> entries_per_dest_;
  std::vector<int> max_after_;
  std::vector<int> max_finite_after_;

  std::map<std::uint64_t, char> status_;
  std::map<std::uint64_t, bool> sentinel_pair_;
  std::uint64_t allocated_ = 0;
  std::uint64_t flagged_ = 0;
  std::uint64_t probed_ = 0;
  std::uint64_t erased_ = 0;
  std::optional<std::uint64_t> first_flag_;
  std::optional<std::uint64_t> region_down_;
};

}  // namespace

nlohmann::ordered_json replay_metrics(std::istream& trace_lines) { return Replayer{}.run(trace_lines); }

}  // namespace qdv::replay
