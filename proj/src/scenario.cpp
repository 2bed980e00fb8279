#include "qdv/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

#include "qdv/errors.hpp"

namespace qdv {

const char* to_string(ProtocolVariant v) {
  switch (v) {
    case ProtocolVariant::Plain: return "plain";
    case ProtocolVariant::SplitHorizon: return "split_horizon";
    case ProtocolVariant::PoisonedReverse: return "poisoned_reverse";
    case ProtocolVariant::GatewaySentinel: return "gateway_sentinel";
    case ProtocolVariant::EntangledHandshake: return "entangled_handshake";
  }
  return "?";
}

std::optional<ProtocolVariant> parse_protocol_variant(std::string_view text) {
  for (auto v : {ProtocolVariant::Plain, ProtocolVariant::SplitHorizon, ProtocolVariant::PoisonedReverse,
                 ProtocolVariant::GatewaySentinel, ProtocolVariant::EntangledHandshake}) {
    if (text == to_string(v)) return v;
  }
  return std::nullopt;
}

const char* to_string(Timing t) { return t == Timing::Synchronous ? "synchronous" : "asynchronous"; }

Variant ScenarioConfig::classical_variant() const {
  switch (variant) {
    case ProtocolVariant::Plain: return Variant::Plain;
    case ProtocolVariant::SplitHorizon: return Variant::SplitHorizon;
    case ProtocolVariant::PoisonedReverse: return Variant::PoisonedReverse;
    case ProtocolVariant::GatewaySentinel: return base_variant.value_or(Variant::PoisonedReverse);
    case ProtocolVariant::EntangledHandshake: return base_variant.value_or(Variant::Plain);
  }
  return Variant::Plain;
}

void ScenarioConfig::validate() const {
  if (topology.size() == 0) throw InputError("scenario has no nodes");
  if (infinity < 2) throw InputError("infinity must be at least 2");
  if (exchange_period == 0) throw InputError("exchange_period must be positive");
  if (detect_after == 0) throw InputError("detect_after must be positive");
  if (max_rounds == 0) throw InputError("max_rounds must be at least 1");
  if (replenish_period == 0) throw InputError("replenish_period must be positive");
  if (replenish_batch == 0) throw InputError("replenish_batch must be positive");
  if (!(erasure_rate >= 0.0 && erasure_rate <= 1.0)) throw InputError("erasure_rate must be in [0, 1]");
  if (probe.probes_per_check == 0) throw InputError("probes_per_check must be positive");
  for (const auto& f : failures) {
    if (f.a >= topology.size()) throw InputError("failure references an unknown node");
    if (f.kind == FailureEvent::Kind::LinkDown) {
      if (f.b >= topology.size() || !topology.cost(f.a, f.b)) {
        throw InputError("link_down references a link that does not exist");
      }
    }
  }
  if (variant == ProtocolVariant::GatewaySentinel && !sentinel) {
    throw InputError("gateway_sentinel needs watched, watchers and gateways in [quantum]");
  }
}

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_words(std::string_view s) {
  std::vector<std::string> out;
  std::istringstream in{std::string(s)};
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

template <typename T>
T parse_unsigned(std::string_view text, int line, std::string_view field) {
  T value{};
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (text.empty() || text.front() == '-' || ec != std::errc{} || ptr != end) {
    throw ParseError(line, "field '" + std::string(field) + "': expected a non-negative integer, got '" +
                               std::string(text) + "'");
  }
  return value;
}

double parse_rate(std::string_view text, int line, std::string_view field) {
  try {
    std::size_t used = 0;
    const double v = std::stod(std::string(text), &used);
    if (used != text.size()) throw std::invalid_argument("trailing");
    if (!(v >= 0.0 && v <= 1.0)) throw std::out_of_range("range");
    return v;
  } catch (const std::exception&) {
    throw ParseError(line, "field '" + std::string(field) + "': expected a probability in [0, 1], got '" +
                               std::string(text) + "'");
  }
}

struct Pending {
  int line;
  std::string key;
  std::string value;
};

class Parser {
 public:
  ScenarioConfig parse(std::string_view text) {
    std::string section;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
      const auto nl = text.find('\n', pos);
      std::string_view raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
      pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
      ++line_no;
      if (const auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
      const std::string_view line = trim(raw);
      if (line.empty()) continue;
      if (line.front() == '[') {
        if (line.back() != ']') throw ParseError(line_no, "unterminated section header");
        section = std::string(trim(line.substr(1, line.size() - 2)));
        static const std::set<std::string> known{"nodes", "links", "protocol", "failures", "quantum"};
        if (!known.contains(section)) throw ParseError(line_no, "unknown section [" + section + "]");
        continue;
      }
      if (section.empty()) throw ParseError(line_no, "content before the first section");
      if (section == "nodes") {
        for (const auto& name : split_words(line)) {
          if (cfg_.topology.find(name)) throw ParseError(line_no, "duplicate node '" + name + "'");
          cfg_.topology.add_node(name);
        }
      } else if (section == "links") {
        links_.push_back({line_no, split_words(line)});
      } else if (section == "failures") {
        failures_.push_back({line_no, split_words(line)});
      } else {
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ParseError(line_no, "expected 'key = value'");
        const std::string key(trim(line.substr(0, eq)));
        const std::string value(trim(line.substr(eq + 1)));
        if (key.empty()) throw ParseError(line_no, "missing key before '='");
        auto& bucket = section == "protocol" ? protocol_ : quantum_;
        if (bucket.contains(key)) throw ParseError(line_no, "field '" + key + "' given twice");
        bucket[key] = {line_no, key, value};
      }
    }
    build_links();
    build_protocol();
    build_failures();
    build_quantum();
    try {
      cfg_.validate();
    } catch (const InputError& e) {
      throw ParseError(line_no, e.what());
    }
    return std::move(cfg_);
  }

 private:
  NodeId node(const std::string& name, int line, std::string_view field) const {
    const auto id = cfg_.topology.find(name);
    if (!id) {
      throw ParseError(line, "field '" + std::string(field) + "': unknown node '" + name + "'");
    }
    return *id;
  }

  void build_links() {
    for (const auto& [line, words] : links_) {
      if (words.size() != 2 && words.size() != 3) throw ParseError(line, "expected '<node> <node> [cost]'");
      const NodeId a = node(words[0], line, "links");
      const NodeId b = node(words[1], line, "links");
      const auto cost = words.size() == 3 ? parse_unsigned<std::uint32_t>(words[2], line, "cost") : 1U;
      try {
        cfg_.topology.add_link(a, b, cost);
      } catch (const InputError& e) {
        throw ParseError(line, e.what());
      }
    }
  }

  void build_protocol() {
    for (const auto& [key, p] : protocol_) {
      if (key == "variant") {
        const auto v = parse_protocol_variant(p.value);
        if (!v) throw ParseError(p.line, "field 'variant': unknown variant '" + p.value + "'");
        cfg_.variant = *v;
      } else if (key == "infinity") {
        cfg_.infinity = parse_unsigned<int>(p.value, p.line, key);
        if (cfg_.infinity < 2) throw ParseError(p.line, "field 'infinity': must be at least 2");
      } else if (key == "exchange_period") {
        cfg_.exchange_period = parse_unsigned<Tick>(p.value, p.line, key);
      } else if (key == "detect_after") {
        cfg_.detect_after = parse_unsigned<std::uint32_t>(p.value, p.line, key);
      } else if (key == "timing") {
        if (p.value == "synchronous") cfg_.timing = Timing::Synchronous;
        else if (p.value == "asynchronous") cfg_.timing = Timing::Asynchronous;
        else throw ParseError(p.line, "field 'timing': expected synchronous or asynchronous");
      } else if (key == "seed") {
        cfg_.seed = parse_unsigned<std::uint64_t>(p.value, p.line, key);
      } else if (key == "max_rounds") {
        cfg_.max_rounds = parse_unsigned<std::uint32_t>(p.value, p.line, key);
      } else {
        throw ParseError(p.line, "unknown field '" + key + "' in [protocol]");
      }
    }
  }

  void build_failures() {
    for (const auto& [line, words] : failures_) {
      if (words.size() < 3) throw ParseError(line, "expected '<tick> node_down <node>' or '<tick> link_down <a> <b>'");
      FailureEvent f;
      f.tick = parse_unsigned<Tick>(words[0], line, "tick");
      if (words[1] == "node_down" && words.size() == 3) {
        f.kind = FailureEvent::Kind::NodeDown;
        f.a = node(words[2], line, "node_down");
      } else if (words[1] == "link_down" && words.size() == 4) {
        f.kind = FailureEvent::Kind::LinkDown;
        f.a = node(words[2], line, "link_down");
        f.b = node(words[3], line, "link_down");
        if (f.a > f.b) std::swap(f.a, f.b);
        if (!cfg_.topology.cost(f.a, f.b)) throw ParseError(line, "link_down: no such link");
      } else {
        throw ParseError(line, "unknown failure '" + words[1] + "'");
      }
      cfg_.failures.push_back(f);
    }
    std::stable_sort(cfg_.failures.begin(), cfg_.failures.end(), [](const auto& x, const auto& y) {
      return std::tuple(x.tick, x.kind, x.a, x.b) < std::tuple(y.tick, y.kind, y.a, y.b);
    });
  }

  std::vector<NodeId> node_list(const Pending& p) const {
    std::vector<NodeId> out;
    std::string text = p.value;
    std::replace(text.begin(), text.end(), ',', ' ');
    for (const auto& w : split_words(text)) out.push_back(node(w, p.line, p.key));
    if (out.empty()) throw ParseError(p.line, "field '" + p.key + "': empty node list");
    return out;
  }

  void build_quantum() {
    SentinelConfig sentinel;
    bool any_sentinel = false;
    for (const auto& [key, p] : quantum_) {
      if (key == "watched") {
        const auto list = node_list(p);
        if (list.size() != 1) throw ParseError(p.line, "field 'watched': exactly one node");
        sentinel.watched = list.front();
        any_sentinel = true;
      } else if (key == "watchers") {
        sentinel.watchers = node_list(p);
        any_sentinel = true;
      } else if (key == "gateways") {
        sentinel.gateways = node_list(p);
        any_sentinel = true;
      } else if (key == "pairs_per_link") {
        sentinel.pairs_per_watcher_gateway = parse_unsigned<std::uint32_t>(p.value, p.line, key);
      } else if (key == "poll_period") {
        sentinel.poll_period = parse_unsigned<Tick>(p.value, p.line, key);
      } else if (key == "replenish_period") {
        cfg_.replenish_period = parse_unsigned<Tick>(p.value, p.line, key);
      } else if (key == "replenish_batch") {
        cfg_.replenish_batch = parse_unsigned<std::uint32_t>(p.value, p.line, key);
      } else if (key == "handshake_pairs") {
        cfg_.handshake.pairs_per_entry = parse_unsigned<std::uint32_t>(p.value, p.line, key);
      } else if (key == "erasure_rate") {
        cfg_.erasure_rate = parse_rate(p.value, p.line, key);
      } else if (key == "probe_mode") {
        const auto m = parse_probe_mode(p.value);
        if (!m) throw ParseError(p.line, "field 'probe_mode': expected expectation or sampled");
        cfg_.probe.mode = *m;
      } else if (key == "probes_per_check") {
        cfg_.probe.probes_per_check = parse_unsigned<std::uint32_t>(p.value, p.line, key);
      } else if (key == "base_variant") {
        const auto v = parse_variant(p.value);
        if (!v) throw ParseError(p.line, "field 'base_variant': unknown variant '" + p.value + "'");
        cfg_.base_variant = *v;
      } else {
        throw ParseError(p.line, "unknown field '" + key + "' in [quantum]");
      }
    }
    if (any_sentinel) {
      const int line = quantum_.begin()->second.line;
      if (sentinel.watched == kNoNode || sentinel.watchers.empty() || sentinel.gateways.empty()) {
        throw ParseError(line, "sentinel needs watched, watchers and gateways");
      }
      try {
        // Constructing the protocol runs every sentinel invariant check.
        EntanglementRegistry scratch;
        RandomStream rng(0);
        GatewaySentinel check(sentinel, cfg_.topology, cfg_.infinity, scratch, nullptr, cfg_.probe, rng);
      } catch (const InputError& e) {
        throw ParseError(line, e.what());
      }
      cfg_.sentinel = sentinel;
    }
  }

  ScenarioConfig cfg_;
  std::vector<std::pair<int, std::vector<std::string>>> links_;
  std::vector<std::pair<int, std::vector<std::string>>> failures_;
  std::map<std::string, Pending> protocol_;
  std::map<std::string, Pending> quantum_;
};

}  // namespace

ScenarioConfig load_scenario(std::string_view text) { return Parser{}.parse(text); }

ScenarioConfig load_scenario_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read scenario file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_scenario(buf.str());
}

}  // namespace qdv
