#include "qdv/trace.hpp"

#include "qdv/errors.hpp"

namespace qdv {

std::string to_json_line(const TraceRecord& record) {
  Json line;
  line["tick"] = record.tick;
  line["seq"] = record.seq;
  line["event"] = record.event;
  line["actor"] = record.actor;
  line["kind"] = record.kind;
  line["data"] = record.data;
  return line.dump();
}

void TraceLog::append(NodeId actor, std::string kind, Json data) {
  records_.push_back({tick_, records_.size(), event_, name(actor), std::move(kind), std::move(data)});
}

void TraceLog::append_global(std::string kind, Json data) {
  records_.push_back({tick_, records_.size(), event_, "", std::move(kind), std::move(data)});
}

std::string TraceLog::name(NodeId id) const {
  if (names_.empty()) return "#" + std::to_string(id);
  if (id >= names_.size()) throw InputError("node id " + std::to_string(id) + " has no name");
  return names_[id];
}

}  // namespace qdv
