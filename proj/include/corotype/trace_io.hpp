#pragma once

// Trace rendering: a fixed-format text line per event, and a
// structured JSON object per event for machine consumption.

#include "corotype/audit.hpp"
#include "corotype/engine.hpp"
#include "corotype/syntax.hpp"

#include <json.hpp>

#include <sstream>
#include <string>
#include <vector>

namespace corotype {

inline std::string bindings_text(const Bindings& b) {
  if (b.is_bottom()) return "bottom";
  std::string out = "{";
  bool sep = false;
  for (const auto& [name, value] : b.types) {
    if (sep) out += ", ";
    out += name + "=" + print_type(value);
    sep = true;
  }
  for (const auto& [name, value] : b.lengths) {
    if (sep) out += ", ";
    out += name + "=" + print_length(value);
    sep = true;
  }
  return out + "}";
}

inline std::string trace_event_text(const TraceEvent& ev, std::size_t index) {
  std::ostringstream out;
  out << "step " << (index + 1) << ": " << rule_name(ev.ruleId);
  if (ev.actorIndex) out << " actor=" << ev.actorName;
  if (ev.receiverIndex) out << " recv=" << ev.receiverName;
  if (!ev.bindings.empty()) out << " bind=" << bindings_text(ev.bindings);
  out << " C " << ev.complexityBefore << "->" << ev.complexityAfter;
  return out.str();
}

inline std::string trace_text(const std::vector<TraceEvent>& trace) {
  std::string out;
  for (std::size_t i = 0; i < trace.size(); ++i) {
    out += trace_event_text(trace[i], i);
    out += '\n';
  }
  return out;
}

inline nlohmann::json trace_event_json(const TraceEvent& ev) {
  nlohmann::json types = nlohmann::json::object();
  nlohmann::json lengths = nlohmann::json::object();
  for (const auto& [name, value] : ev.bindings.types)
    types[name] = print_type(value);
  for (const auto& [name, value] : ev.bindings.lengths)
    lengths[name] = print_length(value);
  nlohmann::json j{
      {"ruleId", rule_name(ev.ruleId)},
      {"actorIndex", nullptr},
      {"receiverIndex", nullptr},
      {"bindings", {{"types", types}, {"lengths", lengths}}},
      {"complexityBefore", ev.complexityBefore},
      {"complexityAfter", ev.complexityAfter},
      {"groundStep", ev.groundStep},
      {"payloadComplexity", ev.payloadComplexity},
  };
  if (ev.actorIndex) {
    j["actorIndex"] = *ev.actorIndex;
    j["actorName"] = ev.actorName;
  }
  if (ev.receiverIndex) {
    j["receiverIndex"] = *ev.receiverIndex;
    j["receiverName"] = ev.receiverName;
  }
  return j;
}

// One JSON record per line.
inline std::string trace_ndjson(const std::vector<TraceEvent>& trace) {
  std::string out;
  for (const auto& ev : trace) {
    out += trace_event_json(ev).dump();
    out += '\n';
  }
  return out;
}

inline std::string audit_summary(const AuditReport& report) {
  std::ostringstream out;
  out << "audit: " << report.okCount << " ok, " << report.skippedCount
      << " skipped, " << report.oobCount << " out of bounds";
  return out.str();
}

inline std::string audit_entry_text(const AuditEntry& e) {
  std::ostringstream out;
  out << rule_name(e.rule) << " at step " << (e.eventIndex + 1);
  if (e.pairedIndex) out << " paired with step " << (*e.pairedIndex + 1);
  switch (e.verdict) {
    case AuditVerdict::Ok:
      out << ": ok, " << e.actual << " in [" << e.lo << ", " << e.hi << "]";
      break;
    case AuditVerdict::OutOfBounds:
      out << ": OUT OF BOUNDS, " << e.actual << " not in [" << e.lo << ", "
          << e.hi << "]";
      break;
    case AuditVerdict::SkippedNonground:
      out << ": skipped (" << e.note << ")";
      break;
  }
  return out.str();
}

}  // namespace corotype
