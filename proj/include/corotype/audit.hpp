#pragma once

// Runtime auditor for the complexity bounds of the composition rules.
//
// Each bound describes a paired transition: a yield together with the
// step that consumes the yielded type, a coroutine yield on its own, a
// coroutine consumption, or the deadlock terminal. Writing p for the
// total complexity before the transition and x for the complexity of
// the moved payload, the audited intervals are
//
//   yield + resume     [p - 2 - 2x, p - 2x]
//   yield + external   [p - 1,      p]
//   yield-coroutine    [p - 1,      p]
//   consume-coroutine  [p - 2x - 1, p - 2x]
//   deadlock terminal  exactly p
//
// Only ground steps are bounded; transitions that bind variables,
// expand label references, or restore a starred instance may move the
// complexity arbitrarily and are logged as skipped.

#include "corotype/events.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace corotype {

enum class AuditVerdict { Ok, OutOfBounds, SkippedNonground };

struct AuditEntry {
  std::size_t eventIndex = 0;
  std::optional<std::size_t> pairedIndex;
  RuleId rule = RuleId::R3Yield;
  AuditVerdict verdict = AuditVerdict::Ok;
  long long lo = 0, hi = 0, actual = 0;
  std::string note;
};

struct AuditReport {
  std::vector<AuditEntry> entries;
  std::size_t okCount = 0, oobCount = 0, skippedCount = 0;
  bool all_ok() const { return oobCount == 0; }
};

// Checks one (paired) transition against its bound interval.
// When pairedWith is present its complexityAfter closes the transition;
// it must already reflect any cleanup that completes the step (see
// audit_trace, which folds trailing cleanup events into the pair).
inline AuditVerdict audit_delta(const TraceEvent& event,
                                const std::optional<TraceEvent>& pairedWith,
                                AuditEntry* detail = nullptr) {
  AuditEntry entry;
  entry.rule = event.ruleId;

  const long long p = static_cast<long long>(event.complexityBefore);
  const TraceEvent& closing = pairedWith ? *pairedWith : event;
  entry.actual = static_cast<long long>(closing.complexityAfter);

  bool ground = event.groundStep && event.bindings.empty() &&
                closing.groundStep && closing.bindings.empty();

  auto finish = [&](AuditVerdict v, std::string note) {
    entry.verdict = v;
    entry.note = std::move(note);
    if (detail) *detail = entry;
    return v;
  };

  switch (event.ruleId) {
    case RuleId::R3Yield: {
      if (!pairedWith)
        return finish(AuditVerdict::SkippedNonground, "unconsumed yield");
      const long long x = static_cast<long long>(event.payloadComplexity);
      if (pairedWith->ruleId == RuleId::R6Resume) {
        if (!ground)
          return finish(AuditVerdict::SkippedNonground, "non-ground resume");
        entry.lo = p - 2 - 2 * x;
        entry.hi = p - 2 * x;
      } else if (pairedWith->ruleId == RuleId::R7External) {
        if (!ground)
          return finish(AuditVerdict::SkippedNonground, "non-ground step");
        entry.lo = p - 1;
        entry.hi = p;
      } else {
        return finish(AuditVerdict::SkippedNonground, "unexpected pairing");
      }
      break;
    }
    case RuleId::R4YieldCoroutine:
      if (!ground)
        return finish(AuditVerdict::SkippedNonground, "reference expansion");
      entry.lo = p - 1;
      entry.hi = p;
      break;
    case RuleId::R8ConsumeCoroutine: {
      if (!ground)
        return finish(AuditVerdict::SkippedNonground, "non-ground consume");
      const long long x = static_cast<long long>(event.payloadComplexity);
      entry.lo = p - 2 * x - 1;
      entry.hi = p - 2 * x;
      break;
    }
    case RuleId::R5TerminalDeadlock:
      entry.lo = p;
      entry.hi = p;
      break;
    case RuleId::StarRestore:
      return finish(AuditVerdict::SkippedNonground, "starred restoration");
    default:
      return finish(AuditVerdict::SkippedNonground, "not audited");
  }

  if (entry.actual < entry.lo || entry.actual > entry.hi)
    return finish(AuditVerdict::OutOfBounds, "delta outside interval");
  return finish(AuditVerdict::Ok, "");
}

// Walks a trace, pairs every yield with the step that consumed it,
// folds trailing cleanup into each transition, and checks the bounds.
inline AuditReport audit_trace(const std::vector<TraceEvent>& trace) {
  AuditReport report;

  auto fold_cleanup = [&](std::size_t from, TraceEvent& closing) {
    // A transition is complete once the drained instances it produced
    // are swept; restoration is not bounded and taints the pair.
    std::size_t j = from;
    while (j < trace.size() && (trace[j].ruleId == RuleId::R1Cleanup ||
                                trace[j].ruleId == RuleId::StarRestore)) {
      if (trace[j].ruleId == RuleId::StarRestore) closing.groundStep = false;
      closing.complexityAfter = trace[j].complexityAfter;
      ++j;
    }
  };

  auto add = [&](const TraceEvent& ev, std::size_t index,
                 std::optional<TraceEvent> closing,
                 std::optional<std::size_t> pairedIndex) {
    AuditEntry entry;
    audit_delta(ev, closing, &entry);
    entry.eventIndex = index;
    entry.pairedIndex = pairedIndex;
    switch (entry.verdict) {
      case AuditVerdict::Ok: ++report.okCount; break;
      case AuditVerdict::OutOfBounds: ++report.oobCount; break;
      case AuditVerdict::SkippedNonground: ++report.skippedCount; break;
    }
    report.entries.push_back(std::move(entry));
  };

  for (std::size_t i = 0; i < trace.size(); ++i) {
    const TraceEvent& ev = trace[i];
    switch (ev.ruleId) {
      case RuleId::R3Yield: {
        if (i + 1 >= trace.size()) {
          add(ev, i, std::nullopt, std::nullopt);
          break;
        }
        TraceEvent closing = trace[i + 1];
        fold_cleanup(i + 2, closing);
        add(ev, i, closing, i + 1);
        break;
      }
      case RuleId::R4YieldCoroutine:
      case RuleId::R8ConsumeCoroutine: {
        TraceEvent closing = ev;
        fold_cleanup(i + 1, closing);
        add(ev, i, closing, std::nullopt);
        break;
      }
      case RuleId::R5TerminalDeadlock:
        add(ev, i, std::nullopt, std::nullopt);
        break;
      default:
        break;  // R1, R2, R6, R7 and restores belong to other pairs
    }
  }
  return report;
}

}  // namespace corotype
