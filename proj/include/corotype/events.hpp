#pragma once

// Trace events: one record per fired composition rule, with complexity
// accounting before and after the step.

#include "corotype/match.hpp"

#include <cstddef>
#include <optional>
#include <string>

namespace corotype {

enum class RuleId {
  R1Cleanup,          // remove a fully drained <void ; void> instance
  R2TerminalSingle,   // single survivor (or empty list) becomes the result
  R3Yield,            // pop the head of a yielding part into the pending slot
  R4YieldCoroutine,   // a yielded coroutine joins the list after its yielder
  R5TerminalDeadlock, // nothing can receive or yield; residual result
  R6Resume,           // the pending type resumes the first matching receiver
  R7External,         // nobody can receive the pending type; append to E
  R8ConsumeCoroutine, // a coroutine-shaped demand consumes another instance
  StarRestore,        // a drained starred instance restores its original form
};

inline const char* rule_name(RuleId id) {
  switch (id) {
    case RuleId::R1Cleanup: return "R1-cleanup";
    case RuleId::R2TerminalSingle: return "R2-terminal-single";
    case RuleId::R3Yield: return "R3-yield";
    case RuleId::R4YieldCoroutine: return "R4-yield-coroutine";
    case RuleId::R5TerminalDeadlock: return "R5-terminal-deadlock";
    case RuleId::R6Resume: return "R6-resume";
    case RuleId::R7External: return "R7-external";
    case RuleId::R8ConsumeCoroutine: return "R8-consume-coroutine";
    case RuleId::StarRestore: return "STAR-restore";
  }
  return "?";
}

// Indices are positions in theta at the moment the rule fired, before
// any removal or insertion. actorIndex is the instance the rule acted
// on (yielder, cleaned-up or restored instance, R8 receiver);
// receiverIndex is the resumed instance for R6 and the consumed
// instance for R8. payloadComplexity carries x for the complexity
// bounds: the yielded type for R3, the consumed pending type for R6,
// the consumed instance for R8.
//
// groundStep marks steps the complexity bounds cover: bindings are
// empty and nothing was expanded from a label reference.
struct TraceEvent {
  RuleId ruleId = RuleId::R1Cleanup;
  std::optional<std::size_t> actorIndex;
  std::optional<std::size_t> receiverIndex;
  std::string actorName, receiverName;
  Bindings bindings;
  std::uint64_t complexityBefore = 0;
  std::uint64_t complexityAfter = 0;
  bool groundStep = true;
  std::uint64_t payloadComplexity = 0;
};

}  // namespace corotype
