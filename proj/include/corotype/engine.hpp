#pragma once

// The compose engine. State is a pending type, the external yields E,
// and the ordered coroutine list theta. One rule fires per step, picked
// by a fixed precedence:
//
//   pending present:  R6 resume, else R7 external
//   pending absent:   R1 cleanup/restore, R2 terminal (single survivor
//                     or empty list), R8 consume-coroutine, R4
//                     yield-coroutine, R3 yield, R5 deadlock terminal
//
// Consumption of a pending type always precedes cleanup, so a starred
// instance drained while a yield is in flight is only restored after
// that yield found its receiver. Scans run from index 0 upward, which
// makes composition deterministic.

#include "corotype/audit.hpp"
#include "corotype/events.hpp"
#include "corotype/program.hpp"

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace corotype {

struct ComposeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// One live coroutine under composition. current is always a coroutine
// node; original keeps the declared form so a starred instance can
// restore itself with fresh variable names.
struct CoroutineInstance {
  TypePtr current;
  TypePtr original;
  std::optional<std::string> label;
  bool starred = false;
  std::uint64_t instanceId = 0;

  std::string display_name() const {
    return (label ? *label : std::string()) + "#" + std::to_string(instanceId);
  }
};

struct ComposeState {
  TypePtr pending = t_void();
  std::vector<TypePtr> external;
  std::vector<CoroutineInstance> theta;
  std::uint64_t stepsTaken = 0;
  FreshSource fresh;
  std::uint64_t nextInstanceId = 0;
  std::map<std::string, Declaration> labelTable;
};

inline std::uint64_t complexity(const ComposeState& state) {
  std::uint64_t sum = 0;
  for (const auto& e : state.external) sum += complexity(e);
  for (const auto& inst : state.theta) sum += complexity(inst.current);
  return sum;
}

// Leftmost element of theta satisfying the predicate, together with
// the elements before and after it. When nothing matches, `before` is
// the whole list and `after` is empty.
struct FirstResult {
  std::optional<CoroutineInstance> found;
  std::optional<std::size_t> index;
  std::vector<CoroutineInstance> before, after;
};

template <typename Pred>
FirstResult first(const std::vector<CoroutineInstance>& theta, Pred&& pred) {
  FirstResult r;
  for (std::size_t i = 0; i < theta.size(); ++i) {
    if (pred(theta[i])) {
      r.found = theta[i];
      r.index = i;
      r.before.assign(theta.begin(), theta.begin() + i);
      r.after.assign(theta.begin() + i + 1, theta.end());
      return r;
    }
  }
  r.before = theta;
  return r;
}

struct StepResult {
  TraceEvent event;
  bool terminal = false;
  bool composed = false;  // terminal kind: composed coroutine vs residual
  TypePtr result;
};

namespace detail {

inline bool drained(const CoroutineInstance& inst) {
  return is_void(inst.current->recv) && is_void(inst.current->yld);
}

inline bool can_yield(const CoroutineInstance& inst) {
  return is_void(inst.current->recv) && !is_void(inst.current->yld);
}

inline TypePtr with_parts(const TypePtr& coroutine, TypePtr recv, TypePtr yld) {
  return t_coroutine(std::move(recv), std::move(yld), coroutine->label,
                     coroutine->starred);
}

inline TypePtr seq_of(std::vector<TypePtr> items) {
  return normalize(t_seq(std::move(items)));
}

}  // namespace detail

// Fires exactly one rule. Mutates the state and reports the event; a
// terminal rule also carries the result. Throws ComposeError when a
// substitution fails to evaluate.
inline StepResult step(ComposeState& state) {
  using detail::with_parts;
  StepResult out;
  TraceEvent& ev = out.event;
  ev.complexityBefore = complexity(state);
  state.stepsTaken += 1;

  try {
    if (!is_void(state.pending)) {
      // R6: resume the first coroutine whose demand head matches.
      for (std::size_t i = 0; i < state.theta.size(); ++i) {
        CoroutineInstance& inst = state.theta[i];
        const TypePtr& demand = inst.current->recv;
        if (is_void(demand)) continue;
        const std::uint64_t freshMark = state.fresh.next;
        Bindings d = match(state.pending, hd(demand), state.fresh);
        if (d.is_bottom()) {
          state.fresh.next = freshMark;  // failed attempts mint nothing
          continue;
        }
        ev.ruleId = RuleId::R6Resume;
        ev.receiverIndex = i;
        ev.receiverName = inst.display_name();
        ev.payloadComplexity = complexity(state.pending);
        ev.groundStep = d.empty();
        ev.bindings = d;
        inst.current =
            substitute(with_parts(inst.current, tl(demand), inst.current->yld), d);
        state.pending = t_void();
        ev.complexityAfter = complexity(state);
        return out;
      }
      // R7: nobody can receive; the pending type becomes external.
      ev.ruleId = RuleId::R7External;
      state.external.push_back(state.pending);
      state.pending = t_void();
      ev.complexityAfter = complexity(state);
      return out;
    }

    // R1: sweep one fully drained instance; starred instances restore
    // their original form with fresh variable names instead.
    if (FirstResult hit = first(state.theta, detail::drained); hit.index) {
      const std::size_t i = *hit.index;
      CoroutineInstance& inst = state.theta[i];
      ev.actorIndex = i;
      ev.actorName = inst.display_name();
      if (inst.starred) {
        ev.ruleId = RuleId::StarRestore;
        const std::uint64_t id = state.nextInstanceId++;
        inst.current =
            normalize(rename(inst.original, "#" + std::to_string(id)));
        inst.instanceId = id;
      } else {
        ev.ruleId = RuleId::R1Cleanup;
        state.theta.erase(state.theta.begin() + i);
      }
      ev.complexityAfter = complexity(state);
      return out;
    }

    // R2: a single survivor is the composed type, with E ahead of its
    // own yields; an empty list composes to <void ; E>.
    if (state.theta.size() <= 1) {
      ev.ruleId = RuleId::R2TerminalSingle;
      std::vector<TypePtr> yields = state.external;
      TypePtr recv = t_void();
      if (!state.theta.empty()) {
        ev.actorIndex = 0;
        ev.actorName = state.theta[0].display_name();
        recv = state.theta[0].current->recv;
        yields.push_back(state.theta[0].current->yld);
      }
      out.result = t_coroutine(recv, detail::seq_of(std::move(yields)));
      out.terminal = true;
      out.composed = true;
      ev.complexityAfter = complexity(out.result);
      return out;
    }

    // R8: a coroutine-shaped demand head consumes the first other
    // instance it matches; the consumed instance leaves the list.
    for (std::size_t i = 0; i < state.theta.size(); ++i) {
      const TypePtr& demand = state.theta[i].current->recv;
      if (is_void(demand)) continue;
      TypePtr pattern = hd(demand);
      if (pattern->kind != TypeExpr::Kind::Coroutine) continue;
      for (std::size_t j = 0; j < state.theta.size(); ++j) {
        if (j == i) continue;  // a coroutine cannot receive itself
        const std::uint64_t freshMark = state.fresh.next;
        Bindings d = match(state.theta[j].current, pattern, state.fresh);
        if (d.is_bottom()) {
          state.fresh.next = freshMark;
          continue;
        }
        ev.ruleId = RuleId::R8ConsumeCoroutine;
        ev.actorIndex = i;
        ev.actorName = state.theta[i].display_name();
        ev.receiverIndex = j;
        ev.receiverName = state.theta[j].display_name();
        ev.payloadComplexity = complexity(state.theta[j].current);
        ev.groundStep = d.empty();
        ev.bindings = d;
        TypePtr next = substitute(
            with_parts(state.theta[i].current, tl(demand),
                       state.theta[i].current->yld),
            d);
        state.theta.erase(state.theta.begin() + j);
        state.theta[j < i ? i - 1 : i].current = std::move(next);
        ev.complexityAfter = complexity(state);
        return out;
      }
    }

    // R4: the first instance about to yield a coroutine (or a label
    // reference, expanded to the labeled original with fresh names)
    // inserts it into the list right after itself.
    auto yields_coroutine = [](const CoroutineInstance& inst) {
      if (!detail::can_yield(inst)) return false;
      TypeExpr::Kind k = hd(inst.current->yld)->kind;
      return k == TypeExpr::Kind::Coroutine || k == TypeExpr::Kind::Ref;
    };
    if (FirstResult hit = first(state.theta, yields_coroutine); hit.index) {
      const std::size_t i = *hit.index;
      CoroutineInstance& inst = state.theta[i];
      TypePtr head = hd(inst.current->yld);
      ev.ruleId = RuleId::R4YieldCoroutine;
      ev.actorIndex = i;
      ev.actorName = inst.display_name();

      CoroutineInstance born;
      born.instanceId = state.nextInstanceId++;
      if (head->kind == TypeExpr::Kind::Ref) {
        auto it = state.labelTable.find(head->name);
        if (it == state.labelTable.end())
          throw ComposeError("unresolved label reference '@" + head->name + "'");
        born.current = normalize(
            rename(it->second.type, "#" + std::to_string(born.instanceId)));
        born.original = it->second.type;
        born.label = head->name;
        born.starred = it->second.starred;
        ev.groundStep = false;  // expansion can raise complexity
      } else {
        born.current = head;
        born.original = head;
        born.label = head->label;
        born.starred = head->starred;
      }
      inst.current =
          with_parts(inst.current, t_void(), normalize(tl(inst.current->yld)));
      state.theta.insert(state.theta.begin() + i + 1, std::move(born));
      ev.complexityAfter = complexity(state);
      return out;
    }

    // R3: the first instance with an empty demand yields its head.
    if (FirstResult hit = first(state.theta, detail::can_yield); hit.index) {
      CoroutineInstance& inst = state.theta[*hit.index];
      ev.ruleId = RuleId::R3Yield;
      ev.actorIndex = *hit.index;
      ev.actorName = inst.display_name();
      state.pending = hd(inst.current->yld);
      ev.payloadComplexity = complexity(state.pending);
      inst.current =
          with_parts(inst.current, t_void(), normalize(tl(inst.current->yld)));
      ev.complexityAfter = complexity(state);
      return out;
    }

    // R5: deadlock; every instance still demands input. The residual is
    // E followed by the stuck coroutines.
    ev.ruleId = RuleId::R5TerminalDeadlock;
    std::vector<TypePtr> residual = state.external;
    for (const auto& inst : state.theta) residual.push_back(inst.current);
    out.result = detail::seq_of(std::move(residual));
    out.terminal = true;
    out.composed = false;
    ev.complexityAfter = complexity(out.result);
    return out;
  } catch (const EvalError& e) {
    throw ComposeError("step " + std::to_string(state.stepsTaken) +
                       ": evaluation failed: " + e.what());
  }
}

struct ComposeOptions {
  std::uint64_t stepLimit = 10000;
};

struct ComposeResult {
  enum class Kind { Composed, Residual, StepLimitExceeded };

  Kind kind = Kind::Composed;
  TypePtr type;  // composed coroutine or residual sequence
  ComposeState finalState;
  std::vector<TraceEvent> trace;
  AuditReport audit;

  std::uint64_t steps() const { return finalState.stepsTaken; }
};

namespace detail {

inline void collect_refs(const TypePtr& t, std::vector<std::string>& out) {
  using K = TypeExpr::Kind;
  switch (t->kind) {
    case K::Ref: out.push_back(t->name); break;
    case K::Seq:
    case K::Tuple:
      for (const auto& it : t->items) collect_refs(it, out);
      break;
    case K::List: collect_refs(t->elem, out); break;
    case K::Coroutine:
      collect_refs(t->recv, out);
      collect_refs(t->yld, out);
      break;
    default: break;
  }
}

}  // namespace detail

// Validates the declarations and builds the initial state: each
// instance gets its variables suffixed with its activation index, and
// label references at the top level activate the labeled declaration.
inline ComposeState init_compose(const Program& program) {
  ComposeState state;
  for (const auto& decl : program.decls) {
    if (decl.starred && !decl.label)
      throw ComposeError("a starred coroutine must carry a label");
    if (!decl.label) continue;
    if (!state.labelTable.emplace(*decl.label, decl).second)
      throw ComposeError("duplicate label '" + *decl.label + "'");
  }
  for (std::size_t k = 0; k < program.decls.size(); ++k) {
    Declaration decl = program.decls[k];
    if (decl.type->kind == TypeExpr::Kind::Ref) {
      auto it = state.labelTable.find(decl.type->name);
      if (it == state.labelTable.end())
        throw ComposeError("unresolved label reference '@" + decl.type->name +
                           "'");
      decl = it->second;
    }
    if (decl.type->kind != TypeExpr::Kind::Coroutine)
      throw ComposeError("declaration " + std::to_string(k + 1) +
                         " is not a coroutine type");
    std::vector<std::string> refs;
    detail::collect_refs(decl.type, refs);
    for (const auto& r : refs)
      if (!state.labelTable.count(r))
        throw ComposeError("unresolved label reference '@" + r + "'");

    CoroutineInstance inst;
    inst.instanceId = k;
    inst.current = normalize(rename(decl.type, "#" + std::to_string(k)));
    inst.original = decl.type;
    inst.label = decl.label;
    inst.starred = decl.starred;
    state.theta.push_back(std::move(inst));
  }
  state.nextInstanceId = program.decls.size();
  return state;
}

// Runs the rules to a terminal step or to the step limit. Identical
// input and options produce an identical trace and result.
inline ComposeResult compose(const Program& program, ComposeOptions options = {}) {
  ComposeResult result;
  ComposeState state = init_compose(program);
  while (state.stepsTaken < options.stepLimit) {
    StepResult sr = step(state);
    result.trace.push_back(sr.event);
    if (sr.terminal) {
      result.kind = sr.composed ? ComposeResult::Kind::Composed
                                : ComposeResult::Kind::Residual;
      result.type = sr.result;
      result.finalState = std::move(state);
      result.audit = audit_trace(result.trace);
      return result;
    }
  }
  result.kind = ComposeResult::Kind::StepLimitExceeded;
  result.finalState = std::move(state);
  result.audit = audit_trace(result.trace);
  return result;
}

}  // namespace corotype
