#include "corotype/engine.hpp"

#include "corotype/syntax.hpp"
#include "corotype/trace_io.hpp"
#include "generators.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace corotype;

namespace {

CoroutineInstance inst_of(const char* text, std::uint64_t id = 0) {
  CoroutineInstance inst;
  inst.current = parse_type(text);
  inst.original = inst.current;
  inst.instanceId = id;
  return inst;
}

Program program_of(const char* text) { return parse_program(text); }

bool has_empty_receiving(const CoroutineInstance& inst) {
  return is_void(inst.current->recv);
}

}  // namespace

TEST_CASE("first returns the leftmost match and the split") {
  std::vector<CoroutineInstance> theta{inst_of("<S ; T>", 0),
                                       inst_of("<void ; S>", 1)};
  FirstResult r = first(theta, has_empty_receiving);
  REQUIRE(r.found.has_value());
  CHECK(r.index == 1);
  CHECK(equal(r.found->current, parse_type("<void ; S>")));
  REQUIRE(r.before.size() == 1);
  CHECK(equal(r.before[0].current, parse_type("<S ; T>")));
  CHECK(r.after.empty());
}

TEST_CASE("first on an empty list") {
  std::vector<CoroutineInstance> theta;
  FirstResult r = first(theta, has_empty_receiving);
  CHECK_FALSE(r.found.has_value());
  CHECK(r.before.empty());
  CHECK(r.after.empty());
}

TEST_CASE("first without a match keeps everything in before") {
  std::vector<CoroutineInstance> theta{inst_of("<S ; T>", 0)};
  FirstResult r = first(theta, has_empty_receiving);
  CHECK_FALSE(r.found.has_value());
  REQUIRE(r.before.size() == 1);
  CHECK(r.after.empty());
}

TEST_CASE("single steps through the three-coroutine handoff") {
  ComposeState state =
      init_compose(program_of("a: <S ; T>\nl: <void ; S>\nb: <S ; U>\n"));

  StepResult s1 = step(state);
  CHECK(s1.event.ruleId == RuleId::R3Yield);
  CHECK(s1.event.actorIndex == 1);
  CHECK(equal(state.pending, t_con("S")));

  StepResult s2 = step(state);
  CHECK(s2.event.ruleId == RuleId::R6Resume);
  CHECK(s2.event.receiverIndex == 0);  // the scan starts at index 0
  CHECK(is_void(state.pending));
  CHECK(equal(state.theta[0].current, parse_type("<void ; T>")));

  StepResult s3 = step(state);
  CHECK(s3.event.ruleId == RuleId::R1Cleanup);
  CHECK(state.theta.size() == 2);

  StepResult s4 = step(state);
  CHECK(s4.event.ruleId == RuleId::R3Yield);
  StepResult s5 = step(state);
  CHECK(s5.event.ruleId == RuleId::R7External);
  REQUIRE(state.external.size() == 1);
  CHECK(equal(state.external[0], t_con("T")));

  StepResult s6 = step(state);
  CHECK(s6.event.ruleId == RuleId::R1Cleanup);
  StepResult s7 = step(state);
  CHECK(s7.event.ruleId == RuleId::R2TerminalSingle);
  REQUIRE(s7.terminal);
  CHECK(s7.composed);
  CHECK(equal(s7.result, parse_type("<S ; [T, U]>")));
}

TEST_CASE("compose the three-coroutine handoff") {
  ComposeResult r = compose(program_of("a: <S ; T>\nl: <void ; S>\nb: <S ; U>\n"));
  REQUIRE(r.kind == ComposeResult::Kind::Composed);
  CHECK(equal(r.type, parse_type("<S ; [T, U]>")));
  CHECK(r.steps() <= 10);
}

TEST_CASE("compose a fully determined chain") {
  ComposeResult r = compose(program_of("a: <S ; T>\nl: <void ; S>\nb: <T ; U>\n"));
  REQUIRE(r.kind == ComposeResult::Kind::Composed);
  CHECK(equal(r.type, parse_type("<void ; U>")));
}

TEST_CASE("compose the file-zip pipeline") {
  ComposeResult r = compose(program_of(
      "oc1: <void ; Path>\n"
      "oc2: <void ; Path>\n"
      "fr1: <Path ; String^*>\n"
      "fr2: <Path ; String^*>\n"
      "zip: <[x^i, y^j] ; (x, y)^min(i, j)>\n"));
  REQUIRE(r.kind == ComposeResult::Kind::Composed);
  TypePtr expected = t_coroutine(
      t_void(), t_list(t_tuple({t_con("String"), t_con("String")}),
                       len_min(len_fresh(0), len_fresh(1))));
  CHECK(equal(r.type, expected));
  CHECK(r.steps() <= 25);
}

TEST_CASE("starred pair never terminates") {
  Program p = program_of("a*: <void ; <S ; T>>\nb*: <<S ; T> ; void>\n");
  ComposeResult r = compose(p, ComposeOptions{50});
  CHECK(r.kind == ComposeResult::Kind::StepLimitExceeded);
  CHECK(r.steps() == 50);
  CHECK(r.finalState.external.empty());
}

TEST_CASE("empty program composes to the empty coroutine") {
  ComposeResult r = compose(Program{});
  REQUIRE(r.kind == ComposeResult::Kind::Composed);
  CHECK(equal(r.type, parse_type("<void ; void>")));
}

TEST_CASE("external yields precede the survivor's own yields") {
  // E is ahead because it was yielded before the survivor finished
  ComposeResult r = compose(program_of("a: <void ; [T, S]>\nb: <S ; U>\n"));
  REQUIRE(r.kind == ComposeResult::Kind::Composed);
  CHECK(equal(r.type, parse_type("<void ; [T, U]>")));
}

TEST_CASE("label references expand to fresh instances") {
  // g yields a reference to l; the expansion activates a new copy of l
  // which then feeds b
  ComposeResult r = compose(program_of(
      "l: <void ; S>\n"
      "g: <S ; @l>\n"
      "b: <S ; U>\n"));
  REQUIRE(r.kind == ComposeResult::Kind::Composed);
  CHECK(equal(r.type, parse_type("<void ; U>")));
  bool sawExpansion = false;
  for (const auto& ev : r.trace)
    if (ev.ruleId == RuleId::R4YieldCoroutine && !ev.groundStep)
      sawExpansion = true;
  CHECK(sawExpansion);
}

TEST_CASE("self-references expand lazily at yield time") {
  // the reference persists until the moment it would be yielded, and a
  // lone survivor terminates before expanding further
  ComposeResult r = compose(parse_program("l: <S ; [U, @l]>\ng: <void ; [S, S]>\n"),
                            ComposeOptions{100});
  REQUIRE(r.kind == ComposeResult::Kind::Composed);
  CHECK(equal(r.type, parse_type("<void ; [U, U, @l]>")));

  ComposeResult single =
      compose(parse_program("feeder: <void ; S>\nl: <S ; [U, @l]>\n"));
  REQUIRE(single.kind == ComposeResult::Kind::Composed);
  CHECK(equal(single.type, parse_type("<void ; [U, @l]>")));
}

TEST_CASE("validation errors") {
  CHECK_THROWS_AS(compose(program_of("a: <S ; T>\na: <T ; S>\n")),
                  ParseError);  // duplicate labels are a parse error
  Program dup;
  dup.decls.push_back({std::string("a"), false, parse_type("<S ; T>")});
  dup.decls.push_back({std::string("a"), false, parse_type("<T ; S>")});
  CHECK_THROWS_AS(compose(dup), ComposeError);

  Program unresolved;
  unresolved.decls.push_back({std::nullopt, false, t_ref("nowhere")});
  CHECK_THROWS_AS(compose(unresolved), ComposeError);

  Program notCoroutine;
  notCoroutine.decls.push_back({std::nullopt, false, t_con("Int")});
  CHECK_THROWS_AS(compose(notCoroutine), ComposeError);

  Program starNoLabel;
  starNoLabel.decls.push_back({std::nullopt, true, parse_type("<S ; T>")});
  CHECK_THROWS_AS(compose(starNoLabel), ComposeError);
}

TEST_CASE("an unevaluable length aborts composition") {
  // the receiver binds i=1, then dec(dec(1)) hits dec(0)
  Program p = program_of(
      "a: <void ; T^1>\n"
      "b: <x^i ; x^dec(dec(i))>\n");
  CHECK_THROWS_AS(compose(p), ComposeError);
}

TEST_CASE("audit intervals for synthetic transitions") {
  TraceEvent yield;
  yield.ruleId = RuleId::R3Yield;
  yield.complexityBefore = 8;
  yield.complexityAfter = 7;
  yield.payloadComplexity = 1;

  TraceEvent external;
  external.ruleId = RuleId::R7External;
  external.complexityAfter = 8;
  AuditEntry detail;
  CHECK(audit_delta(yield, external, &detail) == AuditVerdict::Ok);
  CHECK(detail.lo == 7);
  CHECK(detail.hi == 8);

  TraceEvent resume;
  resume.ruleId = RuleId::R6Resume;
  resume.complexityAfter = 6;
  CHECK(audit_delta(yield, resume, &detail) == AuditVerdict::Ok);
  CHECK(detail.lo == 4);  // p-2-2x
  CHECK(detail.hi == 6);  // p-2x

  resume.complexityAfter = 3;  // below the interval
  CHECK(audit_delta(yield, resume, &detail) == AuditVerdict::OutOfBounds);

  resume.complexityAfter = 6;
  resume.bindings.types.emplace("x", t_con("S"));
  CHECK(audit_delta(yield, resume, &detail) == AuditVerdict::SkippedNonground);

  TraceEvent deadlock;
  deadlock.ruleId = RuleId::R5TerminalDeadlock;
  deadlock.complexityBefore = 9;
  deadlock.complexityAfter = 9;
  CHECK(audit_delta(deadlock, std::nullopt, &detail) == AuditVerdict::Ok);
  deadlock.complexityAfter = 8;
  CHECK(audit_delta(deadlock, std::nullopt, &detail) ==
        AuditVerdict::OutOfBounds);
}

TEST_CASE("cleanup always removes a unit of complexity") {
  for (const char* text :
       {"a: <S ; T>\nl: <void ; S>\nb: <S ; U>\n",
        "parm: <void ; (String, String^3)>\n"
        "base: <(x, y^0) ; F^*>\n"
        "rec1*: <(x, y^i) ; [<(x, y) ; void>, <(x, x) ; T^*>, (x, y), "
        "(x, y^dec(i))]>\n"
        "rec2*: <(x, y^i) ; [<(x, y) ; void>, <(x, x) ; T^*>, (x, y), "
        "(x, y^dec(i))]>\n"}) {
    ComposeResult r = compose(program_of(text));
    for (const auto& ev : r.trace)
      if (ev.ruleId == RuleId::R1Cleanup)
        CHECK(ev.complexityBefore - ev.complexityAfter == 1);
  }
}

TEST_CASE("restoration waits for the pending type to land elsewhere") {
  ComposeResult r = compose(program_of(
      "parm: <void ; (String, String^3)>\n"
      "base: <(x, y^0) ; F^*>\n"
      "rec1*: <(x, y^i) ; [<(x, y) ; void>, <(x, x) ; T^*>, (x, y), "
      "(x, y^dec(i))]>\n"
      "rec2*: <(x, y^i) ; [<(x, y) ; void>, <(x, x) ; T^*>, (x, y), "
      "(x, y^dec(i))]>\n"));
  bool sawRestore = false;
  for (std::size_t k = 0; k < r.trace.size(); ++k) {
    if (r.trace[k].ruleId != RuleId::StarRestore) continue;
    sawRestore = true;
    REQUIRE(k > 0);
    // a restore never races the yield that drained its predecessor
    CHECK(r.trace[k - 1].ruleId != RuleId::R3Yield);
    const std::string& drained = r.trace[k].actorName;
    for (std::size_t j = k; j-- > 0;) {
      if (r.trace[j].ruleId == RuleId::R3Yield &&
          r.trace[j].actorName == drained) {
        // that last yield was consumed by some other instance first
        REQUIRE(j + 1 < k);
        const TraceEvent& consumer = r.trace[j + 1];
        bool consumed = consumer.ruleId == RuleId::R6Resume ||
                        consumer.ruleId == RuleId::R7External;
        CHECK(consumed);
        if (consumer.ruleId == RuleId::R6Resume)
          CHECK(consumer.receiverName != drained);
        break;
      }
    }
  }
  CHECK(sawRestore);
}

TEST_CASE("every yield is consumed before anything else fires") {
  // precedence keeps at most one pending type in flight
  for (const char* text :
       {"a: <S ; T>\nl: <void ; S>\nb: <S ; U>\n",
        "parm: <void ; (String, String^3)>\n"
        "base: <(x, y^0) ; F^*>\n"
        "rec1*: <(x, y^i) ; [<(x, y) ; void>, <(x, x) ; T^*>, (x, y), "
        "(x, y^dec(i))]>\n"
        "rec2*: <(x, y^i) ; [<(x, y) ; void>, <(x, x) ; T^*>, (x, y), "
        "(x, y^dec(i))]>\n"}) {
    ComposeResult r = compose(program_of(text));
    for (std::size_t k = 0; k + 1 < r.trace.size(); ++k)
      if (r.trace[k].ruleId == RuleId::R3Yield) {
        bool consumed = r.trace[k + 1].ruleId == RuleId::R6Resume ||
                        r.trace[k + 1].ruleId == RuleId::R7External;
        CHECK(consumed);
      }
  }
}

TEST_CASE("traces are deterministic") {
  const char* text =
      "oc1: <void ; Path>\noc2: <void ; Path>\nfr1: <Path ; String^*>\n"
      "fr2: <Path ; String^*>\nzip: <[x^i, y^j] ; (x, y)^min(i, j)>\n";
  ComposeResult a = compose(program_of(text));
  ComposeResult b = compose(program_of(text));
  CHECK(trace_text(a.trace) == trace_text(b.trace));
  CHECK(trace_ndjson(a.trace) == trace_ndjson(b.trace));
  CHECK(equal(a.type, b.type));
}
