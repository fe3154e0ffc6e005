// corotype: compose coroutine type programs and audit the complexity
// bounds of every step.
//
//   corotype compose <file.cot> [--step-limit N] [--trace text|json]
//                    [--audit warn|strict]
//   corotype check <file.cot>
//   corotype corpus [--dir DIR]
//
// Exit codes: 0 composed or residual result, 1 parse or validation
// error, 2 step limit exceeded, 3 audit failure under --audit strict.

#include "corotype/corotype.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace corotype;

enum class TraceMode { None, Text, Structured };
enum class AuditMode { Off, Warn, Strict };

struct RunConfig {
  std::string inputPath;
  std::uint64_t stepLimit = 10000;
  TraceMode traceMode = TraceMode::None;
  AuditMode auditMode = AuditMode::Off;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void print_state(std::ostream& out, const ComposeState& state) {
  out << "pending: " << print_type(state.pending) << "\n";
  out << "external:";
  for (const auto& e : state.external) out << " " << print_type(e);
  out << "\n";
  out << "theta:\n";
  for (const auto& inst : state.theta)
    out << "  " << inst.display_name() << ": " << print_type(inst.current)
        << "\n";
}

int report_audit(const AuditReport& report, AuditMode mode) {
  std::cout << audit_summary(report) << "\n";
  for (const auto& e : report.entries)
    if (e.verdict == AuditVerdict::OutOfBounds)
      std::cout << "  " << audit_entry_text(e) << "\n";
  if (mode == AuditMode::Strict && !report.all_ok()) return 3;
  return 0;
}

int cmd_compose(const RunConfig& config) {
  Program program;
  try {
    program = parse_program(read_file(config.inputPath));
  } catch (const std::exception& e) {
    std::cerr << "error: " << config.inputPath << ":" << e.what() << "\n";
    return 1;
  }

  ComposeResult result;
  try {
    result = compose(program, ComposeOptions{config.stepLimit});
  } catch (const ComposeError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }

  if (config.traceMode == TraceMode::Text)
    std::cout << trace_text(result.trace);
  else if (config.traceMode == TraceMode::Structured)
    std::cout << trace_ndjson(result.trace);

  int exitCode = 0;
  switch (result.kind) {
    case ComposeResult::Kind::Composed:
    case ComposeResult::Kind::Residual:
      std::cout << print_type(result.type) << "\n";
      break;
    case ComposeResult::Kind::StepLimitExceeded:
      std::cout << "step limit exceeded after " << result.steps()
                << " steps\n";
      print_state(std::cout, result.finalState);
      exitCode = 2;
      break;
  }

  if (config.auditMode != AuditMode::Off) {
    int auditCode = report_audit(result.audit, config.auditMode);
    if (auditCode != 0) return auditCode;
  }
  return exitCode;
}

int cmd_check(const std::string& path) {
  try {
    Program program = parse_program(read_file(path));
    init_compose(program);  // label and reference validation
    std::cout << "ok: " << program.decls.size() << " declarations\n";
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << path << ":" << e.what() << "\n";
    return 1;
  }
}

// ---- bundled corpus ------------------------------------------------

bool is_rec_shape(const TypePtr& t) {
  // <(var, var^lenvar) ; ...>: the recursive membership case
  if (t->kind != TypeExpr::Kind::Coroutine) return false;
  const TypePtr& r = t->recv;
  if (r->kind != TypeExpr::Kind::Tuple || r->items.size() != 2) return false;
  if (r->items[0]->kind != TypeExpr::Kind::Var) return false;
  const TypePtr& snd = r->items[1];
  return snd->kind == TypeExpr::Kind::List &&
         snd->elem->kind == TypeExpr::Kind::Var &&
         snd->len->kind == LengthExpr::Kind::Var;
}

bool is_eq_shape(const TypePtr& t) {
  // <(u, u) ; T^*>: the equality case, possibly specialized
  if (t->kind != TypeExpr::Kind::Coroutine) return false;
  const TypePtr& r = t->recv;
  if (r->kind != TypeExpr::Kind::Tuple || r->items.size() != 2) return false;
  if (!equal(r->items[0], r->items[1])) return false;
  return equal(t->yld, parse_type("T^*"));
}

std::size_t count_residual(const TypePtr& residual,
                           const std::function<bool(const TypePtr&)>& pred) {
  if (residual->kind != TypeExpr::Kind::Seq) return pred(residual) ? 1 : 0;
  std::size_t n = 0;
  for (const auto& item : residual->items)
    if (pred(item)) ++n;
  return n;
}

struct CorpusEntry {
  const char* file;
  std::uint64_t stepLimit;
  const char* expectation;
  std::function<bool(const ComposeResult&, std::string&)> check;
};

std::function<bool(const ComposeResult&, std::string&)> expect_exact(
    std::string text) {
  return [text](const ComposeResult& r, std::string& detail) {
    if (r.kind == ComposeResult::Kind::StepLimitExceeded) {
      detail = "step limit exceeded";
      return false;
    }
    detail = print_type(r.type);
    return detail == text;
  };
}

std::vector<CorpusEntry> corpus_entries() {
  std::vector<CorpusEntry> entries;
  entries.push_back({"first_receiver.cot", 10000, "<S ; [T, U]>",
                     expect_exact("<S ; [T, U]>")});
  entries.push_back({"pipeline.cot", 10000, "<void ; U>",
                     expect_exact("<void ; U>")});
  entries.push_back(
      {"starred_loop.cot", 200, "step limit exceeded (nonterminating)",
       [](const ComposeResult& r, std::string& detail) {
         detail = r.kind == ComposeResult::Kind::StepLimitExceeded
                      ? "step limit exceeded"
                      : print_type(r.type);
         return r.kind == ComposeResult::Kind::StepLimitExceeded;
       }});
  entries.push_back({"zip.cot", 10000,
                     "<void ; (String, String)^min(α0, β0)>",
                     expect_exact("<void ; (String, String)^min(α0, β0)>")});
  entries.push_back(
      {"mem_positive.cot", 10000, "first external yield is T^*",
       [](const ComposeResult& r, std::string& detail) {
         if (r.finalState.external.empty()) {
           detail = "no external yields";
           return false;
         }
         detail = "first external yield " +
                  print_type(r.finalState.external.front());
         return equal(r.finalState.external.front(), parse_type("T^*"));
       }});
  entries.push_back(
      {"mem_negative.cot", 10000,
       "residual F^* first, restored rec instances, unused eq",
       [](const ComposeResult& r, std::string& detail) {
         if (r.kind != ComposeResult::Kind::Residual) {
           detail = "not a residual";
           return false;
         }
         bool first = equal(hd(r.type), parse_type("F^*"));
         std::size_t recs = count_residual(r.type, is_rec_shape);
         std::size_t eqs = count_residual(r.type, is_eq_shape);
         std::ostringstream d;
         d << "first=" << print_type(hd(r.type)) << " rec=" << recs
           << " eq=" << eqs;
         detail = d.str();
         return first && recs >= 2 && eqs >= 1;
       }});
  auto first_residual_is = [](const char* name, bool want) {
    return [name, want](const ComposeResult& r, std::string& detail) {
      if (r.kind != ComposeResult::Kind::Residual) {
        detail = "not a residual";
        return false;
      }
      detail = "first element " + print_type(hd(r.type));
      return equal(hd(r.type), t_con(name)) == want;
    };
  };
  entries.push_back({"prolog_sue.cot", 10000, "first residual element is Yes",
                     first_residual_is("Yes", true)});
  entries.push_back({"prolog_jane.cot", 10000,
                     "first residual element is not Yes",
                     first_residual_is("Yes", false)});
  entries.push_back(
      {"mapping_x_then.cot", 10000,
       "<void ; [<T ; Int>, <y#1 ; void>, T]>",
       expect_exact("<void ; [<T ; Int>, <y#1 ; void>, T]>")});
  entries.push_back(
      {"mapping_x_other.cot", 10000,
       "<void ; [<T ; Int>, <y#1 ; void>, U]>",
       expect_exact("<void ; [<T ; Int>, <y#1 ; void>, U]>")});
  return entries;
}

int cmd_corpus(const std::string& dir) {
  int failures = 0;
  for (const auto& entry : corpus_entries()) {
    const std::string path = dir + "/" + entry.file;
    std::string detail;
    bool pass = false;
    try {
      Program program = parse_program(read_file(path));
      ComposeResult result = compose(program, ComposeOptions{entry.stepLimit});
      pass = entry.check(result, detail);
    } catch (const std::exception& e) {
      detail = e.what();
    }
    std::cout << (pass ? "PASS" : "FAIL") << " " << entry.file << " - "
              << (pass ? entry.expectation : "expected " +
                             std::string(entry.expectation) + ", got " + detail)
              << "\n";
    if (!pass) ++failures;
  }
  if (failures) std::cout << failures << " corpus failures\n";
  return failures ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"composition calculus for coroutine types"};
  app.require_subcommand(1);

  RunConfig config;
  std::string traceArg, auditArg;
  CLI::App* compose = app.add_subcommand("compose", "compose a program file");
  compose->add_option("file", config.inputPath, "program file (.cot)")
      ->required();
  compose->add_option("--step-limit", config.stepLimit, "maximum rule firings")
      ->check(CLI::PositiveNumber);
  compose->add_option("--trace", traceArg, "print the rule trace")
      ->check(CLI::IsMember({"text", "json"}));
  compose->add_option("--audit", auditArg, "check complexity bounds")
      ->check(CLI::IsMember({"warn", "strict"}));

  std::string checkPath;
  CLI::App* check = app.add_subcommand("check", "parse and validate only");
  check->add_option("file", checkPath, "program file (.cot)")->required();

  const char* env = std::getenv("COROTYPE_CORPUS");
  std::string corpusDir = env ? env : COROTYPE_DEFAULT_CORPUS_DIR;
  CLI::App* corpus =
      app.add_subcommand("corpus", "run the bundled example corpus");
  corpus->add_option("--dir", corpusDir, "corpus directory");

  CLI11_PARSE(app, argc, argv);

  if (compose->parsed()) {
    if (traceArg == "text") config.traceMode = TraceMode::Text;
    if (traceArg == "json") config.traceMode = TraceMode::Structured;
    if (auditArg == "warn") config.auditMode = AuditMode::Warn;
    if (auditArg == "strict") config.auditMode = AuditMode::Strict;
    return cmd_compose(config);
  }
  if (check->parsed()) return cmd_check(checkPath);
  return cmd_corpus(corpusDir);
}
