// Integration tests for the command-line tool: exit codes, output
// stability, and the bundled corpus runner.

#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

namespace {

namespace fs = std::filesystem;

struct RunResult {
  int exitCode = -1;
  std::string out;
};

fs::path scratch_dir() {
  static fs::path dir = [] {
    fs::path d = fs::temp_directory_path() /
                 ("corotype_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

RunResult run_cli(const std::string& args) {
  fs::path outFile = scratch_dir() / "out.txt";
  std::string cmd = std::string("\"") + COROTYPE_CLI_PATH + "\" " + args +
                    " > \"" + outFile.string() + "\" 2>&1";
  int status = std::system(cmd.c_str());
  RunResult r;
  if (WIFEXITED(status)) r.exitCode = WEXITSTATUS(status);
  std::ifstream in(outFile);
  std::ostringstream buf;
  buf << in.rdbuf();
  r.out = buf.str();
  return r;
}

std::string corpus_file(const char* name) {
  return std::string(COROTYPE_CORPUS_DIR) + "/" + name;
}

std::string write_scratch(const char* name, const std::string& text) {
  fs::path p = scratch_dir() / name;
  std::ofstream out(p);
  out << text;
  return p.string();
}

}  // namespace

TEST_CASE("compose prints the composed type and exits 0") {
  RunResult r = run_cli("compose " + corpus_file("first_receiver.cot"));
  CHECK(r.exitCode == 0);
  CHECK(r.out == "<S ; [T, U]>\n");
}

TEST_CASE("output is byte-stable across runs") {
  std::string args = "compose --trace text " + corpus_file("zip.cot");
  RunResult a = run_cli(args);
  RunResult b = run_cli(args);
  CHECK(a.exitCode == 0);
  CHECK(a.out == b.out);
  CHECK(a.out.find("<void ; (String, String)^min(α0, β0)>") != std::string::npos);
}

TEST_CASE("step limit reports exit 2") {
  RunResult r =
      run_cli("compose --step-limit 50 " + corpus_file("starred_loop.cot"));
  CHECK(r.exitCode == 2);
  CHECK(r.out.find("step limit exceeded after 50 steps") != std::string::npos);
  CHECK(r.out.find("theta:") != std::string::npos);
}

TEST_CASE("parse errors report positions and exit 1") {
  std::string bad = write_scratch("bad.cot", "a: <S ; \n");
  RunResult r = run_cli("compose " + bad);
  CHECK(r.exitCode == 1);
  CHECK(r.out.find("error:") != std::string::npos);
  CHECK(r.out.find("1:9") != std::string::npos);
}

TEST_CASE("an empty program composes to the empty coroutine") {
  std::string empty = write_scratch("empty.cot", "");
  RunResult r = run_cli("compose " + empty);
  CHECK(r.exitCode == 0);
  CHECK(r.out == "<void ; void>\n");
}

TEST_CASE("json traces emit one record per line") {
  RunResult r = run_cli("compose --trace json " + corpus_file("first_receiver.cot"));
  CHECK(r.exitCode == 0);
  std::istringstream lines(r.out);
  std::string line;
  int records = 0;
  while (std::getline(lines, line)) {
    if (line.empty() || line[0] != '{') break;
    CHECK(line.find("\"ruleId\"") != std::string::npos);
    CHECK(line.find("\"complexityBefore\"") != std::string::npos);
    ++records;
  }
  CHECK(records == 7);
  CHECK(line == "<S ; [T, U]>");  // the result follows the trace
}

TEST_CASE("audit modes") {
  RunResult warn = run_cli("compose --audit warn " + corpus_file("first_receiver.cot"));
  CHECK(warn.exitCode == 0);
  CHECK(warn.out.find("audit:") != std::string::npos);
  CHECK(warn.out.find("0 out of bounds") != std::string::npos);

  RunResult strict =
      run_cli("compose --audit strict " + corpus_file("prolog_sue.cot"));
  CHECK(strict.exitCode == 0);

  RunResult strictLimit = run_cli("compose --audit strict --step-limit 20 " +
                                  corpus_file("starred_loop.cot"));
  CHECK(strictLimit.exitCode == 2);  // bounds hold, so the limit decides
}

TEST_CASE("check validates without composing") {
  RunResult ok = run_cli("check " + corpus_file("prolog_sue.cot"));
  CHECK(ok.exitCode == 0);
  CHECK(ok.out.find("14 declarations") != std::string::npos);

  std::string bad = write_scratch("unresolved.cot", "a: <void ; @missing>\n");
  RunResult err = run_cli("check " + bad);
  CHECK(err.exitCode == 1);
}

TEST_CASE("the bundled corpus passes") {
  RunResult r = run_cli(std::string("corpus --dir \"") + COROTYPE_CORPUS_DIR + "\"");
  CHECK(r.exitCode == 0);
  CHECK(r.out.find("FAIL") == std::string::npos);
  for (const char* name :
       {"starred_loop.cot", "first_receiver.cot", "pipeline.cot", "zip.cot", "mem_positive.cot",
        "mem_negative.cot", "prolog_sue.cot", "prolog_jane.cot",
        "mapping_x_then.cot", "mapping_x_other.cot"})
    CHECK(r.out.find(std::string("PASS ") + name) != std::string::npos);
}

TEST_CASE("a missing corpus directory fails") {
  RunResult r = run_cli("corpus --dir /nonexistent/place");
  CHECK(r.exitCode == 1);
  CHECK(r.out.find("FAIL") != std::string::npos);
}
