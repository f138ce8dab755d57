#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "doctest.h"

namespace fs = std::filesystem;

namespace {

struct RunResult {
  int code = -1;
  std::string out;
};

const char* binary() {
  const char* bin = std::getenv("MRES_BIN");
  REQUIRE_MESSAGE(bin != nullptr, "MRES_BIN must point at the CLI binary");
  return bin;
}

// Runs the CLI with `args`, capturing stdout and stderr together.
RunResult run(const std::string& args) {
  std::string cmd = std::string("\"") + binary() + "\" " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  RunResult r;
  char buf[4096];
  size_t got;
  while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, got);
  int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

bool contains(const std::string& hay, const std::string& needle) {
  return hay.find(needle) != std::string::npos;
}

// Extracts the integer following "<key>=" in the output.
long value_of(const std::string& out, const std::string& key) {
  auto pos = out.find(key + "=");
  REQUIRE(pos != std::string::npos);
  return std::strtol(out.c_str() + pos + key.size() + 1, nullptr, 10);
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("mres_cli_" + std::to_string((long)getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { std::error_code ec; fs::remove_all(path, ec); }
  std::string file(const std::string& name) const { return (path / name).string(); }
  std::string write(const std::string& name, const std::string& text) const {
    std::ofstream f(file(name));
    f << text;
    return file(name);
  }
};

}  // namespace

TEST_CASE("gen writes instances and reports their dimensions") {
  TempDir dir;
  RunResult to_file =
      run("gen --family equality --n 2 --out " + dir.file("eq2.q"));
  CHECK(to_file.code == 0);
  CHECK(contains(to_file.out, "vars=6"));
  CHECK(contains(to_file.out, "clauses=5"));

  RunResult to_stdout = run("gen --family equality --n 2");
  CHECK(to_stdout.code == 0);
  CHECK(contains(to_stdout.out, "p cnf 6 5"));
  CHECK(contains(to_stdout.out, "c family: equality"));

  CHECK(run("gen --family nosuch --n 1").code == 2);
  CHECK(run("gen --family cr --n 0").code == 2);
  CHECK(run("gen --n 1").code == 2);    // missing --family
  CHECK(run("").code == 2);             // missing subcommand
}

TEST_CASE("prove, check, extract, verify round trip") {
  TempDir dir;
  std::string q = dir.file("eq3.q");
  std::string proof = dir.file("eq3.proof");
  std::string strat = dir.file("eq3.strat");

  CHECK(run("gen --family equality --n 3 --out " + q).code == 0);
  RunResult p = run("prove --family equality --n 3 --out " + proof);
  CHECK(p.code == 0);
  CHECK(contains(p.out, "lines=13"));

  RunResult chk = run("check --formula " + q + " --proof " + proof +
                      " --strict-choices --soundness-invariant");
  CHECK(chk.code == 0);
  CHECK(contains(chk.out, "lines=13 axioms=7"));
  CHECK(contains(chk.out, "verdict=accepted"));
  CHECK(contains(chk.out, "soundness=ok"));

  CHECK(run("extract --formula " + q + " --proof " + proof + " --out " + strat)
            .code == 0);
  RunResult ver = run("verify-strategy --formula " + q + " --strategy " + strat);
  CHECK(ver.code == 0);
  CHECK(contains(ver.out, "winning=true"));

  RunResult cls = run("classify --formula " + q + " --proof " + proof);
  CHECK(cls.code == 0);
  CHECK(contains(cls.out, "tree_like=true"));
  CHECK(contains(cls.out, "regular=true"));
}

TEST_CASE("rejected proofs exit 1 with a named failure") {
  TempDir dir;
  std::string q = dir.file("eq1.q");
  REQUIRE(run("gen --family equality --n 1 --out " + q).code == 0);

  std::string bad_axiom = dir.write("bad1.proof", "p mres\na 1 99\n");
  RunResult r1 = run("check --formula " + q + " --proof " + bad_axiom);
  CHECK(r1.code == 1);
  CHECK(contains(r1.out, "failure_kind=bad-axiom-index"));
  CHECK(contains(r1.out, "verdict=rejected"));

  std::string unsorted = dir.write("bad2.proof", "p mres\na 5 1\na 4 2\n");
  RunResult r2 = run("check --formula " + q + " --proof " + unsorted);
  CHECK(r2.code == 1);
  CHECK(contains(r2.out, "failure_line=0 failure_kind=id-order"));
  CHECK(contains(r2.out, "verdict=rejected"));

  // Not proof-shaped at all: an input error, not a verdict.
  std::string garbage = dir.write("bad3.proof", "hello\n");
  CHECK(run("check --formula " + q + " --proof " + garbage).code == 2);
}

TEST_CASE("losing strategies exit 1 and name an escaping assignment") {
  TempDir dir;
  std::string q = dir.file("eq1.q");
  REQUIRE(run("gen --family equality --n 1 --out " + q).code == 0);
  // u_1 = NOT x_1.
  std::string strat = dir.write("flip.strat", "s 2\nl 1 1\nl 2 0\nn 3 1 1 2\ne\n");
  RunResult r = run("verify-strategy --formula " + q + " --strategy " + strat);
  CHECK(r.code == 1);
  CHECK(contains(r.out, "winning=false"));
  CHECK(contains(r.out, "witness=1=0,3=0"));
}

TEST_CASE("search finds a refutation and diag reads its group usage") {
  TempDir dir;
  std::string q = dir.file("qp1.q");
  std::string proof = dir.file("qp1.proof");
  REQUIRE(run("gen --family qparity --n 1 --out " + q).code == 0);

  RunResult s = run("search --formula " + q + " --out " + proof);
  CHECK(s.code == 0);
  CHECK(contains(s.out, "found=true"));
  long sink = value_of(s.out, "lines");
  CHECK(sink >= 3);

  RunResult d = run("diag --formula " + q + " --proof " + proof + " --uci " +
                    std::to_string(sink) + " --groups phi");
  CHECK(d.code == 0);
  CHECK(contains(d.out, "uci=1,2"));
  CHECK(contains(d.out, "uci_interval=true"));

  // Line caps too small: no refutation.
  RunResult cut = run("search --formula " + q + " --max-lines 3");
  CHECK(cut.code == 1);
  CHECK(contains(cut.out, "found=false"));
}

TEST_CASE("diag reports boundary sets") {
  TempDir dir;
  std::string q = dir.file("eq2.q");
  std::string proof = dir.file("eq2.proof");
  REQUIRE(run("gen --family equality --n 2 --out " + q).code == 0);
  REQUIRE(run("prove --family equality --n 2 --out " + proof).code == 0);
  RunResult r =
      run("diag --formula " + q + " --proof " + proof + " --boundary 5 6");
  CHECK(r.code == 0);
  CHECK(contains(r.out, "s=8\n"));
  CHECK(contains(r.out, "s_prime=8\n"));
}

TEST_CASE("dtsize measures parity and file tables") {
  RunResult p = run("dtsize --parity 3");
  CHECK(p.code == 0);
  CHECK(contains(p.out, "size=8"));
  CHECK(contains(p.out, "min_path_queries=3"));

  TempDir dir;
  std::string t = dir.write("xor2.tt", "t 2 1 2\n0110\n");
  RunResult f = run("dtsize --table " + t);
  CHECK(f.code == 0);
  CHECK(contains(f.out, "size=4"));

  CHECK(run("dtsize").code == 2);  // neither input kind
}

TEST_CASE("enum-countermodels lists winners or exits 1") {
  TempDir dir;
  std::string q = dir.file("qp2.q");
  REQUIRE(run("gen --family qparity --n 2 --out " + q).code == 0);
  RunResult r = run("enum-countermodels --formula " + q + " --report-min-dt");
  CHECK(r.code == 0);
  CHECK(contains(r.out, "candidates=16"));
  CHECK(contains(r.out, "countermodels=1"));
  CHECK(contains(r.out, "owner=3 vars=1,2 bits=0110"));
  CHECK(contains(r.out, "mindt=4"));

  // A true formula has no countermodel.
  std::string truef = dir.write("true.q", "p cnf 2 1\ne 1 0\na 2 0\n1 0\n");
  RunResult t = run("enum-countermodels --formula " + truef);
  CHECK(t.code == 1);
  CHECK(contains(t.out, "countermodels=0"));
}

TEST_CASE("check-antisym reads both strategy encodings") {
  TempDir dir;
  std::string maps = dir.write("good.strat", "s 3\nl 1 0\nl 2 1\nn 3 1 1 2\ne\n");
  RunResult m = run("check-antisym --strategy " + maps + " --n 1");
  CHECK(m.code == 0);
  CHECK(contains(m.out, "antisymmetric=true"));

  std::string tables = dir.write("good.tt", "t 2 1 2\n0101\n");
  RunResult t = run("check-antisym --strategy " + tables + " --n 1");
  CHECK(t.code == 0);
  CHECK(contains(t.out, "antisymmetric=true"));

  std::string zeros = dir.write("zero.tt", "t 2 1 2\n0000\n");
  RunResult z = run("check-antisym --strategy " + zeros + " --n 1");
  CHECK(z.code == 1);
  CHECK(contains(z.out, "violation_universal=1"));
  CHECK(contains(z.out, "violation_prefix=1"));
  CHECK(contains(z.out, "violation_got=0"));
  CHECK(contains(z.out, "antisymmetric=false"));
}

TEST_CASE("thread flag and environment control are accepted") {
  TempDir dir;
  std::string q = dir.file("qp2.q");
  REQUIRE(run("gen --family qparity --n 2 --out " + q).code == 0);
  RunResult r = run("--threads 4 enum-countermodels --formula " + q);
  CHECK(r.code == 0);
  CHECK(contains(r.out, "countermodels=1"));
}
