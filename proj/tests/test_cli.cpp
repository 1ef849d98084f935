// End-to-end driver tests: subcommands, exit codes, JSON/text parity, the
// corpus summary table, and solver resolution.  Every case invokes the real
// executable as a subprocess.

#include <catch2/catch_amalgamated.hpp>

#include <json.hpp>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <regex>
#include <string>

#include <invforge/report.hpp>
#include <invforge/typecheck.hpp>
#include <invforge/weakening.hpp>

#include "support/util.hpp"

using namespace invforge;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const std::string kCli = INVFORGE_CLI_PATH;
const std::string kSolver = INVFORGE_DEFAULT_SOLVER;

struct RunResult {
  int code = -1;
  std::string out;
  std::string err;
};

fs::path fresh_dir(const std::string& hint) {
  static int counter = 0;
  fs::path dir = fs::temp_directory_path() /
                 ("invforge-cli-" + hint + "-" + std::to_string(::getpid()) + "-" +
                  std::to_string(counter++));
  fs::create_directories(dir);
  return dir;
}

// Runs the CLI through the shell; `prefix` can set or unset environment
// variables, `cwd` changes the working directory first.
RunResult run_cli(const std::string& args, const std::string& prefix = "",
                  const std::string& cwd = "") {
  fs::path dir = fresh_dir("io");
  fs::path out_file = dir / "out", err_file = dir / "err";
  std::string cmd;
  if (!cwd.empty()) cmd += "cd " + cwd + " && ";
  if (!prefix.empty()) cmd += prefix + " ";
  cmd += kCli + " " + args + " >" + out_file.string() + " 2>" + err_file.string();
  int status = std::system(cmd.c_str());
  RunResult r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = testutil::read_file(out_file);
  r.err = testutil::read_file(err_file);
  return r;
}

std::string corpus_file(const std::string& name) {
  return (testutil::corpus_dir() / name).string();
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

// Timing fields differ between runs; blank them before comparing.
std::string blank_walls(std::string text) {
  text = std::regex_replace(text, std::regex(R"(wall: [0-9.]+s)"), "wall: _s");
  return std::regex_replace(text, std::regex(R"("wall_seconds": [0-9.e+-]+)"),
                            "\"wall_seconds\": 0");
}

json zero_walls(json j) {
  if (j.is_object()) {
    for (auto& [key, value] : j.items())
      value = key == "wall_seconds" ? json(0) : zero_walls(value);
  } else if (j.is_array()) {
    for (auto& value : j) value = zero_walls(value);
  }
  return j;
}

// A loop that never establishes what the postcondition claims about A[1];
// every weakened candidate fails initiation, so inference verifies nothing.
const char* kStompSource =
    "var A: array int;\n"
    "\n"
    "procedure stomp(n: int)\n"
    "  modifies A;\n"
    "  ensures A[1] = 5;\n"
    "{\n"
    "  var i: int;\n"
    "  i := 1;\n"
    "  while (i <= n) {\n"
    "    A := store(A, i, 0);\n"
    "    i := i + 1;\n"
    "  }\n"
    "}\n";

}  // namespace

TEST_CASE("parse: pretty-prints and round-trips") {
  RunResult r = run_cli("parse " + corpus_file("max_v1.ivl"));
  CHECK(r.code == 0);
  CHECK(r.err.empty());
  // The printed text re-parses to the same rendering.
  Program reparsed = parse_program(r.out, "cli-output");
  CHECK(print_program(reparsed) == r.out);

  RunResult missing = run_cli("parse /does/not/exist.ivl");
  CHECK(missing.code == 2);
  CHECK(missing.err.find("cannot read") != std::string::npos);
}

TEST_CASE("usage errors exit 2, --help exits 0") {
  CHECK(run_cli("").code == 2);
  CHECK(run_cli("bogus-subcommand").code == 2);
  CHECK(run_cli("infer").code == 2);                      // missing file argument
  CHECK(run_cli("infer x.ivl --level 9").code == 2);      // out of range
  CHECK(run_cli("infer x.ivl --format yaml").code == 2);  // not a member
  RunResult help = run_cli("--help");
  CHECK(help.code == 0);
  CHECK(help.out.find("infer") != std::string::npos);
}

TEST_CASE("language errors report file and line, exit 2") {
  fs::path dir = fresh_dir("bad");
  write_file(dir / "broken.ivl", "procedure p() returns (x: int) {\n  x := ;\n}\n");
  RunResult r = run_cli("infer " + (dir / "broken.ivl").string() + " --solver " + kSolver);
  CHECK(r.code == 2);
  CHECK(r.err.find("broken.ivl:2") != std::string::npos);

  write_file(dir / "untyped.ivl",
             "procedure p() returns (x: int)\n  ensures x && 1;\n{\n  x := 0;\n}\n");
  RunResult t = run_cli("infer " + (dir / "untyped.ivl").string() + " --solver " + kSolver);
  CHECK(t.code == 2);
  CHECK(t.err.find("untyped.ivl:2") != std::string::npos);

  RunResult p = run_cli("infer " + corpus_file("max_v1.ivl") +
                        " --procedure nonesuch --solver " + kSolver);
  CHECK(p.code == 2);
  CHECK(p.err.find("nonesuch") != std::string::npos);
}

TEST_CASE("solver resolution: flag beats environment, absence is operational") {
  // No flag, no environment: exit 3 before any solving.
  RunResult none = run_cli("infer " + corpus_file("flip.ivl"), "env -u INVFORGE_SOLVER");
  CHECK(none.code == 3);
  CHECK(none.err.find("INVFORGE_SOLVER") != std::string::npos);

  // Environment alone suffices.
  RunResult env = run_cli("infer " + corpus_file("flip.ivl") + " --level 0",
                          "INVFORGE_SOLVER=" + kSolver);
  CHECK(env.code == 0);

  // The flag wins over a broken environment value.
  RunResult flag = run_cli(
      "infer " + corpus_file("flip.ivl") + " --level 0 --solver " + kSolver,
      "INVFORGE_SOLVER=/nonexistent/solver");
  CHECK(flag.code == 0);
}

TEST_CASE("a misbehaving solver is an operational error: exit 3") {
  const std::string garbage = (testutil::fixtures_dir() / "mock-garbage.sh").string();
  RunResult r = run_cli("infer " + corpus_file("flip.ivl") + " --level 0 --solver " + garbage);
  CHECK(r.code == 3);

  const std::string unlaunchable = "/nonexistent/solver-binary";
  RunResult l = run_cli("infer " + corpus_file("flip.ivl") + " --level 0 --solver " +
                        unlaunchable);
  CHECK(l.code == 3);
}

TEST_CASE("infer: verified invariants reach the text report, exit 0") {
  RunResult r = run_cli("infer " + corpus_file("max_v1.ivl") +
                        " --procedure max --level 1 --solver " + kSolver);
  CHECK(r.code == 0);
  CHECK(r.out.find("forall j: int :: 1 <= j && j <= i ==> A[j] <= Result") !=
        std::string::npos);
  CHECK(r.out.find("constant-relaxation(n -> i)") != std::string::npos);
}

TEST_CASE("infer: nothing verified means exit 1") {
  fs::path dir = fresh_dir("stomp");
  write_file(dir / "stomp.ivl", kStompSource);
  RunResult r = run_cli("infer " + (dir / "stomp.ivl").string() + " --solver " + kSolver);
  CHECK(r.code == 1);
  CHECK(r.out.find("verified: 0") != std::string::npos);
}

TEST_CASE("json and text reports carry identical data") {
  const std::string args =
      "infer " + corpus_file("max_v1.ivl") + " --level 1 --solver " + kSolver;
  RunResult as_json = run_cli(args + " --format json");
  RunResult as_text = run_cli(args + " --format text");
  REQUIRE(as_json.code == 0);
  REQUIRE(as_text.code == 0);

  json reports = json::parse(as_json.out);
  REQUIRE(reports.is_array());
  REQUIRE(reports.size() == 1);
  // The text renderer is a pure function of the JSON object; re-rendering
  // the JSON must reproduce the text output up to timing.
  CHECK(blank_walls(render_report_text(reports[0]) + "\n") == blank_walls(as_text.out));

  const json& rep = reports[0];
  CHECK(rep.at("procedure") == "max");
  CHECK(rep.at("candidate_count").get<size_t>() == 7);
  CHECK(rep.at("level").at("relaxation") == true);
  CHECK(rep.at("level").at("aging") == false);
  CHECK(rep.at("verified").size() == 2);
  CHECK(rep.at("candidates").size() == 7);
}

TEST_CASE("dump-candidates needs no solver and matches the library") {
  RunResult r = run_cli("infer " + corpus_file("partition.ivl") + " --dump-candidates",
                        "env -u INVFORGE_SOLVER");
  REQUIRE(r.code == 0);
  json dump = json::parse(r.out);
  REQUIRE(dump.is_array());
  REQUIRE(dump.size() == 1);
  CHECK(dump[0].at("procedure") == "partition");

  Program prog = testutil::load_corpus("partition.ivl");
  std::vector<Candidate> expected =
      generate_candidates(prog, prog.procedures[0], HeuristicLevel::defaults());
  const json& cands = dump[0].at("candidates");
  REQUIRE(cands.size() == expected.size());
  for (size_t i = 0; i < expected.size(); ++i)
    CHECK(cands[i].at("formula").get<std::string>() == print_expr(expected[i].formula));
}

TEST_CASE("keep-scripts leaves the emitted SMT files behind") {
  fs::path dir = fresh_dir("scripts");
  RunResult r = run_cli("infer " + corpus_file("flip.ivl") + " --level 0 --keep-scripts" +
                            " --solver " + kSolver,
                        "", dir.string());
  CHECK(r.code == 0);
  fs::path scripts = dir / "invforge-scripts";
  REQUIRE(fs::is_directory(scripts));
  size_t smt2 = 0;
  for (const fs::directory_entry& e : fs::directory_iterator(scripts))
    smt2 += e.path().extension() == ".smt2";
  CHECK(smt2 >= 2);  // at least initiation + consecution of the surviving pass
}

TEST_CASE("check-declared reports inductiveness of annotated loops") {
  RunResult r = run_cli("infer " + corpus_file("sum.ivl") +
                        " --level 0 --check-declared --solver " + kSolver);
  CHECK(r.out.find("declared invariants:") != std::string::npos);
  CHECK(r.out.find("inductive sum") != std::string::npos);
  CHECK(r.out.find("NOT inductive") == std::string::npos);

  RunResult j = run_cli("infer " + corpus_file("sum.ivl") +
                        " --level 0 --check-declared --format json --solver " + kSolver);
  json reports = json::parse(j.out);
  REQUIRE(reports[0].contains("declared"));
  for (const json& d : reports[0].at("declared")) CHECK(d.at("ok") == true);
}

TEST_CASE("corpus: summary rows for max v1 and v2, both verified") {
  fs::path dir = fresh_dir("maxes");
  fs::copy_file(corpus_file("max_v1.ivl"), dir / "max_v1.ivl");
  fs::copy_file(corpus_file("max_v2.ivl"), dir / "max_v2.ivl");

  RunResult r = run_cli("corpus " + dir.string() + " --format json --solver " + kSolver);
  CHECK(r.code == 0);
  json rows = json::parse(r.out);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].at("file") == "max_v1.ivl");
  CHECK(rows[1].at("file") == "max_v2.ivl");
  for (const json& row : rows) {
    CHECK(row.at("procedure") == "max");
    CHECK(row.at("loops") == 1);
    CHECK(row.at("max_nesting") == 1);
    CHECK(row.at("modified_scalars") == 2);  // the cursor and the running max
    CHECK(row.at("modified_maps") == 0);
    CHECK(row.at("verified").get<int>() >= 1);
    CHECK(row.at("loc_file").get<int>() > row.at("loc_procedure").get<int>());
  }

  // The text table carries the same cells the JSON rows do.
  RunResult t = run_cli("corpus " + dir.string() + " --format text --solver " + kSolver);
  CHECK(t.code == 0);
  for (const char* header : {"file", "procedure", "LOC", "#lp.", "m.v.", "cnd.", "inv.",
                             "unk.", "T.[s]"})
    CHECK(t.out.find(header) != std::string::npos);
  for (const json& row : rows) {
    CHECK(t.out.find(row.at("file").get<std::string>()) != std::string::npos);
    const std::string loc_cell = std::to_string(row.at("loc_file").get<int>()) + " (" +
                                 std::to_string(row.at("loc_procedure").get<int>()) + ")";
    const std::string lp_cell = std::to_string(row.at("loops").get<int>()) + " (" +
                                std::to_string(row.at("max_nesting").get<int>()) + ")";
    const std::string mv_cell = std::to_string(row.at("modified_scalars").get<int>()) +
                                "/" + std::to_string(row.at("modified_maps").get<int>());
    CHECK(t.out.find(loc_cell) != std::string::npos);
    CHECK(t.out.find(lp_cell) != std::string::npos);
    CHECK(t.out.find(mv_cell) != std::string::npos);
  }
}

TEST_CASE("corpus: empty directory yields an empty table and exit 0") {
  fs::path dir = fresh_dir("empty");
  RunResult r = run_cli("corpus " + dir.string() + " --format json", "env -u INVFORGE_SOLVER");
  CHECK(r.code == 0);
  CHECK(json::parse(r.out) == json::array());

  RunResult t = run_cli("corpus " + dir.string(), "env -u INVFORGE_SOLVER");
  CHECK(t.code == 0);

  RunResult missing = run_cli("corpus /does/not/exist");
  CHECK(missing.code == 2);
}

TEST_CASE("corpus: a broken file is reported in its row, the run continues") {
  fs::path dir = fresh_dir("mixed");
  fs::copy_file(corpus_file("flip.ivl"), dir / "a_flip.ivl");
  write_file(dir / "b_broken.ivl", "procedure p( {\n");

  RunResult r = run_cli("corpus " + dir.string() + " --format json --solver " + kSolver);
  CHECK(r.code == 1);  // the broken file yielded nothing
  json rows = json::parse(r.out);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].at("file") == "a_flip.ivl");
  CHECK(rows[0].at("verified").get<int>() >= 1);
  CHECK_FALSE(rows[0].contains("error"));
  CHECK(rows[1].at("file") == "b_broken.ivl");
  CHECK(rows[1].contains("error"));

  RunResult t = run_cli("corpus " + dir.string() + " --solver " + kSolver);
  CHECK(t.out.find("b_broken.ivl") != std::string::npos);
  CHECK(t.out.find("-") != std::string::npos);
}

TEST_CASE("corpus: square_root yields no invariant but visible unknowns") {
  fs::path dir = fresh_dir("sqrt");
  fs::copy_file(corpus_file("square_root.ivl"), dir / "square_root.ivl");
  RunResult r = run_cli("corpus " + dir.string() + " --timeout 2 --format json --solver " +
                        kSolver);
  CHECK(r.code == 1);
  json rows = json::parse(r.out);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].at("verified") == 0);
  CHECK(rows[0].at("unknown").get<int>() > 0);
}

TEST_CASE("corpus runs are deterministic modulo timing") {
  fs::path dir = fresh_dir("det");
  fs::copy_file(corpus_file("max_v1.ivl"), dir / "max_v1.ivl");
  fs::copy_file(corpus_file("flip.ivl"), dir / "flip.ivl");
  const std::string args =
      "corpus " + dir.string() + " --level 1 --format json --solver " + kSolver;
  json first = zero_walls(json::parse(run_cli(args).out));
  json second = zero_walls(json::parse(run_cli(args).out));
  CHECK(first == second);
}

TEST_CASE("corpus row geometry matches the source files") {
  Program prog = testutil::load_corpus("max_v1.ivl");
  CHECK(procedure_loc(prog.procedures[0]) == 14);

  Program nested = testutil::load_corpus("partition.ivl");
  InferenceReport empty_rep;
  CorpusRow row = make_corpus_row("partition.ivl", 40, nested, nested.procedures[0],
                                  empty_rep);
  CHECK(row.loops == 3);
  CHECK(row.max_nesting == 2);
  CHECK(row.modified_scalars >= 2);
  CHECK(row.modified_maps == 1);
}
