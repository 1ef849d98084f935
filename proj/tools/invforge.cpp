// invforge — loop invariant inference by postcondition weakening.
//
// Subcommands:
//   infer <file>   run the inference pipeline on one source file
//   corpus <dir>   run over every .ivl file in a directory, print a summary
//   parse <file>   parse, pretty-print, and round-trip-check one file
//
// Exit codes: 0 every requested procedure got at least one verified
// invariant; 1 ran cleanly but some procedure got none; 2 usage, file, or
// language error; 3 operational error (solver missing, unlaunchable, or
// misbehaving).

#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <invforge/invforge.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Options {
  std::string path;
  std::string procedure;
  int level = 3;
  std::optional<bool> relaxation, aging, uncoupling, conjunct_split, double_uncoupling;
  std::string solver;
  double timeout_s = 10.0;
  int jobs = 1;
  std::string format = "text";
  bool dump_candidates = false;
  bool keep_scripts = false;
  bool assume_verified = false;
  bool check_declared_flag = false;
};

invforge::HeuristicLevel resolve_level(const Options& o) {
  invforge::HeuristicLevel h = invforge::HeuristicLevel::from_level(o.level);
  if (o.relaxation) h.relaxation = *o.relaxation;
  if (o.aging) h.aging = *o.aging;
  if (o.uncoupling) h.uncoupling = *o.uncoupling;
  if (o.conjunct_split) h.conjunct_split = *o.conjunct_split;
  if (o.double_uncoupling) h.double_uncoupling = *o.double_uncoupling;
  return h;
}

// Solver resolution: flag wins, then the environment, then a hard error.
int resolve_solver(const Options& o, std::string* out) {
  if (!o.solver.empty()) {
    *out = o.solver;
    return 0;
  }
  if (const char* env = std::getenv("INVFORGE_SOLVER"); env && *env) {
    *out = env;
    return 0;
  }
  std::cerr << "invforge: no solver configured; pass --solver or set INVFORGE_SOLVER\n";
  return 3;
}

invforge::VerifyOptions verify_options(const Options& o, const std::string& solver) {
  invforge::VerifyOptions v;
  v.solver_path = solver;
  v.budget = std::chrono::milliseconds(static_cast<long long>(o.timeout_s * 1000.0));
  v.jobs = o.jobs;
  v.assume_verified = o.assume_verified;
  if (o.keep_scripts) v.keep_scripts_dir = "invforge-scripts";
  return v;
}

bool read_file(const std::string& path, std::string* out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;
  std::ostringstream ss;
  ss << in.rdbuf();
  *out = ss.str();
  return true;
}

int count_lines(const std::string& text) {
  int lines = static_cast<int>(std::count(text.begin(), text.end(), '\n'));
  if (!text.empty() && text.back() != '\n') ++lines;
  return lines;
}

// Procedures eligible for inference: those with a body.
std::vector<const invforge::ProcedureDecl*> select_procedures(
    const invforge::Program& prog, const std::string& filter, std::string* err) {
  std::vector<const invforge::ProcedureDecl*> out;
  if (!filter.empty()) {
    const invforge::ProcedureDecl* p = prog.procedure(filter);
    if (!p) {
      *err = "no procedure named '" + filter + "'";
      return out;
    }
    if (!p->has_body) {
      *err = "procedure '" + filter + "' has no body to analyze";
      return out;
    }
    out.push_back(p);
    return out;
  }
  for (const invforge::ProcedureDecl& p : prog.procedures)
    if (p.has_body) out.push_back(&p);
  return out;
}

int exit_code_from(const std::vector<invforge::InferenceReport>& reports) {
  bool all_verified = true;
  for (const invforge::InferenceReport& rep : reports) {
    if (rep.with_status(invforge::CandidateStatus::Error).size() > 0) return 3;
    all_verified =
        all_verified && !rep.with_status(invforge::CandidateStatus::Verified).empty();
  }
  return all_verified ? 0 : 1;
}

int run_infer(const Options& o) {
  std::string src;
  if (!read_file(o.path, &src)) {
    std::cerr << "invforge: cannot read " << o.path << "\n";
    return 2;
  }
  invforge::Program prog;
  try {
    prog = invforge::load_program(src, o.path);
  } catch (const invforge::Error& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }
  std::string err;
  std::vector<const invforge::ProcedureDecl*> procs =
      select_procedures(prog, o.procedure, &err);
  if (!err.empty()) {
    std::cerr << "invforge: " << o.path << ": " << err << "\n";
    return 2;
  }
  invforge::HeuristicLevel level = resolve_level(o);

  if (o.dump_candidates) {
    json dump = json::array();
    for (const invforge::ProcedureDecl* p : procs)
      dump.push_back({{"file", o.path},
                      {"procedure", p->name},
                      {"candidates", invforge::candidates_json(
                                         invforge::generate_candidates(prog, *p, level))}});
    std::cout << dump.dump(2) << "\n";
    return 0;
  }

  std::string solver;
  if (int rc = resolve_solver(o, &solver); rc != 0) return rc;
  invforge::VerifyOptions vopts = verify_options(o, solver);
  invforge::VerdictCache cache;

  std::vector<invforge::InferenceReport> reports;
  json out = json::array();
  for (const invforge::ProcedureDecl* p : procs) {
    invforge::InferenceReport rep;
    try {
      rep = invforge::infer(prog, *p, level, vopts, &cache, o.path);
    } catch (const invforge::SolverError& e) {
      std::cerr << e.what() << "\n";
      return 3;
    }
    json jrep = invforge::report_json(rep);
    if (o.check_declared_flag) {
      try {
        invforge::Solver s(solver, vopts.budget, &cache);
        jrep["declared"] = invforge::declared_checks_json(invforge::check_declared(prog, *p, s));
      } catch (const invforge::SolverError& e) {
        std::cerr << e.what() << "\n";
        return 3;
      }
    }
    if (o.format == "text") {
      std::cout << invforge::render_report_text(jrep);
      if (o.check_declared_flag)
        std::cout << "\n" << invforge::render_declared_text(jrep["declared"]);
      std::cout << "\n";
    }
    out.push_back(std::move(jrep));
    reports.push_back(std::move(rep));
  }
  if (o.format == "json") std::cout << out.dump(2) << "\n";
  if (o.keep_scripts)
    std::cerr << "invforge: solver scripts kept under invforge-scripts/\n";
  return exit_code_from(reports);
}

int run_corpus(const Options& o) {
  if (!fs::is_directory(o.path)) {
    std::cerr << "invforge: not a directory: " << o.path << "\n";
    return 2;
  }
  std::vector<fs::path> files;
  for (const fs::directory_entry& e : fs::directory_iterator(o.path))
    if (e.is_regular_file() && e.path().extension() == ".ivl") files.push_back(e.path());
  std::sort(files.begin(), files.end());

  std::string solver;
  if (!files.empty())
    if (int rc = resolve_solver(o, &solver); rc != 0) return rc;
  invforge::HeuristicLevel level = resolve_level(o);
  invforge::VerifyOptions vopts = verify_options(o, solver);
  invforge::VerdictCache cache;

  std::vector<invforge::CorpusRow> rows;
  bool operational = false;
  for (const fs::path& f : files) {
    const std::string base = f.filename().string();
    std::string src;
    if (!read_file(f.string(), &src)) {
      invforge::CorpusRow row;
      row.file = base;
      row.error = "cannot read file";
      rows.push_back(std::move(row));
      continue;
    }
    invforge::Program prog;
    try {
      prog = invforge::load_program(src, f.string());
    } catch (const invforge::Error& e) {
      invforge::CorpusRow row;
      row.file = base;
      row.error = e.what();
      rows.push_back(std::move(row));
      continue;
    }
    for (const invforge::ProcedureDecl& p : prog.procedures) {
      if (!p.has_body) continue;
      invforge::CorpusRow row;
      try {
        invforge::InferenceReport rep =
            invforge::infer(prog, p, level, vopts, &cache, f.string());
        operational =
            operational || !rep.with_status(invforge::CandidateStatus::Error).empty();
        row = invforge::make_corpus_row(base, count_lines(src), prog, p, rep);
      } catch (const invforge::SolverError& e) {
        row.file = base;
        row.procedure = p.name;
        row.error = e.what();
        operational = true;
      }
      rows.push_back(std::move(row));
    }
  }

  json table = invforge::corpus_json(rows);
  if (o.format == "json")
    std::cout << table.dump(2) << "\n";
  else
    std::cout << invforge::render_corpus_text(table);
  if (operational) return 3;
  for (const invforge::CorpusRow& r : rows)
    if (!r.error.empty() || r.verified == 0) return 1;
  return 0;
}

int run_parse(const Options& o) {
  std::string src;
  if (!read_file(o.path, &src)) {
    std::cerr << "invforge: cannot read " << o.path << "\n";
    return 2;
  }
  try {
    invforge::Program first = invforge::parse_program(src, o.path);
    std::string printed = invforge::print_program(first);
    invforge::Program second = invforge::parse_program(printed, o.path + "#printed");
    if (invforge::print_program(second) != printed) {
      std::cerr << "invforge: round-trip mismatch in " << o.path << "\n";
      return 1;
    }
    std::cout << printed;
    return 0;
  } catch (const invforge::Error& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }
}

void add_heuristic_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--level", o.level, "Heuristic level 0..4 (default 3)")
      ->check(CLI::Range(0, 4));
  auto toggle = [cmd](const char* on, const char* off, std::optional<bool>& slot,
                      const char* what) {
    cmd->add_flag_callback(on, [&slot] { slot = true; }, std::string("Enable ") + what);
    cmd->add_flag_callback(off, [&slot] { slot = false; }, std::string("Disable ") + what);
  };
  toggle("--relaxation", "--no-relaxation", o.relaxation, "constant relaxation");
  toggle("--aging", "--no-aging", o.aging, "variable aging");
  toggle("--uncoupling", "--no-uncoupling", o.uncoupling, "per-occurrence uncoupling");
  toggle("--conjunct-split", "--no-conjunct-split", o.conjunct_split, "term dropping");
  toggle("--double-uncoupling", "--no-double-uncoupling", o.double_uncoupling,
         "double uncoupling");
}

void add_solver_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--solver", o.solver,
                  "SMT solver executable (fallback: $INVFORGE_SOLVER)");
  cmd->add_option("--timeout", o.timeout_s, "Per-VC solver budget in seconds (default 10)")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--jobs", o.jobs, "Parallel candidate checks (default 1)")
      ->check(CLI::Range(1, 256));
  cmd->add_option("--format", o.format, "Output format")
      ->check(CLI::IsMember({"text", "json"}));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"loop invariant inference by postcondition weakening"};
  app.require_subcommand(1);
  Options infer_o, corpus_o, parse_o;

  CLI::App* infer_cmd = app.add_subcommand("infer", "Infer invariants for one file");
  infer_cmd->add_option("file", infer_o.path, "Source file (.ivl)")->required();
  infer_cmd->add_option("--procedure", infer_o.procedure, "Analyze only this procedure");
  add_heuristic_flags(infer_cmd, infer_o);
  add_solver_flags(infer_cmd, infer_o);
  infer_cmd->add_flag("--dump-candidates", infer_o.dump_candidates,
                      "Print the ordered candidate list as JSON and exit");
  infer_cmd->add_flag("--keep-scripts", infer_o.keep_scripts,
                      "Keep emitted SMT scripts under invforge-scripts/");
  infer_cmd->add_flag("--assume-verified", infer_o.assume_verified,
                      "Re-check failed candidates assuming the verified ones");
  infer_cmd->add_flag("--check-declared", infer_o.check_declared_flag,
                      "Also check declared loop invariants for inductiveness");

  CLI::App* corpus_cmd =
      app.add_subcommand("corpus", "Summarize inference over a directory of .ivl files");
  corpus_cmd->add_option("dir", corpus_o.path, "Directory with .ivl files")->required();
  add_heuristic_flags(corpus_cmd, corpus_o);
  add_solver_flags(corpus_cmd, corpus_o);
  corpus_cmd->add_flag("--assume-verified", corpus_o.assume_verified,
                       "Re-check failed candidates assuming the verified ones");
  corpus_cmd->add_flag("--keep-scripts", corpus_o.keep_scripts,
                       "Keep emitted SMT scripts under invforge-scripts/");

  CLI::App* parse_cmd =
      app.add_subcommand("parse", "Parse one file, pretty-print it, check the round trip");
  parse_cmd->add_option("file", parse_o.path, "Source file (.ivl)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;  // --help and friends exit 0, usage errors exit 2
  }

  try {
    if (infer_cmd->parsed()) return run_infer(infer_o);
    if (corpus_cmd->parsed()) return run_corpus(corpus_o);
    return run_parse(parse_o);
  } catch (const invforge::SolverError& e) {
    std::cerr << e.what() << "\n";
    return 3;
  } catch (const invforge::Error& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "invforge: " << e.what() << "\n";
    return 3;
  }
}
