#ifndef INVFORGE_REPORT_HPP
#define INVFORGE_REPORT_HPP

// Result rendering: JSON objects for machine consumption and aligned text
// for the console.  The text renderers take the JSON as input, so the two
// formats carry identical data by construction.  Field names are stable and
// documented in docs/report-schema.md.

#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <string>
#include <vector>

#include <invforge/analysis.hpp>
#include <invforge/ast.hpp>
#include <invforge/printer.hpp>
#include <invforge/verifier.hpp>
#include <invforge/weakening.hpp>

namespace invforge {

// Lines spanned by the declaration, annotations included.
inline int procedure_loc(const ProcedureDecl& proc) {
  if (proc.end.line <= 0) return 1;
  return proc.end.line - proc.pos.line + 1;
}

inline nlohmann::json level_json(const HeuristicLevel& h) {
  return {{"relaxation", h.relaxation},
          {"aging", h.aging},
          {"uncoupling", h.uncoupling},
          {"conjunct_split", h.conjunct_split},
          {"double_uncoupling", h.double_uncoupling}};
}

inline nlohmann::json trace_step_json(const TraceStep& s) {
  if (s.kind == TraceStep::Kind::Split)
    return {{"heuristic", "term-dropping"}, {"conjunct", s.conjunct}};
  nlohmann::json j{{"heuristic", s.occurrence == 0 ? "constant-relaxation" : "uncoupling"},
                   {"constant", print_expr(s.constant)},
                   {"rank", s.constant_rank},
                   {"variable", s.variable},
                   {"replacement", print_expr(s.replacement)},
                   {"aged", s.aged}};
  if (s.occurrence != 0) j["occurrence"] = s.occurrence;
  return j;
}

inline nlohmann::json candidate_json(const Candidate& c) {
  nlohmann::json trace = nlohmann::json::array();
  for (const TraceStep& s : c.trace) trace.push_back(trace_step_json(s));
  return {{"formula", print_expr(c.formula)},
          {"ensures", c.ensures_index},
          {"loop", c.source_loop},
          {"trace", std::move(trace)}};
}

// The ordered candidate list with derivation traces (--dump-candidates).
inline nlohmann::json candidates_json(const std::vector<Candidate>& cands) {
  nlohmann::json arr = nlohmann::json::array();
  for (const Candidate& c : cands) arr.push_back(candidate_json(c));
  return arr;
}

inline nlohmann::json vc_result_json(const VcResult& r) {
  return {{"loop", r.vc.loop_id},
          {"obligation", r.vc.obligation},
          {"verdict", verdict_name(r.verdict.kind)},
          {"detail", r.verdict.detail}};
}

inline nlohmann::json candidate_result_json(const CandidateResult& r) {
  nlohmann::json j = candidate_json(r.candidate);
  j["status"] = status_name(r.status);
  j["surviving"] = r.surviving;
  j["wall_seconds"] = r.wall_seconds;
  j["assumed_support"] = r.assumed_support;
  if (!r.diagnostic.empty()) j["diagnostic"] = r.diagnostic;
  nlohmann::json rounds = nlohmann::json::array();
  for (const FixpointRound& fr : r.rounds) {
    nlohmann::json checks = nlohmann::json::array();
    for (const VcResult& c : fr.checks) checks.push_back(vc_result_json(c));
    rounds.push_back({{"instances", fr.instances},
                      {"removed", fr.removed},
                      {"checks", std::move(checks)}});
  }
  j["rounds"] = std::move(rounds);
  return j;
}

inline nlohmann::json report_json(const InferenceReport& rep) {
  nlohmann::json results = nlohmann::json::array();
  nlohmann::json verified = nlohmann::json::array();
  nlohmann::json unknown = nlohmann::json::array();
  for (const CandidateResult& r : rep.candidates) {
    results.push_back(candidate_result_json(r));
    if (r.status == CandidateStatus::Verified)
      verified.push_back(print_expr(r.candidate.formula));
    if (r.status == CandidateStatus::Unknown)
      unknown.push_back(print_expr(r.candidate.formula));
  }
  return {{"file", rep.file},
          {"procedure", rep.procedure},
          {"level", level_json(rep.level)},
          {"candidate_count", rep.candidate_count},
          {"wall_seconds", rep.wall_seconds},
          {"verified", std::move(verified)},
          {"unknown", std::move(unknown)},
          {"candidates", std::move(results)}};
}

inline nlohmann::json declared_checks_json(const std::vector<DeclaredCheck>& checks) {
  nlohmann::json arr = nlohmann::json::array();
  for (const DeclaredCheck& d : checks) {
    nlohmann::json vcs = nlohmann::json::array();
    for (const VcResult& c : d.checks) vcs.push_back(vc_result_json(c));
    arr.push_back({{"loop", d.loop_id},
                   {"formula", print_expr(d.formula)},
                   {"ok", d.ok},
                   {"checks", std::move(vcs)}});
  }
  return arr;
}

namespace detail {

inline std::string seconds_text(double s) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", s);
  return buf;
}

inline std::string trace_step_text(const nlohmann::json& s) {
  const std::string heuristic = s.at("heuristic");
  if (heuristic == "term-dropping")
    return heuristic + "(conjunct " + std::to_string(s.at("conjunct").get<int>()) + ")";
  std::string out = heuristic + "(" + s.at("constant").get<std::string>() + " -> " +
                    s.at("replacement").get<std::string>();
  if (s.contains("occurrence"))
    out += " @" + std::to_string(s.at("occurrence").get<int>());
  return out + ")";
}

inline std::string trace_text(const nlohmann::json& steps) {
  if (steps.empty()) return "unchanged postcondition";
  std::string out;
  for (const nlohmann::json& s : steps) {
    if (!out.empty()) out += "; ";
    out += trace_step_text(s);
  }
  return out;
}

inline std::string level_text(const nlohmann::json& level) {
  std::string out;
  for (const char* flag : {"relaxation", "aging", "uncoupling", "conjunct_split",
                           "double_uncoupling"}) {
    if (!level.at(flag).get<bool>()) continue;
    if (!out.empty()) out += ' ';
    out += flag;
  }
  return out.empty() ? "none" : out;
}

inline void append_group(const nlohmann::json& rep, const std::string& status,
                         const char* heading, bool with_surviving, std::string& out) {
  std::vector<const nlohmann::json*> group;
  for (const nlohmann::json& c : rep.at("candidates"))
    if (c.at("status") == status) group.push_back(&c);
  if (group.empty()) return;
  out += heading;
  out += ":\n";
  for (const nlohmann::json* c : group) {
    out += "  " + c->at("formula").get<std::string>() + "\n";
    out += "      via " + trace_text(c->at("trace"));
    if (with_surviving) {
      out += "; holds at";
      for (const nlohmann::json& l : c->at("surviving"))
        out += " " + l.get<std::string>();
      if (c->at("assumed_support").get<bool>()) out += " (with verified support)";
    }
    if (c->contains("diagnostic"))
      out += "; " + c->at("diagnostic").get<std::string>();
    out += "\n";
  }
}

}  // namespace detail

inline std::string render_report_text(const nlohmann::json& rep) {
  std::string out = rep.at("file").get<std::string>() + " :: " +
                    rep.at("procedure").get<std::string>() + "\n";
  out += "heuristics: " + detail::level_text(rep.at("level")) + "\n";
  size_t rejected = 0, discarded = 0, errors = 0;
  for (const nlohmann::json& c : rep.at("candidates")) {
    const std::string s = c.at("status");
    rejected += s == "rejected";
    discarded += s == "discarded";
    errors += s == "error";
  }
  out += "candidates: " + std::to_string(rep.at("candidate_count").get<size_t>()) +
         "   verified: " + std::to_string(rep.at("verified").size()) +
         "   unknown: " + std::to_string(rep.at("unknown").size()) +
         "   rejected: " + std::to_string(rejected) +
         "   wall: " + detail::seconds_text(rep.at("wall_seconds").get<double>()) +
         "s\n";
  detail::append_group(rep, "verified", "\nverified invariants", true, out);
  detail::append_group(rep, "unknown", "\nunknown (solver gave up)", false, out);
  if (discarded > 0) detail::append_group(rep, "discarded", "\ndiscarded", false, out);
  if (errors > 0) detail::append_group(rep, "error", "\noperational errors", false, out);
  return out;
}

inline std::string render_declared_text(const nlohmann::json& checks) {
  std::string out = "declared invariants:\n";
  if (checks.empty()) return out + "  (none)\n";
  for (const nlohmann::json& d : checks) {
    out += std::string("  ") + (d.at("ok").get<bool>() ? "inductive " : "NOT inductive ") +
           d.at("loop").get<std::string>() + ": " + d.at("formula").get<std::string>() +
           "\n";
    for (const nlohmann::json& c : d.at("checks")) {
      if (c.at("verdict") == "valid") continue;
      out += "      " + c.at("obligation").get<std::string>() + " at " +
             c.at("loop").get<std::string>() + ": " +
             c.at("verdict").get<std::string>() + "\n";
    }
  }
  return out;
}

// ------------------------------------------------------------------ corpus

// One summary line per procedure, mirroring the classic benchmark-table
// columns: LOC of the file (and of the procedure alone), loop count (and
// deepest nesting), modified variables split scalar/map, candidate and
// verified counts, wall-clock seconds.  Unknown verdicts get their own
// column so near-misses are visible without opening the full report.
struct CorpusRow {
  std::string file;  // basename
  std::string procedure;
  int loc_file = 0;
  int loc_proc = 0;
  int loops = 0;
  int max_nesting = 0;
  int modified_scalars = 0;
  int modified_maps = 0;
  size_t candidates = 0;
  size_t verified = 0;
  size_t unknown = 0;
  double wall_seconds = 0.0;
  std::string error;  // nonempty: the file failed and the counts are absent
};

inline CorpusRow make_corpus_row(const std::string& file_name, int loc_file,
                                 const Program& prog, const ProcedureDecl& proc,
                                 const InferenceReport& rep) {
  CorpusRow row;
  row.file = file_name;
  row.procedure = proc.name;
  row.loc_file = loc_file;
  row.loc_proc = procedure_loc(proc);
  std::vector<LoopInfo> loops = all_loops(prog, proc);
  row.loops = static_cast<int>(loops.size());
  std::map<std::string, Type> types = detail::scope_types(prog, proc);
  std::set<std::string> scalars, maps;
  for (const LoopInfo& l : loops) {
    row.max_nesting = std::max(row.max_nesting, l.depth + 1);
    for (const std::string& t : l.targets)
      (types.count(t) && types.at(t) == Type::Map ? maps : scalars).insert(t);
  }
  row.modified_scalars = static_cast<int>(scalars.size());
  row.modified_maps = static_cast<int>(maps.size());
  row.candidates = rep.candidate_count;
  row.verified = rep.with_status(CandidateStatus::Verified).size();
  row.unknown = rep.with_status(CandidateStatus::Unknown).size();
  row.wall_seconds = rep.wall_seconds;
  return row;
}

inline nlohmann::json corpus_row_json(const CorpusRow& r) {
  nlohmann::json j{{"file", r.file},
                   {"procedure", r.procedure},
                   {"loc_file", r.loc_file},
                   {"loc_procedure", r.loc_proc},
                   {"loops", r.loops},
                   {"max_nesting", r.max_nesting},
                   {"modified_scalars", r.modified_scalars},
                   {"modified_maps", r.modified_maps},
                   {"candidates", r.candidates},
                   {"verified", r.verified},
                   {"unknown", r.unknown},
                   {"wall_seconds", r.wall_seconds}};
  if (!r.error.empty()) j["error"] = r.error;
  return j;
}

inline nlohmann::json corpus_json(const std::vector<CorpusRow>& rows) {
  nlohmann::json arr = nlohmann::json::array();
  for (const CorpusRow& r : rows) arr.push_back(corpus_row_json(r));
  return arr;
}

inline std::string render_corpus_text(const nlohmann::json& rows) {
  std::vector<std::vector<std::string>> table;
  table.push_back({"file", "procedure", "LOC", "#lp.", "m.v.", "cnd.", "inv.", "unk.",
                   "T.[s]"});
  for (const nlohmann::json& r : rows) {
    std::vector<std::string> cells{r.at("file"), r.at("procedure")};
    if (r.contains("error")) {
      for (int i = 0; i < 7; ++i) cells.push_back("-");
    } else {
      cells.push_back(std::to_string(r.at("loc_file").get<int>()) + " (" +
                      std::to_string(r.at("loc_procedure").get<int>()) + ")");
      cells.push_back(std::to_string(r.at("loops").get<int>()) + " (" +
                      std::to_string(r.at("max_nesting").get<int>()) + ")");
      cells.push_back(std::to_string(r.at("modified_scalars").get<int>()) + "/" +
                      std::to_string(r.at("modified_maps").get<int>()));
      cells.push_back(std::to_string(r.at("candidates").get<size_t>()));
      cells.push_back(std::to_string(r.at("verified").get<size_t>()));
      cells.push_back(std::to_string(r.at("unknown").get<size_t>()));
      cells.push_back(detail::seconds_text(r.at("wall_seconds").get<double>()));
    }
    table.push_back(std::move(cells));
  }
  std::vector<size_t> width(table[0].size(), 0);
  for (const auto& cells : table)
    for (size_t i = 0; i < cells.size(); ++i) width[i] = std::max(width[i], cells[i].size());
  std::string out;
  for (size_t rix = 0; rix < table.size(); ++rix) {
    const auto& cells = table[rix];
    std::string line;
    for (size_t i = 0; i < cells.size(); ++i) {
      line += cells[i];
      if (i + 1 < cells.size()) line.append(width[i] - cells[i].size() + 2, ' ');
    }
    out += line + "\n";
    if (rix == 0) out.append(line.size(), '-'), out += "\n";
  }
  for (const nlohmann::json& r : rows)
    if (r.contains("error"))
      out += "\n" + r.at("file").get<std::string>() + ": " +
             r.at("error").get<std::string>() + "\n";
  return out;
}

}  // namespace invforge

#endif  // INVFORGE_REPORT_HPP
